"""Synthetic ill-posed spectral problem on (0, 1).

The forward map is diagonal in the orthonormal sine basis
``v_n(x) = sqrt(2) sin(n pi x)`` with singular values ``sigma_n = n**-p``.
Sources are drawn with Sobolev-type coefficient decay, data live either as
spectral coefficient vectors or as samples on a uniform midpoint grid, and
noise is injected in grid space at a prescribed relative level.

Conventions
-----------
* Coefficient vectors are 1d float64 arrays indexed by mode ``n = 1..N``
  (array index ``n - 1``). Batches stack samples along axis 0.
* Grid functions are 1d float64 arrays of samples at the midpoint nodes
  ``x_i = (i + 1/2) / M``; their resolution is their length.
* The grid norm is ``sqrt(mean(v**2))`` so norms are comparable across
  resolutions; coefficient vectors use the plain Euclidean norm. For the
  band-limited functions used here the two agree exactly (discrete Parseval).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "ProblemConfig",
    "SpectralOperator",
    "AliasingError",
    "substream",
    "build_operator",
    "sample_source",
    "forward",
    "midpoints",
    "synthesize",
    "analyze",
    "add_noise",
    "grid_norm",
    "coeff_norm",
    "rel_l2_error",
]

_MASK64 = (1 << 64) - 1


class AliasingError(ValueError):
    """Grid too coarse for the requested number of spectral modes."""


@dataclass(frozen=True)
class ProblemConfig:
    """Exponents and truncation defining one synthetic inverse problem.

    p: decay exponent of the singular values, sigma_n = n**-p.
    s: regularity index of the source class; coefficient envelope n**-(s+0.5).
    n_modes: number of retained spectral modes N.
    """

    p: float = 1.5
    s: float = 1.5
    n_modes: int = 64

    def __post_init__(self) -> None:
        if not (self.p > 0 and np.isfinite(self.p)):
            raise ValueError(f"p must be positive, got {self.p}")
        if not (self.s > 0 and np.isfinite(self.s)):
            raise ValueError(f"s must be positive, got {self.s}")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ValueError(f"n_modes must be a positive integer, got {self.n_modes}")


@dataclass(frozen=True)
class SpectralOperator:
    """Diagonal forward operator: singular values and Laplacian eigenvalues.

    sigma[n-1] = n**-p (strictly positive, non-increasing) and
    lam[n-1] = (n pi)**2, the Dirichlet-Laplacian eigenvalue of the basis
    function v_n used by the smoothness-weighted training loss.
    """

    sigma: np.ndarray
    lam: np.ndarray

    def __post_init__(self) -> None:
        sigma = np.asarray(self.sigma, dtype=np.float64)
        lam = np.asarray(self.lam, dtype=np.float64)
        if sigma.ndim != 1 or lam.shape != sigma.shape:
            raise ValueError("sigma and lam must be 1d arrays of equal length")
        if not np.all(sigma > 0):
            raise ValueError("singular values must be strictly positive")
        if np.any(np.diff(sigma) > 0):
            raise ValueError("singular values must be non-increasing")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "lam", lam)

    @property
    def n_modes(self) -> int:
        return self.sigma.shape[0]


def substream(seed: int, *labels) -> np.random.Generator:
    """Derive an independent, reproducible RNG sub-stream from one root seed.

    Labels (strings, ints, floats) are hashed into the seed sequence so every
    (seed, label...) combination yields its own stream, bit-stable across runs
    and platforms. Floats are keyed by their shortest round-trip decimal form.
    """
    entropy = [int(seed) & _MASK64]
    for lab in labels:
        if isinstance(lab, str):
            entropy.append(zlib.crc32(lab.encode("utf-8")))
        elif isinstance(lab, (bool, int, np.integer)):
            entropy.append(int(lab) & _MASK64)
        elif isinstance(lab, (float, np.floating)):
            entropy.append(zlib.crc32(format(float(lab), ".17g").encode("ascii")))
        else:
            raise TypeError(f"unsupported substream label type: {type(lab)!r}")
    return np.random.default_rng(np.random.SeedSequence(entropy))


def build_operator(cfg: ProblemConfig) -> SpectralOperator:
    """Construct sigma_n = n**-p and lam_n = (n pi)**2 for n = 1..N."""
    n = np.arange(1, cfg.n_modes + 1, dtype=np.float64)
    return SpectralOperator(sigma=n ** (-cfg.p), lam=(n * np.pi) ** 2)


def sample_source(cfg: ProblemConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw one source coefficient vector f_n = xi_n * n**-(s+0.5), xi iid N(0,1)."""
    return sample_sources(cfg, 1, rng)[0]


def sample_sources(cfg: ProblemConfig, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a batch of source coefficient vectors, shape (n_samples, N)."""
    n = np.arange(1, cfg.n_modes + 1, dtype=np.float64)
    envelope = n ** (-(cfg.s + 0.5))
    f = rng.standard_normal((n_samples, cfg.n_modes)) * envelope
    if not np.all(np.isfinite(f)):
        raise FloatingPointError("sampled source coefficients are not finite")
    return f


def forward(op: SpectralOperator, f: np.ndarray) -> np.ndarray:
    """Apply the diagonal forward map: y_n = sigma_n * f_n (batched on axis 0)."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape[-1] != op.n_modes:
        raise ValueError(f"coefficient length {f.shape[-1]} != n_modes {op.n_modes}")
    return f * op.sigma


def midpoints(resolution: int) -> np.ndarray:
    """Midpoint nodes x_i = (i + 1/2) / M on (0, 1)."""
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    return (np.arange(resolution, dtype=np.float64) + 0.5) / resolution


@lru_cache(maxsize=32)
def _sine_table(n_modes: int, resolution: int) -> np.ndarray:
    """Basis table B[n-1, i] = sqrt(2) sin(n pi x_i), cached per shape."""
    x = midpoints(resolution)
    n = np.arange(1, n_modes + 1, dtype=np.float64)
    table = np.sqrt(2.0) * np.sin(np.outer(n * np.pi, x))
    table.setflags(write=False)
    return table


def synthesize(coeffs: np.ndarray, resolution: int) -> np.ndarray:
    """Evaluate sum_n c_n * sqrt(2) sin(n pi x_i) on the midpoint grid.

    Accepts a single coefficient vector (N,) or a batch (B, N); returns
    samples of matching leading shape.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    table = _sine_table(coeffs.shape[-1], int(resolution))
    return coeffs @ table


def analyze(grid_values: np.ndarray, n_modes: int) -> np.ndarray:
    """Project grid samples onto the leading sine modes by midpoint quadrature.

    c_n = (1/M) sum_i g_i * sqrt(2) sin(n pi x_i). Requires M >= 2 * n_modes
    so the highest retained mode is not aliased on the grid.
    """
    grid_values = np.asarray(grid_values, dtype=np.float64)
    resolution = grid_values.shape[-1]
    if resolution < 2 * n_modes:
        raise AliasingError(
            f"resolution {resolution} < 2 * n_modes = {2 * n_modes}: aliasing guard violated"
        )
    table = _sine_table(int(n_modes), resolution)
    return grid_values @ table.T / resolution


def grid_norm(values: np.ndarray) -> float | np.ndarray:
    """Discrete L2 norm sqrt(mean(v**2)); batched over axis 0 for 2d input."""
    values = np.asarray(values, dtype=np.float64)
    return np.sqrt(np.mean(values**2, axis=-1))


def coeff_norm(coeffs: np.ndarray) -> float | np.ndarray:
    """Euclidean norm of a coefficient vector; batched over axis 0 for 2d input."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return np.sqrt(np.sum(coeffs**2, axis=-1))


def add_noise(grid_values: np.ndarray, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Add white Gaussian grid noise rescaled to an exact relative level.

    The perturbation e is iid per grid point and rescaled so that
    ``grid_norm(e) == delta * grid_norm(grid_values)`` holds exactly.
    delta = 0 returns the input unchanged (bitwise copy).
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    grid_values = np.asarray(grid_values, dtype=np.float64)
    if delta == 0:
        return grid_values.copy()
    base = grid_norm(grid_values)
    if np.any(np.atleast_1d(base) == 0):
        raise ValueError("relative noise level undefined for identically zero data")
    e = rng.standard_normal(grid_values.shape)
    scale = delta * base / grid_norm(e)
    e *= np.expand_dims(scale, -1) if grid_values.ndim > 1 else scale
    out = grid_values + e
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("noisy data is not finite")
    return out


def rel_l2_error(a: np.ndarray, b: np.ndarray) -> float | np.ndarray:
    """Relative error ||a - b|| / ||b||, batched over axis 0 for 2d input.

    The value is identical for the grid and coefficient norms (they differ by
    a constant factor at fixed length), so one function serves both kinds.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    denom = coeff_norm(b)
    if np.any(np.atleast_1d(denom) == 0):
        raise ValueError("reference vector must be nonzero")
    return coeff_norm(a - b) / denom
