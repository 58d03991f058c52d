"""Classical spectral regularization filters and parameter-choice rules.

Implements the analytic filter families (Tikhonov, truncated SVD, Landweber,
and the oracle Wiener coefficient), filtered reconstruction, per-sample
oracle parameter search, Morozov-style discrepancy selection of the Tikhonov
parameter, and discrepancy selection of the spectral truncation index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .core import SpectralOperator, coeff_norm, rel_l2_error

__all__ = [
    "FilterSpec",
    "default_alpha_grid",
    "filter_value",
    "apply_filter",
    "oracle_search",
    "batch_oracle_search",
    "batch_oracle_errors",
    "discrepancy_alpha",
    "discrepancy_truncation",
    "TruncationResult",
]

FAMILIES = ("tikhonov", "tsvd", "landweber", "wiener_oracle")


@dataclass(frozen=True)
class FilterSpec:
    """One configured filter.

    alpha is the regularization parameter; its meaning depends on the family:
    Tikhonov penalty weight, TSVD threshold (keep sigma >= sqrt(alpha)),
    unused for Landweber, and the absolute noise norm for the Wiener oracle.
    The Wiener oracle additionally needs fdag_norm, the norm of the true
    source it is allowed to peek at.
    """

    family: str
    alpha: float = 0.0
    tau_lw: float = 1.0
    k_lw: int = 1
    fdag_norm: float = 0.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown filter family {self.family!r}, expected one of {FAMILIES}")
        if self.family in ("tikhonov", "tsvd") and not self.alpha > 0:
            raise ValueError(f"{self.family} requires alpha > 0, got {self.alpha}")
        if self.family == "landweber":
            if not (self.tau_lw > 0 and self.k_lw >= 1):
                raise ValueError("landweber requires tau_lw > 0 and k_lw >= 1")
        if self.family == "wiener_oracle":
            if not self.fdag_norm > 0:
                raise ValueError("wiener_oracle requires fdag_norm > 0")
            if self.alpha < 0:
                raise ValueError("wiener_oracle noise norm (alpha) must be >= 0")


def default_alpha_grid(num: int = 60, lo: float = 1e-10, hi: float = 1e1) -> np.ndarray:
    """Log-uniform search grid for the oracle and discrepancy searches."""
    return np.logspace(np.log10(lo), np.log10(hi), num)


def filter_value(spec: FilterSpec, sigma: float | np.ndarray) -> float | np.ndarray:
    """Evaluate the filter function g(sigma).

    The reconstruction multiplies data coefficients by g(sigma), so
    g(sigma) * sigma is the effective multiplicative coefficient on the naive
    inverse. For the Wiener oracle, g = lambda_opt / sigma with
    lambda_opt = sigma^2 / (sigma^2 + (noise_norm / ||f||)^2).
    """
    sigma_arr = np.asarray(sigma, dtype=np.float64)
    if np.any(sigma_arr <= 0):
        raise ValueError("sigma must be strictly positive")
    if spec.family == "tikhonov":
        out = sigma_arr / (sigma_arr**2 + spec.alpha)
    elif spec.family == "tsvd":
        # boundary sigma == sqrt(alpha) is kept
        out = np.where(sigma_arr >= np.sqrt(spec.alpha), 1.0 / sigma_arr, 0.0)
    elif spec.family == "landweber":
        if spec.tau_lw >= 2.0 / np.max(sigma_arr) ** 2:
            raise ValueError("landweber step size must satisfy tau < 2 / sigma_1^2")
        out = (1.0 - (1.0 - spec.tau_lw * sigma_arr**2) ** spec.k_lw) / sigma_arr
    else:  # wiener_oracle
        lam_opt = sigma_arr**2 / (sigma_arr**2 + (spec.alpha / spec.fdag_norm) ** 2)
        out = lam_opt / sigma_arr
    return out if isinstance(sigma, np.ndarray) else float(out)


def apply_filter(spec: FilterSpec, op: SpectralOperator, y: np.ndarray) -> np.ndarray:
    """Filtered reconstruction fhat_n = g(sigma_n) * y_n (batched on axis 0)."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape[-1] != op.n_modes:
        raise ValueError(f"coefficient length {y.shape[-1]} != n_modes {op.n_modes}")
    return y * filter_value(spec, op.sigma)


def _spec_with_alpha(family: str, alpha: float, op: SpectralOperator) -> FilterSpec:
    if family == "landweber":
        # map the grid parameter to an iteration count, k ~ 1/alpha
        k = max(1, int(round(1.0 / alpha)))
        return FilterSpec(family=family, tau_lw=1.0 / float(op.sigma[0]) ** 2 * 0.999, k_lw=k)
    return FilterSpec(family=family, alpha=float(alpha))


def oracle_search(
    family: str,
    op: SpectralOperator,
    y_noisy: np.ndarray,
    f_true: np.ndarray,
    grid: np.ndarray,
) -> tuple[float, float, np.ndarray]:
    """Grid-search the parameter minimizing the true reconstruction error.

    Returns (best_alpha, best_error, reconstruction). Ties are broken toward
    the larger (more strongly regularizing) parameter.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("parameter grid must be nonempty")
    best_alpha, best_err, best_f = None, np.inf, None
    for alpha in grid:
        fhat = apply_filter(_spec_with_alpha(family, alpha, op), op, y_noisy)
        err = float(rel_l2_error(fhat, f_true))
        if err < best_err or (err == best_err and best_alpha is not None and alpha > best_alpha):
            best_alpha, best_err, best_f = float(alpha), err, fhat
    return best_alpha, best_err, best_f


def batch_oracle_search(
    family: str,
    op: SpectralOperator,
    y_noisy: np.ndarray,
    f_true: np.ndarray,
    grid: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample oracle search over a batch, vectorized across the grid.

    y_noisy and f_true have shape (B, N); returns (best_alphas, best_errors),
    each of shape (B,), with ties broken toward the larger parameter. Agrees
    with `oracle_search` sample by sample.
    """
    grid = np.asarray(grid, dtype=np.float64)
    g = np.stack([filter_value(_spec_with_alpha(family, a, op), op.sigma) for a in grid])
    fhat = y_noisy[:, None, :] * g[None, :, :]  # (B, A, N)
    errs = coeff_norm(fhat - f_true[:, None, :]) / coeff_norm(f_true)[:, None]
    # first minimum of the reversed grid = largest alpha among exact ties
    rev_idx = np.argmin(errs[:, ::-1], axis=1)
    idx = grid.size - 1 - rev_idx
    rows = np.arange(y_noisy.shape[0])
    return grid[idx], errs[rows, idx]


def batch_oracle_errors(
    family: str,
    op: SpectralOperator,
    y_noisy: np.ndarray,
    f_true: np.ndarray,
    grid: np.ndarray,
) -> np.ndarray:
    """Per-sample minimum relative errors of the oracle search, shape (B,)."""
    _, errors = batch_oracle_search(family, op, y_noisy, f_true, grid)
    return errors


def discrepancy_alpha(
    op: SpectralOperator,
    y_noisy: np.ndarray,
    delta_abs: float,
    tau_safety: float = 1.1,
    grid: np.ndarray | None = None,
) -> float:
    """Morozov choice of the Tikhonov parameter on a grid.

    Picks the largest grid alpha whose data residual ||sigma * fhat - y|| is
    still <= tau_safety * delta_abs; if none qualifies, the smallest grid
    point (weakest feasible regularization) is returned.
    """
    if tau_safety <= 1:
        raise ValueError("tau_safety must be > 1")
    if grid is None:
        grid = default_alpha_grid()
    grid = np.sort(np.asarray(grid, dtype=np.float64))
    best = None
    for alpha in grid:
        fhat = apply_filter(FilterSpec("tikhonov", alpha=float(alpha)), op, y_noisy)
        residual = coeff_norm(op.sigma * fhat - y_noisy)
        if residual <= tau_safety * delta_abs:
            best = float(alpha)
    return best if best is not None else float(grid[0])


class TruncationResult(NamedTuple):
    n_opt: int
    saturated: bool


def discrepancy_truncation(
    op: SpectralOperator,
    reconstruct_fn: Callable[[np.ndarray], np.ndarray],
    y_noisy: np.ndarray,
    delta_abs: float,
    tau_safety: float = 1.1,
) -> TruncationResult:
    """Discrepancy choice of the spectral truncation index.

    Scans N = 1..n_modes and returns the smallest N whose truncated
    reconstruction has data residual ||K fhat^(N) - y|| <= tau_safety *
    delta_abs. Modes beyond N are dropped, so they contribute |y_n| to the
    residual. Returns (n_modes, saturated=True) when no N qualifies.
    """
    if tau_safety <= 1:
        raise ValueError("tau_safety must be > 1")
    if delta_abs <= 0:
        raise ValueError("delta_abs must be > 0")
    y_noisy = np.asarray(y_noisy, dtype=np.float64)
    fhat = np.asarray(reconstruct_fn(y_noisy), dtype=np.float64)
    fitted_sq = (op.sigma * fhat - y_noisy) ** 2
    dropped_sq = y_noisy**2
    # residual^2 at truncation N = sum_{n<=N} fitted_sq + sum_{n>N} dropped_sq
    tail = np.concatenate([np.cumsum(dropped_sq[::-1])[::-1][1:], [0.0]])
    residuals = np.sqrt(np.cumsum(fitted_sq) + tail)
    threshold = tau_safety * delta_abs
    hits = np.nonzero(residuals <= threshold)[0]
    if hits.size == 0:
        return TruncationResult(n_opt=op.n_modes, saturated=True)
    return TruncationResult(n_opt=int(hits[0]) + 1, saturated=False)
