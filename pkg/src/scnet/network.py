"""Pointwise neural spectral filter with hand-written backpropagation.

The filter is a small MLP applied independently at every mode: it maps the
(normalized) data coefficient and singular value to a gate in (0, 1) that
multiplies the naive inverse ``y_n / sigma_n``:

    fhat_n = psi(y_n, sigma_n) * y_n / sigma_n.

Hidden layers use tanh, the output is a logistic sigmoid, so the gate is
bounded and the reconstruction operator inherits an explicit stability
constant. Training minimizes a smoothness-weighted spectral loss

    sum_n (1 + gamma * lam_n) * (fhat_n - f_n)**2

averaged over samples, which equals the squared L2 misfit plus gamma times
the squared gradient misfit because the basis functions are Laplacian
eigenfunctions. Gradients are exact reverse-mode derivatives, optimized with
Adam; everything is plain float64 numpy and deterministic for a fixed seed.

Network inputs are normalized features, not raw values: the data coefficient
is standardized by per-mode training statistics and the singular value enters
as standardized log(sigma). The statistics are keyed by log(sigma) and
interpolated, so the filter remains a pointwise function of (y, sigma) and is
independent of the sampling grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .core import SpectralOperator, rel_l2_error, substream
from .filters import FilterSpec, filter_value

__all__ = [
    "NetArchitecture",
    "FeatureNormalizer",
    "FilterNet",
    "TrainConfig",
    "TrainingDivergence",
    "AdamState",
    "init_net",
    "psi_forward",
    "psi_batch",
    "psi_sigma_profile",
    "reconstruct",
    "naive_inverse",
    "sobolev_loss",
    "loss_gradient",
    "adam_step",
    "train",
    "FitResult",
    "fit_to_target_filter",
    "gradient_check",
    "lipschitz_constant",
    "save_model",
    "load_model",
]

MODEL_FORMAT_VERSION = 1

# logit clamp keeping the sigmoid strictly inside (0, 1) in float64
_Z_CLIP = 36.0


@dataclass(frozen=True)
class NetArchitecture:
    """MLP shape: two inputs, tanh hidden layers, one sigmoid output."""

    hidden: tuple[int, ...] = (32, 32)

    def __post_init__(self) -> None:
        if len(self.hidden) < 1 or any(int(w) < 1 for w in self.hidden):
            raise ValueError("hidden widths must be positive")
        object.__setattr__(self, "hidden", tuple(int(w) for w in self.hidden))

    @property
    def dims(self) -> tuple[int, ...]:
        return (2, *self.hidden, 1)


@dataclass(frozen=True)
class FeatureNormalizer:
    """Affine feature maps fitted on training data.

    The data coefficient is standardized per mode; the statistics are stored
    against log(sigma) knots (ascending) and linearly interpolated in
    log(sigma), which reproduces the per-mode values exactly on the training
    spectrum and extends them continuously off-grid. The second feature is
    standardized log(sigma).
    """

    log_sigma_knots: np.ndarray
    y_mean_knots: np.ndarray
    y_std_knots: np.ndarray
    logsig_center: float
    logsig_scale: float

    def __post_init__(self) -> None:
        knots = np.asarray(self.log_sigma_knots, dtype=np.float64)
        ym = np.asarray(self.y_mean_knots, dtype=np.float64)
        ys = np.asarray(self.y_std_knots, dtype=np.float64)
        if knots.ndim != 1 or ym.shape != knots.shape or ys.shape != knots.shape:
            raise ValueError("normalizer knot arrays must be 1d and of equal length")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("log_sigma_knots must be strictly increasing")
        if np.any(ys <= 0) or self.logsig_scale <= 0:
            raise ValueError("normalizer scales must be positive")
        object.__setattr__(self, "log_sigma_knots", knots)
        object.__setattr__(self, "y_mean_knots", ym)
        object.__setattr__(self, "y_std_knots", ys)

    @classmethod
    def fit(cls, y_train: np.ndarray, sigma: np.ndarray) -> "FeatureNormalizer":
        """Fit per-mode statistics of the data coefficients on a training set."""
        y_train = np.asarray(y_train, dtype=np.float64)
        sigma = np.asarray(sigma, dtype=np.float64)
        mean = y_train.mean(axis=0)
        std = np.maximum(y_train.std(axis=0), 1e-12)
        log_sigma = np.log(sigma)
        order = np.argsort(log_sigma)
        return cls(
            log_sigma_knots=log_sigma[order],
            y_mean_knots=mean[order],
            y_std_knots=std[order],
            logsig_center=float(log_sigma.mean()),
            logsig_scale=float(max(log_sigma.std(), 1e-12)),
        )

    @classmethod
    def identity(cls, sigma_lo: float, sigma_hi: float) -> "FeatureNormalizer":
        """Pass-through y feature over a sigma interval (used for filter fits)."""
        knots = np.log(np.array([sigma_lo, sigma_hi], dtype=np.float64))
        center = float(knots.mean())
        scale = float(max((knots[1] - knots[0]) / 2.0, 1e-12))
        return cls(knots, np.zeros(2), np.ones(2), center, scale)

    def features(self, y: np.ndarray, sigma: np.ndarray) -> np.ndarray:
        """Build the (…, 2) feature array for data values y at singular values sigma.

        y and sigma broadcast against each other; the output flattens to
        (n_points, 2) row-major.
        """
        y, sigma = np.broadcast_arrays(np.asarray(y, dtype=np.float64), np.asarray(sigma, dtype=np.float64))
        log_sigma = np.log(sigma)
        mean = np.interp(log_sigma, self.log_sigma_knots, self.y_mean_knots)
        std = np.interp(log_sigma, self.log_sigma_knots, self.y_std_knots)
        x = np.empty((y.size, 2), dtype=np.float64)
        x[:, 0] = ((y - mean) / std).ravel()
        x[:, 1] = ((log_sigma - self.logsig_center) / self.logsig_scale).ravel()
        return x

    def y_scale(self, sigma: np.ndarray) -> np.ndarray:
        """d(feature_0)/d(y) at given sigma, needed for Lipschitz bounds."""
        log_sigma = np.log(np.asarray(sigma, dtype=np.float64))
        return 1.0 / np.interp(log_sigma, self.log_sigma_knots, self.y_std_knots)


@dataclass
class FilterNet:
    """Trained pointwise filter: architecture, parameters, feature maps.

    Weight matrices have shape (fan_in, fan_out); the forward pass is
    ``h @ W + b``. metadata carries the problem/training context so a stored
    model is self-describing.
    """

    arch: NetArchitecture
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    normalizer: FeatureNormalizer
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        dims = self.arch.dims
        if len(self.weights) != len(dims) - 1 or len(self.biases) != len(dims) - 1:
            raise ValueError("parameter count does not match architecture")
        for li, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (dims[li], dims[li + 1]) or b.shape != (dims[li + 1],):
                raise ValueError(f"layer {li} parameter shape mismatch")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {li} parameters are not finite")

    def params(self) -> list[np.ndarray]:
        """Flat parameter list [W_1, b_1, ..., W_L, b_L] (views, not copies)."""
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 64
    epochs: int = 600
    gamma: float = 0.1
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        for b in (self.adam_beta1, self.adam_beta2):
            if not (0 <= b < 1):
                raise ValueError("Adam betas must lie in [0, 1)")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")


class TrainingDivergence(RuntimeError):
    """Raised when the training loss becomes non-finite or explodes."""


def init_net(
    arch: NetArchitecture,
    normalizer: FeatureNormalizer,
    seed: int,
    metadata: dict | None = None,
) -> FilterNet:
    """Glorot-normal initialized network with zero biases."""
    rng = substream(seed, "net-init")
    dims = arch.dims
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        scale = np.sqrt(2.0 / (fan_in + fan_out))
        weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return FilterNet(arch, weights, biases, normalizer, dict(metadata or {}))


def _forward(x: np.ndarray, weights: Sequence[np.ndarray], biases: Sequence[np.ndarray]):
    """MLP forward pass; returns (output in (0,1), per-layer activations)."""
    acts = [x]
    h = x
    for w, b in zip(weights[:-1], biases[:-1]):
        h = np.tanh(h @ w + b)
        acts.append(h)
    z = np.clip(h @ weights[-1] + biases[-1], -_Z_CLIP, _Z_CLIP)
    return 1.0 / (1.0 + np.exp(-z)), acts


def _backward(dout, out, acts, weights):
    """Reverse-mode gradients for `_forward` given dL/d(output)."""
    dz = dout * out * (1.0 - out)
    grads_w = [np.empty(0)] * len(weights)
    grads_b = [np.empty(0)] * len(weights)
    for li in range(len(weights) - 1, -1, -1):
        grads_w[li] = acts[li].T @ dz
        grads_b[li] = dz.sum(axis=0)
        if li > 0:
            dz = (dz @ weights[li].T) * (1.0 - acts[li] ** 2)
    return grads_w, grads_b


def psi_batch(net: FilterNet, y: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Evaluate the gate for data coefficients y (…, N) at singular values sigma."""
    y = np.asarray(y, dtype=np.float64)
    x = net.normalizer.features(y, sigma)
    out, _ = _forward(x, net.weights, net.biases)
    return out[:, 0].reshape(np.broadcast_shapes(y.shape, np.shape(sigma)))

def psi_forward(net: FilterNet, y_n: float, sigma_n: float) -> float:
    """Pointwise gate value psi(y_n, sigma_n), strictly inside (0, 1)."""
    if not (np.isfinite(y_n) and np.isfinite(sigma_n) and sigma_n > 0):
        raise ValueError("psi_forward requires finite y_n and sigma_n > 0")
    return float(psi_batch(net, np.array([y_n]), np.array([sigma_n]))[0])


def psi_sigma_profile(net: FilterNet, sigma: np.ndarray) -> np.ndarray:
    """Sigma-only slice psi(0, sigma), the frozen filter curve of the net."""
    sigma = np.asarray(sigma, dtype=np.float64)
    return psi_batch(net, np.zeros_like(sigma), sigma)


def naive_inverse(op: SpectralOperator, y: np.ndarray) -> np.ndarray:
    """Unregularized inversion y_n / sigma_n (batched on axis 0)."""
    return np.asarray(y, dtype=np.float64) / op.sigma


def reconstruct(net: FilterNet, op: SpectralOperator, y: np.ndarray) -> np.ndarray:
    """Gated reconstruction fhat_n = psi(y_n, sigma_n) * y_n / sigma_n."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape[-1] != op.n_modes:
        raise ValueError(f"coefficient length {y.shape[-1]} != n_modes {op.n_modes}")
    return psi_batch(net, y, op.sigma) * y / op.sigma


def sobolev_loss(f_hat: np.ndarray, f_true: np.ndarray, op: SpectralOperator, gamma: float) -> float:
    """Smoothness-weighted squared spectral distance for one pair.

    sum_n (1 + gamma * lam_n) * (f_hat_n - f_n)**2. The constant tail energy
    of modes beyond the truncation does not depend on the reconstruction and
    is not included.
    """
    f_hat = np.asarray(f_hat, dtype=np.float64)
    f_true = np.asarray(f_true, dtype=np.float64)
    if f_hat.shape != f_true.shape:
        raise ValueError("shape mismatch between reconstruction and truth")
    w = 1.0 + gamma * op.lam
    return float(np.sum(w * (f_hat - f_true) ** 2, axis=-1).mean())


def loss_gradient(
    net: FilterNet,
    y_batch: np.ndarray,
    f_batch: np.ndarray,
    op: SpectralOperator,
    gamma: float,
) -> tuple[float, list[np.ndarray]]:
    """Loss and exact parameter gradients on a batch.

    The objective is the mean over samples of the smoothness-weighted loss;
    gradients are taken through the gate network and through the product
    psi * y / sigma. Returns (loss, [dW_1, db_1, ..., dW_L, db_L]).
    """
    y_batch = np.asarray(y_batch, dtype=np.float64)
    f_batch = np.asarray(f_batch, dtype=np.float64)
    if y_batch.ndim != 2 or y_batch.shape != f_batch.shape:
        raise ValueError("batch arrays must be 2d with matching shapes")
    batch, n_modes = y_batch.shape
    if n_modes != op.n_modes:
        raise ValueError(f"coefficient length {n_modes} != n_modes {op.n_modes}")

    x = net.normalizer.features(y_batch, op.sigma)
    out, acts = _forward(x, net.weights, net.biases)
    psi = out[:, 0].reshape(batch, n_modes)
    v = y_batch / op.sigma
    resid = psi * v - f_batch
    w = 1.0 + gamma * op.lam
    loss = float(np.mean(np.sum(w * resid**2, axis=1)))
    dpsi = (2.0 / batch) * w * resid * v
    grads_w, grads_b = _backward(dpsi.reshape(-1, 1), out, acts, net.weights)
    grads: list[np.ndarray] = []
    for gw, gb in zip(grads_w, grads_b):
        grads.extend((gw, gb))
    return loss, grads


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0

    @classmethod
    def for_params(cls, params: Sequence[np.ndarray]) -> "AdamState":
        return cls(m=[np.zeros_like(p) for p in params], v=[np.zeros_like(p) for p in params])


def adam_step(
    params: Sequence[np.ndarray],
    grads: Sequence[np.ndarray],
    state: AdamState,
    cfg: TrainConfig,
) -> AdamState:
    """One bias-corrected Adam update, applied to the parameters in place."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ValueError("parameter, gradient and state lengths must match")
    state.t += 1
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    c1 = 1.0 - b1**state.t
    c2 = 1.0 - b2**state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape:
            raise ValueError("gradient shape mismatch")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.adam_eps)
    return state


def train(
    y_train: np.ndarray,
    f_train: np.ndarray,
    op: SpectralOperator,
    cfg: TrainConfig,
    arch: NetArchitecture = NetArchitecture(),
    test_set: tuple[np.ndarray, np.ndarray] | None = None,
    metadata: dict | None = None,
) -> tuple[FilterNet, list[dict]]:
    """Train a filter net on (noisy data, source) coefficient pairs.

    Returns the trained net and a per-epoch history of dicts with keys
    ``epoch``, ``train_loss`` and ``test_rel_error`` (NaN when no test set is
    supplied). Epoch 0 records the untrained network on the full training
    set; later entries record the sample-weighted mean of the minibatch
    losses seen during that epoch. Raises TrainingDivergence if the loss
    becomes non-finite or exceeds 1e3 times its initial value.
    """
    y_train = np.asarray(y_train, dtype=np.float64)
    f_train = np.asarray(f_train, dtype=np.float64)
    if y_train.ndim != 2 or y_train.shape != f_train.shape:
        raise ValueError("training arrays must be 2d with matching shapes")
    if y_train.shape[0] < 1:
        raise ValueError("training set must be nonempty")

    normalizer = FeatureNormalizer.fit(y_train, op.sigma)
    net = init_net(arch, normalizer, cfg.seed, metadata)
    params = net.params()
    state = AdamState.for_params(params)
    shuffle_rng = substream(cfg.seed, "shuffle")
    n_samples = y_train.shape[0]

    def test_error() -> float:
        if test_set is None:
            return float("nan")
        y_te, f_te = test_set
        return float(np.mean(rel_l2_error(reconstruct(net, op, y_te), f_te)))

    initial_loss, _ = loss_gradient(net, y_train, f_train, op, cfg.gamma)
    if not np.isfinite(initial_loss):
        raise TrainingDivergence(f"non-finite loss before training: {initial_loss}")
    history = [{"epoch": 0, "train_loss": initial_loss, "test_rel_error": test_error()}]
    guard = max(1e3 * initial_loss, 1e3)

    for epoch in range(1, cfg.epochs + 1):
        order = shuffle_rng.permutation(n_samples) if cfg.shuffle else np.arange(n_samples)
        loss_sum = 0.0
        for start in range(0, n_samples, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            batch_loss, grads = loss_gradient(net, y_train[idx], f_train[idx], op, cfg.gamma)
            loss_sum += batch_loss * idx.size
            adam_step(params, grads, state, cfg)
        epoch_loss = loss_sum / n_samples
        history.append({"epoch": epoch, "train_loss": epoch_loss, "test_rel_error": test_error()})
        if not np.isfinite(epoch_loss) or epoch_loss > guard:
            raise TrainingDivergence(
                f"training diverged at epoch {epoch}: loss={epoch_loss:.6g} "
                f"(initial {initial_loss:.6g})"
            )
    return net, history


class FitResult(NamedTuple):
    net: FilterNet
    sup_error: float
    converged: bool


def fit_to_target_filter(
    target: FilterSpec,
    sigma_range: tuple[float, float],
    tolerance: float,
    width: int = 32,
    max_steps: int = 6000,
    learning_rate: float = 1e-2,
    grid_size: int = 2001,
    seed: int = 0,
) -> FitResult:
    """Regress the sigma-only gate psi(0, sigma) onto a target filter curve.

    The target is the multiplicative coefficient ``filter_value * sigma`` of
    the given spec (for Tikhonov, sigma^2 / (sigma^2 + alpha)), fitted in sup
    norm on a dense log-spaced sigma grid over ``sigma_range`` with a single
    tanh hidden layer of the given width. Stops early once the sup error is
    below ``tolerance``; otherwise reports the best error reached (flagged by
    ``converged=False``).
    """
    sig_lo, sig_hi = float(sigma_range[0]), float(sigma_range[1])
    if not (0 < sig_lo < sig_hi):
        raise ValueError("sigma_range must satisfy 0 < sigma_min < sigma_max")
    sigma = np.exp(np.linspace(np.log(sig_lo), np.log(sig_hi), grid_size))
    target_curve = filter_value(target, sigma) * sigma

    arch = NetArchitecture(hidden=(width,))
    normalizer = FeatureNormalizer.identity(sig_lo, sig_hi)
    net = init_net(arch, normalizer, seed, metadata={"fit_target": target.family})
    params = net.params()
    cfg = TrainConfig(learning_rate=learning_rate, epochs=1, seed=seed)
    state = AdamState.for_params(params)
    x = normalizer.features(np.zeros_like(sigma), sigma)

    best_sup = np.inf
    best_params = [p.copy() for p in params]
    for step in range(max_steps):
        out, acts = _forward(x, net.weights, net.biases)
        resid = out[:, 0] - target_curve
        if step % 25 == 0:
            sup = float(np.max(np.abs(resid)))
            if sup < best_sup:
                best_sup = sup
                best_params = [p.copy() for p in params]
            if sup < tolerance * 0.9:
                break
        grads_w, grads_b = _backward(
            (2.0 / grid_size) * resid.reshape(-1, 1), out, acts, net.weights
        )
        grads: list[np.ndarray] = []
        for gw, gb in zip(grads_w, grads_b):
            grads.extend((gw, gb))
        adam_step(params, grads, state, cfg)

    out, _ = _forward(x, net.weights, net.biases)
    sup = float(np.max(np.abs(out[:, 0] - target_curve)))
    if sup > best_sup:
        for p, bp in zip(params, best_params):
            p[...] = bp
        sup = best_sup
    return FitResult(net=net, sup_error=sup, converged=bool(sup < tolerance))


def gradient_check(
    widths: tuple[int, ...] = (2,),
    n_modes: int = 3,
    n_samples: int = 2,
    gamma: float = 0.1,
    step: float = 1e-5,
    seed: int = 0,
) -> float:
    """Compare analytic loss gradients against central finite differences.

    Builds a tiny random problem and network, perturbs every parameter by
    +/- step, and returns the maximum relative deviation between the analytic
    and finite-difference gradients. Values below 1e-5 certify the
    backpropagation; this is the prerequisite gate before any training run.
    """
    from .core import ProblemConfig, build_operator

    op = build_operator(ProblemConfig(n_modes=n_modes))
    rng = substream(seed, "gradcheck")
    f = rng.standard_normal((n_samples, n_modes))
    y = f * op.sigma + 0.05 * rng.standard_normal((n_samples, n_modes))
    normalizer = FeatureNormalizer.fit(y, op.sigma)
    net = init_net(NetArchitecture(hidden=widths), normalizer, seed + 1)
    params = net.params()

    _, grads = loss_gradient(net, y, f, op, gamma)
    worst = 0.0
    for p, g in zip(params, grads):
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + step
            lp, _ = loss_gradient(net, y, f, op, gamma)
            flat_p[i] = orig - step
            lm, _ = loss_gradient(net, y, f, op, gamma)
            flat_p[i] = orig
            fd = (lp - lm) / (2.0 * step)
            denom = max(abs(fd), abs(flat_g[i]), 1e-10)
            worst = max(worst, abs(fd - flat_g[i]) / denom)
    return worst


def lipschitz_constant(net: FilterNet, sigma: np.ndarray) -> float:
    """Upper bound on the gate's Lipschitz constant in the raw data coefficient.

    Product of layer spectral norms, times the sigmoid slope bound 1/4, times
    the largest feature scale 1 / std(y) over the given sigma values. tanh
    slopes are bounded by 1 and drop out.
    """
    norm_prod = 1.0
    for w in net.weights:
        norm_prod *= float(np.linalg.norm(w, 2))
    return 0.25 * norm_prod * float(np.max(net.normalizer.y_scale(np.asarray(sigma))))


def save_model(net: FilterNet, path: str | Path) -> None:
    """Serialize a filter net (architecture, normalizer, parameters) as JSON."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "hidden": list(net.arch.hidden),
        "normalizer": {
            "log_sigma_knots": net.normalizer.log_sigma_knots.tolist(),
            "y_mean_knots": net.normalizer.y_mean_knots.tolist(),
            "y_std_knots": net.normalizer.y_std_knots.tolist(),
            "logsig_center": net.normalizer.logsig_center,
            "logsig_scale": net.normalizer.logsig_scale,
        },
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "metadata": net.metadata,
    }
    Path(path).write_text(json.dumps(payload, indent=1), encoding="utf-8")


def load_model(path: str | Path) -> FilterNet:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version!r}")
    norm = payload["normalizer"]
    normalizer = FeatureNormalizer(
        log_sigma_knots=np.asarray(norm["log_sigma_knots"], dtype=np.float64),
        y_mean_knots=np.asarray(norm["y_mean_knots"], dtype=np.float64),
        y_std_knots=np.asarray(norm["y_std_knots"], dtype=np.float64),
        logsig_center=float(norm["logsig_center"]),
        logsig_scale=float(norm["logsig_scale"]),
    )
    return FilterNet(
        arch=NetArchitecture(hidden=tuple(payload["hidden"])),
        weights=[np.asarray(w, dtype=np.float64) for w in payload["weights"]],
        biases=[np.asarray(b, dtype=np.float64) for b in payload["biases"]],
        normalizer=normalizer,
        metadata=dict(payload.get("metadata", {})),
    )
