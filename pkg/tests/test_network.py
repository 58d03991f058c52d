"""Tests for the pointwise filter network, its gradients, and training."""

import numpy as np
import pytest

from scnet.core import ProblemConfig, build_operator, rel_l2_error, substream
from scnet.datasets import make_dataset
from scnet.filters import FilterSpec, apply_filter
from scnet.network import (
    AdamState,
    FeatureNormalizer,
    NetArchitecture,
    TrainConfig,
    TrainingDivergence,
    adam_step,
    fit_to_target_filter,
    gradient_check,
    init_net,
    lipschitz_constant,
    load_model,
    loss_gradient,
    psi_batch,
    psi_forward,
    psi_sigma_profile,
    reconstruct,
    save_model,
    sobolev_loss,
    train,
)

OP16 = build_operator(ProblemConfig(n_modes=16))


def _identity_normalizer(op):
    return FeatureNormalizer.identity(float(op.sigma[-1]), float(op.sigma[0]))


def _zero_net(op, hidden=(4, 4)):
    net = init_net(NetArchitecture(hidden=hidden), _identity_normalizer(op), seed=0)
    for w in net.weights:
        w[...] = 0.0
    for b in net.biases:
        b[...] = 0.0
    return net


def _frozen_gate_net(op, output_bias):
    """All-zero net except the output bias: psi is constant sigmoid(bias)."""
    net = _zero_net(op, hidden=(1, 1))
    net.biases[-1][...] = output_bias
    return net


def test_zero_net_outputs_half():
    net = _zero_net(OP16)
    assert psi_forward(net, 0.0, 1.0) == pytest.approx(0.5, abs=0)
    assert psi_forward(net, 123.4, 0.01) == pytest.approx(0.5, abs=0)


def test_output_strictly_inside_unit_interval():
    rng = substream(1, "bounded")
    net = init_net(NetArchitecture(), _identity_normalizer(OP16), seed=3)
    for w in net.weights:
        w *= 50.0  # exaggerate weights to push the logits hard
    y = rng.standard_normal(1_000_000 // 16 * 16).reshape(-1, 16) * 100
    psi = psi_batch(net, y, OP16.sigma)
    assert psi.size >= 1_000_000 - 16
    assert np.all(psi > 0.0) and np.all(psi < 1.0)


def test_reconstruct_zero_data_and_shape_guard():
    net = _zero_net(OP16)
    assert np.all(reconstruct(net, OP16, np.zeros(16)) == 0.0)
    with pytest.raises(ValueError):
        reconstruct(net, OP16, np.zeros(8))


def test_frozen_unit_gate_recovers_projection():
    # saturating output bias: psi == 1 up to float64 resolution, so clean data
    # reproduce the band-limited source
    net = _frozen_gate_net(OP16, output_bias=36.0)
    f = substream(2, "f").standard_normal(16) * np.arange(1, 17) ** -2.0
    y = f * OP16.sigma
    fhat = reconstruct(net, OP16, y)
    assert np.allclose(fhat, f, rtol=1e-12, atol=0)


def test_frozen_tikhonov_gate_matches_classical_filter():
    # realize psi(sigma) = sigma^2/(sigma^2+alpha) through the tanh stack with
    # near-linear (tiny-weight) hidden layers: the logit of that gate is
    # exactly linear in log(sigma)
    op = build_operator(ProblemConfig(n_modes=64))
    alpha = float(op.sigma[31]) ** 2
    norm = _identity_normalizer(op)
    eps = 1e-7
    net = init_net(NetArchitecture(hidden=(1, 1)), norm, seed=0)
    net.weights[0][...] = np.array([[0.0], [eps]])
    net.weights[1][...] = np.array([[eps]])
    net.weights[2][...] = np.array([[2.0 * norm.logsig_scale / eps**2]])
    net.biases[0][...] = 0.0
    net.biases[1][...] = 0.0
    net.biases[2][...] = 2.0 * norm.logsig_center - np.log(alpha)

    y = substream(3, "y").standard_normal(64) * op.sigma
    fhat_net = reconstruct(net, op, y)
    fhat_classical = apply_filter(FilterSpec("tikhonov", alpha=alpha), op, y)
    denom = np.maximum(np.abs(fhat_classical), 1e-12)
    assert np.max(np.abs(fhat_net - fhat_classical) / denom) < 1e-12


def test_sobolev_loss_values():
    op = build_operator(ProblemConfig(n_modes=4))
    f = np.array([0.3, -0.2, 0.1, 0.05])
    assert sobolev_loss(f, f, op, gamma=1.0) == 0.0
    fhat = f + np.array([0.0, 1.0, 0.0, 0.0])  # unit error at n=2
    assert sobolev_loss(fhat, f, op, gamma=1.0) == pytest.approx(1.0 + 4 * np.pi**2, rel=1e-14)
    assert sobolev_loss(fhat, f, op, gamma=0.0) == pytest.approx(1.0, rel=1e-14)
    assert sobolev_loss(fhat, f, op, gamma=0.1) > 0.0


def test_loss_gradient_zero_batch():
    op = build_operator(ProblemConfig(n_modes=4))
    y = np.zeros((3, 4))
    f = np.zeros((3, 4))
    norm = FeatureNormalizer.identity(float(op.sigma[-1]), float(op.sigma[0]))
    net = init_net(NetArchitecture(hidden=(3,)), norm, seed=1)
    loss, grads = loss_gradient(net, y, f, op, gamma=0.1)
    assert loss == 0.0
    for g in grads:
        assert np.all(g == 0.0)


def test_loss_gradient_batch_order_invariance():
    op = build_operator(ProblemConfig(n_modes=5))
    rng = substream(4, "perm")
    y = rng.standard_normal((6, 5))
    f = rng.standard_normal((6, 5))
    norm = FeatureNormalizer.fit(y, op.sigma)
    net = init_net(NetArchitecture(hidden=(3,)), norm, seed=2)
    loss_a, grads_a = loss_gradient(net, y, f, op, gamma=0.1)
    order = rng.permutation(6)
    loss_b, grads_b = loss_gradient(net, y[order], f[order], op, gamma=0.1)
    assert loss_a == pytest.approx(loss_b, rel=1e-13)
    for ga, gb in zip(grads_a, grads_b):
        assert np.allclose(ga, gb, rtol=1e-12, atol=1e-15)


def test_gradient_matches_finite_differences():
    # the mandatory oracle gate: 2 hidden units, 3 modes, 2 samples
    assert gradient_check(widths=(2,), n_modes=3, n_samples=2) < 1e-5
    # and on a deeper configuration for good measure
    assert gradient_check(widths=(4, 3), n_modes=5, n_samples=3, seed=9) < 1e-5


def test_adam_zero_gradient_is_noop():
    params = [np.array([1.0, -2.0]), np.array([[0.5]])]
    before = [p.copy() for p in params]
    state = AdamState.for_params(params)
    adam_step(params, [np.zeros(2), np.zeros((1, 1))], state, TrainConfig())
    for p, b in zip(params, before):
        assert np.array_equal(p, b)


def test_adam_constant_gradient_step_approaches_lr():
    cfg = TrainConfig(learning_rate=1e-3)
    params = [np.array([0.0])]
    state = AdamState.for_params(params)
    prev = 0.0
    for _ in range(200):
        prev = params[0][0]
        adam_step(params, [np.array([2.5])], state, cfg)
    assert abs(abs(params[0][0] - prev) - cfg.learning_rate) < 1e-4 * cfg.learning_rate


def test_adam_training_bitwise_deterministic():
    op = build_operator(ProblemConfig(n_modes=8))
    ds = make_dataset(ProblemConfig(n_modes=8), 0.05, 40, 64, seed=11, split="det")
    cfg = TrainConfig(epochs=20, seed=5)

    def run():
        net, hist = train(ds.noisy_coeffs(), ds.f, op, cfg, arch=NetArchitecture(hidden=(4,)))
        return net, hist

    net_a, hist_a = run()
    net_b, hist_b = run()
    for wa, wb in zip(net_a.params(), net_b.params()):
        assert np.array_equal(wa, wb)
    losses_a = [h["train_loss"] for h in hist_a]
    losses_b = [h["train_loss"] for h in hist_b]
    assert losses_a == losses_b


def test_train_noise_free_drives_gate_to_one():
    cfg = ProblemConfig(n_modes=16)
    op = build_operator(cfg)
    ds = make_dataset(cfg, 0.0, 300, 64, seed=12, split="clean")
    y = ds.noisy_coeffs()
    net, history = train(y, ds.f, op, TrainConfig(epochs=400, seed=3))
    assert history[-1]["train_loss"] <= history[0]["train_loss"]
    err = float(np.mean(rel_l2_error(reconstruct(net, op, y), ds.f)))
    assert err < 0.05
    # energy-carrying low modes are passed nearly untouched
    psi = psi_batch(net, y, op.sigma)
    assert psi[:, :4].mean() > 0.9


def test_train_divergence_guard():
    # the bounded gate keeps healthy runs finite, so the guard is exercised
    # through corrupted data that poisons the loss
    cfg = ProblemConfig(n_modes=8)
    op = build_operator(cfg)
    ds = make_dataset(cfg, 0.05, 40, 64, seed=13, split="boom")
    y = ds.noisy_coeffs()
    y[0, 0] = np.inf
    with np.errstate(invalid="ignore"), pytest.raises(TrainingDivergence):
        train(y, ds.f, op, TrainConfig(epochs=5, seed=1))


def test_train_shuffled_vs_unshuffled_close():
    cfg = ProblemConfig(n_modes=16)
    op = build_operator(cfg)
    ds = make_dataset(cfg, 0.05, 256, 64, seed=14, split="shuf")
    y = ds.noisy_coeffs()
    _, hist_s = train(y, ds.f, op, TrainConfig(epochs=300, seed=4, shuffle=True))
    _, hist_u = train(y, ds.f, op, TrainConfig(epochs=300, seed=4, shuffle=False))
    final_s = hist_s[-1]["train_loss"]
    final_u = hist_u[-1]["train_loss"]
    assert abs(final_s - final_u) / final_s < 0.01


def test_fit_constant_half_target_is_trivial():
    # the zero network already outputs 0.5; the fit must stay at the optimum
    res = fit_to_target_filter(
        FilterSpec("tikhonov", alpha=1.0), (0.5, 2.0), tolerance=0.05, width=4,
        max_steps=2000, seed=0,
    )
    # target sigma^2/(sigma^2+1) on [0.5, 2] stays within [0.2, 0.8]: easy
    assert res.converged and res.sup_error < 0.05


def test_fit_to_tikhonov_target_tight():
    op = build_operator(ProblemConfig(n_modes=64))
    alpha = float(op.sigma[31]) ** 2
    res = fit_to_target_filter(
        FilterSpec("tikhonov", alpha=alpha),
        (float(op.sigma[-1]), float(op.sigma[0])),
        tolerance=0.01,
        width=32,
        seed=1,
    )
    assert res.converged and res.sup_error < 0.01
    # returned net reproduces the reported sup error
    sigma = np.exp(np.linspace(np.log(op.sigma[-1]), np.log(op.sigma[0]), 2001))
    target = sigma**2 / (sigma**2 + alpha)
    sup = float(np.max(np.abs(psi_sigma_profile(res.net, sigma) - target)))
    assert sup == pytest.approx(res.sup_error, abs=1e-12)


def test_sigma_only_stability_bound():
    # frozen sigma-profile gates: ||R(y) - R(y')|| <= (sup psi / sigma_N) ||y - y'||
    rng = substream(15, "stab")
    net = init_net(NetArchitecture(), _identity_normalizer(OP16), seed=6)
    gates = psi_sigma_profile(net, OP16.sigma)
    c_stab = float(gates.max())
    sigma_min = float(OP16.sigma[-1])
    violations = 0
    for _ in range(1000):
        y1 = rng.standard_normal(16)
        y2 = rng.standard_normal(16)
        lhs = np.linalg.norm(gates * y1 / OP16.sigma - gates * y2 / OP16.sigma)
        rhs = c_stab / sigma_min * np.linalg.norm(y1 - y2)
        violations += lhs > rhs
    assert violations == 0


def test_full_net_lipschitz_stability_bound():
    rng = substream(16, "lip")
    ds = make_dataset(ProblemConfig(n_modes=16), 0.05, 64, 64, seed=17, split="lip")
    y_ref = ds.noisy_coeffs()
    norm = FeatureNormalizer.fit(y_ref, OP16.sigma)
    net = init_net(NetArchitecture(), norm, seed=7)
    l_psi = lipschitz_constant(net, OP16.sigma)
    sigma_min = float(OP16.sigma[-1])
    scale = float(np.abs(y_ref).max())
    for _ in range(500):
        y1 = rng.standard_normal(16) * scale
        y2 = y1 + rng.standard_normal(16) * scale * 0.1
        lhs = np.linalg.norm(reconstruct(net, OP16, y1) - reconstruct(net, OP16, y2))
        m_y = max(np.linalg.norm(y1), np.linalg.norm(y2))
        rhs = (1.0 + l_psi * m_y) / sigma_min * np.linalg.norm(y1 - y2)
        assert lhs <= rhs


def test_reconstruction_linear_when_y_weights_zeroed():
    net = init_net(NetArchitecture(hidden=(4,)), _identity_normalizer(OP16), seed=8)
    net.weights[0][0, :] = 0.0  # cut the data-coefficient feature
    y = substream(18, "lin").standard_normal(16)
    a = 3.7
    assert np.allclose(
        reconstruct(net, OP16, a * y), a * reconstruct(net, OP16, y), rtol=1e-13, atol=0
    )


def test_psi_forward_matches_batch_and_interpolates():
    ds = make_dataset(ProblemConfig(n_modes=16), 0.05, 32, 64, seed=19, split="interp")
    y = ds.noisy_coeffs()
    norm = FeatureNormalizer.fit(y, OP16.sigma)
    net = init_net(NetArchitecture(hidden=(5,)), norm, seed=9)
    batch = psi_batch(net, y[:1], OP16.sigma)[0]
    for n in (0, 7, 15):
        scalar = psi_forward(net, float(y[0, n]), float(OP16.sigma[n]))
        assert scalar == pytest.approx(batch[n], abs=1e-15)
    # off-grid sigma evaluates continuously between the knots
    mid_sigma = np.sqrt(OP16.sigma[3] * OP16.sigma[4])
    val = psi_forward(net, 0.0, float(mid_sigma))
    assert 0.0 < val < 1.0
    with pytest.raises(ValueError):
        psi_forward(net, np.nan, 1.0)


def test_model_save_load_roundtrip(tmp_path):
    ds = make_dataset(ProblemConfig(n_modes=16), 0.05, 32, 64, seed=20, split="io")
    y = ds.noisy_coeffs()
    norm = FeatureNormalizer.fit(y, OP16.sigma)
    net = init_net(NetArchitecture(), norm, seed=10, metadata={"delta": 0.05})
    path = tmp_path / "model.json"
    save_model(net, path)
    loaded = load_model(path)
    assert loaded.metadata["delta"] == 0.05
    assert np.array_equal(psi_batch(loaded, y, OP16.sigma), psi_batch(net, y, OP16.sigma))
    # format version is guarded
    bad = path.read_text().replace('"format_version": 1', '"format_version": 99')
    path.write_text(bad)
    with pytest.raises(ValueError):
        load_model(path)
