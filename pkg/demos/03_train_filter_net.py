#!/usr/bin/env python3
"""Train the pointwise filter network and compare it with the oracles.

The network sees only (data coefficient, singular value) per mode and outputs
a gate in (0, 1) that multiplies the naive inverse. Trained on sampled
(source, noisy data) pairs, it rediscovers the shape of the ideal filter
without being told the noise level, and on a fresh test set it sits at (or
slightly beyond, thanks to per-sample adaptivity) the oracle filters that do
peek at the truth.

A reduced size is used here so the demo trains in well under a minute; the
CLI runs the full configuration from the command line.
"""

import numpy as np

from scnet import ProblemConfig, TrainConfig, build_operator, reconstruct, rel_l2_error, train
from scnet.datasets import make_dataset
from scnet.filters import batch_oracle_errors, default_alpha_grid

cfg = ProblemConfig()
op = build_operator(cfg)
delta = 0.05

train_ds = make_dataset(cfg, delta, 600, 256, seed=42, split="train")
test_ds = make_dataset(cfg, delta, 200, 256, seed=42, split="test")
print(f"training on {train_ds.n_samples} pairs at {100 * delta:.0f}% noise ...")

net, history = train(
    train_ds.noisy_coeffs(),
    train_ds.f,
    op,
    TrainConfig(epochs=600, batch_size=16, seed=42),
    test_set=(test_ds.noisy_coeffs(), test_ds.f),
)
print(f"loss: {history[0]['train_loss']:.1f} -> {history[-1]['train_loss']:.3f} "
      f"over {len(history) - 1} epochs")
for h in history[:: max(1, len(history) // 6)]:
    print(f"  epoch {h['epoch']:4d}  train loss {h['train_loss']:10.3f}  "
          f"test rel error {h['test_rel_error']:.4f}")

y_test = test_ds.noisy_coeffs()
net_err = float(np.mean(rel_l2_error(reconstruct(net, op, y_test), test_ds.f)))
grid = default_alpha_grid()
tik_err = float(batch_oracle_errors("tikhonov", op, y_test, test_ds.f, grid).mean())
tsvd_err = float(batch_oracle_errors("tsvd", op, y_test, test_ds.f, grid).mean())

print(f"\nmean test relative error")
print(f"  learned filter     {net_err:.4f}")
print(f"  oracle Tikhonov    {tik_err:.4f}   (per-sample alpha chosen with the truth)")
print(f"  oracle TSVD        {tsvd_err:.4f}   (per-sample cutoff chosen with the truth)")
print("\nThe learned gate needs no oracle: it internalized the noise level "
      "from the training data alone.")
