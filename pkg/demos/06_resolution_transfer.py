#!/usr/bin/env python3
"""Zero-shot resolution transfer: train coarse, evaluate fine, never retrain.

The filter acts on spectral coefficients, and its inputs (coefficient value,
singular value) mean the same thing no matter how finely the data were
sampled. So a model trained entirely on a 256-point grid can be handed data
from grids four and eight times finer with no fine-tuning at all, and its
error stays in a narrow band, drifting mildly DOWN as the fixed noise budget
spreads over more grid modes. A fixed-size image-to-image network cannot be
evaluated on those grids in the first place.
"""

from scnet import ProblemConfig, TrainConfig, build_operator, resolution_transfer, train
from scnet.datasets import make_dataset

cfg = ProblemConfig()
op = build_operator(cfg)
delta = 0.05
train_resolution = 256

train_ds = make_dataset(cfg, delta, 600, train_resolution, seed=42, split="train")
print(f"training on the {train_resolution}-point grid only (reduced size) ...")
net, _ = train(train_ds.noisy_coeffs(), train_ds.f, op, TrainConfig(epochs=600, batch_size=16, seed=42))

report = resolution_transfer(net, cfg, [256, 512, 1024, 2048], delta, n_test=200, seed=42)

print("\n  grid size   mean rel error   vs training grid")
base = report.rows[0][3]
for row in report.rows:
    print(f"  {row[2]:9d}   {row[3]:14.4f}   {row[3] / base:15.3f}")

print(f"\nspread across resolutions (max/min): {report.metadata['max_over_min']:.3f}")
print("Fresh white noise thins out per mode on finer grids, so the error "
      "drifts down rather than degrading; nothing about the model is re-fit.")
