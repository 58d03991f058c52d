#!/usr/bin/env python3
"""Open the box: what filter did the network actually learn?

Averaging the learned gate over a test batch gives one curve per mode index.
Plotted against the Tikhonov coefficient at the matched oracle parameter and
the ideal sharp cutoff, the learned curve passes low modes untouched, kills
high modes, and switches between the two regimes in far fewer modes than
Tikhonov's heavy tail. That sharpness is where its error advantage lives.
"""

from scnet import ProblemConfig, TrainConfig, build_operator, filter_profile, train
from scnet.datasets import make_dataset

cfg = ProblemConfig()
op = build_operator(cfg)
delta = 0.05

train_ds = make_dataset(cfg, delta, 600, 256, seed=42, split="train")
print(f"training at {100 * delta:.0f}% noise (reduced size) ...")
net, _ = train(train_ds.noisy_coeffs(), train_ds.f, op, TrainConfig(epochs=600, batch_size=16, seed=42))

test_ds = make_dataset(cfg, delta, 200, 256, seed=42, split="test")
report = filter_profile(net, op, test_ds, delta)

print("\n  n   sigma_n      learned gate (mean +/- std)   tikhonov   sharp cutoff")
for row in report.rows:
    n = row[0]
    if n <= 12 or n in (16, 24, 32, 48, 64):
        sig, mean, std, tik, tsvd = (float(v) for v in row[1:])
        band = "#" * int(round(20 * mean))
        print(f"  {n:3d}  {sig:8.5f}   {mean:6.3f} +/- {std:5.3f} {band:<20s} {tik:8.3f} {tsvd:10.1f}")

meta = report.metadata
print(f"\ntransition width (modes with gate strictly between 0.1 and 0.9):")
print(f"  learned filter: {meta['transition_width_scnet']} modes")
print(f"  tikhonov:       {meta['transition_width_tikhonov']} modes")
print("\nThe learned cutoff is several times sharper than Tikhonov's, yet "
      "smooth, so it suppresses noise without the hard ringing of a step.")
