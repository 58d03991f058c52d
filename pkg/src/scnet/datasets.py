"""Dataset generation and on-disk serialization.

A dataset is a batch of (source, clean data, noisy data) triples for one
noise level and one grid resolution. Sources and noise draws are keyed by
(seed, split, sample id) sub-streams, so sample k is reproducible in
isolation and test sources are shared across noise levels, which removes
source-sampling variance from comparisons between noise levels.

On disk a split is one long-format CSV (columns: sample_id, kind, n_or_i,
value) plus a JSON sidecar with the generating configuration. Rows of kind
``f`` hold the N source coefficients indexed by mode n (1-based); rows of
kind ``y_clean`` / ``y_noisy`` hold the M grid samples indexed by grid point
i (0-based). Floats are written with 17 significant digits so files
round-trip bit-exactly and regeneration with the same seed is byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ProblemConfig, add_noise, analyze, forward, build_operator, sample_source, substream, synthesize

__all__ = [
    "Dataset",
    "make_dataset",
    "save_dataset",
    "load_dataset",
    "format_float",
    "write_csv",
]

DATASET_FORMAT_VERSION = 1


def format_float(x: float) -> str:
    """Shortest exact decimal form used in all CSV output."""
    return format(float(x), ".17g")


def write_csv(path: str | Path, header: list[str], rows: list[list]) -> None:
    """Write a CSV with deterministic bytes (fixed order, '\n' endings)."""
    with Path(path).open("w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


@dataclass(frozen=True)
class Dataset:
    problem: ProblemConfig
    delta: float
    resolution: int
    seed: int
    split: str
    f: np.ndarray        # (B, N) source coefficients
    y_clean: np.ndarray  # (B, M) clean data on the grid
    y_noisy: np.ndarray  # (B, M) noisy data on the grid

    @property
    def n_samples(self) -> int:
        return self.f.shape[0]

    def noisy_coeffs(self) -> np.ndarray:
        """Spectral coefficients of the noisy data, shape (B, N)."""
        return analyze(self.y_noisy, self.problem.n_modes)


def make_dataset(
    problem: ProblemConfig,
    delta: float,
    n_samples: int,
    resolution: int,
    seed: int,
    split: str,
) -> Dataset:
    """Generate sources, push them through the forward map, and add noise.

    Source sub-streams are keyed without the noise level, so the same
    (seed, split, sample_id) yields the same source at every delta.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    op = build_operator(problem)
    f = np.empty((n_samples, problem.n_modes))
    for k in range(n_samples):
        f[k] = sample_source(problem, substream(seed, "source", split, k))
    y_clean = synthesize(forward(op, f), resolution)
    y_noisy = np.empty_like(y_clean)
    for k in range(n_samples):
        y_noisy[k] = add_noise(
            y_clean[k], delta, substream(seed, "noise", split, float(delta), resolution, k)
        )
    return Dataset(problem, float(delta), int(resolution), int(seed), split, f, y_clean, y_noisy)


def save_dataset(ds: Dataset, csv_path: str | Path, meta_path: str | Path | None = None) -> None:
    """Write one split as CSV plus its JSON sidecar (default: <csv>.meta.json)."""
    rows: list[list] = []
    for k in range(ds.n_samples):
        for n in range(ds.problem.n_modes):
            rows.append([k, "f", n + 1, format_float(ds.f[k, n])])
        for i in range(ds.resolution):
            rows.append([k, "y_clean", i, format_float(ds.y_clean[k, i])])
        for i in range(ds.resolution):
            rows.append([k, "y_noisy", i, format_float(ds.y_noisy[k, i])])
    write_csv(csv_path, ["sample_id", "kind", "n_or_i", "value"], rows)

    meta = {
        "format_version": DATASET_FORMAT_VERSION,
        "problem": {"p": ds.problem.p, "s": ds.problem.s, "n_modes": ds.problem.n_modes},
        "delta": ds.delta,
        "resolution": ds.resolution,
        "seed": ds.seed,
        "split": ds.split,
        "n_samples": ds.n_samples,
    }
    if meta_path is None:
        meta_path = Path(csv_path).with_suffix(".meta.json")
    Path(meta_path).write_text(json.dumps(meta, indent=1) + "\n", encoding="utf-8")


def load_dataset(csv_path: str | Path, meta_path: str | Path | None = None) -> Dataset:
    """Read a split written by `save_dataset`."""
    if meta_path is None:
        meta_path = Path(csv_path).with_suffix(".meta.json")
    meta = json.loads(Path(meta_path).read_text(encoding="utf-8"))
    if meta.get("format_version") != DATASET_FORMAT_VERSION:
        raise ValueError(f"unsupported dataset format version {meta.get('format_version')!r}")
    problem = ProblemConfig(**meta["problem"])
    n_samples = meta["n_samples"]
    resolution = meta["resolution"]
    f = np.zeros((n_samples, problem.n_modes))
    y_clean = np.zeros((n_samples, resolution))
    y_noisy = np.zeros((n_samples, resolution))
    arrays = {"f": f, "y_clean": y_clean, "y_noisy": y_noisy}
    with Path(csv_path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["sample_id", "kind", "n_or_i", "value"]:
            raise ValueError(f"unexpected dataset header {header!r}")
        for sample_id, kind, n_or_i, value in reader:
            k, idx = int(sample_id), int(n_or_i)
            arrays[kind][k, idx - 1 if kind == "f" else idx] = float(value)
    return Dataset(
        problem, float(meta["delta"]), resolution, int(meta["seed"]), meta["split"],
        f, y_clean, y_noisy,
    )
