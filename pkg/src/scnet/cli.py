"""Command-line entry point.

Subcommands: gen, train, convergence, profile, transfer, gradcheck. Options
come from an optional flat-key JSON config file (--config) overridden by
command-line flags; the fully resolved configuration and seed are echoed
before anything runs and stored in every output's metadata sidecar.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure
(training divergence, aliasing guard, failed gradient check).

Output layout under --out:
    dataset/train_delta_<d>.csv (+ .meta.json), dataset/test_delta_<d>.csv
    models/scnet_delta_<d>.json, models/scnet_delta_<d>_history.csv
    reports/convergence.csv, profile.csv, transfer.csv (+ .meta.json each)
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path


from .core import AliasingError, ProblemConfig, build_operator
from .datasets import load_dataset, make_dataset, save_dataset, write_csv, format_float
from .experiments import (
    convergence_experiment,
    filter_profile,
    oracle_search_report,
    resolution_transfer,
    train_models,
    write_report,
)
from .network import (
    NetArchitecture,
    TrainConfig,
    TrainingDivergence,
    gradient_check,
    load_model,
    save_model,
    train,
)

__all__ = ["main", "RunConfig", "resolve_config"]

GRADCHECK_TOLERANCE = 1e-5
# small-sample mode: fewer, smaller batches need more epochs at batch 16 to
# reach the same optimizer step count as the full configuration
FAST_PRESETS = {"n_train": 200, "n_test": 100, "epochs": 600, "batch_size": 16}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration (problem + training + experiments)."""

    p: float = 1.5
    s: float = 1.5
    n_modes: int = 64
    resolution: int = 256
    delta: float = 0.05
    deltas: tuple[float, ...] = (1e-1, 5e-2, 1e-2, 5e-3, 1e-3)
    n_train: int = 2000
    n_test: int = 500
    epochs: int = 600
    learning_rate: float = 1e-3
    batch_size: int = 64
    gamma: float = 0.1
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    hidden: tuple[int, ...] = (32, 32)
    transfer_resolutions: tuple[int, ...] = (256, 512, 1024, 2048)
    tau_safety: float = 1.1
    seed: int = 42
    out: str = "runs"
    threads: int = 0  # 0 means: use the machine's core count
    fast: bool = False
    train_inline: bool = False
    gradcheck: bool = False

    def problem(self) -> ProblemConfig:
        return ProblemConfig(p=self.p, s=self.s, n_modes=self.n_modes)

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            gamma=self.gamma,
            adam_beta1=self.adam_beta1,
            adam_beta2=self.adam_beta2,
            adam_eps=self.adam_eps,
            seed=self.seed,
        )

    def arch(self) -> NetArchitecture:
        return NetArchitecture(hidden=tuple(self.hidden))

    def effective_threads(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)


_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}
_TUPLE_FIELDS = {"deltas", "hidden", "transfer_resolutions"}


def resolve_config(file_path: str | None, overrides: dict) -> RunConfig:
    """Merge defaults <- fast presets <- config file <- CLI flags."""
    file_args: dict = {}
    if file_path:
        try:
            file_args = json.loads(Path(file_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {file_path}: {exc}") from exc
        if not isinstance(file_args, dict):
            raise ConfigError("config file must hold a flat JSON object")
    merged = {**file_args, **{k: v for k, v in overrides.items() if v is not None}}
    unknown = set(merged) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    values: dict = {}
    if merged.get("fast", False):
        values.update({k: v for k, v in FAST_PRESETS.items() if k not in merged})
    values.update(merged)
    for key in _TUPLE_FIELDS & set(values):
        values[key] = tuple(values[key])
    try:
        return RunConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def _echo(cfg: RunConfig, command: str) -> None:
    resolved = dataclasses.asdict(cfg)
    print(f"[scnet {command}] seed={cfg.seed} resolved config:")
    print(json.dumps(resolved, sort_keys=True))


def _delta_tag(delta: float) -> str:
    return format(delta, "g")


def _model_path(cfg: RunConfig, delta: float) -> Path:
    return Path(cfg.out) / "models" / f"scnet_delta_{_delta_tag(delta)}.json"


def _dataset_paths(cfg: RunConfig, split: str, delta: float) -> Path:
    return Path(cfg.out) / "dataset" / f"{split}_delta_{_delta_tag(delta)}.csv"


def _train_and_save(cfg: RunConfig, delta: float):
    """Train the per-delta model from keyed streams and persist it."""
    models = train_models(
        cfg.problem(), [delta], cfg.n_train, cfg.resolution, cfg.seed,
        cfg.train_config(), cfg.arch(), threads=1,
    )
    path = _model_path(cfg, delta)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_model(models[delta], path)
    print(f"trained and saved {path}")
    return models[delta]


def _load_or_train(cfg: RunConfig, delta: float):
    path = _model_path(cfg, delta)
    if path.exists():
        print(f"using model {path}")
        return load_model(path)
    if not cfg.train_inline:
        raise ConfigError(f"missing model {path}; run `scnet train --delta {_delta_tag(delta)}` or pass --train-inline")
    return _train_and_save(cfg, delta)


def cmd_gen(cfg: RunConfig) -> int:
    out = Path(cfg.out) / "dataset"
    out.mkdir(parents=True, exist_ok=True)
    for split, count in (("train", cfg.n_train), ("test", cfg.n_test)):
        ds = make_dataset(cfg.problem(), cfg.delta, count, cfg.resolution, cfg.seed, split)
        path = _dataset_paths(cfg, split, cfg.delta)
        save_dataset(ds, path)
        print(f"wrote {path} ({count} samples)")
    return 0


def cmd_train(cfg: RunConfig) -> int:
    if cfg.gradcheck:
        worst = gradient_check()
        print(f"gradient check: max relative deviation = {worst:.3e}")
        if worst >= GRADCHECK_TOLERANCE:
            print(f"gradient check FAILED (tolerance {GRADCHECK_TOLERANCE:g}); aborting")
            return 2
    train_path = _dataset_paths(cfg, "train", cfg.delta)
    if not train_path.exists():
        raise ConfigError(f"missing dataset {train_path}; run `scnet gen` first")
    ds = load_dataset(train_path)
    op = build_operator(ds.problem)
    test_path = _dataset_paths(cfg, "test", cfg.delta)
    test_set = None
    if test_path.exists():
        test_ds = load_dataset(test_path)
        test_set = (test_ds.noisy_coeffs(), test_ds.f)
    meta = {
        "problem": {"p": ds.problem.p, "s": ds.problem.s, "n_modes": ds.problem.n_modes},
        "delta": ds.delta,
        "resolution": ds.resolution,
        "seed": cfg.seed,
        "n_train": ds.n_samples,
        "epochs": cfg.epochs,
        "gamma": cfg.gamma,
    }
    net, history = train(
        ds.noisy_coeffs(), ds.f, op, cfg.train_config(), arch=cfg.arch(),
        test_set=test_set, metadata=meta,
    )
    model_path = _model_path(cfg, cfg.delta)
    model_path.parent.mkdir(parents=True, exist_ok=True)
    save_model(net, model_path)
    history_path = model_path.with_name(model_path.stem + "_history.csv")
    write_csv(
        history_path,
        ["epoch", "train_loss", "test_rel_error"],
        [[h["epoch"], format_float(h["train_loss"]), format_float(h["test_rel_error"])] for h in history],
    )
    first, last = history[0]["train_loss"], history[-1]["train_loss"]
    print(f"wrote {model_path} and {history_path}")
    print(f"train loss: initial {first:.6g} -> final {last:.6g}")
    return 0


def cmd_convergence(cfg: RunConfig) -> int:
    models: dict[float, object] = {}
    missing: list[float] = []
    for d in (float(d) for d in cfg.deltas):
        path = _model_path(cfg, d)
        if path.exists():
            print(f"using model {path}")
            models[d] = load_model(path)
        else:
            missing.append(d)
    if missing:
        if not cfg.train_inline:
            raise ConfigError(
                f"missing models for deltas {missing}; run `scnet train` per delta or pass --train-inline"
            )
        trained = train_models(
            cfg.problem(), missing, cfg.n_train, cfg.resolution, cfg.seed,
            cfg.train_config(), cfg.arch(), threads=cfg.effective_threads(),
        )
        for d, net in trained.items():
            path = _model_path(cfg, d)
            path.parent.mkdir(parents=True, exist_ok=True)
            save_model(net, path)
            print(f"trained and saved {path}")
            models[d] = net
    t0 = time.time()
    report = convergence_experiment(
        cfg.problem(), cfg.deltas,
        resolution=cfg.resolution, n_train=cfg.n_train, n_test=cfg.n_test,
        seed=cfg.seed, train_cfg=cfg.train_config(), arch=cfg.arch(),
        models=models, tau_safety=cfg.tau_safety, threads=cfg.effective_threads(),
    )
    report.metadata["run_config"] = dataclasses.asdict(cfg)
    path = write_report(report, Path(cfg.out) / "reports", wall_clock_s=time.time() - t0)
    print(f"wrote {path}")
    for method, fit in report.slopes.items():
        print(f"slope[{method}] = {fit['slope']:.4f} (r^2 = {fit['r_squared']:.4f})")
    return 0


def cmd_profile(cfg: RunConfig) -> int:
    net = _load_or_train(cfg, cfg.delta)
    t0 = time.time()
    op = build_operator(cfg.problem())
    test_ds = make_dataset(cfg.problem(), cfg.delta, cfg.n_test, cfg.resolution, cfg.seed, "test")
    report = filter_profile(net, op, test_ds, cfg.delta)
    report.metadata["run_config"] = dataclasses.asdict(cfg)
    path = write_report(report, Path(cfg.out) / "reports", wall_clock_s=time.time() - t0)
    oracle = oracle_search_report(op, test_ds, cfg.delta)
    oracle_path = write_report(oracle, Path(cfg.out) / "reports")
    print(f"wrote {path} and {oracle_path}")
    print(
        f"transition width: learned {report.metadata['transition_width_scnet']}, "
        f"tikhonov {report.metadata['transition_width_tikhonov']}"
    )
    return 0


def cmd_transfer(cfg: RunConfig) -> int:
    net = _load_or_train(cfg, cfg.delta)
    t0 = time.time()
    report = resolution_transfer(
        net, cfg.problem(), cfg.transfer_resolutions, cfg.delta,
        n_test=cfg.n_test, seed=cfg.seed,
    )
    report.metadata["run_config"] = dataclasses.asdict(cfg)
    path = write_report(report, Path(cfg.out) / "reports", wall_clock_s=time.time() - t0)
    print(f"wrote {path}")
    for row in report.rows:
        print(f"resolution {row[2]}: mean rel error {row[3]:.4f}")
    return 0


def cmd_gradcheck(cfg: RunConfig) -> int:
    worst = gradient_check()
    print(f"gradient check: max relative deviation = {worst:.3e} (tolerance {GRADCHECK_TOLERANCE:g})")
    return 0 if worst < GRADCHECK_TOLERANCE else 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; the contract reserves 2 for
    # numerical failures, so remap usage problems to exit code 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scnet", description="Spectral filter learning experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("gen", "generate train/test dataset files"),
        ("train", "train the per-delta filter model from dataset files"),
        ("convergence", "error-versus-noise sweep with slope fits"),
        ("profile", "export the learned filter profile"),
        ("transfer", "evaluate a trained model across grid resolutions"),
        ("gradcheck", "finite-difference check of the training gradients"),
    ):
        p = sub.add_parser(name, help=help_text, parents=[], add_help=True)
        p.add_argument("--config", type=str, default=None, help="flat-key JSON config file")
        p.add_argument("--seed", type=int, default=None, help="root seed (default 42)")
        p.add_argument("--delta", type=float, default=None, help="noise level for this command")
        p.add_argument("--out", type=str, default=None, help="output directory (default runs/)")
        p.add_argument("--fast", action="store_true", default=None, help="small sample counts for CI")
        p.add_argument("--threads", type=int, default=None, help="max worker threads (default: cores)")
        p.add_argument("--train-inline", action="store_true", default=None, dest="train_inline",
                       help="train missing models instead of failing")
        p.add_argument("--gradcheck", action="store_true", default=None,
                       help="run the gradient oracle gate before training")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    overrides = {
        k: v for k, v in vars(args).items() if k in _FIELDS and v is not None
    }
    try:
        cfg = resolve_config(args.config, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _echo(cfg, args.command)
    handler = {
        "gen": cmd_gen,
        "train": cmd_train,
        "convergence": cmd_convergence,
        "profile": cmd_profile,
        "transfer": cmd_transfer,
        "gradcheck": cmd_gradcheck,
    }[args.command]
    try:
        return handler(cfg)
    except (TrainingDivergence, AliasingError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
