"""End-to-end tests of the command-line interface and its exit codes.

Everything runs on a deliberately tiny configuration (16 modes, 64-point
grid, a handful of samples and epochs) so the full command graph stays fast.
"""

import json

import pytest

from scnet.cli import main, resolve_config


def _tiny_config(tmp_path, **extra):
    cfg = {
        "n_modes": 16,
        "resolution": 64,
        "delta": 0.05,
        "deltas": [5e-2, 1e-2, 1e-3],
        "n_train": 40,
        "n_test": 20,
        "epochs": 15,
        "hidden": [8],
        "transfer_resolutions": [64, 128],
        "out": str(tmp_path / "run"),
    }
    cfg.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def test_resolve_config_precedence(tmp_path):
    path = _tiny_config(tmp_path, seed=7, n_train=99)
    cfg = resolve_config(str(path), {"n_train": 123})
    assert cfg.seed == 7
    assert cfg.n_train == 123  # flags win over the file
    assert cfg.n_modes == 16


def test_resolve_config_fast_presets(tmp_path):
    cfg = resolve_config(None, {"fast": True})
    assert (cfg.n_train, cfg.n_test, cfg.epochs, cfg.batch_size) == (200, 100, 600, 16)
    # explicit values beat the fast presets
    cfg = resolve_config(None, {"fast": True, "n_test": 33})
    assert cfg.n_test == 33


def test_resolve_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"not_a_key": 1}')
    assert main(["gen", "--config", str(path)]) == 1


def test_gradcheck_command():
    assert main(["gradcheck"]) == 0


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--no-such-flag"])
    assert exc.value.code == 1


def test_gen_train_and_reports_pipeline(tmp_path, capsys):
    cfg_path = _tiny_config(tmp_path)
    out = tmp_path / "run"

    assert main(["gen", "--config", str(cfg_path)]) == 0
    train_csv = out / "dataset" / "train_delta_0.05.csv"
    test_csv = out / "dataset" / "test_delta_0.05.csv"
    assert train_csv.exists() and test_csv.exists()
    assert train_csv.with_suffix(".meta.json").exists()

    # regeneration with the same seed is byte-identical
    before = train_csv.read_bytes()
    assert main(["gen", "--config", str(cfg_path)]) == 0
    assert train_csv.read_bytes() == before

    assert main(["train", "--config", str(cfg_path), "--gradcheck"]) == 0
    model = out / "models" / "scnet_delta_0.05.json"
    history = out / "models" / "scnet_delta_0.05_history.csv"
    assert model.exists() and history.exists()
    lines = history.read_text().splitlines()
    assert lines[0] == "epoch,train_loss,test_rel_error"
    assert len(lines) == 2 + 15  # header + epoch 0 + each epoch

    assert main(["profile", "--config", str(cfg_path)]) == 0
    profile_csv = out / "reports" / "profile.csv"
    assert profile_csv.exists()
    assert profile_csv.read_text().splitlines()[0] == "n,sigma_n,psi_mean,psi_std,tikhonov,tsvd"
    oracle_csv = out / "reports" / "oracle_search.csv"
    oracle_lines = oracle_csv.read_text().splitlines()
    assert oracle_lines[0] == "sample_id,family,best_alpha,rel_error"
    assert len(oracle_lines) == 1 + 2 * 20  # two families x n_test samples

    assert main(["transfer", "--config", str(cfg_path)]) == 0
    transfer_csv = out / "reports" / "transfer.csv"
    assert len(transfer_csv.read_text().splitlines()) == 1 + 2  # header + 2 resolutions

    assert main(["convergence", "--config", str(cfg_path), "--train-inline"]) == 0
    conv_csv = out / "reports" / "convergence.csv"
    meta = json.loads((out / "reports" / "convergence.meta.json").read_text())
    assert "scnet" in meta["slopes"]
    assert conv_csv.exists()

    # every command echoed the resolved config
    captured = capsys.readouterr().out
    assert "resolved config" in captured
    assert '"seed": 42' in captured


def test_missing_model_without_train_inline(tmp_path):
    cfg_path = _tiny_config(tmp_path)
    assert main(["profile", "--config", str(cfg_path)]) == 1


def test_missing_dataset_is_config_error(tmp_path):
    cfg_path = _tiny_config(tmp_path)
    assert main(["train", "--config", str(cfg_path)]) == 1


def test_aliasing_guard_is_numerical_failure(tmp_path):
    cfg_path = _tiny_config(tmp_path, transfer_resolutions=[16], train_inline=True)
    assert main(["transfer", "--config", str(cfg_path)]) == 2
