#!/usr/bin/env python3
"""
Testes da CLI: subcomandos de ponta a ponta com configurações pequenas,
códigos de saída, linha de erro JSON e manifesto.
"""

import json

import pandas as pd
import pytest

from src.cli import MANIFEST_NAME, main


def write_config(tmp_path, body: dict, name: str = "run.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(body), encoding="utf-8")
    return str(path)


def error_line(captured: str) -> dict:
    """A última linha JSON com exit_code no stderr."""
    for line in reversed(captured.strip().splitlines()):
        try:
            payload = json.loads(line)
        except json.JSONDecodeError:
            continue
        if isinstance(payload, dict) and "exit_code" in payload:
            return payload
    raise AssertionError(f"nenhuma linha de erro JSON em: {captured!r}")


CONSTANT_RL = {
    "kernel": {"family": "riemann_liouville", "H": 0.3},
    "sigma": {"family": "constant", "sigma0": 0.2},
    "rho": -0.7,
    "T": 1.0,
}


# ---------------------------------------------------------------------------
# Subcomandos
# ---------------------------------------------------------------------------


def test_rate_function_constant_sigma(tmp_path):
    """σ₀ = 0.2, x = 0.1: linha com I = 0.125 ± 1e-4."""
    config = write_config(
        tmp_path,
        {
            "model": CONSTANT_RL,
            "rate_function": {"x_grid": [0.1, -0.2], "solver": {"n": 16, "starts": 2}},
        },
    )
    out = tmp_path / "out"
    assert main(["rate-function", "--config", config, "--out", str(out)]) == 0

    table = pd.read_csv(out / "rate_function.csv")
    assert list(table.columns) == ["x", "I", "converged", "starts", "n", "value_at_2n"]
    assert table.loc[0, "I"] == pytest.approx(0.125, abs=1e-4)
    assert table.loc[1, "I"] == pytest.approx(0.5, abs=1e-4)
    assert table.loc[0, "n"] == 16
    assert table.loc[0, "value_at_2n"] == pytest.approx(0.125, abs=1e-4)
    assert (out / "rate_controls.csv").exists()


def test_kernel_check_fbm_holder_slope(tmp_path):
    config = write_config(
        tmp_path,
        {
            "model": {"kernel": {"family": "fbm", "H": 0.3}, "sigma": {"family": "constant"}},
            "kernel_check": {"grid_points": 5, "t_samples": 4},
        },
    )
    out = tmp_path / "out"
    assert main(["kernel-check", "--config", config, "--out", str(out)]) == 0

    report = pd.read_csv(out / "kernel_check.csv").set_index("check")
    assert list(report.columns) == ["value", "reference", "abs_error", "passed"]
    assert 0.55 <= report.loc["holder_slope", "value"] <= 0.65
    assert report.loc["covariance_max_rel_error", "value"] <= 1e-3
    assert bool(report.loc["self_similarity_defect", "passed"])


def test_smile_writes_table(tmp_path):
    config = write_config(
        tmp_path,
        {
            "model": CONSTANT_RL,
            "smile": {"y_grid": [-0.1, 0.0, 0.1], "solver": {"n": 8, "starts": 1, "refine": False}},
        },
    )
    out = tmp_path / "out"
    assert main(["smile", "--config", config, "--out", str(out)]) == 0
    table = pd.read_csv(out / "smile.csv", keep_default_na=False)
    assert list(table.columns) == ["y", "I", "I_hat", "binary", "ivol_limit", "flag"]
    assert table.loc[1, "flag"] == "y_zero"
    assert float(table.loc[2, "ivol_limit"]) == pytest.approx(0.2, abs=1e-6)


def test_mc_verify_writes_oracle_and_drift_tables(tmp_path):
    config = write_config(
        tmp_path,
        {
            "model": {"kernel": {"family": "brownian"}, "sigma": {"family": "constant", "sigma0": 0.2}},
            "mc_verify": {
                "y": 0.1,
                "eps_grid": [0.2, 0.15, 0.1, 0.08],
                "paths": 20000,
                "steps": 2,
                "compare_drift": True,
                "solver": {"n": 8, "starts": 1},
            },
        },
    )
    out = tmp_path / "out"
    assert main(["mc-verify", "--config", config, "--out", str(out)]) == 0
    table = pd.read_csv(out / "mc_verify.csv")
    assert list(table.columns) == ["eps", "prob", "se", "scaled_log", "theory_I", "slope"]
    assert len(table) == 4
    assert table["theory_I"].iloc[0] == pytest.approx(0.125, abs=1e-4)
    assert (out / "mc_oracle.csv").exists()
    assert (out / "mc_verify_nodrift.csv").exists()


def test_eigen_writes_spectrum(tmp_path):
    config = write_config(
        tmp_path,
        {
            "model": {"kernel": {"family": "brownian"}, "sigma": {"family": "constant"}},
            "eigen": {"steps": 64, "count": 5},
        },
    )
    out = tmp_path / "out"
    assert main(["eigen", "--config", config, "--out", str(out)]) == 0
    eigen = pd.read_csv(out / "eigen.csv")
    assert list(eigen.columns) == ["k", "eigenvalue", "cumulative_sum"]
    assert len(eigen) == 5
    moment = pd.read_csv(out / "moment.csv")
    assert moment.loc[0, "eps"] == pytest.approx(0.5 * moment.loc[0, "threshold"])


# ---------------------------------------------------------------------------
# Reprodutibilidade e manifesto
# ---------------------------------------------------------------------------


def test_simulate_is_byte_reproducible(tmp_path):
    """Mesma configuração e semente: CSV idêntico byte a byte, com qualquer --threads."""
    first, second = tmp_path / "a", tmp_path / "b"
    args = ["simulate", "--config", "bundled:simulate_fbm", "--seed", "99"]
    assert main(args + ["--out", str(first), "--threads", "1"]) == 0
    assert main(args + ["--out", str(second), "--threads", "3"]) == 0
    assert (first / "paths.csv").read_bytes() == (second / "paths.csv").read_bytes()

    frame = pd.read_csv(first / "paths.csv")
    assert list(frame.columns) == ["path", "t", "W", "B", "Bhat"]
    assert len(frame) == 4 * 17


def test_seed_override_changes_paths(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", "bundled:simulate_fbm", "--seed", "1", "--out", str(first)]) == 0
    assert main(["simulate", "--config", "bundled:simulate_fbm", "--seed", "2", "--out", str(second)]) == 0
    assert (first / "paths.csv").read_bytes() != (second / "paths.csv").read_bytes()


def test_manifest_contents(tmp_path):
    out = tmp_path / "out"
    assert main(["simulate", "--config", "bundled:simulate_fbm", "--seed", "5", "--out", str(out)]) == 0
    manifest = json.loads((out / MANIFEST_NAME).read_text(encoding="utf-8"))
    assert manifest["command"] == "simulate"
    assert manifest["seed"] == 5
    assert len(manifest["config_hash"]) == 64
    assert manifest["artifacts"] == ["paths.csv"]
    assert {"python", "numpy", "scipy", "pandas", "volterra-ldp"} <= set(manifest["versions"])
    assert manifest["wall_time_seconds"] >= 0.0
    assert manifest["success"] is True


# ---------------------------------------------------------------------------
# Erros e códigos de saída
# ---------------------------------------------------------------------------


def test_smalltime_gate_refusal_exit_code(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["smalltime-verify", "--config", "bundled:smalltime_fou", "--out", str(out)])
    assert code == 4
    payload = error_line(capsys.readouterr().err)
    assert payload["error"] == "gate"
    assert payload["exit_code"] == 4
    manifest = json.loads((out / MANIFEST_NAME).read_text(encoding="utf-8"))
    assert manifest["success"] is False


def test_invalid_model_reports_field_path(tmp_path, capsys):
    config = write_config(
        tmp_path,
        {"model": {"kernel": {"family": "fbm", "H": 1.5}, "sigma": {"family": "constant"}}},
    )
    assert main(["simulate", "--config", config, "--out", str(tmp_path / "out")]) == 2
    payload = error_line(capsys.readouterr().err)
    assert payload["error"] == "config"
    assert "model.kernel" in payload["message"]


def test_unknown_field_rejected(tmp_path, capsys):
    config = write_config(
        tmp_path,
        {"model": {"kernel": {"family": "brownian"}, "sigma": {"family": "constant"}}, "paths": 10},
    )
    assert main(["simulate", "--config", config]) == 2
    assert "paths" in error_line(capsys.readouterr().err)["message"]


def test_missing_config_file(tmp_path, capsys):
    assert main(["eigen", "--config", str(tmp_path / "nada.json")]) == 2
    assert error_line(capsys.readouterr().err)["exit_code"] == 2


def test_bad_flag_exits_with_config_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--config", "bundled:simulate_fbm", "--threads", "0"])
    assert info.value.code == 2
    assert error_line(capsys.readouterr().err)["error"] == "config"


def test_numerical_failure_exit_code(tmp_path, capsys):
    """Nenhum acerto do evento: a estimação falha com código 3."""
    config = write_config(
        tmp_path,
        {
            "model": {"kernel": {"family": "brownian"}, "sigma": {"family": "constant", "sigma0": 0.2}},
            "mc_verify": {
                "y": 3.0,
                "eps_grid": [0.1, 0.05, 0.02],
                "paths": 100,
                "steps": 2,
                "solver": {"n": 4, "starts": 0},
            },
        },
    )
    assert main(["mc-verify", "--config", config, "--out", str(tmp_path / "out")]) == 3
    assert error_line(capsys.readouterr().err)["error"] == "estimation"
