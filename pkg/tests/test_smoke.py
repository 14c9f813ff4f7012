#!/usr/bin/env python3
"""
Smoke tests para o Volterra LDP.

Verifica que os módulos principais importam, que as configurações embutidas
são válidas e que a camada de configuração respeita o ambiente.
"""

import importlib
import os
import sys

import pytest

# Garantir que o PYTHONPATH aponta para a raiz do projeto
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


# ---------------------------------------------------------------------------
# Testes de importação
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "module",
    [
        "src.api.kernels",
        "src.api.gaussian_engine",
        "src.api.rate_solver",
        "src.api.mc_harness",
        "src.api.asymptotics",
        "src.cli",
        "src.main",
    ],
)
def test_import_modules(module):
    assert importlib.import_module(module) is not None


@pytest.mark.parametrize(
    "module,entry",
    [
        ("src.tools.kernel_tools", "run_kernel_check"),
        ("src.tools.rate_tools", "run_rate_function"),
        ("src.tools.smile_tools", "run_smile"),
        ("src.tools.mc_tools", "run_mc_verify"),
        ("src.tools.smalltime_tools", "run_smalltime_verify"),
        ("src.tools.simulate_tools", "run_simulate"),
        ("src.tools.eigen_tools", "run_eigen"),
    ],
)
def test_import_tools(module, entry):
    """Cada subcomando tem sua ferramenta."""
    assert callable(getattr(importlib.import_module(module), entry))


def test_every_command_registered():
    from src.cli import COMMANDS

    assert set(COMMANDS) == {
        "kernel-check",
        "rate-function",
        "smile",
        "mc-verify",
        "smalltime-verify",
        "simulate",
        "eigen",
    }


# ---------------------------------------------------------------------------
# Resources: configurações embutidas
# ---------------------------------------------------------------------------


def test_bundled_configs_listed():
    from src.resources import get_resources_list

    names = {r["name"] for r in get_resources_list()}
    assert {"kernel_fbm", "rate_constant", "smalltime_fou", "simulate_fbm"} <= names
    assert all(r["uri"].startswith("bundled:") for r in get_resources_list())


def test_every_bundled_config_validates():
    from src.config import load_run_config
    from src.resources import get_resources_list

    for resource in get_resources_list():
        config = load_run_config(resource["uri"])
        assert config.description


def test_unknown_bundled_config():
    from src.api.errors import ConfigError
    from src.resources import read_resource

    with pytest.raises(ConfigError):
        read_resource("bundled:inexistente")
    with pytest.raises(ConfigError):
        read_resource("https://exemplo.com/x.json")


# ---------------------------------------------------------------------------
# Testes de configuração: variáveis de ambiente
# ---------------------------------------------------------------------------


def test_settings_defaults(monkeypatch):
    from src.config import get_settings

    monkeypatch.delenv("VOLTERRA_LDP_LOG_LEVEL", raising=False)
    monkeypatch.delenv("VOLTERRA_LDP_DEFAULT_SEED", raising=False)
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.log_level == "INFO"
    assert settings.default_seed == 2024
    get_settings.cache_clear()


def test_settings_env_override(monkeypatch):
    """VOLTERRA_LDP_DEFAULT_SEED alimenta a semente padrão do RunConfig."""
    from src.config import get_settings, parse_run_config

    monkeypatch.setenv("VOLTERRA_LDP_DEFAULT_SEED", "77")
    get_settings.cache_clear()
    try:
        config = parse_run_config(
            {"model": {"kernel": {"family": "brownian"}, "sigma": {"family": "constant"}}}
        )
        assert config.seed == 77
    finally:
        get_settings.cache_clear()


def test_overrides_and_digest(tmp_path):
    from src.config import load_run_config

    base = load_run_config("bundled:simulate_fbm")
    changed = base.with_overrides(seed=5, threads=2, output_dir=tmp_path)
    assert changed.seed == 5
    assert changed.threads == 2
    assert changed.resolved_output_dir() == tmp_path
    assert base.digest() == load_run_config("bundled:simulate_fbm").digest()
    assert base.digest() != changed.digest()


def test_kernel_horizon_inherited():
    """O kernel herda T do modelo; H do modelo vem do kernel."""
    from src.config import parse_run_config

    config = parse_run_config(
        {
            "model": {
                "kernel": {"family": "fbm", "H": 0.3},
                "sigma": {"family": "constant"},
                "T": 2.0,
            }
        }
    )
    assert config.model.kernel.T == 2.0
    assert config.model.H == 0.3


def test_conflicting_horizon_rejected():
    from src.api.errors import ConfigError
    from src.config import parse_run_config

    with pytest.raises(ConfigError):
        parse_run_config(
            {
                "model": {
                    "kernel": {"family": "fbm", "H": 0.3, "T": 1.0},
                    "sigma": {"family": "constant"},
                    "T": 2.0,
                }
            }
        )
