#!/usr/bin/env python3
"""
Volterra LDP - Configuração

Duas camadas:
    Settings   - parâmetros de processo lidos de variáveis de ambiente com
                 prefixo VOLTERRA_LDP_ (e de um .env opcional)
    RunConfig  - arquivo JSON da execução: modelo, blocos por subcomando,
                 semente e diretório de saída

Erros de validação viram ConfigError com o caminho do campo (model.kernel.H).
"""

import hashlib
import json
from functools import lru_cache
from pathlib import Path
from typing import List, Literal, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.api.errors import ConfigError
from src.api.specs import ModelSpec, SolverConfig

# =============================================================================
# SETTINGS DE PROCESSO
# =============================================================================


class Settings(BaseSettings):
    """Configuração de processo (ambiente + .env)."""

    model_config = SettingsConfigDict(env_prefix="VOLTERRA_LDP_", extra="ignore")

    log_level: str = "INFO"
    log_json: bool = False
    threads: Optional[int] = None
    output_dir: Path = Path("out")
    default_seed: int = 2024


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings carregadas uma vez; o .env local não sobrescreve o ambiente."""
    load_dotenv(override=False)
    return Settings()


# =============================================================================
# BLOCOS POR SUBCOMANDO
# =============================================================================


class _Block(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class KernelCheckBlock(_Block):
    grid_points: int = Field(default=20, gt=1)
    modulus_h: float = Field(default=0.1, gt=0.0)
    h_grid: Optional[List[float]] = None
    t_samples: int = Field(default=8, gt=0)
    eps: float = Field(default=0.5, gt=0.0, le=1.0)


class RateFunctionBlock(_Block):
    x_grid: List[float] = Field(default_factory=lambda: [-0.1, 0.05, 0.1])
    solver: SolverConfig = SolverConfig()


class SmileBlock(_Block):
    y_grid: List[float] = Field(default_factory=lambda: [-0.2, -0.1, 0.1, 0.2])
    regime: Literal["small_noise", "small_time"] = "small_noise"
    solver: SolverConfig = SolverConfig(refine=False)
    # vol implícita Monte Carlo por linha; 0 desliga
    mc_paths: int = Field(default=0, ge=0)
    mc_scale: float = Field(default=0.05, gt=0.0, le=1.0)
    mc_steps: int = Field(default=64, gt=0, le=1024)


class McVerifyBlock(_Block):
    y: float = 0.1
    eps_grid: List[float] = Field(default_factory=lambda: [1 / 30, 1 / 35, 1 / 40, 1 / 45])
    paths: int = Field(default=100_000, gt=0)
    steps: int = Field(default=256, gt=0, le=1024)
    include_drift: bool = True
    compare_drift: bool = False
    solver: SolverConfig = SolverConfig(refine=False)


class SmallTimeBlock(_Block):
    y: float = 0.3
    t_grid: List[float] = Field(default_factory=lambda: [0.05, 0.08, 0.12, 0.2])
    paths: int = Field(default=100_000, gt=0)
    steps: int = Field(default=256, gt=0, le=1024)
    ks_eps: float = Field(default=0.5, gt=0.0, le=1.0)
    ks_paths: int = Field(default=20_000, gt=1)
    solver: SolverConfig = SolverConfig(refine=False)


class SimulateBlock(_Block):
    steps: int = Field(default=16, gt=0, le=1024)
    paths: int = Field(default=4, gt=0)


class EigenBlock(_Block):
    steps: int = Field(default=512, gt=0, le=1024)
    count: int = Field(default=20, gt=0)
    a: float = Field(default=1.0, gt=0.0)
    eps: Optional[float] = None
    mc_paths: int = Field(default=0, ge=0)
    mc_steps: int = Field(default=64, gt=0, le=1024)


# =============================================================================
# RUN CONFIG
# =============================================================================


class RunConfig(BaseModel):
    """Arquivo de execução completo."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    description: str = ""
    model: ModelSpec
    seed: int = Field(default_factory=lambda: get_settings().default_seed, ge=0)
    threads: Optional[int] = None
    output_dir: Optional[Path] = None
    kernel_check: KernelCheckBlock = KernelCheckBlock()
    rate_function: RateFunctionBlock = RateFunctionBlock()
    smile: SmileBlock = SmileBlock()
    mc_verify: McVerifyBlock = McVerifyBlock()
    smalltime_verify: SmallTimeBlock = SmallTimeBlock()
    simulate: SimulateBlock = SimulateBlock()
    eigen: EigenBlock = EigenBlock()

    def with_overrides(
        self,
        seed: Optional[int] = None,
        threads: Optional[int] = None,
        output_dir: Optional[Path] = None,
    ) -> "RunConfig":
        """Flags da CLI sobrescrevem os campos escalares do arquivo."""
        update = {}
        if seed is not None:
            update["seed"] = seed
        if threads is not None:
            update["threads"] = threads
        if output_dir is not None:
            update["output_dir"] = Path(output_dir)
        return parse_run_config({**self.model_dump(mode="json"), **_jsonable(update)})

    def resolved_output_dir(self) -> Path:
        return self.output_dir or get_settings().output_dir

    def resolved_threads(self) -> Optional[int]:
        return self.threads if self.threads is not None else get_settings().threads

    def digest(self) -> str:
        """sha256 da forma canônica do arquivo."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _jsonable(update: dict) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in update.items()}


def _format_validation(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        location = ".".join(str(p) for p in err.get("loc", ())) or "<raiz>"
        parts.append(f"{location}: {err.get('msg', 'inválido')}")
    return "; ".join(parts)


def parse_run_config(data: dict) -> RunConfig:
    """Valida um dicionário já carregado."""
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_validation(exc)) from exc


def load_run_config(source: str) -> RunConfig:
    """
    Carrega um RunConfig de um caminho ou de `bundled:<nome>`.

    Raises:
        ConfigError: arquivo ausente, JSON inválido ou validação falha.
    """
    if source.startswith("bundled:"):
        from src.resources import read_resource

        text = read_resource(source)
    else:
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"arquivo de configuração não encontrado: {source}")
        text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON inválido em {source}: linha {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: o arquivo deve conter um objeto JSON")
    return parse_run_config(data)
