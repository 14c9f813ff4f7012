#!/usr/bin/env python3
"""
Volterra LDP - Linha de Comando

Binário único com um subcomando por pipeline:

    volterra-ldp kernel-check      --config bundled:kernel_fbm
    volterra-ldp rate-function     --config run.json --out out/
    volterra-ldp smile | mc-verify | smalltime-verify | simulate | eigen

Flags comuns: --config, --threads, --seed, --out. Cada execução grava os
CSVs do subcomando e um `run.manifest` (JSON) no diretório de saída.

Códigos de saída: 0 sucesso, 2 configuração, 3 falha numérica, 4 recusa do
gate de auto-similaridade. Em falha, uma única linha JSON vai para o stderr.
"""

import argparse
import json
import platform
import sys
import time
from importlib import metadata
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd
import scipy
import structlog

from src import __version__
from src.api.errors import VolterraLdpError
from src.config import RunConfig, load_run_config
from src.logging_config import configure_logging
from src.tools.eigen_tools import run_eigen
from src.tools.kernel_tools import run_kernel_check
from src.tools.mc_tools import run_mc_verify
from src.tools.rate_tools import run_rate_function
from src.tools.results import ToolResult
from src.tools.simulate_tools import run_simulate
from src.tools.smalltime_tools import run_smalltime_verify
from src.tools.smile_tools import run_smile

logger = structlog.get_logger(__name__)

COMMANDS: Dict[str, Callable[[RunConfig], ToolResult]] = {
    "kernel-check": run_kernel_check,
    "rate-function": run_rate_function,
    "smile": run_smile,
    "mc-verify": run_mc_verify,
    "smalltime-verify": run_smalltime_verify,
    "simulate": run_simulate,
    "eigen": run_eigen,
}

MANIFEST_NAME = "run.manifest"
INTERNAL_EXIT_CODE = 1


# =============================================================================
# ARGUMENTOS
# =============================================================================


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"semente fora de [0, 2^64): {value}")
    return seed


def _threads(value: str) -> int:
    threads = int(value)
    if threads < 1:
        raise argparse.ArgumentTypeError(f"--threads deve ser >= 1, recebido {value}")
    return threads


class _Parser(argparse.ArgumentParser):
    """Erros de argumento seguem o contrato: linha JSON no stderr e código 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        _emit_error({"error": "config", "exit_code": 2, "message": message})
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", required=True, help="arquivo JSON ou bundled:<nome> (ver configs/)"
    )
    common.add_argument("--threads", type=_threads, help="limite de workers (padrão: núcleos)")
    common.add_argument("--seed", type=_seed, help="semente da execução")
    common.add_argument("--out", type=Path, help="diretório de saída dos artefatos")

    parser = _Parser(prog="volterra-ldp", description="Grandes desvios em modelos de volatilidade fracionária")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, func in COMMANDS.items():
        summary = (func.__doc__ or "").strip().splitlines()[0]
        commands.add_parser(name, parents=[common], help=summary)
    return parser


# =============================================================================
# MANIFESTO
# =============================================================================


def _package_version() -> str:
    try:
        return metadata.version("volterra-ldp")
    except metadata.PackageNotFoundError:
        return __version__


def build_manifest(
    command: str,
    source: str,
    config: RunConfig,
    result: ToolResult,
    wall_time: float,
) -> Dict[str, object]:
    return {
        "command": command,
        "config_source": source,
        "config_hash": config.digest(),
        "seed": config.seed,
        "threads": config.resolved_threads(),
        "versions": {
            "volterra-ldp": _package_version(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
        },
        "wall_time_seconds": round(wall_time, 3),
        "success": result["success"],
        "exit_code": result["exit_code"],
        "error": result.get("error"),
        "artifacts": [Path(p).name for p in result["artifacts"]],
        "summary": result["summary"],
    }


def write_manifest(out_dir: Path, manifest: Dict[str, object]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def _emit_error(payload: Dict[str, object]) -> None:
    sys.stderr.write(json.dumps(payload, ensure_ascii=False) + "\n")
    sys.stderr.flush()


# =============================================================================
# EXECUÇÃO
# =============================================================================


def run(command: str, config: RunConfig, source: str = "<memória>") -> ToolResult:
    """Executa o pipeline do subcomando e grava o manifesto."""
    if command not in COMMANDS:
        raise VolterraLdpError(f"subcomando desconhecido: {command}")
    started = time.perf_counter()
    result = COMMANDS[command](config)
    manifest = build_manifest(command, source, config, result, time.perf_counter() - started)
    write_manifest(config.resolved_output_dir(), manifest)
    return result


def main(argv: Optional[List[str]] = None) -> int:
    """Ponto de entrada da CLI; devolve o código de saída."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = load_run_config(args.config).with_overrides(
            seed=args.seed, threads=args.threads, output_dir=args.out
        )
    except VolterraLdpError as exc:
        _emit_error(exc.as_dict())
        return exc.exit_code

    logger.info("=" * 60)
    logger.info(f"Volterra LDP v{__version__} - {args.command}")
    logger.info("=" * 60)
    logger.info("configuração carregada", source=args.config, hash=config.digest()[:12], seed=config.seed)

    try:
        result = run(args.command, config, args.config)
    except VolterraLdpError as exc:
        _emit_error(exc.as_dict())
        return exc.exit_code
    except Exception as exc:
        logger.exception("erro inesperado", command=args.command)
        _emit_error({"error": "internal", "exit_code": INTERNAL_EXIT_CODE, "message": str(exc)})
        return INTERNAL_EXIT_CODE

    if not result["success"]:
        _emit_error(
            {
                "error": result.get("error_kind", "error"),
                "exit_code": result["exit_code"],
                "message": result["error"],
            }
        )
        return int(result["exit_code"])

    for artifact in result["artifacts"]:
        logger.info("artefato gravado", path=artifact)
    return 0


if __name__ == "__main__":
    sys.exit(main())
