#!/usr/bin/env python3
"""
Volterra LDP - Resultados das Ferramentas

Cada ferramenta devolve um dicionário de resultado:

    {"success": bool, "artifacts": [...], "summary": {...},
     "error": str | None, "exit_code": int}

As exceções do motor são convertidas aqui, do mesmo modo que um cliente
HTTP converte respostas em dicionários; quem decide o código de saída é a
hierarquia de errors.py.
"""

from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
import structlog

from src.api.errors import VolterraLdpError

logger = structlog.get_logger(__name__)

ToolResult = Dict[str, Any]

# Formato de ponto flutuante dos CSVs: bytes idênticos para a mesma entrada
FLOAT_FORMAT = "%.12g"


def ok(artifacts: List[Path], summary: Optional[Dict[str, Any]] = None) -> ToolResult:
    return {
        "success": True,
        "artifacts": [str(p) for p in artifacts],
        "summary": summary or {},
        "error": None,
        "exit_code": 0,
    }


def failure(exc: VolterraLdpError) -> ToolResult:
    return {
        "success": False,
        "artifacts": [],
        "summary": {},
        "error": exc.message,
        "error_kind": exc.kind,
        "exit_code": exc.exit_code,
    }


def tool(name: str) -> Callable[[Callable[..., ToolResult]], Callable[..., ToolResult]]:
    """Converte VolterraLdpError no dicionário de falha e registra o desfecho."""

    def decorate(func: Callable[..., ToolResult]) -> Callable[..., ToolResult]:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> ToolResult:
            try:
                result = func(*args, **kwargs)
            except VolterraLdpError as exc:
                logger.error("ferramenta falhou", tool=name, kind=exc.kind, error=exc.message)
                return failure(exc)
            logger.info("ferramenta concluída", tool=name, artifacts=len(result["artifacts"]))
            return result

        return wrapper

    return decorate


def write_table(frame: pd.DataFrame, out_dir: Path, filename: str) -> Path:
    """Grava o DataFrame em CSV com formato numérico fixo."""
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / filename
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def finite_or_none(value: float) -> Optional[float]:
    """nan/inf viram None no resumo JSON."""
    return float(value) if np.isfinite(value) else None
