#!/usr/bin/env python3
"""
Volterra LDP - Logging

structlog sobre o logging da biblioteca padrão, sempre no stderr para que o
stdout fique livre. Renderização de console por padrão, JSON quando
VOLTERRA_LDP_LOG_JSON está ativo.
"""

import logging
import sys
from typing import Optional

import structlog

_configured = False


def configure_logging(level: Optional[str] = None, json_output: Optional[bool] = None) -> None:
    """Configura stdlib + structlog; chamadas seguintes só ajustam o nível."""
    global _configured
    from src.config import get_settings

    settings = get_settings()
    level_name = (level or settings.log_level).upper()
    as_json = settings.log_json if json_output is None else json_output
    numeric = getattr(logging, level_name, logging.INFO)

    root = logging.getLogger()
    if _configured:
        root.setLevel(numeric)
        return

    logging.basicConfig(level=numeric, format="%(message)s", stream=sys.stderr, force=True)
    renderer = (
        structlog.processors.JSONRenderer()
        if as_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            renderer,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )
    _configured = True
