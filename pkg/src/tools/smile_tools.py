#!/usr/bin/env python3
"""
Volterra LDP - Ferramenta smile

Tabela de assíntotas por y no regime escolhido e, opcionalmente, a vol
implícita Monte Carlo na menor escala configurada.
"""

import math

import pandas as pd
import structlog

from src.api.asymptotics import SmileTable, mc_implied_vol, smile
from src.api.errors import NumericalError
from src.config import RunConfig, SmileBlock
from src.tools.results import ToolResult, ok, tool, write_table

logger = structlog.get_logger(__name__)

MC_COLUMNS = ["y", "scale", "implied_vol", "price", "se", "ivol_limit", "rel_gap"]


def mc_rows(config: RunConfig, block: SmileBlock, table: SmileTable) -> pd.DataFrame:
    rows = []
    for index, row in enumerate(table.rows):
        if row.y == 0.0 or not math.isfinite(row.ivol_limit):
            continue
        try:
            estimate = mc_implied_vol(
                config.model,
                row.y,
                table.regime,
                block.mc_scale,
                block.mc_paths,
                config.seed + index,
                block.mc_steps,
                config.resolved_threads(),
            )
        except NumericalError as exc:
            # preço MC fora da banda de não arbitragem: linha omitida
            logger.warning("vol implícita MC indisponível", y=row.y, error=exc.message)
            continue
        rows.append(
            {
                "y": row.y,
                "scale": block.mc_scale,
                "implied_vol": estimate.implied_vol,
                "price": estimate.price,
                "se": estimate.standard_error,
                "ivol_limit": row.ivol_limit,
                "rel_gap": abs(estimate.implied_vol - row.ivol_limit) / row.ivol_limit,
            }
        )
    return pd.DataFrame(rows, columns=MC_COLUMNS)


@tool("smile")
def run_smile(config: RunConfig) -> ToolResult:
    """
    Grava `smile.csv` (y,I,I_hat,binary,ivol_limit,flag) e, com mc_paths > 0,
    `smile_mc.csv`.
    """
    block = config.smile
    table = smile(config.model, block.y_grid, block.regime, block.solver, config.resolved_threads())
    out = config.resolved_output_dir()
    artifacts = [write_table(table.to_frame(), out, "smile.csv")]
    if block.mc_paths > 0:
        artifacts.append(write_table(mc_rows(config, block, table), out, "smile_mc.csv"))
    flagged = [r.y for r in table.rows if r.flag]
    return ok(artifacts, {"regime": block.regime, "rows": len(table.rows), "flagged": flagged})
