#!/usr/bin/env python3
"""Volterra LDP - Ferramenta smalltime-verify"""

import pandas as pd

from src.api.mc_harness import smalltime_check
from src.config import RunConfig
from src.tools.results import ToolResult, finite_or_none, ok, tool, write_table

COLUMNS = ["eps", "prob", "se", "scaled_log", "theory_I", "slope"]


@tool("smalltime-verify")
def run_smalltime_verify(config: RunConfig) -> ToolResult:
    """
    Grava `smalltime_verify.csv`; a coluna eps traz as maturidades t.

    Kernels não auto-similares terminam com recusa do gate (código 4).
    """
    block = config.smalltime_verify
    estimate = smalltime_check(
        config.model,
        block.y,
        block.t_grid,
        block.paths,
        config.seed,
        steps=block.steps,
        ks_eps=block.ks_eps,
        ks_paths=block.ks_paths,
        config=block.solver,
        threads=config.resolved_threads(),
    )
    frame = pd.DataFrame(estimate.rows(), columns=COLUMNS)
    path = write_table(frame, config.resolved_output_dir(), "smalltime_verify.csv")
    summary = {
        "slope": finite_or_none(estimate.slope_estimate),
        "theory_I_hat": finite_or_none(estimate.theory),
        "relative_error": finite_or_none(estimate.relative_error),
        **{k: finite_or_none(v) for k, v in estimate.diagnostics.items()},
    }
    return ok([path], summary)
