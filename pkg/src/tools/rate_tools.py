#!/usr/bin/env python3
"""
Volterra LDP - Ferramenta rate-function

Avalia I_T(x) sobre a grade de x do arquivo de configuração e grava a
tabela de valores e os controles ótimos (dados para gráfico).
"""

from typing import List

import pandas as pd

from src.api.rate_solver import RateResult, rate_function
from src.config import RunConfig
from src.tools.results import ToolResult, finite_or_none, ok, tool, write_table

COLUMNS = ["x", "I", "converged", "starts", "n", "value_at_2n"]


def rate_rows(x_grid: List[float], results: List[RateResult]) -> pd.DataFrame:
    rows = []
    for x, result in zip(x_grid, results):
        refined = result.value_at_2n
        rows.append(
            {
                "x": x,
                "I": result.value,
                "converged": result.converged,
                "starts": result.starts_tried,
                "n": result.n,
                "value_at_2n": float("nan") if refined is None else refined,
            }
        )
    return pd.DataFrame(rows, columns=COLUMNS)


def control_rows(x_grid: List[float], results: List[RateResult]) -> pd.DataFrame:
    """ḟ por célula (ponto médio) e f̂ no ponto direito da célula."""
    frames = []
    for x, result in zip(x_grid, results):
        path = result.optimizer_path
        frames.append(
            pd.DataFrame(
                {
                    "x": x,
                    "t": path.grid.midpoints,
                    "fdot": path.fdot,
                    "fhat": result.fhat[1:],
                }
            )
        )
    return pd.concat(frames, ignore_index=True)


@tool("rate-function")
def run_rate_function(config: RunConfig) -> ToolResult:
    """
    Grava `rate_function.csv` (x,I,converged,starts,n,value_at_2n) e
    `rate_controls.csv` (x,t,fdot,fhat).
    """
    model = config.model
    block = config.rate_function
    x_grid = [float(x) for x in block.x_grid]
    results = [
        rate_function(
            model.kernel, model.sigma, model.rho, x, block.solver, config.resolved_threads()
        )
        for x in x_grid
    ]
    out = config.resolved_output_dir()
    table = write_table(rate_rows(x_grid, results), out, "rate_function.csv")
    controls = write_table(control_rows(x_grid, results), out, "rate_controls.csv")
    summary = {
        "values": {str(x): finite_or_none(r.value) for x, r in zip(x_grid, results)},
        "all_converged": all(r.converged for r in results),
    }
    return ok([table, controls], summary)
