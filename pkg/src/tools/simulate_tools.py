#!/usr/bin/env python3
"""
Volterra LDP - Ferramenta simulate

Amostra caminhos conjuntos (W, B, B̂) e grava em formato longo.
"""

import numpy as np
import pandas as pd

from src.api.gaussian_engine import JointPathBatch, sample_paths
from src.api.specs import PathGrid
from src.config import RunConfig
from src.tools.results import ToolResult, ok, tool, write_table

COLUMNS = ["path", "t", "W", "B", "Bhat"]


def path_rows(batch: JointPathBatch, grid: PathGrid) -> pd.DataFrame:
    """Uma linha por (caminho, t_i), incluindo t_0 = 0 com valores nulos."""
    paths, n = batch.paths, grid.n
    origin = np.zeros((paths, 1))

    def with_origin(values: np.ndarray) -> np.ndarray:
        return np.hstack([origin, values]).ravel()

    return pd.DataFrame(
        {
            "path": np.repeat(np.arange(paths), n + 1),
            "t": np.tile(grid.times, paths),
            "W": with_origin(batch.w_values),
            "B": with_origin(batch.b_values),
            "Bhat": with_origin(batch.bhat_values),
        },
        columns=COLUMNS,
    )


@tool("simulate")
def run_simulate(config: RunConfig) -> ToolResult:
    """Grava `paths.csv` (path,t,W,B,Bhat)."""
    block = config.simulate
    grid = PathGrid(n=block.steps, T=config.model.T)
    batch = sample_paths(
        config.model.kernel, grid, block.paths, config.seed, config.resolved_threads()
    )
    path = write_table(path_rows(batch, grid), config.resolved_output_dir(), "paths.csv")
    return ok([path], {"paths": batch.paths, "steps": grid.n})
