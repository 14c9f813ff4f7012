#!/usr/bin/env python3
"""
Volterra LDP - Ferramenta eigen

Espectro de Karhunen-Loève de B̂ e a cota exponencial de momentos. Sem ε
configurado usa metade do limiar (4aλ₁)^-1.
"""

import numpy as np
import pandas as pd

from src.api.gaussian_engine import exponential_moment_mc, kl_spectrum, moment_bound
from src.api.specs import PathGrid
from src.config import RunConfig
from src.tools.results import ToolResult, finite_or_none, ok, tool, write_table

COLUMNS = ["k", "eigenvalue", "cumulative_sum"]
MOMENT_COLUMNS = ["a", "eps", "threshold", "bound", "eigen_sum", "mc_mean", "mc_se", "mc_paths"]


@tool("eigen")
def run_eigen(config: RunConfig) -> ToolResult:
    """Grava `eigen.csv` (k,eigenvalue,cumulative_sum) e `moment.csv`."""
    spec = config.model.kernel
    block = config.eigen
    grid = PathGrid(n=block.steps, T=spec.T)
    # o limiar e a soma da cota usam o espectro completo da malha
    full = kl_spectrum(spec, grid)
    shown = full.eigenvalues[: block.count]
    eigen = pd.DataFrame(
        {
            "k": np.arange(1, shown.size + 1),
            "eigenvalue": shown,
            "cumulative_sum": np.cumsum(shown),
        },
        columns=COLUMNS,
    )

    eps = block.eps if block.eps is not None else 0.5 / (4.0 * block.a * full.leading)
    bound = moment_bound(spec, block.a, eps, spectrum=full)

    mc_mean = mc_se = float("nan")
    if block.mc_paths > 0:
        estimate = exponential_moment_mc(
            spec,
            block.a,
            eps,
            PathGrid(n=block.mc_steps, T=spec.T),
            block.mc_paths,
            config.seed,
            config.resolved_threads(),
        )
        mc_mean, mc_se = estimate.mean, estimate.standard_error
    moment = pd.DataFrame(
        [
            {
                "a": block.a,
                "eps": eps,
                "threshold": bound.threshold,
                "bound": bound.bound,
                "eigen_sum": bound.eigen_sum,
                "mc_mean": mc_mean,
                "mc_se": mc_se,
                "mc_paths": block.mc_paths,
            }
        ],
        columns=MOMENT_COLUMNS,
    )

    out = config.resolved_output_dir()
    artifacts = [write_table(eigen, out, "eigen.csv"), write_table(moment, out, "moment.csv")]
    return ok(
        artifacts,
        {
            "leading": full.leading,
            "truncation_error": full.trace - float(shown.sum()),
            "threshold": bound.threshold,
            "bound": bound.bound,
            "mc_mean": finite_or_none(mc_mean),
        },
    )
