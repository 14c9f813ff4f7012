#!/usr/bin/env python3
"""
Volterra LDP - Ferramenta mc-verify

Verificação Monte Carlo do regime de ruído pequeno: probabilidades do
evento por ε, inclinação empírica contra I_T(y) e, para σ constante, o
oráculo gaussiano exato.
"""

import math
from typing import Dict

import pandas as pd

from src.api.mc_harness import LdpEstimate, gaussian_tail_probability, ldp_slope
from src.api.rate_solver import rate_function
from src.api.specs import PathGrid
from src.config import RunConfig
from src.tools.results import ToolResult, finite_or_none, ok, tool, write_table

COLUMNS = ["eps", "prob", "se", "scaled_log", "theory_I", "slope"]
ORACLE_COLUMNS = ["eps", "prob", "exact", "z_score"]


def oracle_rows(config: RunConfig, estimate: LdpEstimate, include_drift: bool) -> pd.DataFrame:
    rows = []
    for eps, prob, se in zip(estimate.eps_grid, estimate.probabilities, estimate.standard_errors):
        exact = gaussian_tail_probability(config.model, config.mc_verify.y, float(eps), include_drift)
        rows.append(
            {
                "eps": float(eps),
                "prob": float(prob),
                "exact": exact,
                "z_score": (prob - exact) / se if se > 0.0 else float("nan"),
            }
        )
    return pd.DataFrame(rows, columns=ORACLE_COLUMNS)


def _summary(estimate: LdpEstimate) -> Dict[str, object]:
    return {
        "slope": finite_or_none(estimate.slope_estimate),
        "theory_I": finite_or_none(estimate.theory),
        "relative_error": finite_or_none(estimate.relative_error),
        "runs_pvalue": finite_or_none(estimate.runs_pvalue),
        "usable_points": int(estimate.usable.sum()),
    }


@tool("mc-verify")
def run_mc_verify(config: RunConfig) -> ToolResult:
    """
    Grava `mc_verify.csv` (eps,prob,se,scaled_log,theory_I,slope); com σ
    constante também `mc_oracle.csv`, e com compare_drift a mesma tabela
    sem o termo de drift em `mc_verify_nodrift.csv`.
    """
    model = config.model
    block = config.mc_verify
    grid = PathGrid(n=block.steps, T=model.T)
    threads = config.resolved_threads()
    theory = rate_function(model.kernel, model.sigma, model.rho, block.y, block.solver, threads).value

    def run(include_drift: bool) -> LdpEstimate:
        return ldp_slope(
            model,
            block.y,
            block.eps_grid,
            block.paths,
            config.seed,
            include_drift=include_drift,
            grid=grid,
            theory=theory,
            threads=threads,
        )

    out = config.resolved_output_dir()
    estimate = run(block.include_drift)
    artifacts = [write_table(pd.DataFrame(estimate.rows(), columns=COLUMNS), out, "mc_verify.csv")]
    summary = _summary(estimate)

    if model.sigma.family == "constant":
        artifacts.append(
            write_table(oracle_rows(config, estimate, block.include_drift), out, "mc_oracle.csv")
        )

    if block.compare_drift:
        other = run(not block.include_drift)
        artifacts.append(
            write_table(pd.DataFrame(other.rows(), columns=COLUMNS), out, "mc_verify_nodrift.csv")
        )
        gap = abs(estimate.slope_estimate - other.slope_estimate) / abs(estimate.slope_estimate)
        summary["drift_slope_gap"] = gap if math.isfinite(gap) else None

    return ok(artifacts, summary)
