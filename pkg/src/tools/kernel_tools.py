#!/usr/bin/env python3
"""
Volterra LDP - Ferramenta kernel-check

Relatório de consistência do kernel configurado: covariância por
quadratura contra a forma fechada, menor autovalor da grade, integral de
célula contra quadratura direta, módulo L2, inclinação de Hölder e defeito
de auto-similaridade.
"""

import math
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
import structlog

from src.api.kernels import (
    SELF_SIMILARITY_THRESHOLD,
    closed_form_covariance,
    covariance,
    covariance_grid,
    effective_family,
    holder_slope,
    kernel_cell_integral,
    kernel_eval,
    modulus_l2,
    self_similarity_defect,
)
from src.api.quadrature import integrate_interval
from src.api.specs import HURST_FAMILIES, KernelSpec
from src.config import RunConfig
from src.tools.results import ToolResult, ok, tool, write_table

logger = structlog.get_logger(__name__)

COLUMNS = ["check", "value", "reference", "abs_error", "passed"]

COVARIANCE_TOLERANCE = 1e-3
MODULUS_TOLERANCE = 1e-6
HOLDER_TOLERANCE = 0.05
CELL_TOLERANCE = 1e-6


def _row(check: str, value: float, reference: float, passed: Optional[bool]) -> Dict[str, object]:
    error = abs(value - reference) if math.isfinite(reference) else float("nan")
    return {
        "check": check,
        "value": value,
        "reference": reference,
        "abs_error": error,
        "passed": "" if passed is None else bool(passed),
    }


def covariance_report(spec: KernelSpec, points: int) -> List[Dict[str, object]]:
    """Erro relativo máximo da covariância e menor autovalor sobre (0, T]."""
    times = np.linspace(spec.T / points, spec.T, points)
    rows = []
    tt, ss = np.meshgrid(times, times, indexing="ij")
    closed = closed_form_covariance(spec, tt, ss)
    if closed is not None:
        worst = 0.0
        for i in range(points):
            for j in range(i, points):
                quad = covariance(spec, float(times[i]), float(times[j]))
                worst = max(worst, abs(quad - closed[i, j]) / abs(closed[i, j]))
        rows.append(
            _row("covariance_max_rel_error", worst, 0.0, worst <= COVARIANCE_TOLERANCE)
        )
    grid = covariance_grid(spec, times)
    floor = -1e-10 * grid.max_diagonal
    rows.append(_row("covariance_min_eigenvalue", grid.min_eigenvalue, 0.0, grid.min_eigenvalue > floor))
    return rows


def _kernel_exponent(spec: KernelSpec) -> float:
    return spec.H - 0.5 if effective_family(spec) in HURST_FAMILIES else 0.0


def cell_integral_report(spec: KernelSpec) -> Dict[str, object]:
    """∫_0^{T/2} K(T, u) du: forma reduzida contra quadratura de kernel_eval."""
    t, hi = spec.T, 0.5 * spec.T
    reduced = kernel_cell_integral(spec, t, 0.0, hi)
    origin = -abs(_kernel_exponent(spec)) if effective_family(spec) in ("fbm", "fractional_ou") else 0.0

    def regular(u: float) -> float:
        return kernel_eval(spec, t, u) / u**origin

    direct = integrate_interval(regular, 0.0, hi, exponents=(origin, 0.0), label="célula direta")
    passed = abs(reduced - direct) <= CELL_TOLERANCE * (1.0 + abs(direct))
    return _row("cell_integral", reduced, direct, passed)


def regularity_report(
    spec: KernelSpec, modulus_h: float, h_grid: Optional[List[float]], t_samples: int
) -> List[Dict[str, object]]:
    family = effective_family(spec)
    alpha = 2.0 * spec.H if family in ("fbm", "riemann_liouville", "fractional_ou") else 1.0

    h = min(modulus_h, spec.T)
    modulus = modulus_l2(spec, h, t_samples)
    if family in ("fbm", "brownian"):
        reference = h**alpha
        passed: Optional[bool] = abs(modulus - reference) <= MODULUS_TOLERANCE * reference
    else:
        reference, passed = float("nan"), None

    slope = holder_slope(spec, h_grid, t_samples)
    return [
        _row("modulus_l2", modulus, reference, passed),
        _row("holder_slope", slope, alpha, abs(slope - alpha) <= HOLDER_TOLERANCE),
    ]


@tool("kernel-check")
def run_kernel_check(config: RunConfig) -> ToolResult:
    """
    Executa o relatório do kernel e grava `kernel_check.csv`.

    Colunas: check,value,reference,abs_error,passed
    """
    spec = config.model.kernel
    block = config.kernel_check
    rows = covariance_report(spec, block.grid_points)
    rows.append(cell_integral_report(spec))
    rows.extend(regularity_report(spec, block.modulus_h, block.h_grid, block.t_samples))

    defect = self_similarity_defect(spec, block.eps)
    rows.append(
        _row("self_similarity_defect", defect, SELF_SIMILARITY_THRESHOLD, defect <= SELF_SIMILARITY_THRESHOLD)
    )
    if defect > SELF_SIMILARITY_THRESHOLD:
        # só informa; quem recusa é o regime de tempo curto
        logger.info("kernel não auto-similar", family=spec.family, defect=defect)

    frame = pd.DataFrame(rows, columns=COLUMNS)
    path = write_table(frame, config.resolved_output_dir(), "kernel_check.csv")
    by_check = {str(r["check"]): r["value"] for r in rows}
    return ok([path], {"family": spec.family, "H": spec.H, **by_check})
