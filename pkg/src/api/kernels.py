#!/usr/bin/env python3
"""
Volterra LDP - Kernels de Volterra

Avaliação dos kernels K(t, s) das famílias suportadas, suas integrais por
célula, covariâncias e os diagnósticos de regularidade (módulo L², inclinação
de Hölder e defeito de auto-similaridade).

Famílias:
    brownian            K(t, s) = 1
    ornstein_uhlenbeck  K(t, s) = exp(-a (t - s))
    fbm                 kernel de Molchan-Golosov (dois regimes de H)
    riemann_liouville   K(t, s) = (t - s)^(H - 1/2) / Γ(H + 1/2)
    fractional_ou       K(t, s) - a ∫_s^t exp(-a (t - u)) K(u, s) du

Todas as funções são puras sobre KernelSpec imutável; os caches são de
funções puras e podem ser compartilhados entre threads.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import structlog
from scipy import special, stats

from src.api.errors import DomainError, GateRefusal
from src.api.quadrature import integrate_interval
from src.api.specs import HURST_FAMILIES, KernelSpec

logger = structlog.get_logger(__name__)

# Folga relativa ao checar se um tempo pertence a [0, T]
_TIME_SLACK = 1e-12

# Tolerâncias mais apertadas para integrais internas do kernel
_INNER_EPSABS = 0.0
_INNER_EPSREL = 1e-11

# Limiar do gate de auto-similaridade (regime de tempo curto)
SELF_SIMILARITY_THRESHOLD = 1e-6


# =============================================================================
# TIPOS
# =============================================================================


@dataclass(frozen=True)
class CovarianceGrid:
    """Matriz de covariância C(t_i, t_j) sobre uma grade de tempos."""

    grid: np.ndarray
    matrix: np.ndarray

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix).min())

    @property
    def max_diagonal(self) -> float:
        return float(np.max(np.diag(self.matrix))) if self.matrix.size else 0.0


# =============================================================================
# CONSTANTES E FORMAS FECHADAS
# =============================================================================


@lru_cache(maxsize=None)
def fbm_constant(H: float) -> float:
    """Constante de normalização c_H do kernel de Molchan-Golosov."""
    return math.sqrt(
        2.0 * H * special.gamma(1.5 - H) / (special.gamma(H + 0.5) * special.gamma(2.0 - 2.0 * H))
    )


def _fbm_diagonal_mass(H: float, t: float) -> float:
    """∫_0^t K(t, u) du para o fbm, em forma fechada."""
    c = fbm_constant(H)
    return c * special.gamma(1.5 - H) * special.gamma(H + 0.5) * t ** (H + 0.5) / (H + 0.5)


def _fbm_point(H: float, t: float, s: np.ndarray) -> np.ndarray:
    """
    Kernel do fbm via representação hipergeométrica

        K(t, s) = c_H (t - s)^(H - 1/2) 2F1(H - 1/2, 1/2 - H; H + 1/2; 1 - t/s),

    equivalente às duas fórmulas integrais. Vetorizado em s.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    mask = (s > 0.0) & (s < t)
    if np.any(mask):
        sm = s[mask]
        out[mask] = (
            fbm_constant(H)
            * (t - sm) ** (H - 0.5)
            * special.hyp2f1(H - 0.5, 0.5 - H, H + 0.5, 1.0 - t / sm)
        )
    return out


def _fbm_quadrature(H: float, t: float, s: float) -> float:
    """Kernel do fbm pelas fórmulas integrais, com peso algébrico em u = s."""
    if s <= 0.0:
        # diverge em s = 0 nos dois regimes
        return 0.0
    c = fbm_constant(H)
    if H > 0.5:
        inner = integrate_interval(
            lambda u: u ** (H - 0.5),
            s,
            t,
            exponents=(H - 1.5, 0.0),
            epsabs=_INNER_EPSABS,
            epsrel=_INNER_EPSREL,
            label="kernel fbm",
        )
        return c * (H - 0.5) * s ** (0.5 - H) * inner
    inner = integrate_interval(
        lambda u: u ** (H - 1.5),
        s,
        t,
        exponents=(H - 0.5, 0.0),
        epsabs=_INNER_EPSABS,
        epsrel=_INNER_EPSREL,
        label="kernel fbm",
    )
    head = (t / s) ** (H - 0.5) * (t - s) ** (H - 0.5)
    return c * (head + (0.5 - H) * s ** (0.5 - H) * inner)


@lru_cache(maxsize=65536)
def _fou_point(H: float, a: float, t: float, s: float) -> float:
    """Kernel do OU fracionário: convolução externa por quadratura adaptativa."""
    if not 0.0 < s < t:
        return 0.0
    c = fbm_constant(H)
    fbm_part = c * (t - s) ** (H - 0.5) * special.hyp2f1(H - 0.5, 0.5 - H, H + 0.5, 1.0 - t / s)

    # K(u, s) = c (u - s)^(H - 1/2) F(u); o fator de potência vai para o peso
    def regular(u: float) -> float:
        return math.exp(-a * (t - u)) * c * special.hyp2f1(H - 0.5, 0.5 - H, H + 0.5, 1.0 - u / s)

    conv = integrate_interval(
        regular,
        s,
        t,
        exponents=(H - 0.5, 0.0),
        epsabs=1e-13,
        epsrel=_INNER_EPSREL,
        label="convolução fOU",
    )
    return float(fbm_part - a * conv)


def _diagonal_value(spec: KernelSpec) -> float:
    """Limite de K(t, s) quando s -> t por baixo (0 se diverge ou se anula)."""
    if spec.family in ("brownian", "ornstein_uhlenbeck"):
        return 1.0
    if spec.hurst == 0.5:
        return 1.0
    return 0.0


def effective_family(spec: KernelSpec) -> str:
    """fbm com H = 1/2 é o browniano; fOU com H = 1/2 é o OU."""
    if spec.family == "fbm" and spec.H == 0.5:
        return "brownian"
    if spec.family == "fractional_ou" and spec.H == 0.5:
        return "ornstein_uhlenbeck"
    return spec.family


def kernel_values(spec: KernelSpec, t: float, s: "np.ndarray | float") -> np.ndarray:
    """
    Valores de K(t, s) vetorizados em s, sem checagem de domínio.

    Usa a forma hipergeométrica para o fbm; é a rota rápida usada dentro
    dos integrandos de covariância e de módulo.
    """
    s = np.asarray(s, dtype=float)
    family = effective_family(spec)
    if t <= 0.0:
        return np.zeros_like(s)
    below = s < t
    on_diag = s == t

    if family == "brownian":
        return np.where(below | on_diag, 1.0, 0.0)
    if family == "ornstein_uhlenbeck":
        return np.where(below | on_diag, np.exp(-spec.a * (t - np.minimum(s, t))), 0.0)
    if family == "riemann_liouville":
        out = np.zeros_like(s)
        out[below] = (t - s[below]) ** (spec.H - 0.5) / special.gamma(spec.H + 0.5)
        out[on_diag] = _diagonal_value(spec)
        return out
    if family == "fbm":
        return _fbm_point(spec.H, t, s)
    flat = np.array([_fou_point(spec.H, spec.a, float(t), float(v)) for v in s.ravel()])
    return flat.reshape(s.shape)


def _kernel_scalar(spec: KernelSpec, t: float, s: float) -> float:
    return float(kernel_values(spec, t, s))


def _check_times(spec: KernelSpec, *times: float) -> None:
    upper = spec.T * (1.0 + _TIME_SLACK)
    for value in times:
        if not (0.0 <= value <= upper) or not math.isfinite(value):
            raise DomainError(f"tempo {value!r} fora de [0, {spec.T}]")


# =============================================================================
# OPERAÇÕES PÚBLICAS
# =============================================================================


def kernel_eval(spec: KernelSpec, t: float, s: float) -> float:
    """
    Avalia K(t, s).

    Devolve 0 para t < s e para t = 0. Na diagonal devolve o limite por
    baixo quando finito (1 para browniano, OU e Riemann-Liouville com H = 1/2)
    e 0 caso contrário. O fbm com H ≠ 1/2 é avaliado pelas fórmulas
    integrais com quadratura de peso algébrico; o OU fracionário pela
    convolução externa sobre o kernel do fbm.

    Raises:
        DomainError: t ou s fora de [0, T].
        QuadratureError: quadratura interna sem convergência.
    """
    _check_times(spec, t, s)
    if t < s or t == 0.0:
        return 0.0
    if t == s:
        return _diagonal_value(spec)

    family = effective_family(spec)
    if family == "fbm":
        return _fbm_quadrature(spec.H, t, s)
    if family == "fractional_ou":
        return _fou_point(spec.H, spec.a, float(t), float(s))
    return _kernel_scalar(spec, t, s)


def _fbm_cumulative(H: float, t: float, b: float) -> float:
    """G(t, b) = ∫_0^b K(t, u) du do fbm, reduzida por Fubini a uma integral de beta incompleta."""
    if b >= t:
        return _fbm_diagonal_mass(H, t)
    c = fbm_constant(H)
    scale = c * special.gamma(1.5 - H) * special.gamma(H + 0.5)
    head = b ** (H + 0.5) / (H + 0.5)

    if H > 0.5:
        tail = integrate_interval(
            lambda v: v ** (H - 0.5) * special.betainc(1.5 - H, H - 0.5, b / v),
            b,
            t,
            epsabs=1e-13,
            epsrel=1e-10,
            label="massa cumulativa fbm",
        )
        return scale * (head + tail)

    tail = integrate_interval(
        lambda v: v ** (H - 0.5) * special.betainc(1.5 - H, H + 0.5, b / v),
        b,
        t,
        epsabs=1e-13,
        epsrel=1e-10,
        label="massa cumulativa fbm",
    )
    first = t ** (H + 0.5) * special.betainc(1.5 - H, H + 0.5, b / t)
    return scale * (first + (0.5 - H) * (head + tail))


def _fbm_convolved_mass(H: float, a: float, t: float, b: float) -> float:
    """
    ∫_b^t e^{-a(t-v)} G(v, b) dv para o fbm, com b ≤ t.

    G(v, b) = escala · (parte fechada em v + ∫_b^v φ(w) dw); trocando a ordem,
    ∫_b^t e^{-a(t-v)} ∫_b^v φ(w) dw dv = ∫_b^t φ(w) r(w) dw com
    r(w) = (1 - e^{-a(t-w)}) / a. Fica uma única quadratura em vez de uma
    quadratura dentro da outra.
    """
    if b >= t:
        return 0.0
    scale = fbm_constant(H) * special.gamma(1.5 - H) * special.gamma(H + 0.5)
    head = b ** (H + 0.5) / (H + 0.5)

    def ramp(v: float) -> float:
        return -math.expm1(-a * (t - v)) / a

    if H > 0.5:
        tail = integrate_interval(
            lambda v: v ** (H - 0.5) * special.betainc(1.5 - H, H - 0.5, b / v) * ramp(v),
            b,
            t,
            epsabs=1e-13,
            epsrel=1e-10,
            label="massa cumulativa fOU",
        )
        return scale * (head * ramp(b) + tail)

    def body(v: float) -> float:
        beta = special.betainc(1.5 - H, H + 0.5, b / v)
        return beta * (math.exp(-a * (t - v)) * v ** (H + 0.5) + (0.5 - H) * v ** (H - 0.5) * ramp(v))

    inner = integrate_interval(body, b, t, epsabs=1e-13, epsrel=1e-10, label="massa cumulativa fOU")
    return scale * (inner + (0.5 - H) * head * ramp(b))


@lru_cache(maxsize=65536)
def _cumulative_cached(spec: KernelSpec, t: float, b: float) -> float:
    family = effective_family(spec)
    if family == "brownian":
        return b
    if family == "ornstein_uhlenbeck":
        a = spec.a
        return (math.exp(-a * (t - b)) - math.exp(-a * t)) / a
    if family == "riemann_liouville":
        p = spec.H + 0.5
        return (t**p - (t - b) ** p) / special.gamma(p + 1.0)
    if family == "fbm":
        return _fbm_cumulative(spec.H, t, b)

    # OU fracionário: G_ou(t, b) = G(t, b) - a ∫_0^t e^{-a(t-v)} G(v, min(b, v)) dv
    H, a = spec.H, spec.a
    fbm_mass = _fbm_cumulative(H, t, b)
    diag = integrate_interval(
        lambda v: math.exp(-a * (t - v)) * _fbm_diagonal_mass(H, v),
        0.0,
        b,
        epsabs=1e-13,
        epsrel=1e-10,
        label="massa cumulativa fOU",
    )
    return fbm_mass - a * (diag + _fbm_convolved_mass(H, a, t, b))


def cumulative_kernel(spec: KernelSpec, t: float, b: float) -> float:
    """G(t, b) = ∫_0^{min(b, t)} K(t, u) du."""
    b = min(b, t)
    if t <= 0.0 or b <= 0.0:
        return 0.0
    return _cumulative_cached(spec, float(t), float(b))


def kernel_cell_integral(spec: KernelSpec, t: float, u_lo: float, u_hi: float) -> float:
    """
    ∫_{u_lo}^{min(u_hi, t)} K(t, u) du; zero se u_lo ≥ t.

    Exata para browniano, OU e Riemann-Liouville; para o fbm usa a massa
    cumulativa G(t, ·) e para o OU fracionário a convolução de G.
    """
    _check_times(spec, t, u_lo, u_hi)
    if u_lo > u_hi:
        raise DomainError(f"célula invertida: [{u_lo}, {u_hi}]")
    hi = min(u_hi, t)
    if u_lo >= hi:
        return 0.0

    family = effective_family(spec)
    if family == "brownian":
        return hi - u_lo
    if family == "ornstein_uhlenbeck":
        a = spec.a
        return (math.exp(-a * (t - hi)) - math.exp(-a * (t - u_lo))) / a
    if family == "riemann_liouville":
        p = spec.H + 0.5
        return ((t - u_lo) ** p - (t - hi) ** p) / special.gamma(p + 1.0)
    return cumulative_kernel(spec, t, hi) - cumulative_kernel(spec, t, u_lo)


def _weight_exponents(spec: KernelSpec, diagonal: bool) -> tuple:
    """Expoentes do peso algébrico para ∫_0^m K(t, u) K(s, u) du."""
    family = effective_family(spec)
    if family not in HURST_FAMILIES:
        return (0.0, 0.0)
    H = spec.H
    left = -abs(2.0 * H - 1.0) if family in ("fbm", "fractional_ou") else 0.0
    right = min(0.0, 2.0 * H - 1.0) if diagonal else min(0.0, H - 0.5)
    return (left, right)


def covariance(spec: KernelSpec, t: float, s: float) -> float:
    """
    C(t, s) = ∫_0^{min(t, s)} K(t, u) K(s, u) du por quadratura adaptativa.

    As singularidades de potência em u = 0 e u = min(t, s) são absorvidas
    pelo peso algébrico da regra QAWS.
    """
    _check_times(spec, t, s)
    m = min(t, s)
    if m <= 0.0:
        return 0.0
    left, right = _weight_exponents(spec, diagonal=(t == s))

    def regular(u: float) -> float:
        weight = u**left * (m - u) ** right
        return _kernel_scalar(spec, t, u) * _kernel_scalar(spec, s, u) / weight

    return integrate_interval(
        regular, 0.0, m, exponents=(left, right), label=f"covariância {spec.family}"
    )


def closed_form_covariance(spec: KernelSpec, t: np.ndarray, s: np.ndarray) -> Optional[np.ndarray]:
    family = effective_family(spec)
    if family == "brownian":
        return np.minimum(t, s)
    if family == "fbm":
        two_h = 2.0 * spec.H
        return 0.5 * (t**two_h + s**two_h - np.abs(t - s) ** two_h)
    if family == "ornstein_uhlenbeck":
        a = spec.a
        return (np.exp(-a * np.abs(t - s)) - np.exp(-a * (t + s))) / (2.0 * a)
    return None


def covariance_grid(spec: KernelSpec, times: Sequence[float]) -> CovarianceGrid:
    """
    Matriz de covariância sobre `times`.

    Usa forma fechada para browniano, fbm e OU; quadratura (covariance)
    para Riemann-Liouville e OU fracionário.
    """
    grid = np.asarray(times, dtype=float)
    _check_times(spec, *grid)
    tt, ss = np.meshgrid(grid, grid, indexing="ij")
    closed = closed_form_covariance(spec, tt, ss)
    if closed is not None:
        matrix = closed
    else:
        n = grid.size
        matrix = np.zeros((n, n))
        for i in range(n):
            for j in range(i, n):
                matrix[i, j] = matrix[j, i] = covariance(spec, grid[i], grid[j])
    matrix = 0.5 * (matrix + matrix.T)
    logger.debug("grade de covariância montada", family=spec.family, size=grid.size)
    return CovarianceGrid(grid=grid, matrix=matrix)


def cross_covariance(spec: KernelSpec, s_brownian: float, t_volterra: float) -> float:
    """E[B_s B̂_t] = ∫_0^{min(s, t)} K(t, u) du."""
    _check_times(spec, s_brownian, t_volterra)
    return kernel_cell_integral(spec, t_volterra, 0.0, min(s_brownian, t_volterra))


# =============================================================================
# DIAGNÓSTICOS DE REGULARIDADE
# =============================================================================


# Tolerâncias das integrais do módulo L2
_MODULUS_TOLERANCES = {"epsabs": 1e-14, "epsrel": 1e-10}


def _rl_increment_l2(H: float, t1: float, h: float) -> float:
    """
    Riemann-Liouville: o kernel só depende de t - s e, com s = t1 - h·w,

        ∫_0^T |K(t1, s) - K(t1 + h, s)|² ds
            = h^{2H} / Γ(H + 1/2)² · [∫_0^{t1/h} ((1 + w)^p - w^p)² dw + 1/(2H)],

    com p = H - 1/2. Nenhuma parcela se cancela com outra.
    """
    p = H - 0.5
    span = t1 / h
    near = min(0.0, 2.0 * p)

    def gap(w: float) -> float:
        return ((1.0 + w) ** p - w**p) ** 2

    total = integrate_interval(
        lambda w: gap(w) / w**near,
        0.0,
        min(span, 1.0),
        exponents=(near, 0.0),
        label="módulo L2",
        **_MODULUS_TOLERANCES,
    )
    if span > 1.0:
        # w = e^x: o integrando decai exponencialmente em x
        total += integrate_interval(
            lambda x: gap(math.exp(x)) * math.exp(x),
            0.0,
            math.log(span),
            label="módulo L2",
            **_MODULUS_TOLERANCES,
        )
    return h ** (2.0 * H) * (total + 1.0 / (2.0 * H)) / special.gamma(H + 0.5) ** 2


def increment_l2(spec: KernelSpec, t1: float, t2: float, quadrature: bool = False) -> float:
    """
    ∫_0^T |K(t1, s) - K(t2, s)|² ds = E|B̂_{t2} - B̂_{t1}|², com t1 ≤ t2.

    Browniano, OU e fbm usam a covariância fechada e Riemann-Liouville a
    redução acima. O OU fracionário (ou `quadrature=True`) integra por
    partes: [0, t1 - h] com o quadrado da diferença, [t1 - h, t1] com o
    quadrado expandido (cada termo com o seu peso algébrico em s = t1) e
    [t1, t2] só com K(t2, ·).
    """
    h = t2 - t1
    family = effective_family(spec)
    if not quadrature:
        if family == "riemann_liouville":
            return _rl_increment_l2(spec.H, t1, h)
        times = np.array([t1, t2])
        tt, ss = np.meshgrid(times, times, indexing="ij")
        closed = closed_form_covariance(spec, tt, ss)
        if closed is not None:
            return float(closed[0, 0] + closed[1, 1] - 2.0 * closed[0, 1])

    H = spec.H
    hurst = family in HURST_FAMILIES
    origin_exp = -abs(2.0 * H - 1.0) if family in ("fbm", "fractional_ou") else 0.0
    diag_exp = min(0.0, 2.0 * H - 1.0) if hurst else 0.0
    cross_exp = min(0.0, H - 0.5) if hurst else 0.0

    split = max(0.0, t1 - h)
    total = 0.0
    if split > 0.0:

        def gap(s: float) -> float:
            diff = _kernel_scalar(spec, t1, s) - _kernel_scalar(spec, t2, s)
            return diff * diff / s**origin_exp

        total += integrate_interval(
            gap, 0.0, split, exponents=(origin_exp, 0.0), label="módulo L2", **_MODULUS_TOLERANCES
        )

    left = origin_exp if split == 0.0 else 0.0
    if t1 > split:
        for ta, tb, right, factor in ((t1, t1, diag_exp, 1.0), (t1, t2, cross_exp, -2.0), (t2, t2, 0.0, 1.0)):

            def part(s: float, ta: float = ta, tb: float = tb, right: float = right) -> float:
                weight = (s - split) ** left * (t1 - s) ** right
                return _kernel_scalar(spec, ta, s) * _kernel_scalar(spec, tb, s) / weight

            total += factor * integrate_interval(
                part, split, t1, exponents=(left, right), label="módulo L2", **_MODULUS_TOLERANCES
            )

    fresh_left = origin_exp if t1 == 0.0 else 0.0

    def fresh(s: float) -> float:
        value = _kernel_scalar(spec, t2, s)
        return value * value / ((s - t1) ** fresh_left * (t2 - s) ** diag_exp)

    total += integrate_interval(
        fresh, t1, t2, exponents=(fresh_left, diag_exp), label="módulo L2", **_MODULUS_TOLERANCES
    )
    return total


def modulus_l2(spec: KernelSpec, h: float, t_samples: int = 16) -> float:
    """
    M(h): máximo sobre t1 amostrado de ∫_0^T |K(t1, s) - K(t1 + h, s)|² ds.

    t1 percorre uma grade uniforme de t_samples pontos em [0, T - h].
    """
    T = spec.T
    if not 0.0 < h <= T * (1.0 + _TIME_SLACK):
        raise DomainError(f"h deve estar em (0, {T}], recebido {h}")
    h = min(h, T)
    worst = 0.0
    for t1 in np.linspace(0.0, T - h, max(t_samples, 1)):
        worst = max(worst, increment_l2(spec, float(t1), float(t1) + h))
    return worst


def default_h_grid(spec: KernelSpec, points: int = 5) -> np.ndarray:
    """Duas décadas de h logo acima da escala de máquina relevante."""
    return np.geomspace(1e-4, 1e-2, points) * spec.T


def holder_slope(
    spec: KernelSpec, h_grid: Optional[Sequence[float]] = None, t_samples: int = 8
) -> float:
    """Inclinação de mínimos quadrados de log M(h) contra log h (estima α = 2H)."""
    hs = default_h_grid(spec) if h_grid is None else np.asarray(h_grid, dtype=float)
    if hs.size < 2 or hs.max() / hs.min() < 100.0 * (1.0 - 1e-9):
        raise DomainError("h_grid deve cobrir pelo menos duas décadas")
    moduli = np.array([modulus_l2(spec, float(h), t_samples) for h in hs])
    fit = stats.linregress(np.log(hs), np.log(moduli))
    logger.info("inclinação de Hölder estimada", family=spec.family, H=spec.H, slope=fit.slope)
    return float(fit.slope)


def self_similarity_defect(spec: KernelSpec, eps: float, samples: int = 8) -> float:
    """
    max |K(t, s) - ε^(1/2 - H) K(εt, εs)| / (1 + |K(t, s)|) sobre pares amostrados.

    Os pares usam t numa grade uniforme de (0, T] e s = r·t com frações r
    fixas, de modo que o resultado é determinístico.
    """
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"eps deve estar em (0, 1], recebido {eps}")
    power = 0.5 - spec.hurst
    scale = eps**power
    worst = 0.0
    for t in spec.T * np.linspace(1.0 / samples, 1.0, samples):
        for ratio in (0.1, 0.35, 0.6, 0.85):
            s = float(t) * ratio
            direct = kernel_eval(spec, float(t), s)
            scaled = scale * kernel_eval(spec, eps * float(t), eps * s)
            worst = max(worst, abs(direct - scaled) / (1.0 + abs(direct)))
    return worst


def require_self_similar(
    spec: KernelSpec, eps: float = 0.5, threshold: float = SELF_SIMILARITY_THRESHOLD
) -> float:
    """
    Gate do regime de tempo curto.

    Returns:
        O defeito medido, quando abaixo do limiar.

    Raises:
        GateRefusal: kernel não auto-similar.
    """
    defect = self_similarity_defect(spec, eps)
    if defect > threshold:
        logger.warning("kernel recusado pelo gate de auto-similaridade", family=spec.family, defect=defect)
        raise GateRefusal(f"kernel {spec.family} não é auto-similar", defect)
    logger.debug("gate de auto-similaridade aprovado", family=spec.family, defect=defect)
    return defect
