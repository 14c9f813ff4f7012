#!/usr/bin/env python3
"""
Testes do módulo de kernels: convenções de avaliação, covariância contra
formas fechadas, integrais de célula, módulo L2 e gate de auto-similaridade.
"""

import math

import numpy as np
import pytest
from scipy import special

from src.api.errors import DomainError, GateRefusal
from src.api.kernels import (
    SELF_SIMILARITY_THRESHOLD,
    closed_form_covariance,
    covariance,
    covariance_grid,
    cross_covariance,
    cumulative_kernel,
    effective_family,
    holder_slope,
    increment_l2,
    kernel_cell_integral,
    kernel_eval,
    kernel_values,
    modulus_l2,
    require_self_similar,
    self_similarity_defect,
)
from src.api.quadrature import integrate_interval
from src.api.specs import KernelSpec

HURSTS = [0.1, 0.3, 0.5, 0.7, 0.9]


def fbm(H: float, T: float = 1.0) -> KernelSpec:
    return KernelSpec(family="fbm", H=H, T=T)


def rl(H: float, T: float = 1.0) -> KernelSpec:
    return KernelSpec(family="riemann_liouville", H=H, T=T)


# ---------------------------------------------------------------------------
# Convenções de kernel_eval
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "spec",
    [
        KernelSpec(family="brownian"),
        KernelSpec(family="ornstein_uhlenbeck", a=2.0),
        fbm(0.3),
        rl(0.7),
    ],
)
def test_kernel_zero_above_diagonal_and_at_origin(spec):
    """K(t, s) = 0 para t < s e para t = 0."""
    assert kernel_eval(spec, 0.2, 0.5) == 0.0
    assert kernel_eval(spec, 0.0, 0.0) == 0.0


def test_kernel_diagonal_limits():
    """Na diagonal: 1 onde o limite é finito e não nulo, 0 caso contrário."""
    assert kernel_eval(KernelSpec(family="brownian"), 0.4, 0.4) == 1.0
    assert kernel_eval(KernelSpec(family="ornstein_uhlenbeck"), 0.4, 0.4) == 1.0
    assert kernel_eval(rl(0.5), 0.4, 0.4) == 1.0
    assert kernel_eval(fbm(0.3), 0.4, 0.4) == 0.0
    assert kernel_eval(fbm(0.7), 0.4, 0.4) == 0.0


def test_kernel_rejects_time_beyond_horizon():
    """Tempos fora de [0, T] são erro de domínio."""
    with pytest.raises(DomainError):
        kernel_eval(fbm(0.3, T=1.0), 1.5, 0.2)
    with pytest.raises(DomainError):
        kernel_eval(fbm(0.3), 0.5, -0.1)


def test_fbm_half_is_brownian():
    """fbm com H = 1/2 reduz ao kernel browniano."""
    spec = fbm(0.5)
    assert effective_family(spec) == "brownian"
    assert kernel_eval(spec, 0.8, 0.3) == pytest.approx(1.0)


def test_ou_kernel_closed_form():
    spec = KernelSpec(family="ornstein_uhlenbeck", a=1.5)
    assert kernel_eval(spec, 0.9, 0.4) == pytest.approx(math.exp(-1.5 * 0.5), rel=1e-14)


def test_rl_kernel_closed_form():
    spec = rl(0.3)
    expected = (0.9 - 0.4) ** (-0.2) / special.gamma(0.8)
    assert kernel_eval(spec, 0.9, 0.4) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("H", [0.2, 0.35, 0.65, 0.85])
@pytest.mark.parametrize("t,s", [(0.9, 0.1), (0.5, 0.45), (1.0, 0.7)])
def test_fbm_quadrature_matches_hypergeometric_form(H, t, s):
    """As fórmulas integrais (QAWS) e a forma hipergeométrica coincidem."""
    spec = fbm(H)
    via_quad = kernel_eval(spec, t, s)
    via_hyp = float(kernel_values(spec, t, s))
    assert via_quad == pytest.approx(via_hyp, rel=1e-8)


# ---------------------------------------------------------------------------
# Covariância
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("H", HURSTS)
def test_fbm_covariance_matches_closed_form(H):
    """Covariância por quadratura contra ½(t^{2H} + s^{2H} - |t - s|^{2H}) na grade 20 × 20."""
    spec = fbm(H)
    times = np.linspace(0.05, 1.0, 20)
    worst = 0.0
    for i, t in enumerate(times):
        for s in times[i:]:
            exact = 0.5 * (t ** (2 * H) + s ** (2 * H) - abs(t - s) ** (2 * H))
            worst = max(worst, abs(covariance(spec, float(t), float(s)) - exact) / exact)
    assert worst <= 1e-3


def test_ou_covariance_matches_closed_form():
    spec = KernelSpec(family="ornstein_uhlenbeck", a=0.8)
    t, s = 0.9, 0.35
    expected = float(closed_form_covariance(spec, np.array(t), np.array(s)))
    assert covariance(spec, t, s) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("H", [0.2, 0.8])
def test_rl_variance(H):
    """Var(B̂_t) = t^{2H} / (2H Γ(H + 1/2)²) para Riemann-Liouville."""
    spec = rl(H)
    t = 0.7
    expected = t ** (2 * H) / (2 * H * special.gamma(H + 0.5) ** 2)
    assert covariance(spec, t, t) == pytest.approx(expected, rel=1e-7)


def test_covariance_zero_at_origin():
    assert covariance(fbm(0.3), 0.0, 0.5) == 0.0


def test_covariance_grid_is_positive_semidefinite():
    """Grade por quadratura (RL) simétrica e sem autovalores negativos relevantes."""
    grid = covariance_grid(rl(0.3), np.linspace(0.125, 1.0, 8))
    assert np.allclose(grid.matrix, grid.matrix.T)
    assert grid.min_eigenvalue > -1e-10 * grid.max_diagonal


def test_cross_covariance_brownian():
    """E[B_s B̂_t] = min(s, t) quando B̂ = B."""
    spec = KernelSpec(family="brownian")
    assert cross_covariance(spec, 0.3, 0.8) == pytest.approx(0.3)
    assert cross_covariance(spec, 0.8, 0.3) == pytest.approx(0.3)


# ---------------------------------------------------------------------------
# Integrais de célula
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("H", [0.2, 0.4, 0.6, 0.8])
def test_fbm_cell_integral_matches_direct_quadrature(H):
    """Forma reduzida de ∫ K(t, u) du contra quadratura direta do kernel."""
    spec = fbm(H)
    t, lo, hi = 0.9, 0.0, 0.45
    origin = -abs(H - 0.5)
    direct = integrate_interval(
        lambda u: float(kernel_values(spec, t, u)) / u**origin,
        lo,
        hi,
        exponents=(origin, 0.0),
        epsrel=1e-10,
    )
    assert kernel_cell_integral(spec, t, lo, hi) == pytest.approx(direct, rel=1e-6)


@pytest.mark.parametrize("H", [0.3, 0.7])
def test_fbm_cumulative_diagonal_is_cross_covariance(H):
    """G(t, t) = E[B_t B̂_t] = c_H Γ(3/2 - H) Γ(H + 1/2) t^{H+1/2} / (H + 1/2)."""
    spec = fbm(H)
    t = 0.6
    c = math.sqrt(
        2 * H * special.gamma(1.5 - H) / (special.gamma(H + 0.5) * special.gamma(2 - 2 * H))
    )
    expected = c * special.gamma(1.5 - H) * special.gamma(H + 0.5) * t ** (H + 0.5) / (H + 0.5)
    assert cumulative_kernel(spec, t, t) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("H", [0.3, 0.7])
def test_fou_cell_integral_matches_direct_quadrature(H):
    """Massa acumulada do OU fracionário contra quadratura direta de kernel_eval."""
    spec = KernelSpec(family="fractional_ou", H=H, a=1.0)
    t, hi = 1.0, 0.5
    origin = -abs(H - 0.5)
    direct = integrate_interval(
        lambda u: kernel_eval(spec, t, u) / u**origin,
        0.0,
        hi,
        exponents=(origin, 0.0),
        epsrel=1e-10,
    )
    assert kernel_cell_integral(spec, t, 0.0, hi) == pytest.approx(direct, rel=1e-6)


def test_cell_integral_zero_above_diagonal():
    assert kernel_cell_integral(rl(0.3), 0.4, 0.5, 0.9) == 0.0


def test_ou_cell_integral_closed_form():
    spec = KernelSpec(family="ornstein_uhlenbeck", a=2.0)
    t, lo, hi = 1.0, 0.2, 0.6
    expected = (math.exp(-2.0 * (t - hi)) - math.exp(-2.0 * (t - lo))) / 2.0
    assert kernel_cell_integral(spec, t, lo, hi) == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------------------
# Regularidade
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("H", [0.1, 0.3, 0.7, 0.9])
@pytest.mark.parametrize("h", [1e-4, 1e-2, 0.1])
def test_fbm_modulus_is_power_law(H, h):
    """Para o fbm, M(h) = E|B̂_{t+h} - B̂_t|² = h^{2H} em qualquer t."""
    assert modulus_l2(fbm(H), h, t_samples=4) == pytest.approx(h ** (2 * H), rel=1e-6)


@pytest.mark.parametrize("h", [1e-4, 1e-2, 0.1])
def test_rl_modulus_rough_hurst(h):
    """RL com H = 0.1: M(h) finito, acima do valor em t1 = 0 e da ordem de h^{2H}."""
    H = 0.1
    at_origin = h ** (2 * H) / (2 * H * special.gamma(H + 0.5) ** 2)
    modulus = modulus_l2(rl(H), h, t_samples=4)
    assert math.isfinite(modulus)
    assert at_origin <= modulus <= 10.0 * at_origin


@pytest.mark.parametrize("H", [0.3, 0.7])
def test_rl_increment_reduction_matches_quadrature(H):
    """A redução de Riemann-Liouville e a quadratura por partes coincidem."""
    spec = rl(H)
    reduced = increment_l2(spec, 0.5, 0.55)
    by_parts = increment_l2(spec, 0.5, 0.55, quadrature=True)
    assert reduced == pytest.approx(by_parts, rel=1e-6)


@pytest.mark.parametrize("H", [0.3, 0.7])
@pytest.mark.parametrize("t1", [0.02, 0.5])
def test_increment_quadrature_matches_fbm_power_law(H, t1):
    """Quadratura por partes (usada no OU fracionário) contra h^{2H} do fbm."""
    h = 0.05
    value = increment_l2(fbm(H), t1, t1 + h, quadrature=True)
    assert value == pytest.approx(h ** (2 * H), rel=1e-6)


def test_fou_increment_matches_covariance():
    """OU fracionário: ∫|K(t1,·) - K(t2,·)|² = C(t1,t1) + C(t2,t2) - 2C(t1,t2)."""
    spec = KernelSpec(family="fractional_ou", H=0.3, a=1.0)
    t1, t2 = 0.5, 0.6
    expected = covariance(spec, t1, t1) + covariance(spec, t2, t2) - 2.0 * covariance(spec, t1, t2)
    assert increment_l2(spec, t1, t2) == pytest.approx(expected, rel=1e-5)


@pytest.mark.parametrize("H", HURSTS)
@pytest.mark.parametrize("family", ["fbm", "riemann_liouville"])
def test_holder_slope_is_twice_hurst(family, H):
    spec = KernelSpec(family=family, H=H)
    assert holder_slope(spec, t_samples=4) == pytest.approx(2 * H, abs=0.05)


def test_holder_slope_needs_two_decades():
    with pytest.raises(DomainError):
        holder_slope(fbm(0.3), h_grid=[1e-3, 2e-3, 5e-3])


def test_modulus_rejects_large_step():
    with pytest.raises(DomainError):
        modulus_l2(fbm(0.3), 2.0)


# ---------------------------------------------------------------------------
# Auto-similaridade
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("spec", [KernelSpec(family="brownian"), fbm(0.3), rl(0.3), rl(0.8)])
def test_self_similar_kernels_pass_gate(spec):
    assert self_similarity_defect(spec, 0.5) <= SELF_SIMILARITY_THRESHOLD
    assert require_self_similar(spec) <= SELF_SIMILARITY_THRESHOLD


def test_fractional_ou_defect_is_order_one():
    """O defeito do OU fracionário (H = 0.3, a = 1, ε = 0.5) é de ordem um, não ruído numérico."""
    assert self_similarity_defect(KernelSpec(family="fractional_ou", H=0.3, a=1.0), 0.5) > 0.01


@pytest.mark.parametrize(
    "spec",
    [
        KernelSpec(family="fractional_ou", H=0.3, a=1.0),
        KernelSpec(family="ornstein_uhlenbeck", a=1.0),
    ],
)
def test_mean_reverting_kernels_refused(spec):
    """Kernels com reversão à média não são auto-similares."""
    with pytest.raises(GateRefusal) as info:
        require_self_similar(spec)
    assert info.value.exit_code == 4
    assert info.value.defect > SELF_SIMILARITY_THRESHOLD
