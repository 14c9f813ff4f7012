#!/usr/bin/env python3
"""
Testes das assíntotas de preço e do smile: limites de vol implícita para σ
constante, identidade binária/call, inversão de Black-Scholes e a tabela.
"""

import math

import pytest

from src.api.asymptotics import (
    binary_asymptote,
    bs_call_price,
    bs_implied_vol,
    call_put_asymptote,
    implied_vol_from_rate,
    implied_vol_limit,
    mc_implied_vol,
    smile,
)
from src.api.errors import DegenerateLimitError, DomainError, GateRefusal, RangeError
from src.api.specs import KernelSpec, ModelSpec, SigmaSpec, SolverConfig

FAST = SolverConfig(n=16, starts=1, refine=False)
CONSTANT = SigmaSpec(family="constant", sigma0=0.2)


def model(kernel: KernelSpec, sigma: SigmaSpec = CONSTANT, T: float = 1.0, rho: float = -0.3) -> ModelSpec:
    return ModelSpec(kernel=kernel, sigma=sigma, rho=rho, T=T)


FBM_MODEL = model(KernelSpec(family="fbm", H=0.3))


# ---------------------------------------------------------------------------
# Limites de vol implícita
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("y", [-0.2, 0.1, 0.3])
def test_constant_sigma_small_time_limit(y):
    """Tempo curto: o limite é σ₀ para qualquer horizonte."""
    limit = implied_vol_limit(model(KernelSpec(family="fbm", H=0.3), T=0.5), y, "small_time", FAST)
    assert limit == pytest.approx(0.2, abs=1e-6)


@pytest.mark.parametrize("T", [1.0, 0.5])
def test_constant_sigma_small_noise_limit(T):
    """Ruído pequeno: o limite é σ₀·sqrt(T)."""
    limit = implied_vol_limit(model(KernelSpec(family="fbm", H=0.3), T=T), 0.1, "small_noise", FAST)
    assert limit == pytest.approx(0.2 * math.sqrt(T), abs=1e-6)


@pytest.mark.parametrize("y", [0.05, 0.15])
def test_uncorrelated_smile_is_symmetric(y):
    """ρ = 0 com σ não constante: limite(y) = limite(-y)."""
    m = model(KernelSpec(family="fbm", H=0.3), sigma=SigmaSpec(family="shifted_abs", delta=0.2), rho=0.0)
    up = implied_vol_limit(m, y, "small_noise", FAST)
    down = implied_vol_limit(m, -y, "small_noise", FAST)
    assert up == pytest.approx(down, abs=1e-6)


def test_degenerate_rate_has_no_limit():
    with pytest.raises(DegenerateLimitError):
        implied_vol_from_rate(0.1, 0.0)


# ---------------------------------------------------------------------------
# Binárias, calls e puts
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("y", [-0.15, 0.15])
def test_binary_and_call_put_asymptotes_coincide(y):
    sigma = SigmaSpec(family="sqrt_linear", c1=0.04, c2=0.5)
    m = model(KernelSpec(family="riemann_liouville", H=0.3), sigma=sigma)
    tagged = call_put_asymptote(m, y, "small_noise", config=FAST)
    assert tagged.value == pytest.approx(binary_asymptote(m, y, "small_noise", FAST), abs=1e-12)
    assert tagged.tag == ("call" if y > 0 else "put")
    assert tagged.value < 0.0


def test_call_put_rejects_mismatched_option():
    with pytest.raises(DomainError):
        call_put_asymptote(FBM_MODEL, 0.1, "small_noise", option="put", config=FAST)
    with pytest.raises(DomainError):
        binary_asymptote(FBM_MODEL, 0.0, "small_noise", FAST)


def test_exponential_sigma_carries_martingality_warning():
    sigma = SigmaSpec(family="exponential", sigma0=0.2, beta=1.0)
    tagged = call_put_asymptote(model(KernelSpec(family="fbm", H=0.3), sigma=sigma), 0.1, "small_noise", config=FAST)
    assert tagged.martingality_warning


def test_small_time_refuses_fractional_ou():
    m = model(KernelSpec(family="fractional_ou", H=0.3, a=1.0))
    with pytest.raises(GateRefusal):
        binary_asymptote(m, 0.1, "small_time", FAST)


# ---------------------------------------------------------------------------
# Black-Scholes
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("strike", [0.8, 1.0, 1.25])
def test_bs_inversion_recovers_volatility(strike):
    price = bs_call_price(1.0, strike, 0.5, 0.27)
    assert bs_implied_vol(price, 1.0, strike, 0.5) == pytest.approx(0.27, abs=1e-8)


def test_bs_put_through_parity():
    call = bs_call_price(1.0, 1.1, 1.0, 0.3)
    put = call - 1.0 + 1.1
    assert bs_implied_vol(put, 1.0, 1.1, 1.0, option="put") == pytest.approx(0.3, abs=1e-8)


def test_bs_price_outside_band():
    with pytest.raises(RangeError):
        bs_implied_vol(1.5, 1.0, 1.0, 1.0)
    with pytest.raises(RangeError):
        bs_implied_vol(0.0, 1.0, 1.2, 1.0)


def test_mc_implied_vol_near_limit():
    """σ constante, ε = 0.1: a vol implícita MC fica a 5% do limite σ₀√T."""
    m = model(KernelSpec(family="brownian"), rho=0.0)
    estimate = mc_implied_vol(m, 0.1, "small_noise", 0.1, 200_000, seed=5, steps=4)
    assert estimate.implied_vol == pytest.approx(0.2, rel=0.05)
    assert estimate.strike == pytest.approx(math.exp(0.1))
    assert estimate.standard_error > 0.0


# ---------------------------------------------------------------------------
# Smile
# ---------------------------------------------------------------------------


def test_smile_table_constant_sigma():
    table = smile(FBM_MODEL, [-0.1, 0.0, 0.1], "small_noise", FAST, threads=1)
    frame = table.to_frame()
    assert list(frame.columns) == ["y", "I", "I_hat", "binary", "ivol_limit", "flag"]
    assert frame.loc[1, "flag"] == "y_zero"
    for index in (0, 2):
        row = frame.loc[index]
        assert row["ivol_limit"] == pytest.approx(0.2, abs=1e-6)
        assert row["binary"] == pytest.approx(-row["I"])
        assert row["I_hat"] == pytest.approx(row["I"], rel=1e-6)
        assert row["flag"] == ""


def test_smile_without_self_similarity_flags_rows():
    """Kernel OU: sem Î no ruído pequeno e recusa no tempo curto."""
    m = model(KernelSpec(family="ornstein_uhlenbeck", a=1.0))
    table = smile(m, [0.1], "small_noise", FAST, threads=1)
    assert "no_hat" in table.rows[0].flag
    assert math.isnan(table.rows[0].I_hat)
    with pytest.raises(GateRefusal):
        smile(m, [0.1], "small_time", FAST)


def test_smile_exponential_sigma_flagged():
    sigma = SigmaSpec(family="exponential", sigma0=0.2, beta=0.5)
    table = smile(model(KernelSpec(family="fbm", H=0.3), sigma=sigma), [0.1], "small_noise", FAST)
    assert "martingality_warning" in table.rows[0].flag
