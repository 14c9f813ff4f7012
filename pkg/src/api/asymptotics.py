#!/usr/bin/env python3
"""
Volterra LDP - Assintóticas de Preços e Volatilidade Implícita

Log-assíntotas de opções binárias, calls e puts, o limite da volatilidade
implícita |y|/sqrt(2I) nos regimes de ruído pequeno e de tempo curto, a
inversão de Black-Scholes e a tabela de smile.
"""

import math
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence

import numpy as np
import pandas as pd
import structlog
from scipy import optimize, stats

from src.api.errors import (
    DegenerateLimitError,
    DomainError,
    GateRefusal,
    RangeError,
    VolterraLdpError,
)
from src.api.kernels import require_self_similar
from src.api.mc_harness import simulate_scaled_logprice
from src.api.parallel import ordered_map
from src.api.rate_solver import rate_function, rate_function_hat
from src.api.specs import ModelSpec, PathGrid, SolverConfig

logger = structlog.get_logger(__name__)

Regime = Literal["small_noise", "small_time"]
OptionKind = Literal["call", "put"]

# Abaixo disso a taxa é tratada como zero e o limite é indefinido
DEGENERATE_RATE = 1e-10

# Faixa de busca da volatilidade implícita
VOL_BRACKET = (1e-8, 10.0)


# =============================================================================
# TIPOS
# =============================================================================


@dataclass(frozen=True)
class TaggedAsymptote:
    """lim ε^{2H} log(preço) com a etiqueta call/put."""

    value: float
    tag: OptionKind
    martingality_warning: bool = False


@dataclass(frozen=True)
class McImpliedVol:
    """Volatilidade implícita de um preço Monte Carlo."""

    implied_vol: float
    price: float
    standard_error: float
    strike: float
    maturity: float


@dataclass(frozen=True)
class SmileRow:
    y: float
    I: float
    I_hat: float
    binary: float
    ivol_limit: float
    tag: str
    flag: str = ""


@dataclass
class SmileTable:
    """Linhas por y: taxas, assíntota binária, limite de vol implícita e sinalizações."""

    regime: Regime
    rows: List[SmileRow] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        """DataFrame com as colunas `y,I,I_hat,binary,ivol_limit,flag`."""
        return pd.DataFrame(
            [
                {
                    "y": r.y,
                    "I": r.I,
                    "I_hat": r.I_hat,
                    "binary": r.binary,
                    "ivol_limit": r.ivol_limit,
                    "flag": r.flag,
                }
                for r in self.rows
            ],
            columns=["y", "I", "I_hat", "binary", "ivol_limit", "flag"],
        )

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


# =============================================================================
# TAXAS POR REGIME
# =============================================================================


def _require_nonzero(y: float) -> None:
    if y == 0.0:
        raise DomainError("y = 0 não é admitido")


def regime_rate(
    model: ModelSpec, y: float, regime: Regime, config: Optional[SolverConfig] = None
) -> float:
    """I_T(y) no ruído pequeno ou Î(y) no tempo curto (este exige o gate)."""
    config = config or SolverConfig(refine=False)
    if regime == "small_noise":
        return rate_function(model.kernel, model.sigma, model.rho, y, config).value
    if regime == "small_time":
        require_self_similar(model.kernel)
        return rate_function_hat(
            model.kernel, model.sigma, model.rho, model.H, model.T, y, config
        ).value
    raise DomainError(f"regime desconhecido: {regime}")


def binary_asymptote(
    model: ModelSpec, y: float, regime: Regime, config: Optional[SolverConfig] = None
) -> float:
    """lim ε^{2H} log P(binária) = -I_T(y) (ou -Î(y)); y > 0 raio superior, y < 0 inferior."""
    _require_nonzero(y)
    return -regime_rate(model, y, regime, config)


def call_put_asymptote(
    model: ModelSpec,
    y: float,
    regime: Regime,
    option: Optional[OptionKind] = None,
    config: Optional[SolverConfig] = None,
) -> TaggedAsymptote:
    """
    Log-assíntota de call (y > 0) ou put (y < 0); mesmo valor da binária.

    Raises:
        DomainError: y = 0 ou sinal incompatível com `option`.
    """
    _require_nonzero(y)
    tag: OptionKind = "call" if y > 0 else "put"
    if option is not None and option != tag:
        raise DomainError(f"{option} exige y {'> 0' if option == 'call' else '< 0'}, recebido {y}")
    warning = model.martingality_warning
    if warning:
        logger.warning("σ sem crescimento linear: assíntota sem garantia de martingal", y=y)
    return TaggedAsymptote(
        value=-regime_rate(model, y, regime, config), tag=tag, martingality_warning=warning
    )


def implied_vol_from_rate(y: float, rate: float) -> float:
    """|y| / sqrt(2I)."""
    if not rate > DEGENERATE_RATE:
        raise DegenerateLimitError(f"taxa {rate:.3e} degenerada: limite de vol implícita indefinido")
    return abs(y) / math.sqrt(2.0 * rate)


def implied_vol_limit(
    model: ModelSpec, y: float, regime: Regime, config: Optional[SolverConfig] = None
) -> float:
    """Limite da volatilidade implícita no strike s0·exp(y·θ^{1/2-H})."""
    _require_nonzero(y)
    return implied_vol_from_rate(y, regime_rate(model, y, regime, config))


# =============================================================================
# BLACK-SCHOLES
# =============================================================================


def bs_call_price(spot: float, strike: float, maturity: float, vol: float) -> float:
    """Call de Black-Scholes com juros zero."""
    if vol <= 0.0 or maturity <= 0.0:
        return max(spot - strike, 0.0)
    sd = vol * math.sqrt(maturity)
    d1 = math.log(spot / strike) / sd + 0.5 * sd
    d2 = d1 - sd
    return float(spot * stats.norm.cdf(d1) - strike * stats.norm.cdf(d2))


def bs_implied_vol(
    price: float,
    spot: float,
    strike: float,
    maturity: float,
    option: OptionKind = "call",
) -> float:
    """
    Volatilidade de Black-Scholes que reproduz `price` (brentq em [1e-8, 10]).

    Puts são convertidas por paridade (juros zero).

    Raises:
        RangeError: preço fora da banda de não arbitragem ((S - K)⁺, S).
    """
    if min(spot, strike, maturity) <= 0.0:
        raise DomainError("spot, strike e maturidade devem ser positivos")
    call = price + spot - strike if option == "put" else price
    intrinsic = max(spot - strike, 0.0)
    if not intrinsic < call < spot:
        raise RangeError(
            f"preço {call:.6g} fora da banda de não arbitragem ({intrinsic:.6g}, {spot:.6g})"
        )

    def gap(vol: float) -> float:
        return bs_call_price(spot, strike, maturity, vol) - call

    lo, hi = VOL_BRACKET
    if gap(lo) > 0.0 or gap(hi) < 0.0:
        raise RangeError(f"preço {call:.6g} fora do alcance de σ em [{lo}, {hi}]")
    return float(optimize.brentq(gap, lo, hi, xtol=1e-14, rtol=1e-13, maxiter=500))


def mc_implied_vol(
    model: ModelSpec,
    y: float,
    regime: Regime,
    scale: float,
    paths: int,
    seed: int,
    steps: int = 64,
    threads: Optional[int] = None,
) -> McImpliedVol:
    """
    Vol implícita de um preço Monte Carlo no strike do regime.

    small_noise: ε = scale, strike s0·exp(y ε^{1/2-H}), inversão com
        maturidade ε (σ constante dá σ₀·sqrt(T)).
    small_time: t = scale, modelo não escalado até t, strike
        s0·exp(y t^{1/2-H}), inversão com maturidade t.
    """
    _require_nonzero(y)
    if regime == "small_noise":
        local, eps = model, scale
    elif regime == "small_time":
        require_self_similar(model.kernel)
        local, eps = model.with_horizon(scale), 1.0
    else:
        raise DomainError(f"regime desconhecido: {regime}")

    strike = model.s0 * math.exp(y * scale ** (0.5 - model.H))
    samples = simulate_scaled_logprice(
        local, eps, PathGrid(n=steps, T=local.T), paths, seed, True, threads
    )
    spot_t = np.exp(samples)
    option: OptionKind = "call" if y > 0 else "put"
    payoff = np.maximum(spot_t - strike, 0.0) if y > 0 else np.maximum(strike - spot_t, 0.0)
    price = float(payoff.mean())
    se = float(payoff.std(ddof=1) / math.sqrt(payoff.size))
    vol = bs_implied_vol(price, model.s0, strike, scale, option)
    return McImpliedVol(implied_vol=vol, price=price, standard_error=se, strike=strike, maturity=scale)


# =============================================================================
# SMILE
# =============================================================================


def _smile_row(
    model: ModelSpec, y: float, regime: Regime, config: SolverConfig, hat_ready: bool
) -> SmileRow:
    nan = float("nan")
    if y == 0.0:
        return SmileRow(y=0.0, I=nan, I_hat=nan, binary=nan, ivol_limit=nan, tag="", flag="y_zero")

    tag = "call" if y > 0 else "put"
    flags = ["martingality_warning"] if model.martingality_warning else []
    try:
        rate = rate_function(model.kernel, model.sigma, model.rho, y, config).value
        rate_hat = (
            rate_function_hat(model.kernel, model.sigma, model.rho, model.H, model.T, y, config).value
            if hat_ready
            else nan
        )
    except VolterraLdpError as exc:
        logger.warning("linha do smile falhou", y=y, error=exc.message)
        return SmileRow(y=y, I=nan, I_hat=nan, binary=nan, ivol_limit=nan, tag=tag, flag=exc.kind)
    if not hat_ready:
        flags.append("no_hat")

    active = rate if regime == "small_noise" else rate_hat
    try:
        limit = implied_vol_from_rate(y, active)
    except DegenerateLimitError:
        limit = nan
        flags.append("degenerate")
    return SmileRow(
        y=y, I=rate, I_hat=rate_hat, binary=-active, ivol_limit=limit, tag=tag, flag=";".join(flags)
    )


def smile(
    model: ModelSpec,
    y_grid: Sequence[float],
    regime: Regime,
    config: Optional[SolverConfig] = None,
    threads: Optional[int] = None,
) -> SmileTable:
    """
    Tabela de smile sobre y_grid; linhas com falha ou y = 0 são sinalizadas.

    Raises:
        GateRefusal: regime de tempo curto com kernel não auto-similar.
    """
    config = config or SolverConfig(refine=False)
    try:
        require_self_similar(model.kernel)
        hat_ready = 0.0 < model.H < 1.0
    except GateRefusal:
        if regime == "small_time":
            raise
        hat_ready = False
    if regime == "small_time" and not hat_ready:
        raise DomainError(f"o regime de tempo curto exige H em (0, 1), recebido {model.H}")

    rows = ordered_map(
        lambda y: _smile_row(model, float(y), regime, config, hat_ready), list(y_grid), threads
    )
    logger.info("smile calculado", regime=regime, rows=len(rows))
    return SmileTable(regime=regime, rows=rows)
