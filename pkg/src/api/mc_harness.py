#!/usr/bin/env python3
"""
Volterra LDP - Harness Monte Carlo

Simula o log-preço escalado

    X_T^{ε,H} = x0 + Σ_i [-½ ε σ(ε^H B̂_{t_i})² dt + √ε σ(ε^H B̂_{t_i}) (ρ̄ ΔW_i + ρ ΔB_i)]

(Euler no ponto esquerdo, B̂_{t_0} = 0) sobre a malha gaussiana exata e
verifica empiricamente as inclinações LDP, a redução de tempo curto e a
equivalência com o modelo sem drift.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy import stats

from src.api.errors import DomainError, EstimationError
from src.api.gaussian_engine import JointPathBatch, joint_sampler
from src.api.kernels import require_self_similar
from src.api.parallel import ordered_map
from src.api.rate_solver import rate_function, rate_function_hat
from src.api.specs import ModelSpec, PathGrid, SolverConfig

logger = structlog.get_logger(__name__)

DEFAULT_STEPS = 256

# Pontos com menos acertos que isso entram na regressão, mas ficam sinalizados
MIN_HITS = 50

# Caminhos por amostra no teste de Kolmogorov-Smirnov
KS_PATHS = 20000


# =============================================================================
# TIPOS
# =============================================================================


@dataclass(frozen=True)
class LdpEstimate:
    """
    Estimativa empírica da inclinação LDP.

    Atributos:
        eps_grid: valores de ε (ou de t, no regime de tempo curto)
        probabilities: frequência do evento por ε
        standard_errors: sqrt(p(1 - p)/N)
        hits: contagens do evento
        scaled_logs: ε^{2H} log p (nan onde p = 0)
        usable: pontos usados na regressão
        slope_estimate: inclinação de log p contra -ε^{-2H}
        intercept: intercepto da regressão (prefator desconhecido)
        theory: valor teórico da função taxa
        runs_pvalue: p-valor do teste de sequências nos sinais dos resíduos
        paths: caminhos por ε
        diagnostics: dados auxiliares (ex.: estatística KS, defeito do gate)
    """

    eps_grid: np.ndarray
    probabilities: np.ndarray
    standard_errors: np.ndarray
    hits: np.ndarray
    scaled_logs: np.ndarray
    usable: np.ndarray
    slope_estimate: float
    intercept: float
    theory: float
    runs_pvalue: float
    paths: int
    diagnostics: Dict[str, float] = field(default_factory=dict)

    @property
    def relative_error(self) -> float:
        return abs(self.slope_estimate - self.theory) / abs(self.theory)

    def rows(self) -> List[Dict[str, float]]:
        """Linhas no formato `eps,prob,se,scaled_log,theory_I,slope`."""
        return [
            {
                "eps": float(e),
                "prob": float(p),
                "se": float(s),
                "scaled_log": float(g),
                "theory_I": self.theory,
                "slope": self.slope_estimate,
            }
            for e, p, s, g in zip(
                self.eps_grid, self.probabilities, self.standard_errors, self.scaled_logs
            )
        ]


# =============================================================================
# LOG-PREÇO
# =============================================================================


def _left_volatility(model: ModelSpec, eps: float, batch: JointPathBatch) -> np.ndarray:
    """σ(ε^H B̂_{t_i}) nos pontos esquerdos t_0..t_{n-1}."""
    bhat = batch.bhat_values
    left = np.zeros_like(bhat)
    left[:, 1:] = bhat[:, :-1]
    return model.sigma((eps**model.H) * left)


def drift_integral(model: ModelSpec, eps: float, batch: JointPathBatch, dt: float) -> np.ndarray:
    """Σ_i σ(ε^H B̂_{t_i})² dt por caminho."""
    sig = _left_volatility(model, eps, batch)
    return (sig * sig).sum(axis=1) * dt


def logprice_from_paths(
    model: ModelSpec, eps: float, batch: JointPathBatch, dt: float, include_drift: bool = True
) -> np.ndarray:
    """X_T^{ε,H} por caminho a partir de um lote conjunto."""
    sig = _left_volatility(model, eps, batch)
    noise = model.rho_bar * batch.w_increments + model.rho * batch.b_increments
    x = model.x0 + math.sqrt(eps) * (sig * noise).sum(axis=1)
    if include_drift:
        x = x - 0.5 * eps * (sig * sig).sum(axis=1) * dt
    return x


def _check_model_grid(model: ModelSpec, grid: PathGrid, eps: float) -> None:
    if not 0.0 < eps <= 1.0:
        raise DomainError(f"eps deve estar em (0, 1], recebido {eps}")
    if not math.isclose(grid.T, model.T):
        raise DomainError(f"malha com T={grid.T} diferente do horizonte do modelo {model.T}")


def simulate_scaled_logprice(
    model: ModelSpec,
    eps: float,
    grid: PathGrid,
    paths: int,
    seed: int,
    include_drift: bool = True,
    threads: Optional[int] = None,
) -> np.ndarray:
    """
    Amostras de X_T^{ε,H}.

    Determinístico dado (model, eps, grid, paths, seed) e independente de
    `threads`: os blocos são gerados em paralelo e concatenados em ordem.
    """
    _check_model_grid(model, grid, eps)
    sampler = joint_sampler(model.kernel, grid)

    def block(item: Tuple[int, int]) -> np.ndarray:
        batch = sampler.block(seed, item[0], item[1])
        return logprice_from_paths(model, eps, batch, grid.dt, include_drift)

    return np.concatenate(ordered_map(block, sampler.blocks(paths), threads))


def gaussian_tail_probability(
    model: ModelSpec, y: float, eps: float, include_drift: bool = True
) -> float:
    """
    Probabilidade exata de ε^{H-1/2}(X_T^{ε,H} - x0) além de y para σ constante.

    Para qualquer kernel, X - x0 ~ N(-½εσ₀²T, εσ₀²T) (sem o termo de média
    quando include_drift é falso).
    """
    if model.sigma.family != "constant":
        raise DomainError("o oráculo gaussiano exige σ constante")
    if y == 0.0:
        raise DomainError("y deve ser diferente de zero")
    sigma0 = model.sigma.sigma0
    mean = -0.5 * eps * sigma0**2 * model.T if include_drift else 0.0
    sd = sigma0 * math.sqrt(eps * model.T)
    z = (y * eps ** (0.5 - model.H) - mean) / sd
    return float(stats.norm.sf(z) if y > 0 else stats.norm.cdf(z))


# =============================================================================
# REGRESSÃO
# =============================================================================


def runs_test_pvalue(residuals: Sequence[float]) -> float:
    """Teste de sequências (Wald-Wolfowitz) nos sinais dos resíduos; p-valor bilateral."""
    signs = np.sign(np.asarray(residuals, dtype=float))
    signs = signs[signs != 0]
    n_pos = int((signs > 0).sum())
    n_neg = int((signs < 0).sum())
    total = n_pos + n_neg
    if n_pos == 0 or n_neg == 0 or total < 2:
        return 1.0
    runs = 1 + int((signs[1:] != signs[:-1]).sum())
    mean = 2.0 * n_pos * n_neg / total + 1.0
    var = 2.0 * n_pos * n_neg * (2.0 * n_pos * n_neg - total) / (total**2 * (total - 1))
    if var <= 0.0:
        return 1.0
    z = (runs - mean) / math.sqrt(var)
    return float(2.0 * stats.norm.sf(abs(z)))


def _event_hits(scaled: np.ndarray, y: float) -> int:
    return int((scaled > y).sum() if y > 0 else (scaled < y).sum())


def _estimate(
    scales: np.ndarray,
    hits: np.ndarray,
    paths: int,
    H: float,
    theory: float,
    diagnostics: Optional[Dict[str, float]] = None,
) -> LdpEstimate:
    """Monta a LdpEstimate a partir das contagens e faz a regressão OLS."""
    prob = hits / float(paths)
    se = np.sqrt(prob * (1.0 - prob) / paths)
    speed = scales ** (-2.0 * H)
    usable = hits > 0
    with np.errstate(divide="ignore"):
        logs = np.where(usable, np.log(np.where(usable, prob, 1.0)), np.nan)
    scaled_logs = logs / speed

    for value, count in zip(scales[~usable], hits[~usable]):
        logger.warning("ponto sem acertos excluído da regressão", scale=float(value), hits=int(count))
    for value, count in zip(scales[usable & (hits < MIN_HITS)], hits[usable & (hits < MIN_HITS)]):
        logger.warning("ponto com poucos acertos", scale=float(value), hits=int(count))

    if int(usable.sum()) < 3:
        raise EstimationError(f"apenas {int(usable.sum())} pontos utilizáveis; são necessários 3")

    regressor = -speed[usable]
    fit = stats.linregress(regressor, logs[usable])
    residuals = logs[usable] - (fit.intercept + fit.slope * regressor)
    # ordem decrescente de ε para o teste de sequências
    order = np.argsort(-scales[usable])
    return LdpEstimate(
        eps_grid=scales,
        probabilities=prob,
        standard_errors=se,
        hits=hits,
        scaled_logs=scaled_logs,
        usable=usable,
        slope_estimate=float(fit.slope),
        intercept=float(fit.intercept),
        theory=float(theory),
        runs_pvalue=runs_test_pvalue(residuals[order]),
        paths=int(paths),
        diagnostics=dict(diagnostics or {}),
    )


# =============================================================================
# VERIFICAÇÕES
# =============================================================================


def ldp_slope(
    model: ModelSpec,
    y: float,
    eps_grid: Sequence[float],
    paths: int,
    seed: int,
    include_drift: bool = True,
    grid: Optional[PathGrid] = None,
    theory: Optional[float] = None,
    config: Optional[SolverConfig] = None,
    threads: Optional[int] = None,
) -> LdpEstimate:
    """
    Inclinação empírica de log P(ε^{H-1/2}(X_T^{ε,H} - x0) ∈ A) contra -ε^{-2H}.

    A = (y, ∞) para y > 0 e (-∞, y) para y < 0. Os mesmos caminhos servem a
    todos os ε (números aleatórios comuns). Pontos sem acertos são
    sinalizados e excluídos; com menos de três pontos utilizáveis a
    estimativa falha.
    """
    if y == 0.0:
        raise DomainError("y deve ser diferente de zero")
    scales = np.asarray(eps_grid, dtype=float)
    grid = grid or PathGrid(n=DEFAULT_STEPS, T=model.T)
    for eps in scales:
        _check_model_grid(model, grid, float(eps))
    if theory is None:
        theory = rate_function(
            model.kernel, model.sigma, model.rho, y, config or SolverConfig(refine=False)
        ).value

    sampler = joint_sampler(model.kernel, grid)

    def block(item: Tuple[int, int]) -> np.ndarray:
        batch = sampler.block(seed, item[0], item[1])
        counts = np.empty(scales.size, dtype=np.int64)
        for k, eps in enumerate(scales):
            x = logprice_from_paths(model, float(eps), batch, grid.dt, include_drift)
            counts[k] = _event_hits(eps ** (model.H - 0.5) * (x - model.x0), y)
        return counts

    hits = np.sum(ordered_map(block, sampler.blocks(paths), threads), axis=0)
    estimate = _estimate(scales, hits, paths, model.H, theory)
    logger.info(
        "inclinação LDP estimada",
        y=y,
        slope=estimate.slope_estimate,
        theory=estimate.theory,
        include_drift=include_drift,
    )
    return estimate


def smalltime_check(
    model: ModelSpec,
    y: float,
    t_grid: Sequence[float],
    paths: int,
    seed: int,
    steps: int = DEFAULT_STEPS,
    ks_eps: float = 0.5,
    ks_paths: int = KS_PATHS,
    config: Optional[SolverConfig] = None,
    threads: Optional[int] = None,
) -> LdpEstimate:
    """
    Verificação do regime de tempo curto.

    Simula o modelo não escalado nas maturidades t de t_grid, regride
    log P(t^{H-1/2}(X_t - x0) ∈ A) contra -t^{-2H} e compara com Î(y).
    Também compara, por Kolmogorov-Smirnov, as leis de X_T^{ε,H} e X_{εT}.

    Raises:
        GateRefusal: kernel não auto-similar.
        DomainError: H fora de (0, 1) ou diferente do Hurst do kernel.
    """
    defect = require_self_similar(model.kernel)
    if not 0.0 < model.H < 1.0:
        raise DomainError(f"o regime de tempo curto exige H em (0, 1), recebido {model.H}")
    if not math.isclose(model.H, model.kernel.hurst):
        raise DomainError(
            f"H do modelo ({model.H}) difere do Hurst do kernel ({model.kernel.hurst})"
        )
    if y == 0.0:
        raise DomainError("y deve ser diferente de zero")

    scales = np.asarray(t_grid, dtype=float)
    hits = np.empty(scales.size, dtype=np.int64)
    for k, t in enumerate(scales):
        local = model.with_horizon(float(t))
        samples = simulate_scaled_logprice(
            local, 1.0, PathGrid(n=steps, T=float(t)), paths, seed, True, threads
        )
        hits[k] = _event_hits(float(t) ** (model.H - 0.5) * (samples - model.x0), y)

    theory = rate_function_hat(
        model.kernel, model.sigma, model.rho, model.H, model.T, y, config or SolverConfig(refine=False)
    ).value

    # X_T^{ε,H} contra X_{εT} com sementes independentes
    scaled = simulate_scaled_logprice(
        model, ks_eps, PathGrid(n=steps, T=model.T), ks_paths, seed + 1, True, threads
    )
    short = model.with_horizon(ks_eps * model.T)
    direct = simulate_scaled_logprice(
        short, 1.0, PathGrid(n=steps, T=short.T), ks_paths, seed + 2, True, threads
    )
    ks = stats.ks_2samp(scaled, direct)

    estimate = _estimate(
        scales,
        hits,
        paths,
        model.H,
        theory,
        diagnostics={
            "gate_defect": defect,
            "ks_statistic": float(ks.statistic),
            "ks_pvalue": float(ks.pvalue),
        },
    )
    logger.info(
        "verificação de tempo curto concluída",
        slope=estimate.slope_estimate,
        theory=theory,
        ks_pvalue=float(ks.pvalue),
    )
    return estimate
