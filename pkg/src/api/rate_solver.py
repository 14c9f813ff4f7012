#!/usr/bin/env python3
"""
Volterra LDP - Solver da Função Taxa

Avalia numericamente a função taxa do regime de ruído pequeno

    I_T(x) = inf_f  (x - ρ∫σ(f̂)ḟ ds)² / (2ρ̄²∫σ(f̂)² ds) + ½∫ḟ² ds,

com f̂(s) = ∫_0^s K(s, u) ḟ(u) du, e a função taxa de tempo curto Î_T(y).
O controle ḟ é constante por célula numa malha uniforme; as integrais em s
usam a regra do ponto médio. A minimização é L-BFGS-B com múltiplas
partidas determinísticas.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy import optimize

from src.api.errors import DomainError
from src.api.kernels import kernel_cell_integral
from src.api.parallel import child_seeds, ordered_map
from src.api.specs import RHO_LIMIT, KernelSpec, PathGrid, SigmaSpec, SolverConfig

logger = structlog.get_logger(__name__)

# Piso da escala das perturbações (|x| pequeno)
_MIN_START_SCALE = 1e-3


# =============================================================================
# TIPOS
# =============================================================================


@dataclass(frozen=True)
class ControlPath:
    """Controle ḟ constante por célula sobre `grid` (f(0) = 0)."""

    grid: PathGrid
    fdot: np.ndarray

    def __post_init__(self) -> None:
        fdot = np.asarray(self.fdot, dtype=float)
        if fdot.shape != (self.grid.n,):
            raise DomainError(f"fdot deve ter {self.grid.n} células, recebido {fdot.shape}")
        object.__setattr__(self, "fdot", fdot)

    @property
    def energy(self) -> float:
        return 0.5 * float(np.dot(self.fdot, self.fdot)) * self.grid.dt

    @property
    def values(self) -> np.ndarray:
        """f nos pontos da malha."""
        return np.concatenate(([0.0], np.cumsum(self.fdot) * self.grid.dt))

    @classmethod
    def constant(cls, grid: PathGrid, value: float) -> "ControlPath":
        return cls(grid=grid, fdot=np.full(grid.n, float(value)))


@dataclass(frozen=True)
class CellMatrix:
    """
    Integrais de célula do kernel.

    at_grid[i, k] = ∫_{u_k}^{u_{k+1}} K(t_i, u) du nos pontos t_0..t_n;
    at_mid[j, k] o mesmo nos pontos médios s_j (truncado em s_j).
    """

    grid: PathGrid
    at_grid: np.ndarray
    at_mid: np.ndarray

    def rescaled(self, factor: float, grid: PathGrid) -> "CellMatrix":
        return CellMatrix(grid=grid, at_grid=factor * self.at_grid, at_mid=factor * self.at_mid)


@dataclass(frozen=True)
class RateResult:
    """
    Resultado da minimização.

    Atributos:
        value: valor da função taxa (cota superior do ínfimo)
        optimizer_path: controle ótimo encontrado
        fhat: f̂ nos pontos da malha
        starts_tried: partidas executadas
        converged: alguma partida convergiu
        grid_refinement: pares (n, valor)
    """

    value: float
    optimizer_path: ControlPath
    fhat: np.ndarray
    starts_tried: int
    converged: bool
    grid_refinement: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.optimizer_path.grid.n

    @property
    def value_at_2n(self) -> Optional[float]:
        for n, value in self.grid_refinement:
            if n == 2 * self.n:
                return value
        return None


# =============================================================================
# MATRIZES DE CÉLULA
# =============================================================================


@lru_cache(maxsize=16)
def cell_matrices(spec: KernelSpec, n: int) -> CellMatrix:
    """Matrizes de integrais de célula em [0, spec.T] com n células (cache por (spec, n))."""
    grid = PathGrid(n=n, T=spec.T)
    edges = grid.times
    at_grid = np.zeros((n + 1, n))
    at_mid = np.zeros((n, n))
    for i in range(1, n + 1):
        t = float(edges[i])
        for k in range(i):
            at_grid[i, k] = kernel_cell_integral(spec, t, float(edges[k]), float(edges[k + 1]))
    for j, s in enumerate(grid.midpoints):
        for k in range(j + 1):
            at_mid[j, k] = kernel_cell_integral(spec, float(s), float(edges[k]), float(edges[k + 1]))
    logger.debug("matrizes de célula calculadas", family=spec.family, n=n)
    return CellMatrix(grid=grid, at_grid=at_grid, at_mid=at_mid)


def unit_cell_matrices(spec: KernelSpec, n: int, H: float) -> CellMatrix:
    """Matrizes do kernel reescalado K̃_T(r, u) = T^(1/2 - H) K(Tr, Tu) em [0, 1]."""
    cells = cell_matrices(spec, n)
    return cells.rescaled(spec.T ** (-0.5 - H), PathGrid(n=n, T=1.0))


def lift_control(spec: KernelSpec, path: ControlPath) -> np.ndarray:
    """f̂(t_i) = Σ_k ḟ_k ∫_{u_k}^{u_{k+1}} K(t_i, u) du; f̂(0) = 0."""
    if not math.isclose(path.grid.T, spec.T):
        raise DomainError(f"malha com T={path.grid.T} diferente do horizonte {spec.T}")
    return cell_matrices(spec, path.grid.n).at_grid @ path.fdot


# =============================================================================
# OBJETIVO E GRADIENTE
# =============================================================================


class _Objective:
    """Funcional discretizado para (σ, ρ, x) fixos sobre uma CellMatrix."""

    def __init__(self, cells: CellMatrix, sigma: SigmaSpec, rho: float, x: float):
        if not abs(rho) < RHO_LIMIT:
            raise DomainError(f"rho deve estar em (-1, 1), recebido {rho}")
        self.cells = cells
        self.sigma = sigma
        self.rho = float(rho)
        self.rho_bar2 = 1.0 - self.rho * self.rho
        self.x = float(x)
        self.dt = cells.grid.dt

    def parts(self, fdot: np.ndarray) -> Tuple[float, float, float, np.ndarray]:
        fhat = self.cells.at_mid @ fdot
        sig = self.sigma(fhat)
        Q = float(np.dot(sig, sig)) * self.dt
        P = float(np.dot(sig, fdot)) * self.dt
        E = 0.5 * float(np.dot(fdot, fdot)) * self.dt
        return Q, P, E, fhat

    def value(self, fdot: np.ndarray) -> float:
        Q, P, E, _ = self.parts(fdot)
        N = self.x - self.rho * P
        return N * N / (2.0 * self.rho_bar2 * Q) + E

    def gradient(self, fdot: np.ndarray) -> np.ndarray:
        """Gradiente analítico (σ suave)."""
        Q, P, _, fhat = self.parts(fdot)
        sig = self.sigma(fhat)
        dsig = self.sigma.derivative(fhat)
        A = self.cells.at_mid
        dP = self.dt * (sig + A.T @ (dsig * fdot))
        dQ = 2.0 * self.dt * (A.T @ (sig * dsig))
        N = self.x - self.rho * P
        return (
            -N * self.rho * dP / (self.rho_bar2 * Q)
            - N * N * dQ / (2.0 * self.rho_bar2 * Q * Q)
            + self.dt * fdot
        )

    def fd_gradient(self, fdot: np.ndarray) -> np.ndarray:
        """Diferenças centrais com passo 1e-6·(1 + |ḟ_j|)."""
        steps = 1e-6 * (1.0 + np.abs(fdot))
        grad = np.empty_like(fdot)
        for j, h in enumerate(steps):
            up = fdot.copy()
            down = fdot.copy()
            up[j] += h
            down[j] -= h
            grad[j] = (self.value(up) - self.value(down)) / (2.0 * h)
        return grad

    def jacobian(self, fdot: np.ndarray) -> np.ndarray:
        return self.gradient(fdot) if self.sigma.smooth else self.fd_gradient(fdot)


def objective(
    spec: KernelSpec, sigma: SigmaSpec, rho: float, x: float, path: ControlPath
) -> float:
    """Valor do funcional discretizado no controle `path`."""
    return _Objective(cell_matrices(spec, path.grid.n), sigma, rho, x).value(path.fdot)


def objective_gradient(
    spec: KernelSpec,
    sigma: SigmaSpec,
    rho: float,
    x: float,
    path: ControlPath,
    method: Literal["auto", "analytic", "finite_difference"] = "auto",
) -> np.ndarray:
    """Gradiente do funcional em ḟ: analítico para σ suave, diferenças centrais caso contrário."""
    obj = _Objective(cell_matrices(spec, path.grid.n), sigma, rho, x)
    if method == "analytic":
        return obj.gradient(path.fdot)
    if method == "finite_difference":
        return obj.fd_gradient(path.fdot)
    return obj.jacobian(path.fdot)


# =============================================================================
# MINIMIZAÇÃO
# =============================================================================


@dataclass(frozen=True)
class _StartOutcome:
    index: int
    value: float
    energy: float
    fdot: np.ndarray
    converged: bool


def _run_start(obj: _Objective, index: int, start: np.ndarray, config: SolverConfig) -> _StartOutcome:
    res = optimize.minimize(
        obj.value,
        start,
        jac=obj.jacobian,
        method="L-BFGS-B",
        options={"maxiter": config.maxiter, "gtol": config.gtol, "ftol": config.ftol},
    )
    fdot = np.asarray(res.x, dtype=float)
    value = obj.value(fdot)
    # parada por busca linear com gradiente já desprezível conta como convergência
    converged = bool(res.success) or float(np.max(np.abs(obj.jacobian(fdot)))) <= 1e-6 * (
        1.0 + abs(value)
    )
    if not converged:
        logger.warning("partida não convergiu", start=index, message=str(res.message))
    energy = 0.5 * float(np.dot(fdot, fdot)) * obj.dt
    return _StartOutcome(index=index, value=value, energy=energy, fdot=fdot, converged=converged)


def _starting_points(
    sigma: SigmaSpec, rho: float, x: float, grid: PathGrid, config: SolverConfig
) -> List[np.ndarray]:
    sigma_zero = sigma.at_zero
    base = np.full(grid.n, rho * x / (sigma_zero * grid.T))
    scale = config.start_scale * max(abs(x) / (sigma_zero * grid.T), _MIN_START_SCALE)
    points = [base]
    for seed in child_seeds(config.seed, config.starts):
        rng = np.random.default_rng(seed)
        points.append(base + scale * rng.standard_normal(grid.n))
    return points


def _minimize(
    cells: CellMatrix,
    sigma: SigmaSpec,
    rho: float,
    x: float,
    config: SolverConfig,
    starts: Optional[Sequence[np.ndarray]] = None,
    threads: Optional[int] = None,
) -> Tuple[_StartOutcome, int, bool]:
    obj = _Objective(cells, sigma, rho, x)
    if starts is None:
        starts = _starting_points(sigma, rho, x, cells.grid, config)
    outcomes = ordered_map(
        lambda item: _run_start(obj, item[0], item[1], config), list(enumerate(starts)), threads
    )
    # menor objetivo; empate pela menor energia; depois pelo índice da partida
    best = min(outcomes, key=lambda o: (o.value, o.energy, o.index))
    converged = any(o.converged for o in outcomes)
    return best, len(outcomes), converged


def _solve(
    cells_for: Callable[[int], CellMatrix],
    sigma: SigmaSpec,
    rho: float,
    x: float,
    config: SolverConfig,
    threads: Optional[int],
    scale: float = 1.0,
) -> RateResult:
    cells = cells_for(config.n)
    best, tried, converged = _minimize(cells, sigma, rho, x, config, threads=threads)
    value = scale * best.value
    refinement = [(config.n, value)]

    if config.refine:
        fine = cells_for(2 * config.n)
        warm = np.repeat(best.fdot, 2)
        fine_best, _, _ = _minimize(fine, sigma, rho, x, config, starts=[warm], threads=1)
        refinement.append((2 * config.n, scale * fine_best.value))

    path = ControlPath(grid=cells.grid, fdot=best.fdot)
    result = RateResult(
        value=max(value, 0.0),
        optimizer_path=path,
        fhat=cells.at_grid @ best.fdot,
        starts_tried=tried,
        converged=converged,
        grid_refinement=refinement,
    )
    if not converged:
        logger.warning("nenhuma partida convergiu", x=x, value=result.value)
    return result


def rate_function(
    spec: KernelSpec,
    sigma: SigmaSpec,
    rho: float,
    x: float,
    config: Optional[SolverConfig] = None,
    threads: Optional[int] = None,
) -> RateResult:
    """
    I_T(x) por L-BFGS-B com múltiplas partidas.

    Partidas: ḟ ≡ ρx/(σ(0)T) e `config.starts` perturbações gaussianas com
    sub-sementes determinísticas. Vence o menor objetivo, com empate pela
    menor energia. O valor é uma cota superior do ínfimo.
    """
    config = config or SolverConfig()
    result = _solve(lambda n: cell_matrices(spec, n), sigma, rho, x, config, threads)
    logger.info(
        "função taxa avaliada",
        family=spec.family,
        sigma=sigma.family,
        x=x,
        value=result.value,
        converged=result.converged,
    )
    return result


def rate_function_hat(
    spec: KernelSpec,
    sigma: SigmaSpec,
    rho: float,
    H: float,
    T: float,
    y: float,
    config: Optional[SolverConfig] = None,
    method: Literal["direct", "scaling"] = "direct",
    threads: Optional[int] = None,
) -> RateResult:
    """
    Î_T(y), a função taxa do regime de tempo curto.

    direct: minimiza sobre [0, 1] com o kernel reescalado
        K̃_T(r, u) = T^(1/2 - H) K(Tr, Tu).
    scaling: usa a identidade Î_T(y) = T^(2H) I_T(T^(1/2 - H) y).

    O controle devolvido vive sempre na malha unitária (ḣ = T^(H + 1/2) ḟ).
    """
    if not 0.0 < H < 1.0:
        raise DomainError(f"o regime de tempo curto exige H em (0, 1), recebido {H}")
    config = config or SolverConfig()
    spec_T = spec.with_horizon(T) if not math.isclose(spec.T, T) else spec

    if method == "direct":
        result = _solve(lambda n: unit_cell_matrices(spec_T, n, H), sigma, rho, y, config, threads)
    elif method == "scaling":
        x = T ** (0.5 - H) * y
        raw = _solve(
            lambda n: cell_matrices(spec_T, n), sigma, rho, x, config, threads, scale=T ** (2.0 * H)
        )
        unit = PathGrid(n=config.n, T=1.0)
        result = RateResult(
            value=raw.value,
            optimizer_path=ControlPath(grid=unit, fdot=T ** (H + 0.5) * raw.optimizer_path.fdot),
            fhat=raw.fhat,
            starts_tried=raw.starts_tried,
            converged=raw.converged,
            grid_refinement=raw.grid_refinement,
        )
    else:
        raise DomainError(f"método desconhecido: {method}")

    logger.info("função taxa de tempo curto avaliada", method=method, y=y, value=result.value)
    return result


def grid_convergence(
    spec: KernelSpec,
    sigma: SigmaSpec,
    rho: float,
    x: float,
    ns: Sequence[int],
    config: Optional[SolverConfig] = None,
) -> List[Tuple[int, float]]:
    """Valores de I_T(x) em malhas sucessivas, cada uma aquecida pela anterior."""
    config = config or SolverConfig()
    values: List[Tuple[int, float]] = []
    previous: Optional[np.ndarray] = None
    for n in ns:
        cells = cell_matrices(spec, n)
        starts = None
        if previous is not None:
            starts = [np.repeat(previous, n // previous.size)] if n % previous.size == 0 else None
        local = config.model_copy(update={"n": n})
        best, _, _ = _minimize(cells, sigma, rho, x, local, starts=starts, threads=1)
        previous = best.fdot
        values.append((n, best.value))
    return values
