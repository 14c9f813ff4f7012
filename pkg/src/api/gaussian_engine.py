#!/usr/bin/env python3
"""
Volterra LDP - Motor Gaussiano

Simulação exata conjunta de (W, B, B̂) numa malha uniforme via fatoração de
Cholesky da covariância conjunta de (B_{t_1..t_n}, B̂_{t_1..t_n}), e espectro
de Karhunen-Loève de B̂ (método de Nyström) para o lema de momentos
exponenciais.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
import structlog
from scipy import linalg

from src.api.errors import DomainError, FactorizationError, RangeError
from src.api.kernels import covariance_grid, cross_covariance
from src.api.parallel import BLOCK_SIZE, block_generator, ordered_map, split_blocks
from src.api.specs import KernelSpec, PathGrid

logger = structlog.get_logger(__name__)

# Política de jitter: δ inicial relativo à maior variância, dobrado até o limite
JITTER_START = 1e-12
JITTER_DOUBLINGS = 20


# =============================================================================
# TIPOS
# =============================================================================


@dataclass(frozen=True)
class JointPathBatch:
    """
    Lote de caminhos conjuntos.

    Atributos:
        w_increments: incrementos de W, (paths, n)
        b_increments: incrementos de B, (paths, n)
        bhat_values: B̂ em t_1..t_n, (paths, n)
        seed: semente que gerou o lote
    """

    w_increments: np.ndarray
    b_increments: np.ndarray
    bhat_values: np.ndarray
    seed: int

    @property
    def paths(self) -> int:
        return int(self.bhat_values.shape[0])

    @property
    def b_values(self) -> np.ndarray:
        return np.cumsum(self.b_increments, axis=1)

    @property
    def w_values(self) -> np.ndarray:
        return np.cumsum(self.w_increments, axis=1)


@dataclass(frozen=True)
class KLSpectrum:
    """
    Espectro de Karhunen-Loève truncado.

    Atributos:
        eigenvalues: autovalores positivos em ordem decrescente
        count: quantidade retida
        trace: ∫_0^T C(t, t) dt pela regra do trapézio (soma de todos os autovalores)
        truncation_error: trace menos a soma dos autovalores retidos
    """

    eigenvalues: np.ndarray
    count: int
    trace: float
    truncation_error: float

    @property
    def total(self) -> float:
        return float(self.eigenvalues.sum())

    @property
    def leading(self) -> float:
        return float(self.eigenvalues[0])


@dataclass(frozen=True)
class MomentBound:
    """Limiar (4aλ₁)^-1 e cota exp(2aΣλ_k) do lema de momentos exponenciais."""

    threshold: float
    bound: float
    eigen_sum: float


@dataclass(frozen=True)
class MomentEstimate:
    """Estimativa Monte Carlo de E[exp(aε∫B̂²)] com erro padrão."""

    mean: float
    standard_error: float
    paths: int


# =============================================================================
# COVARIÂNCIA CONJUNTA E FATORAÇÃO
# =============================================================================


def build_joint_covariance(spec: KernelSpec, grid: PathGrid) -> np.ndarray:
    """
    Covariância de (B_{t_1}, ..., B_{t_n}, B̂_{t_1}, ..., B̂_{t_n}).

    Blocos: min(t_i, t_j) para B; E[B_{t_i} B̂_{t_j}] = ∫_0^{t_i ∧ t_j} K(t_j, u) du
    no bloco cruzado; C(t_i, t_j) para B̂.
    """
    if grid.T > spec.T * (1.0 + 1e-12):
        raise DomainError(f"malha com T={grid.T} além do horizonte do kernel {spec.T}")
    times = grid.times[1:]
    n = times.size
    brownian = np.minimum.outer(times, times)
    cross = np.empty((n, n))
    for i, ti in enumerate(times):
        for j, tj in enumerate(times):
            cross[i, j] = cross_covariance(spec, float(ti), float(tj))
    volterra = covariance_grid(spec, times).matrix

    joint = np.empty((2 * n, 2 * n))
    joint[:n, :n] = brownian
    joint[:n, n:] = cross
    joint[n:, :n] = cross.T
    joint[n:, n:] = volterra
    return 0.5 * (joint + joint.T)


def factorize(matrix: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Fator de Cholesky inferior com a política de jitter.

    Returns:
        (fator, jitter aplicado)

    Raises:
        FactorizationError: se falhar após o jitter máximo.
    """
    try:
        return linalg.cholesky(matrix, lower=True), 0.0
    except linalg.LinAlgError:
        pass

    scale = float(np.max(np.diag(matrix))) or 1.0
    identity = np.eye(matrix.shape[0])
    delta = JITTER_START * scale
    for _ in range(JITTER_DOUBLINGS + 1):
        try:
            factor = linalg.cholesky(matrix + delta * identity, lower=True)
            logger.warning("cholesky exigiu jitter", jitter=delta, size=matrix.shape[0])
            return factor, delta
        except linalg.LinAlgError:
            delta *= 2.0

    min_eig = float(linalg.eigvalsh(matrix).min())
    raise FactorizationError("cholesky falhou após o jitter máximo", min_eig)


# =============================================================================
# AMOSTRAGEM
# =============================================================================


class JointSampler:
    """
    Amostrador exato de (W, B, B̂) numa malha.

    O fator de Cholesky é calculado uma vez e compartilhado somente leitura;
    cada bloco de caminhos usa o gerador derivado de (seed, bloco).
    """

    def __init__(self, spec: KernelSpec, grid: PathGrid, block_size: int = BLOCK_SIZE):
        self.spec = spec
        self.grid = grid
        self.block_size = int(block_size)
        # só o fator fica guardado; a covariância 2n × 2n é descartada
        self.factor, self.jitter = factorize(build_joint_covariance(spec, grid))
        self.factor.setflags(write=False)
        logger.info(
            "amostrador conjunto pronto", family=spec.family, n=grid.n, jitter=self.jitter
        )

    @property
    def n(self) -> int:
        return self.grid.n

    def block(self, seed: int, index: int, size: int) -> JointPathBatch:
        """Bloco `index` com `size` caminhos."""
        n = self.n
        rng = block_generator(seed, index)
        z = rng.standard_normal((size, 2 * n))
        joint = z @ self.factor.T
        b_values = joint[:, :n]
        bhat = joint[:, n:]
        b_increments = np.diff(b_values, axis=1, prepend=0.0)
        w_increments = math.sqrt(self.grid.dt) * rng.standard_normal((size, n))
        return JointPathBatch(
            w_increments=w_increments,
            b_increments=b_increments,
            bhat_values=bhat,
            seed=int(seed),
        )

    def blocks(self, paths: int) -> List[Tuple[int, int]]:
        """Pares (índice, tamanho) que cobrem `paths` caminhos."""
        return list(enumerate(split_blocks(paths, self.block_size)))

    def sample(self, paths: int, seed: int, threads: Optional[int] = None) -> JointPathBatch:
        """Concatena os blocos na ordem; o resultado independe de `threads`."""
        if paths < 1:
            raise DomainError(f"paths deve ser >= 1, recebido {paths}")
        parts = ordered_map(lambda item: self.block(seed, item[0], item[1]), self.blocks(paths), threads)
        return JointPathBatch(
            w_increments=np.concatenate([p.w_increments for p in parts]),
            b_increments=np.concatenate([p.b_increments for p in parts]),
            bhat_values=np.concatenate([p.bhat_values for p in parts]),
            seed=int(seed),
        )


@lru_cache(maxsize=8)
def joint_sampler(spec: KernelSpec, grid: PathGrid) -> JointSampler:
    """Amostrador construído uma vez por (kernel, malha)."""
    return JointSampler(spec, grid)


def sample_paths(
    spec: KernelSpec, grid: PathGrid, paths: int, seed: int, threads: Optional[int] = None
) -> JointPathBatch:
    """Lote determinístico dado (seed, paths, n, spec)."""
    return joint_sampler(spec, grid).sample(paths, seed, threads)


# =============================================================================
# KARHUNEN-LOÈVE
# =============================================================================


def kl_spectrum(spec: KernelSpec, grid: PathGrid, count: Optional[int] = None) -> KLSpectrum:
    """
    Autovalores do operador de covariância de B̂ pelo método de Nyström.

    Usa pesos do trapézio em t_1..t_n (o último com dt/2) e a matriz
    simétrica D^(1/2) C D^(1/2). Autovalores negativos numéricos são
    descartados.
    """
    n = grid.n
    count = n if count is None else int(count)
    if not 1 <= count <= n:
        raise DomainError(f"count deve estar em [1, {n}], recebido {count}")
    times = grid.times[1:]
    weights = np.full(n, grid.dt)
    weights[-1] = 0.5 * grid.dt
    root = np.sqrt(weights)
    cov = covariance_grid(spec, times).matrix
    eigenvalues = linalg.eigh(root[:, None] * cov * root[None, :], eigvals_only=True)
    eigenvalues = np.sort(eigenvalues[eigenvalues > 0.0])[::-1]
    trace = float(np.dot(weights, np.diag(cov)))
    kept = eigenvalues[:count]
    logger.info("espectro KL calculado", family=spec.family, n=n, leading=float(kept[0]))
    return KLSpectrum(
        eigenvalues=kept,
        count=int(kept.size),
        trace=trace,
        truncation_error=float(trace - kept.sum()),
    )


def moment_bound(
    spec: KernelSpec,
    a: float,
    eps: float,
    grid: Optional[PathGrid] = None,
    spectrum: Optional[KLSpectrum] = None,
) -> MomentBound:
    """
    Lema de momentos: para 0 < eps < (4aλ₁)^-1,

        E[exp(a ε ∫_0^T B̂_u² du)] ≤ exp(2a Σλ_k).

    Raises:
        RangeError: eps fora de (0, limiar).
    """
    if not a > 0.0:
        raise DomainError(f"a deve ser positivo, recebido {a}")
    if spectrum is None:
        spectrum = kl_spectrum(spec, grid or PathGrid(n=512, T=spec.T))
    threshold = 1.0 / (4.0 * a * spectrum.leading)
    if not 0.0 < eps < threshold:
        raise RangeError(f"eps={eps} fora de (0, {threshold:.6g}): o lema não fornece cota")
    eigen_sum = spectrum.total
    return MomentBound(threshold=threshold, bound=math.exp(2.0 * a * eigen_sum), eigen_sum=eigen_sum)


def exponential_moment_mc(
    spec: KernelSpec,
    a: float,
    eps: float,
    grid: PathGrid,
    paths: int,
    seed: int,
    threads: Optional[int] = None,
) -> MomentEstimate:
    """Estima E[exp(a ε ∫_0^T B̂_u² du)] com ∫ pelo trapézio e B̂_0 = 0."""
    sampler = joint_sampler(spec, grid)
    weights = np.full(grid.n, grid.dt)
    weights[-1] = 0.5 * grid.dt

    def block_values(item: Tuple[int, int]) -> np.ndarray:
        batch = sampler.block(seed, item[0], item[1])
        energy = (batch.bhat_values**2) @ weights
        return np.exp(a * eps * energy)

    values = np.concatenate(ordered_map(block_values, sampler.blocks(paths), threads))
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else float("nan")
    return MomentEstimate(mean=float(values.mean()), standard_error=se, paths=int(values.size))
