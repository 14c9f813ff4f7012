#!/usr/bin/env python3
"""
Volterra LDP - Especificações Declarativas

Modelos pydantic imutáveis que descrevem o kernel de Volterra, a função de
volatilidade σ, o modelo completo e a malha temporal. São hashable, o que
permite usá-los como chave de cache nas rotinas numéricas.
"""

import math
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

KernelFamily = Literal[
    "brownian",
    "ornstein_uhlenbeck",
    "fbm",
    "riemann_liouville",
    "fractional_ou",
]
SigmaFamily = Literal["constant", "exponential", "shifted_abs", "sqrt_linear"]

HURST_FAMILIES = frozenset({"fbm", "riemann_liouville", "fractional_ou"})
RATE_FAMILIES = frozenset({"ornstein_uhlenbeck", "fractional_ou"})

# |rho| acima disso deixa rho_bar degenerado
RHO_LIMIT = 1.0 - 1e-9


# =============================================================================
# KERNEL
# =============================================================================


class KernelSpec(BaseModel):
    """
    Descrição declarativa de um kernel de Volterra K(t, s).

    Atributos:
        family: família do kernel
        H: parâmetro de Hurst em (0, 1) (ignorado para brownian/ornstein_uhlenbeck)
        a: taxa de reversão à média > 0 (apenas famílias OU)
        T: horizonte
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: KernelFamily
    H: float = 0.5
    a: float = 1.0
    T: float = 1.0

    @model_validator(mode="after")
    def _check_ranges(self) -> Self:
        if self.family in HURST_FAMILIES and not 0.0 < self.H < 1.0:
            raise ValueError(f"H deve estar em (0, 1) para a família {self.family}, recebido {self.H}")
        if self.family in RATE_FAMILIES and not self.a > 0.0:
            raise ValueError(f"a deve ser positivo para a família {self.family}, recebido {self.a}")
        if not self.T > 0.0:
            raise ValueError(f"T deve ser positivo, recebido {self.T}")
        return self

    @property
    def hurst(self) -> float:
        """Expoente de Hurst efetivo (1/2 para as famílias sem H)."""
        return self.H if self.family in HURST_FAMILIES else 0.5

    def with_horizon(self, T: float) -> Self:
        """Mesmo kernel restrito/estendido a outro horizonte."""
        return type(self)(**{**self.model_dump(), "T": T})


# =============================================================================
# VOLATILIDADE
# =============================================================================


class SigmaSpec(BaseModel):
    """
    Função de volatilidade σ(x) > 0.

    Famílias:
        constant:    σ(x) = sigma0
        exponential: σ(x) = sigma0 · exp(beta · x)
        shifted_abs: σ(x) = delta + |x|
        sqrt_linear: σ(x) = sqrt(c1 + c2 · x²)
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: SigmaFamily
    sigma0: float = 0.2
    beta: float = 0.0
    delta: float = 0.2
    c1: float = 0.04
    c2: float = 0.0

    @model_validator(mode="after")
    def _check_positive(self) -> Self:
        if self.family in ("constant", "exponential") and not self.sigma0 > 0.0:
            raise ValueError(f"sigma0 deve ser positivo, recebido {self.sigma0}")
        if self.family == "shifted_abs" and not self.delta > 0.0:
            raise ValueError(f"delta deve ser positivo, recebido {self.delta}")
        if self.family == "sqrt_linear":
            if not self.c1 > 0.0:
                raise ValueError(f"c1 deve ser positivo, recebido {self.c1}")
            if self.c2 < 0.0:
                raise ValueError(f"c2 não pode ser negativo, recebido {self.c2}")
        return self

    def __call__(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.family == "constant":
            return np.full_like(x, self.sigma0)
        if self.family == "exponential":
            return self.sigma0 * np.exp(self.beta * x)
        if self.family == "shifted_abs":
            return self.delta + np.abs(x)
        return np.sqrt(self.c1 + self.c2 * x * x)

    def derivative(self, x: Any) -> np.ndarray:
        """σ'(x); para shifted_abs devolve sign(x), que não é derivada em x = 0."""
        x = np.asarray(x, dtype=float)
        if self.family == "constant":
            return np.zeros_like(x)
        if self.family == "exponential":
            return self.beta * self.sigma0 * np.exp(self.beta * x)
        if self.family == "shifted_abs":
            return np.sign(x)
        return self.c2 * x / np.sqrt(self.c1 + self.c2 * x * x)

    @property
    def smooth(self) -> bool:
        return self.family != "shifted_abs"

    @property
    def linear_growth(self) -> bool:
        """σ(x)² ≤ c1 + c2·x² para alguma escolha de constantes."""
        return not (self.family == "exponential" and self.beta != 0.0)

    @property
    def at_zero(self) -> float:
        return float(self(0.0))


# =============================================================================
# MODELO
# =============================================================================


class ModelSpec(BaseModel):
    """
    Modelo de volatilidade estocástica fracionária completo.

    O horizonte do kernel é herdado de T quando o bloco do kernel não o
    informa; H (expoente de escala) assume o Hurst efetivo do kernel quando
    omitido.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kernel: KernelSpec
    sigma: SigmaSpec
    rho: float = 0.0
    H: float
    T: float = 1.0
    s0: float = 1.0

    @model_validator(mode="before")
    @classmethod
    def _inherit_horizon(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        kernel = data.get("kernel")
        if isinstance(kernel, dict):
            kernel = dict(kernel)
            if "T" in data and "T" not in kernel:
                kernel["T"] = data["T"]
            data["kernel"] = kernel
        if "T" not in data:
            if isinstance(kernel, dict) and "T" in kernel:
                data["T"] = kernel["T"]
            elif isinstance(kernel, KernelSpec):
                data["T"] = kernel.T
        if data.get("H") is None:
            if isinstance(kernel, KernelSpec):
                data["H"] = kernel.hurst
            elif isinstance(kernel, dict):
                family = kernel.get("family")
                data["H"] = kernel.get("H", 0.5) if family in HURST_FAMILIES else 0.5
        return data

    @model_validator(mode="after")
    def _check_model(self) -> Self:
        if not abs(self.rho) < RHO_LIMIT:
            raise ValueError(f"rho deve estar em (-1, 1), recebido {self.rho}")
        if not self.H > 0.0:
            raise ValueError(f"H deve ser positivo, recebido {self.H}")
        if not self.s0 > 0.0:
            raise ValueError(f"s0 deve ser positivo, recebido {self.s0}")
        if not math.isclose(self.kernel.T, self.T):
            raise ValueError(f"kernel.T ({self.kernel.T}) diverge de T ({self.T})")
        return self

    @property
    def rho_bar(self) -> float:
        return math.sqrt(1.0 - self.rho * self.rho)

    @property
    def x0(self) -> float:
        return math.log(self.s0)

    @property
    def martingality_warning(self) -> bool:
        """σ viola o crescimento linear: preços de call perdem a garantia de martingal."""
        return not self.sigma.linear_growth

    def with_horizon(self, T: float) -> Self:
        """Mesmo modelo com o kernel e o horizonte trocados para T."""
        return type(self)(
            kernel=self.kernel.with_horizon(T),
            sigma=self.sigma,
            rho=self.rho,
            H=self.H,
            T=T,
            s0=self.s0,
        )


# =============================================================================
# MALHA
# =============================================================================


class PathGrid(BaseModel):
    """Malha uniforme t_i = i·T/n, i = 0..n."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(gt=0)
    T: float = Field(gt=0.0)

    @property
    def dt(self) -> float:
        return self.T / self.n

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n + 1)

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.dt


# =============================================================================
# SOLVER
# =============================================================================


class SolverConfig(BaseModel):
    """
    Parâmetros do solver variacional da função taxa.

    Atributos:
        n: células da malha de controle
        starts: partidas perturbadas além da partida Black-Scholes
        start_scale: escala relativa das perturbações
        seed: semente das sub-sementes das partidas
        gtol, ftol, maxiter: critérios do L-BFGS-B
        refine: resolver também em 2n a partir do ótimo em n
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(default=64, gt=0, le=1024)
    starts: int = Field(default=8, ge=0)
    start_scale: float = Field(default=0.5, gt=0.0)
    seed: int = Field(default=2024, ge=0)
    gtol: float = Field(default=1e-8, gt=0.0)
    ftol: float = Field(default=1e-12, gt=0.0)
    maxiter: int = Field(default=2000, gt=0)
    refine: bool = True
