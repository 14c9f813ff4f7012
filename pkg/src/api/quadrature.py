#!/usr/bin/env python3
"""
Volterra LDP - Quadratura Adaptativa

Encapsula scipy.integrate.quad (QUADPACK). Integrandos com singularidade de
potência nas extremidades usam o peso algébrico (x - lo)^alpha (hi - x)^beta
da regra QAWS; os demais usam QAGS. Toda falha de convergência vira
QuadratureError com a estimativa de erro obtida.
"""

from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate

from src.api.errors import QuadratureError

# Tolerâncias padrão do pacote
EPSABS = 1e-10
EPSREL = 1e-8
LIMIT = 200

# Multiplicador sobre a tolerância pedida antes de considerar a integral falha
_SLACK = 100.0

# Passo relativo para dentro nas extremidades do peso algébrico
_ENDPOINT_NUDGE = 1e-12


def _inward(func: Callable[[float], float], lo: float, hi: float) -> Callable[[float], float]:
    """
    A regra QAWS avalia a parte regular nas extremidades, onde ela só existe
    como limite; essas avaliações são feitas um passo relativo para dentro.
    """
    step = _ENDPOINT_NUDGE * (hi - lo)

    def regular(x: float) -> float:
        if x <= lo:
            x = lo + step
        elif x >= hi:
            x = hi - step
        return func(x)

    return regular


def integrate_interval(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    exponents: Optional[Tuple[float, float]] = None,
    epsabs: float = EPSABS,
    epsrel: float = EPSREL,
    limit: int = LIMIT,
    label: str = "integral",
) -> float:
    """
    Integra func em [lo, hi].

    Args:
        func: integrando escalar; com `exponents` é a parte regular f, e a
            integral calculada é ∫ f(x) (x - lo)^alpha (hi - x)^beta dx
        lo, hi: extremidades (lo >= hi devolve 0)
        exponents: (alpha, beta) com alpha, beta > -1, ou None
        epsabs, epsrel, limit: parâmetros do QUADPACK
        label: nome usado na mensagem de erro

    Returns:
        Valor da integral.

    Raises:
        QuadratureError: se o QUADPACK reportar problema e o erro estimado
            exceder a tolerância pedida, ou se o valor não for finito.
    """
    if not hi > lo:
        return 0.0

    if exponents is not None and (exponents[0] != 0.0 or exponents[1] != 0.0):
        out = integrate.quad(
            _inward(func, lo, hi),
            lo,
            hi,
            weight="alg",
            wvar=exponents,
            epsabs=epsabs,
            epsrel=epsrel,
            limit=limit,
            full_output=1,
        )
    else:
        out = integrate.quad(
            func, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1
        )

    value, abserr = float(out[0]), float(out[1])
    if not np.isfinite(value):
        raise QuadratureError(f"{label}: valor não finito em [{lo:.6g}, {hi:.6g}]", abserr)

    # quad só devolve a mensagem (4º elemento) quando o QUADPACK sinaliza algo
    if len(out) > 3:
        tolerance = _SLACK * max(epsabs, epsrel * abs(value))
        if abserr > tolerance:
            raise QuadratureError(
                f"{label}: quadratura não convergiu em [{lo:.6g}, {hi:.6g}]", abserr
            )
    return value
