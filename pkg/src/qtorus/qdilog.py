"""Discrete (Faddeev-Kashaev) quantum dilogarithm at an odd root of unity.

    QDL(u, v | i) = v^{-i} * prod_{k=1}^{i} (1 + u q^{-2k}),    v^n = 1 + u^n != 0

is n-periodic in i, so only i mod n matters. Its period product

    D(u) = prod_{i=1}^{n} QDL(u, v | i) = (1 + u^n)^{-(n+1)/2} prod_{k=1}^{n} (1 + u q^{-2k})^{n-k+1}

does not depend on the choice of v and normalizes the left/right intertwiners.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeightError
from .torus_algebra import QRoot

PARAM_TOL = 1e-10
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QdlParams:
    u: complex
    v: complex
    q: QRoot

    def __post_init__(self):
        n = self.q.n
        un1 = 1 + self.u**n
        if abs(un1) < DEGENERATE_TOL * (1 + abs(self.u) ** n):
            raise DegenerateWeightError(f"1 + u^n vanishes for u={self.u}, n={n}")
        if abs(self.v**n - un1) > PARAM_TOL * max(1.0, abs(un1)):
            raise DegenerateWeightError(f"v^n != 1 + u^n for u={self.u}, v={self.v}, n={n}")

    @classmethod
    def principal(cls, u: complex, q: QRoot) -> "QdlParams":
        """Parameters with v the principal n-th root of 1 + u^n."""
        return cls(u, complex((1 + u**q.n) ** (1.0 / q.n)), q)


def qdl_table(p: QdlParams) -> np.ndarray:
    """QDL(u, v | i) for i = 0, ..., n-1 as a prefix product.

    Accumulated as a sum of complex logarithms so that large n cannot
    overflow the intermediate products.
    """
    n = p.q.n
    k = np.arange(1, n)
    factors = (1 + p.u * p.q.pow_array(-2 * k)) / p.v
    if np.any(factors == 0):
        # a vanishing factor zeroes every later prefix; keep it exact
        out = np.ones(n, dtype=complex)
        out[1:] = np.cumprod(factors)
        return out
    logs = np.concatenate(([0.0], np.cumsum(np.log(factors.astype(complex)))))
    return np.exp(logs)


def qdl(p: QdlParams, i: int) -> complex:
    return complex(qdl_table(p)[int(i) % p.q.n])


def log_dq(u: complex, q: QRoot) -> complex:
    """log D(u) as log|D| + i*arg(D), with arg reduced to (-pi, pi].

    The exponent (n+1)/2 is an integer for odd n, so no branch choice enters.
    """
    n = q.n
    un1 = 1 + u**n
    if abs(un1) < DEGENERATE_TOL * (1 + abs(u) ** n):
        raise DegenerateWeightError(f"1 + u^n vanishes for u={u}, n={n}")
    k = np.arange(1, n + 1)
    f = 1 + u * q.pow_array(-2 * k)
    if np.any(np.abs(f) == 0):
        raise DegenerateWeightError(f"factor 1 + u q^(-2k) vanishes for u={u}, n={n}")
    mult = (n - k + 1).astype(float)
    half = (n + 1) // 2
    log_mod = float(np.sum(mult * np.log(np.abs(f)))) - half * math.log(abs(un1))
    phase = float(np.sum(mult * np.angle(f))) - half * cmath.phase(un1)
    phase = math.remainder(phase, 2 * math.pi)
    return complex(log_mod, phase)


def dq(u: complex, q: QRoot) -> complex:
    """D(u); overflows to inf for large n, use :func:`log_dq` there."""
    lg = log_dq(u, q)
    try:
        return cmath.exp(lg)
    except OverflowError:
        return complex(math.inf, 0.0)


def dq_abs_nth_root(u: complex, q: QRoot) -> float:
    return math.exp(log_dq(u, q).real / q.n)
