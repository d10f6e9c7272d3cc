"""Dilogarithm and the Bloch-Wigner function.

D(z) = Im Li2(z) + arg(1 - z) log|z| is the volume of the ideal hyperbolic
tetrahedron with shape z. It satisfies

    D(z) = D(1 - 1/z) = D(1/(1 - z)) = -D(1/z) = -D(1 - z) = -D(z/(z - 1))

so we move z to the orbit point closest to 0 in the variable -log(1 - z),
where the Bernoulli series for Li2 converges geometrically.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

N_TERMS = 40


@lru_cache(maxsize=None)
def _bernoulli_coefficients(count: int) -> tuple[float, ...]:
    # B_k / (k+1)! with B_1 = -1/2, so Li2(z) = sum_k coef_k * w^{k+1}, w = -log(1 - z)
    B = [Fraction(1)]
    for m in range(1, count):
        acc = Fraction(0)
        for j in range(m):
            acc += Fraction(math.comb(m + 1, j)) * B[j]
        B.append(-acc / (m + 1))
    return tuple(float(B[k] / math.factorial(k + 1)) for k in range(count))


def _li2_series(z: complex) -> complex:
    w = -cmath.log(1 - z)
    coefs = _bernoulli_coefficients(N_TERMS)
    w2 = w * w
    # only B_0, B_1 and even-index terms are nonzero
    total = coefs[0] * w + coefs[1] * w2
    power = w * w2
    for k in range(2, N_TERMS, 2):
        total += coefs[k] * power
        power *= w2
    return total


def _bw_near_zero(z: complex) -> float:
    return _li2_series(z).imag + cmath.phase(1 - z) * math.log(abs(z))


def bloch_wigner(z: complex) -> float:
    z = complex(z)
    if z == 0 or z == 1:
        raise ValueError(f"Bloch-Wigner function is undefined at z={z}")
    if z.imag == 0:
        return 0.0
    orbit = (
        (z, 1.0),
        (1 - 1 / z, 1.0),
        (1 / (1 - z), 1.0),
        (1 / z, -1.0),
        (1 - z, -1.0),
        (z / (z - 1), -1.0),
    )
    w, sign = min(orbit, key=lambda item: abs(cmath.log(1 - item[0])))
    return sign * _bw_near_zero(w)


def dilog(z: complex) -> complex:
    """Principal branch Li2(z), used only for cross-checks."""
    z = complex(z)
    if z == 1:
        return complex(math.pi**2 / 6)
    if abs(z) > 1:
        return -math.pi**2 / 6 - 0.5 * cmath.log(-z) ** 2 - dilog(1 / z)
    if z.real > 0.5:
        return math.pi**2 / 6 - cmath.log(z) * cmath.log(1 - z) - dilog(1 - z)
    return _li2_series(z)
