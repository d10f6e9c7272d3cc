"""Roots of unity, the once-punctured torus quantum torus and its standard representations.

The abstract algebra is generated by X, Y, Z with

    XY = q^4 YX,    YZ = q^4 ZY,    ZX = q^4 XZ

and, for q a primitive n-th root of unity with n odd, its irreducible
representations are the n-dimensional "standard" ones built here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateWeightError

# relative tolerance for y^n = -1 style singularity tests
SINGULAR_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QRoot:
    """The primitive n-th root of unity q = exp(2*pi*i*k/n), n odd.

    All exponents are reduced mod n as integers before lookup, so
    ``q.pow(m)`` is exact in the exponent for arbitrarily large ``m``.
    """

    n: int
    k: int = 1
    powers: np.ndarray = field(repr=False, default=None)

    @property
    def value(self) -> complex:
        return complex(self.powers[1])

    def pow(self, m: int) -> complex:
        return complex(self.powers[int(m) % self.n])

    def pow_array(self, exps) -> np.ndarray:
        """Elementwise q**exps for an integer array."""
        return self.powers[np.mod(np.asarray(exps, dtype=np.int64), self.n)]


def make_qroot(n: int, k: int = 1) -> QRoot:
    if int(n) != n or n < 3 or n % 2 == 0:
        raise ValueError(f"n must be an odd integer >= 3, got {n}")
    if math.gcd(int(k), int(n)) != 1:
        raise ValueError(f"k={k} is not coprime to n={n} (gcd={math.gcd(int(k), int(n))})")
    n, k = int(n), int(k)
    m = np.arange(n)
    powers = np.exp(2j * np.pi * ((k * m) % n) / n)
    # the table is built from reduced exponents; primitivity is the gcd condition
    if np.any(np.abs(powers[1:] - 1.0) < 1e-12):
        raise ValueError(f"q is not primitive for n={n}, k={k}")
    return QRoot(n=n, k=k, powers=powers)


@dataclass(frozen=True)
class RepTriple:
    x: complex
    y: complex
    z: complex

    def __post_init__(self):
        if self.x == 0 or self.y == 0 or self.z == 0:
            raise DegenerateWeightError(f"standard representation needs x*y*z != 0, got {self}")

    @property
    def h(self) -> complex:
        return self.x * self.y * self.z


@dataclass(frozen=True, eq=False)
class GeneratorMatrices:
    """Images of X, Y, Z under some representation, as dense n x n arrays."""

    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def as_tuple(self):
        return (self.X, self.Y, self.Z)

    def commutation_defect(self, q: QRoot) -> float:
        """Largest relative violation among the three q^4-commutation relations."""
        q4 = q.pow(4)
        X, Y, Z = self.X, self.Y, self.Z
        worst = 0.0
        for A, B in ((X, Y), (Y, Z), (Z, X)):
            lhs = A @ B
            rhs = q4 * (B @ A)
            scale = max(np.abs(lhs).max(), np.abs(rhs).max(), 1e-300)
            worst = max(worst, float(np.abs(lhs - rhs).max() / scale))
        return worst


def standard_rep(t: RepTriple, q: QRoot) -> GeneratorMatrices:
    """The standard representation rho_{xyz} on the basis w_1, ..., w_n.

    X w_i = x q^{4i} w_i,  Y w_i = y q^{-2i} w_{i+1},  Z w_i = z q^{-2i} w_{i-1},
    indices mod n. Basis vector w_i is stored in slot i-1.
    """
    n = q.n
    i = np.arange(1, n + 1)
    cols = i - 1
    X = np.diag(t.x * q.pow_array(4 * i)).astype(complex)
    Y = np.zeros((n, n), dtype=complex)
    Z = np.zeros((n, n), dtype=complex)
    Y[i % n, cols] = t.y * q.pow_array(-2 * i)
    Z[(i - 2) % n, cols] = t.z * q.pow_array(-2 * i)
    return GeneratorMatrices(X, Y, Z)


def _check_invertible_factor(M: np.ndarray, label: str) -> None:
    # n-th power of the shifted generator is scalar; test that scalar against -1
    n = M.shape[0]
    scalar = np.linalg.matrix_power(M, n)[0, 0]
    if abs(scalar + 1.0) < SINGULAR_TOL * max(1.0, abs(scalar)):
        raise DegenerateWeightError(f"{label}^n = -1: the factors (1 + q^(1,3) {label}^(-1)) are singular")


def apply_left_iso(g: GeneratorMatrices, q: QRoot) -> GeneratorMatrices:
    """Evaluate (rho o L)(X, Y, Z) for the left isomorphism L.

    L(X) = Y^-1,  L(Y) = (1 + qY)(1 + q^3 Y) X,
    L(Z) = (1 + qY^-1)^-1 (1 + q^3 Y^-1)^-1 Z.
    """
    return _apply_iso(g.Y, g.X, g.Z, q, "Y")


def apply_right_iso(g: GeneratorMatrices, q: QRoot) -> GeneratorMatrices:
    """Evaluate (rho o R)(X, Y, Z) for the right isomorphism R.

    R(X) = Z^-1,  R(Y) = (1 + qZ)(1 + q^3 Z) Y,
    R(Z) = (1 + qZ^-1)^-1 (1 + q^3 Z^-1)^-1 X.
    """
    return _apply_iso(g.Z, g.Y, g.X, q, "Z")


def _apply_iso(W, second, third, q: QRoot, label: str) -> GeneratorMatrices:
    # shared shape of L and R: W is the flipped generator
    _check_invertible_factor(W, label)
    n = W.shape[0]
    eye = np.eye(n, dtype=complex)
    q1, q3 = q.pow(1), q.pow(3)
    W_inv = np.linalg.inv(W)
    new_X = W_inv
    new_Y = (eye + q1 * W) @ (eye + q3 * W) @ second
    new_Z = np.linalg.solve(eye + q1 * W_inv, np.linalg.solve(eye + q3 * W_inv, third))
    return GeneratorMatrices(new_X, new_Y, new_Z)


def nth_power_scalars(g: GeneratorMatrices) -> tuple[complex, complex, complex]:
    """The scalars X^n, Y^n, Z^n (assumed central), read off the (0, 0) entry."""
    n = g.n
    return tuple(complex(np.linalg.matrix_power(M, n)[0, 0]) for M in g.as_tuple())
