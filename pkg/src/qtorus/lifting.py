"""Logarithm lift of a periodic weight sweep and the per-n representation data.

Starting from A_0 + B_0 + C_0 = theta_v, each letter updates the logs by

    L:  A_k = -B_{k-1},  B_k = 2V_k + A_{k-1},  C_k = -2V_k + 2B_{k-1} + C_{k-1}
    R:  A_k = -C_{k-1},  B_k = 2V_k + B_{k-1},  C_k = -2V_k + 2C_{k-1} + A_{k-1}

with exp(V_k) = 1 + 1/a_k. Going once around the sweep the logs come back
shifted by 2*pi*i times integers (lhat, mhat, nhat), which after division by 4k
mod n index the twist matrix.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .charvar import EdgeWeights, SweepWeights
from .errors import BranchInconsistencyError, DegenerateWeightError
from .torus_algebra import QRoot

TWO_PI_I = 2j * math.pi
ROUNDING_TOL = 1e-6


@dataclass(frozen=True)
class LogLift:
    theta_v: complex
    eta: int
    A: tuple[complex, ...]
    B: tuple[complex, ...]
    C: tuple[complex, ...]
    V: tuple[complex, ...]  # V[k-1] is V_k, k = 1..k0
    lhat: int
    mhat: int
    nhat: int
    letters: str = ""

    @property
    def k0(self) -> int:
        return len(self.V)

    @property
    def hats(self) -> tuple[int, int, int]:
        return (self.lhat, self.mhat, self.nhat)

    @property
    def parity(self) -> int:
        """(lhat - mhat + nhat)/2 mod 2."""
        return ((self.lhat - self.mhat + self.nhat) // 2) % 2

    def to_dict(self) -> dict:
        pair = lambda z: [float(z.real), float(z.imag)]  # noqa: E731
        return {
            "word": self.letters,
            "theta_v": pair(self.theta_v),
            "eta": self.eta,
            "A": [pair(z) for z in self.A],
            "B": [pair(z) for z in self.B],
            "C": [pair(z) for z in self.C],
            "V": [pair(z) for z in self.V],
            "lhat": self.lhat,
            "mhat": self.mhat,
            "nhat": self.nhat,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "LogLift":
        cx = lambda p: complex(p[0], p[1])  # noqa: E731
        return cls(
            theta_v=cx(d["theta_v"]),
            eta=int(d["eta"]),
            A=tuple(map(cx, d["A"])),
            B=tuple(map(cx, d["B"])),
            C=tuple(map(cx, d["C"])),
            V=tuple(map(cx, d["V"])),
            lhat=int(d["lhat"]),
            mhat=int(d["mhat"]),
            nhat=int(d["nhat"]),
            letters=d.get("word", ""),
        )


@dataclass(frozen=True, eq=False)
class RepParams:
    """Standard-representation parameters at one odd n.

    u, v are indexed by k = 1..k0 (stored at k-1); x, y, z by k = 0..k0.
    """

    n: int
    u: np.ndarray
    v: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    h: complex

    @property
    def p_v(self) -> complex:
        return self.h + 1 / self.h


def init_logs(w: EdgeWeights, eta: int = 0) -> tuple[complex, complex, complex, complex]:
    """Principal logs of the initial weights, A0 shifted by 2*pi*i*eta."""
    A0 = cmath.log(w.a) + TWO_PI_I * int(eta)
    B0 = cmath.log(w.b)
    C0 = cmath.log(w.c)
    return A0, B0, C0, A0 + B0 + C0


def _round_defect(x: complex, label: str) -> int:
    k = round(x.real)
    defect = max(abs(x.real - k), abs(x.imag))
    if defect > ROUNDING_TOL:
        raise BranchInconsistencyError(f"{label} = {x} is not an integer (defect {defect:.3e})")
    return int(k)


def lift(
    s: SweepWeights,
    logs0: tuple[complex, complex, complex] | None = None,
    eta: int = 0,
    shifts: Sequence[int] | None = None,
) -> LogLift:
    """Lift a periodic sweep to logarithms.

    ``logs0`` overrides the initial (A0, B0, C0); otherwise they come from
    :func:`init_logs` with ``eta``. ``shifts[k-1]`` adds 2*pi*i*shifts[k-1] to
    the principal V_k.
    """
    word = s.word
    k0 = len(word)
    if shifts is not None and len(shifts) != k0:
        raise ValueError(f"need {k0} V-shifts, got {len(shifts)}")
    if not s.is_periodic:
        raise DegenerateWeightError(f"sweep is not periodic (defect {s.periodicity_defect():.3e})")
    if logs0 is None:
        A, B, C, _ = init_logs(s.steps[0], eta)
    else:
        A, B, C = (complex(t) for t in logs0)
    As, Bs, Cs, Vs = [A], [B], [C], []
    for k, letter in enumerate(word.letters, start=1):
        a_k = s.steps[k].a
        V = cmath.log(1 + 1 / a_k)
        if shifts is not None:
            V += TWO_PI_I * int(shifts[k - 1])
        if letter == "L":
            A, B, C = -B, 2 * V + A, -2 * V + 2 * B + C
        else:
            A, B, C = -C, 2 * V + B, -2 * V + 2 * C + A
        As.append(A)
        Bs.append(B)
        Cs.append(C)
        Vs.append(V)
    lhat = _round_defect((As[0] - As[-1]) / TWO_PI_I, "lhat")
    mhat = _round_defect((Bs[0] - Bs[-1]) / TWO_PI_I, "mhat")
    nhat = _round_defect((Cs[0] - Cs[-1]) / TWO_PI_I, "nhat")
    if lhat + mhat + nhat != 0:
        raise BranchInconsistencyError(f"correction factors ({lhat}, {mhat}, {nhat}) do not sum to 0")
    return LogLift(
        theta_v=As[0] + Bs[0] + Cs[0],
        eta=int(eta),
        A=tuple(As),
        B=tuple(Bs),
        C=tuple(Cs),
        V=tuple(Vs),
        lhat=lhat,
        mhat=mhat,
        nhat=nhat,
        letters=word.letters,
    )


def rep_params(lg: LogLift, n: int, q: QRoot) -> RepParams:
    if q.n != n:
        raise ValueError(f"q is an {q.n}-th root but n={n}")
    A = np.array(lg.A)
    return RepParams(
        n=n,
        u=q.value * np.exp(-A[1:] / n),
        v=np.exp(np.array(lg.V) / n),
        x=np.exp(A / n),
        y=np.exp(np.array(lg.B) / n),
        z=np.exp(np.array(lg.C) / n),
        h=cmath.exp(lg.theta_v / n),
    )


def correction_factors(lg: LogLift, n: int, k: int = 1) -> tuple[int, int, int]:
    """(l0, m0, n0) = hats * (4k)^-1 mod n."""
    n, k = int(n), int(k)
    if math.gcd(4 * k, n) != 1:
        raise ValueError(f"4k={4 * k} is not invertible mod n={n}")
    inv = pow(4 * k, -1, n)
    return tuple((h * inv) % n for h in lg.hats)
