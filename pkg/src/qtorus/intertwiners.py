"""Elementary intertwiner matrices L_uv, R_uv, T_lmn and their composition.

Entries use the 1-based basis w_1..w_n of the standard representations:

    L_uv[i, j] = QDL(u, v | 2j) / (|D(u)|^{1/n} sqrt(n)) * q^{-i^2 + j^2 + 4ij + i - j}
    R_uv[i, j] = QDL(u, v | 2j) / (|D(u)|^{1/n} sqrt(n)) * q^{ i^2 + 3j^2 - 4ij + i - j}
    T[i, j]    = q^{2j(n0 - m0)} delta_{i, j + l0}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Sequence

import numpy as np

from .qdilog import QdlParams, dq_abs_nth_root, qdl_table
from .torus_algebra import GeneratorMatrices, QRoot, RepTriple, apply_left_iso, apply_right_iso, standard_rep


class Kind(str, Enum):
    LEFT = "Left"
    RIGHT = "Right"
    TWIST = "Twist"
    COMPOSITE = "Composite"


@dataclass(frozen=True, eq=False)
class Intertwiner:
    mat: np.ndarray
    kind: Kind

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def log_abs_det(self) -> float:
        return float(np.linalg.slogdet(self.mat)[1])

    def abs_det(self) -> float:
        return float(np.exp(self.log_abs_det()))

    def to_json(self) -> str:
        """Row-major dump, each entry as an [re, im] pair."""
        rows = [[[float(z.real), float(z.imag)] for z in row] for row in self.mat]
        return json.dumps({"kind": self.kind.value, "n": self.n, "mat": rows})


def _exponent_grid(n: int):
    idx = np.arange(1, n + 1, dtype=np.int64)
    return np.meshgrid(idx, idx, indexing="ij")


def _column_scale(p: QdlParams) -> np.ndarray:
    n = p.q.n
    table = qdl_table(p)
    j = np.arange(1, n + 1)
    norm = dq_abs_nth_root(p.u, p.q) * np.sqrt(n)
    return table[(2 * j) % n] / norm


def build_left(p: QdlParams) -> Intertwiner:
    I, J = _exponent_grid(p.q.n)
    phases = p.q.pow_array(-I * I + J * J + 4 * I * J + I - J)
    return Intertwiner(phases * _column_scale(p)[None, :], Kind.LEFT)


def build_right(p: QdlParams) -> Intertwiner:
    I, J = _exponent_grid(p.q.n)
    phases = p.q.pow_array(I * I + 3 * J * J - 4 * I * J + I - J)
    return Intertwiner(phases * _column_scale(p)[None, :], Kind.RIGHT)


def build_twist(l0: int, m0: int, n0: int, q: QRoot) -> Intertwiner:
    n = q.n
    if (l0 + m0 + n0) % n != 0:
        raise ValueError(f"twist needs l0 + m0 + n0 = 0 mod n, got ({l0}, {m0}, {n0}) with n={n}")
    j = np.arange(1, n + 1, dtype=np.int64)
    rows = (j + l0 - 1) % n
    mat = np.zeros((n, n), dtype=complex)
    mat[rows, j - 1] = q.pow_array(2 * j * (n0 - m0))
    return Intertwiner(mat, Kind.TWIST)


def compose(parts: Sequence[Intertwiner]) -> Intertwiner:
    """Matrix product parts[0] @ parts[1] @ ... in the listed order."""
    if not parts:
        raise ValueError("compose needs at least one intertwiner")
    n = parts[0].n
    if any(p.n != n for p in parts):
        raise ValueError(f"size mismatch in compose: {[p.n for p in parts]}")
    mat = reduce(np.matmul, (p.mat for p in parts))
    return Intertwiner(mat, Kind.COMPOSITE)


def lemma_target(kind: Kind, t: RepTriple, q: QRoot, v: complex | None = None) -> tuple[QdlParams, RepTriple]:
    """Parameters (u, v) and the target triple for an elementary intertwiner out of rho_t.

    Left:  u = q y, x' = 1/y, y' = v^2 x, z' = v^-2 y^2 z
    Right: u = q z, x' = 1/z, y' = v^2 y, z' = v^-2 z^2 x
    with v^n = 1 + u^n (principal root unless ``v`` is given).
    """
    flipped = t.y if kind == Kind.LEFT else t.z
    u = q.value * flipped
    p = QdlParams(u, v, q) if v is not None else QdlParams.principal(u, q)
    v = p.v
    if kind == Kind.LEFT:
        target = RepTriple(1 / t.y, v**2 * t.x, t.y**2 * t.z / v**2)
    elif kind == Kind.RIGHT:
        target = RepTriple(1 / t.z, v**2 * t.y, t.z**2 * t.x / v**2)
    else:
        raise ValueError(f"no lemma for kind {kind}")
    return p, target


def conjugation_residual(lam: np.ndarray, source: GeneratorMatrices, target: GeneratorMatrices) -> float:
    """max over generators of |source - lam target lam^-1| / |source|."""
    lam_inv = np.linalg.inv(lam)
    worst = 0.0
    for S, T in zip(source.as_tuple(), target.as_tuple()):
        worst = max(worst, float(np.abs(S - lam @ T @ lam_inv).max() / max(np.abs(S).max(), 1e-300)))
    return worst


def lemma_residual(kind: Kind, t: RepTriple, q: QRoot, v: complex | None = None) -> float:
    """Residual of rho_t o Iso(W) = Lambda rho_t'(W) Lambda^-1 on X, Y, Z."""
    p, target = lemma_target(kind, t, q, v)
    lam = build_left(p) if kind == Kind.LEFT else build_right(p)
    iso = apply_left_iso if kind == Kind.LEFT else apply_right_iso
    source = iso(standard_rep(t, q), q)
    return conjugation_residual(lam.mat, source, standard_rep(target, q))
