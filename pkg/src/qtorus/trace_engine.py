"""The intertwiner Lambda at each odd n and |Trace Lambda| by two routes.

``trace_product`` multiplies the dense n x n factors. ``trace_sum`` evaluates
the closed multi-sum over (i_1, ..., i_k0) as the trace of a cyclic chain of
kernel matrices

    K_k[i, j] = QDL(u_k, v_k | 2i) q^{i^2 (e_k + e_{k+1} + 2) - 4 e_{k+1} i j} * boundary

with e_k = -1 for L and +1 for R. The two agree up to a unit-modulus scalar.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .charvar import MonodromyWord
from .errors import BranchInconsistencyError, DegenerateWeightError
from .intertwiners import Intertwiner, build_left, build_right, build_twist, compose, conjugation_residual
from .lifting import LogLift, correction_factors, rep_params
from .qdilog import QdlParams, log_dq, qdl_table
from .torus_algebra import RepTriple, apply_left_iso, apply_right_iso, make_qroot, standard_rep

SUSPECT_TOL = 1e-7
CSV_HEADER = ("n", "mode", "re_trace", "im_trace", "abs_trace", "ell", "flags")
METHODS = ("product", "sum", "both")


def _factors(word: MonodromyWord, lg: LogLift, n: int, k: int = 1):
    if len(word) != lg.k0:
        raise ValueError(f"word {word.letters} has {len(word)} letters but the lift has {lg.k0}")
    q = make_qroot(n, k)
    rp = rep_params(lg, n, q)
    params = [QdlParams(complex(u), complex(v), q) for u, v in zip(rp.u, rp.v)]
    return q, params


def intertwiner_for(word: MonodromyWord, lg: LogLift, n: int, k: int = 1) -> Intertwiner:
    """Lambda = Lambda_1 ... Lambda_k0 T_{l0 m0 n0} at q = exp(2 pi i k / n)."""
    q, params = _factors(word, lg, n, k)
    parts = [build_left(p) if c == "L" else build_right(p) for c, p in zip(word.letters, params)]
    parts.append(build_twist(*correction_factors(lg, n, k), q))
    return compose(parts)


def trace_product(word: MonodromyWord, lg: LogLift, n: int, k: int = 1) -> complex:
    return complex(np.trace(intertwiner_for(word, lg, n, k).mat))


def trace_sum(word: MonodromyWord, lg: LogLift, n: int, k: int = 1) -> complex:
    q, params = _factors(word, lg, n, k)
    eps = word.signs
    k0 = len(word)
    e1 = eps[0]
    half2 = -e1 * lg.lhat - lg.mhat + lg.nhat
    if half2 % 2:
        raise BranchInconsistencyError(f"-e1*lhat - mhat + nhat = {half2} is odd")
    inv_k = pow(int(k), -1, n)
    first = (e1 * lg.lhat * inv_k) % n
    last = ((half2 // 2) * inv_k) % n

    i = np.arange(1, n + 1, dtype=np.int64)
    log_scale = 0.0
    P = None
    for idx in range(k0):
        p = params[idx]
        e_next = eps[(idx + 1) % k0]
        diag_exp = i * i * (eps[idx] + e_next + 2)
        if idx == 0:
            diag_exp = diag_exp + first * i
        if idx == k0 - 1:
            diag_exp = diag_exp + last * i
        d = qdl_table(p)[(2 * i) % n] * q.pow_array(diag_exp)
        K = d[:, None] * q.pow_array(-4 * e_next * np.outer(i, i))
        # rescale as we go; the product can overflow for large n
        s = np.abs(K).max()
        log_scale += math.log(s)
        P = K / s if P is None else P @ (K / s)
        log_scale -= 0.5 * math.log(n) + log_dq(p.u, q).real / n
    return complex(np.trace(P)) * math.exp(log_scale)


@dataclass(frozen=True)
class TraceRow:
    n: int
    trace: complex
    abs_trace: float
    ell: float
    flags: tuple[str, ...] = ()

    @property
    def mode(self) -> int:
        return self.n % 4

    @property
    def ok(self) -> bool:
        return "degenerate" not in self.flags and math.isfinite(self.ell)


@dataclass(frozen=True)
class TraceSeries:
    word: str
    rows: tuple[TraceRow, ...]
    hats: tuple[int, int, int] = (0, 0, 0)
    parity: int = 0
    method: str = "product"

    def good_rows(self) -> list[TraceRow]:
        return [r for r in self.rows if r.ok]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(
                [r.n, r.mode, _g(r.trace.real), _g(r.trace.imag), _g(r.abs_trace), _g(r.ell), ";".join(r.flags)]
            )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, word: str = "", hats=(0, 0, 0), parity: int = 0) -> "TraceSeries":
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            flags = tuple(f for f in rec["flags"].split(";") if f)
            rows.append(
                TraceRow(
                    n=int(rec["n"]),
                    trace=complex(float(rec["re_trace"]), float(rec["im_trace"])),
                    abs_trace=float(rec["abs_trace"]),
                    ell=float(rec["ell"]),
                    flags=flags,
                )
            )
        return cls(word, tuple(rows), tuple(hats), parity)


def _g(x: float) -> str:
    return "%.17g" % x


def compute_row(word: MonodromyWord, lg: LogLift, n: int, method: str = "product", k: int = 1) -> TraceRow:
    """One row; degeneracies become flags instead of exceptions."""
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    flags = []
    try:
        if method == "sum":
            tr = trace_sum(word, lg, n, k)
        else:
            tr = trace_product(word, lg, n, k)
            if method == "both":
                ts = trace_sum(word, lg, n, k)
                if abs(abs(ts) - abs(tr)) > SUSPECT_TOL * max(abs(tr), 1e-300):
                    flags.append("suspect")
    except DegenerateWeightError:
        return TraceRow(n, complex(math.nan, math.nan), math.nan, math.nan, ("degenerate",))
    a = abs(tr)
    if not (a > 0 and math.isfinite(a)):
        flags.append("degenerate")
        return TraceRow(n, tr, a, math.nan, tuple(flags))
    return TraceRow(n, tr, a, math.log(a) / n, tuple(flags))


def _row_task(args):
    return compute_row(*args)


def default_workers() -> int:
    env = os.environ.get("QTORUS_WORKERS")
    return max(1, int(env)) if env else 1


def odd_range(n_min: int, n_max: int) -> list[int]:
    if n_min > n_max:
        raise ValueError(f"n_min={n_min} exceeds n_max={n_max}")
    start = max(3, n_min + (1 - n_min % 2))
    return list(range(start, n_max + 1, 2))


def series(
    word: MonodromyWord,
    lg: LogLift,
    n_min: int = 3,
    n_max: int = 301,
    method: str = "product",
    workers: int | None = None,
    k: int = 1,
    ns: Iterable[int] | None = None,
) -> TraceSeries:
    """Rows for every odd n in [n_min, n_max] (n coprime to k), in ascending order."""
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    ns = sorted(ns) if ns is not None else odd_range(n_min, n_max)
    ns = [n for n in ns if math.gcd(n, 4 * k) == 1]
    workers = default_workers() if workers is None else workers
    tasks = [(word, lg, n, method, k) for n in ns]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            # biggest n first for load balance; map keeps results aligned with tasks
            order = sorted(range(len(tasks)), key=lambda t: -ns[t])
            done = dict(zip(order, ex.map(_row_task, [tasks[t] for t in order])))
        rows = [done[t] for t in range(len(tasks))]
    else:
        rows = [_row_task(t) for t in tasks]
    return TraceSeries(word.letters, tuple(rows), lg.hats, lg.parity, method)


def global_intertwining_residual(word: MonodromyWord, lg: LogLift, n: int, k: int = 1) -> float:
    """Residual of rho_0 o Phi(W) = Lambda rho_0(W) Lambda^-1, Phi the word's coordinate change."""
    q = make_qroot(n, k)
    rp = rep_params(lg, n, q)
    rho0 = standard_rep(RepTriple(complex(rp.x[0]), complex(rp.y[0]), complex(rp.z[0])), q)
    g = rho0
    for letter in word.letters:
        g = apply_left_iso(g, q) if letter == "L" else apply_right_iso(g, q)
    return conjugation_residual(intertwiner_for(word, lg, n, k).mat, g, rho0)
