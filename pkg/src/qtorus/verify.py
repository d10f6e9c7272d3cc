"""Property suite behind ``qtorus verify``: every invariant, checked at small n."""

from __future__ import annotations

import cmath
import math
from typing import Callable

import numpy as np

from . import asymptotics, charvar, lifting, trace_engine
from .errors import DegenerateWeightError
from .intertwiners import Kind, _column_scale, build_left, build_right, build_twist, lemma_residual
from .qdilog import QdlParams, dq, qdl, qdl_table
from .torus_algebra import RepTriple, make_qroot, standard_rep

SMALL_N = (3, 5, 7, 9, 11)
EXAMPLE1 = dict(a0=-0.75 - 0.1j, branch="-", family=1)


def _rand_complex(rng, size=None, lo=0.3, hi=3.0):
    r = rng.uniform(lo, hi, size)
    return r * np.exp(1j * rng.uniform(-math.pi, math.pi, size))


def example_lift(eta: int = 0, a0=-0.75 - 0.1j, family: int = 1, shifts=None) -> lifting.LogLift:
    word = charvar.MonodromyWord("LLR")
    s = charvar.sweep(word, charvar.solve_periodic_llr(a0, "-", family))
    return lifting.lift(s, eta=eta, shifts=shifts)


def dq_product_form(u: complex, v: complex, n: int) -> complex:
    """D(u) as the plain product of QDL over one period."""
    return complex(np.prod(qdl_table(QdlParams(u, v, make_qroot(n)))))


def check_power_scalars(rng) -> tuple[bool, str]:
    worst = 0.0
    for n in SMALL_N:
        q = make_qroot(n)
        for _ in range(5):
            x, y, z = _rand_complex(rng, 3)
            t = RepTriple(x, y, z)
            g = standard_rep(t, q)
            for M, s in zip(g.as_tuple(), (x**n, y**n, z**n)):
                P = np.linalg.matrix_power(M, n)
                worst = max(worst, np.abs(P - s * np.eye(n)).max() / abs(s))
    return worst < 1e-10, f"max rel {worst:.1e}"


def check_central_xyz(rng) -> tuple[bool, str]:
    worst = 0.0
    for n in SMALL_N:
        q = make_qroot(n)
        x, y, z = _rand_complex(rng, 3)
        g = standard_rep(RepTriple(x, y, z), q)
        lhs = q.pow(-2) * g.X @ g.Y @ g.Z
        worst = max(worst, np.abs(lhs - x * y * z * np.eye(n)).max() / abs(x * y * z))
    return worst < 1e-10, f"max rel {worst:.1e}"


def check_twist_isomorphism(rng) -> tuple[bool, str]:
    worst = 0.0
    for n in SMALL_N:
        q = make_qroot(n)
        x, y, z = _rand_complex(rng, 3)
        g = standard_rep(RepTriple(x, y, z), q)
        gp = standard_rep(RepTriple(q.pow(4) * x, q.pow(-4) * y, z), q)
        T = build_twist(1, n - 1, 0, q).mat
        for A, B in zip(gp.as_tuple(), g.as_tuple()):
            worst = max(worst, np.abs(T @ A @ T.T.conj() - B).max() / np.abs(B).max())
    return worst < 1e-10, f"max rel {worst:.1e}"


def check_qdl_periodicity(rng) -> tuple[bool, str]:
    worst = 0.0
    for n in SMALL_N:
        q = make_qroot(n)
        p = QdlParams.principal(complex(_rand_complex(rng)), q)
        # direct product without reduction mod n
        for i in range(-2 * n, 2 * n + 1):
            a, b = _qdl_direct(p, i), _qdl_direct(p, i + n)
            worst = max(worst, abs(a - b) / abs(a))
        worst = max(worst, abs(qdl(p, 1) - _qdl_direct(p, 1)) / abs(qdl(p, 1)))
    return worst < 1e-12, f"max rel {worst:.1e}"


def _qdl_direct(p: QdlParams, i: int) -> complex:
    q = p.q
    if i >= 0:
        out = complex(1)
        for k in range(1, i + 1):
            out *= (1 + p.u * q.pow(-2 * k)) / p.v
        return out
    # negative index: run QDL(i) = QDL(i - 1) (1 + u q^-2i) / v backwards from QDL(0) = 1
    out = complex(1)
    for k in range(i + 1, 1):
        out /= (1 + p.u * q.pow(-2 * k)) / p.v
    return out


def check_dq_v_independence(rng) -> tuple[bool, str]:
    worst = 0.0
    for n in SMALL_N:
        u = complex(_rand_complex(rng))
        v0 = complex((1 + u**n) ** (1 / n))
        vals = [dq_product_form(u, v0 * cmath.exp(2j * math.pi * j / n), n) for j in range(n)]
        worst = max(worst, max(abs(v - vals[0]) / abs(vals[0]) for v in vals))
    return worst < 1e-12, f"max rel {worst:.1e}"


def check_dq_closed_forms(rng) -> tuple[bool, str]:
    worst = 0.0
    for n in SMALL_N:
        q = make_qroot(n)
        u = complex(_rand_complex(rng))
        v = complex((1 + u**n) ** (1 / n))
        worst = max(worst, abs(dq(u, q) - dq_product_form(u, v, n)) / abs(dq(u, q)))
    return worst < 1e-12, f"max rel {worst:.1e}"


def check_unit_det(rng) -> tuple[bool, str]:
    worst = 0.0
    for n in SMALL_N:
        q = make_qroot(n)
        for _ in range(3):
            p = QdlParams.principal(complex(_rand_complex(rng)), q)
            for lam in (build_left(p), build_right(p)):
                worst = max(worst, abs(lam.abs_det() - 1))
    return worst < 1e-9, f"max |det|-1 {worst:.1e}"


def check_twist_det(rng) -> tuple[bool, str]:
    bad = []
    for n in SMALL_N:
        q = make_qroot(n)
        for _ in range(3):
            l0, m0 = (int(t) for t in rng.integers(0, n, 2))
            T = build_twist(l0, m0, (-l0 - m0) % n, q)
            d = np.linalg.det(T.mat)
            if abs(d - 1) > 1e-12:
                bad.append((n, l0, m0, d))
    return not bad, f"failures {bad}" if bad else "det T = 1"


def check_lemmas(rng) -> tuple[bool, str]:
    worst = 0.0
    draws = 0
    for n in (3, 5, 7, 9):
        q = make_qroot(n)
        for _ in range(20):
            t = RepTriple(*_rand_complex(rng, 3))
            for kind in (Kind.LEFT, Kind.RIGHT):
                worst = max(worst, lemma_residual(kind, t, q))
                draws += 1
    return worst < 1e-9, f"{draws} draws, max rel {worst:.1e}"


def check_column_norms(rng) -> tuple[bool, str]:
    worst = 0.0
    for n in SMALL_N:
        q = make_qroot(n)
        p = QdlParams.principal(complex(_rand_complex(rng)), q)
        expect = np.abs(_column_scale(p)) * math.sqrt(n)
        for lam in (build_left(p), build_right(p)):
            worst = max(worst, float(np.max(np.abs(np.linalg.norm(lam.mat, axis=0) - expect) / expect)))
    return worst < 1e-12, f"max rel {worst:.1e}"


def check_product_conservation(rng) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(30):
        letters = "".join(rng.choice(["L", "R"], int(rng.integers(1, 8))))
        w0 = charvar.EdgeWeights(*_rand_complex(rng, 3))
        try:
            s = charvar.sweep(charvar.MonodromyWord(letters), w0)
        except DegenerateWeightError:
            continue
        p0 = w0.product
        worst = max(worst, max(abs(w.product - p0) / abs(p0) for w in s.steps))
    return worst < 1e-12, f"max rel {worst:.1e}"


def check_newton_full_residual(rng) -> tuple[bool, str]:
    word = charvar.MonodromyWord("LLR")
    exact = charvar.solve_periodic_llr(-0.75 - 0.1j, "-", 1)
    seed = charvar.EdgeWeights(exact.a, exact.b * 1.05, exact.c * 0.95)
    s = charvar.solve_periodic_newton(word, seed, exact.a)
    res = max(abs(u - v) for u, v in zip(s.steps[-1].as_tuple(), s.steps[0].as_tuple()))
    return res < 1e-10, f"residual {res:.1e}"


def family_residual(a: complex, b: complex, family: int) -> float:
    """Relative residual of the quadratic in b cut out by one closed-form LLR family."""
    if family == 1:
        lhs, rhs = a * (2 * (a + 1) * b + (2 * a + 1)) ** 2, -(8 * a * a + 11 * a + 4)
    else:
        lhs, rhs = a * (2 * (a + 1) * b + (2 * a + 3)) ** 2, -(3 * a + 4)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)


def check_family_disjoint(rng) -> tuple[bool, str]:
    closest = math.inf
    for _ in range(200):
        a0 = complex(_rand_complex(rng, lo=0.1, hi=5.0))
        for fam in (1, 2):
            for branch in "+-":
                try:
                    w = charvar.solve_periodic_llr(a0, branch, fam)
                except DegenerateWeightError:
                    continue
                if family_residual(w.a, w.b, fam) > 1e-9:
                    return False, f"family {fam} point off its own curve at a0={a0}"
                closest = min(closest, family_residual(w.a, w.b, 3 - fam))
    return closest > 1e-6, f"min cross residual {closest:.1e}"


def check_hyperbolic_shapes(rng) -> tuple[bool, str]:
    for letters in ("LR", "LLR", "LRR", "LLRR", "LRLLR"):
        shapes = charvar.tetra_shapes(charvar.solve_hyperbolic(charvar.MonodromyWord(letters)))
        signs = {np.sign(z.imag) for z in shapes}
        if any(abs(z.imag) < 1e-9 for z in shapes) or len(signs) != 1:
            return False, f"{letters}: shapes {shapes}"
    return True, "5 words, common sign"


def check_theta_constant(rng) -> tuple[bool, str]:
    worst = 0.0
    cases = [example_lift(0), example_lift(1), example_lift(0, 1 + 1j, 2)]
    for letters in ("LR", "LRLLR"):
        cases.append(lifting.lift(charvar.solve_hyperbolic(charvar.MonodromyWord(letters))))
    cases.append(example_lift(0, shifts=[1, -2, 1]))
    for lg in cases:
        for A, B, C in zip(lg.A, lg.B, lg.C):
            worst = max(worst, abs(A + B + C - lg.theta_v))
    return worst < 1e-9, f"max abs {worst:.1e}"


def check_hat_sum(rng) -> tuple[bool, str]:
    cases = [example_lift(0), example_lift(1), example_lift(0, 1 + 1j, 2)]
    cases += [example_lift(0, shifts=[int(s) for s in rng.integers(-2, 3, 3)]) for _ in range(10)]
    bad = [lg.hats for lg in cases if sum(lg.hats) != 0]
    return not bad, f"{len(cases)} lifts" + (f", bad {bad}" if bad else "")


def check_v_shift(rng) -> tuple[bool, str]:
    base = example_lift(0)
    worst = 0.0
    for k in range(3):
        shifts = [0, 0, 0]
        shifts[k] = 1
        lg = example_lift(0, shifts=shifts)
        if sum(h - b for h, b in zip(lg.hats, base.hats)) != 0:
            return False, f"shift at V_{k + 1} moved hats by a non-balanced vector"
        for n in SMALL_N:
            rp, rp0 = lifting.rep_params(lg, n, make_qroot(n)), lifting.rep_params(base, n, make_qroot(n))
            worst = max(worst, float(np.abs(rp.x * rp.y * rp.z - rp0.h).max()) / abs(rp0.h))
    return worst < 1e-9, f"max rel h drift {worst:.1e}"


def check_inverse_of_four(rng) -> tuple[bool, str]:
    bad = [n for n in range(3, 100, 2) if ((n - 1) ** 2 // 4) % n != pow(4, -1, n)]
    return not bad, "odd n in [3, 99]" + (f", bad {bad}" if bad else "")


def check_branch_independence(rng) -> tuple[bool, str]:
    word = charvar.MonodromyWord("LLR")
    base = example_lift(0)
    worst = 0.0
    for _ in range(4):
        lg = example_lift(0, shifts=[int(s) for s in rng.integers(-3, 4, 3)])
        for n in range(3, 52, 8):
            a, b = abs(trace_engine.trace_product(word, base, n)), abs(trace_engine.trace_product(word, lg, n))
            worst = max(worst, abs(a - b) / a)
    return worst < 1e-8, f"max rel {worst:.1e}"


def check_cyclic_invariance(rng) -> tuple[bool, str]:
    worst = 0.0
    for letters, s in (("LLR", None), ("LRLLR", None)):
        word = charvar.MonodromyWord(letters)
        if letters == "LLR":
            s = charvar.sweep(word, charvar.solve_periodic_llr(**EXAMPLE1))
        else:
            s = charvar.solve_hyperbolic(word)
        lg = lifting.lift(s)
        for shift in range(1, len(word)):
            rw = word.rotated(shift)
            rs = charvar.sweep(rw, s.steps[shift])
            rl = lifting.lift(rs, logs0=(lg.A[shift], lg.B[shift], lg.C[shift]))
            for n in (3, 5, 7, 11, 31):
                a, b = abs(trace_engine.trace_product(word, lg, n)), abs(trace_engine.trace_product(rw, rl, n))
                worst = max(worst, abs(a - b) / a)
    return worst < 1e-8, f"max rel {worst:.1e}"


def check_product_vs_sum(rng) -> tuple[bool, str]:
    worst = 0.0
    cases = [(charvar.MonodromyWord("LLR"), example_lift(e)) for e in (0, 1)]
    for letters in ("LR", "LRLLR"):
        w = charvar.MonodromyWord(letters)
        cases.append((w, lifting.lift(charvar.solve_hyperbolic(w))))
    for w, lg in cases:
        for n in range(3, 32, 2):
            a, b = abs(trace_engine.trace_product(w, lg, n)), abs(trace_engine.trace_sum(w, lg, n))
            worst = max(worst, abs(a - b) / a)
    return worst < 1e-9, f"max rel {worst:.1e}"


def check_global_intertwining(rng) -> tuple[bool, str]:
    worst = 0.0
    for eta in (0, 1):
        lg = example_lift(eta)
        for n in (3, 5):
            worst = max(worst, trace_engine.global_intertwining_residual(charvar.MonodromyWord("LLR"), lg, n))
    return worst < 1e-8, f"max rel {worst:.1e}"


def check_fit_shift(rng) -> tuple[bool, str]:
    ns = np.arange(51, 302, 4, dtype=float)
    ells = 0.2 + 1 / ns - 3 / ns**2
    a = asymptotics.fit_class(ns, ells).limit
    b = asymptotics.fit_class(ns, ells + 1.25).limit
    dev = max(abs(a - 0.2), abs(b - a - 1.25))
    return dev < 1e-10, f"dev {dev:.1e}"


def check_fit_degree_stability(rng) -> tuple[bool, str]:
    ts = trace_engine.series(charvar.MonodromyWord("LLR"), example_lift(0), 3, 301)
    f4, f3 = asymptotics.fit(ts, degree=4), asymptotics.fit(ts, degree=3)
    dev = max(abs(f4.limits[r] - f3.limits[r]) for r in asymptotics.CLASSES)
    return dev < 2e-3, f"max limit change {dev:.1e}"


PROPERTIES: list[tuple[str, Callable]] = [
    ("X^n, Y^n, Z^n are the scalars x^n, y^n, z^n", check_power_scalars),
    ("q^-2 XYZ = xyz I", check_central_xyz),
    ("twist conjugates (q^4 x, q^-4 y, z) to (x, y, z)", check_twist_isomorphism),
    ("QDL is n-periodic", check_qdl_periodicity),
    ("D(u) independent of the choice of v", check_dq_v_independence),
    ("closed form of D(u) matches the period product", check_dq_closed_forms),
    ("|det| = 1 for left/right intertwiners", check_unit_det),
    ("det T = 1", check_twist_det),
    ("left/right intertwining relations, n in 3..9", check_lemmas),
    ("intertwiner column norms set by the QDL column scale", check_column_norms),
    ("a*b*c conserved along sweeps", check_product_conservation),
    ("periodic Newton closes all three components", check_newton_full_residual),
    ("LLR families are disjoint", check_family_disjoint),
    ("hyperbolic shapes share one half-plane", check_hyperbolic_shapes),
    ("A_k + B_k + C_k constant", check_theta_constant),
    ("lhat + mhat + nhat = 0", check_hat_sum),
    ("V_k + 2 pi i keeps hats balanced and h fixed", check_v_shift),
    ("(n-1)^2/4 is the inverse of 4 mod n", check_inverse_of_four),
    ("|trace| independent of V_k branches, n <= 51", check_branch_independence),
    ("|trace| invariant under cyclic rotation of the word", check_cyclic_invariance),
    ("|trace_product| = |trace_sum|", check_product_vs_sum),
    ("Lambda intertwines rho_0 o Phi with rho_0", check_global_intertwining),
    ("fit commutes with constant shifts", check_fit_shift),
    ("degree 3 vs 4 limit change < 2e-3", check_fit_degree_stability),
]


def run_all(seed: int = 0) -> list[tuple[str, bool, str]]:
    results = []
    for name, fn in PROPERTIES:
        rng = np.random.default_rng([seed, len(results)])
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a crash is a failed property, not a crashed suite
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
