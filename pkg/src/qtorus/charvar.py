"""Edge-weight dynamics along the layered sweep of a punctured-torus bundle.

A monodromy phi = phi_1 o ... o phi_k0 o J^eps, phi_k in {L, R}, acts on the
edge weights (a, b, c) of the triangulation by one diagonal exchange per letter:

    L:  a' = 1/b,  b' = (1 + b)^2 a,  c' = (1 + b)^-2 b^2 c
    R:  a' = 1/c,  b' = (1 + c)^2 b,  c' = (1 + c)^-2 c^2 a

Periodic weight sequences are phi-invariant characters. The product a*b*c is
conserved by both moves; a*b*c = 1 is the parabolic (complete) slice holding
the hyperbolic solution.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dilog import bloch_wigner
from .errors import DegenerateWeightError, NotPseudoAnosovError, SolverError

PERIODIC_TOL = 1e-9
NEWTON_TOL = 1e-11
MAX_NEWTON_ITER = 100

# 4*pi*0.212213 is the LLR volume; this seed is the known hyperbolic point
KNOWN_HYPERBOLIC_SEEDS = {
    "LLR": (complex(-0.25, -math.sqrt(7) / 4), complex(-1.5, math.sqrt(7) / 2)),
}


@dataclass(frozen=True)
class MonodromyWord:
    letters: str
    eps: int = 0

    def __post_init__(self):
        letters = self.letters.upper()
        object.__setattr__(self, "letters", letters)
        if not letters or set(letters) - {"L", "R"}:
            raise ValueError(f"monodromy word must be a nonempty string over {{L, R}}, got {self.letters!r}")
        if self.eps not in (0, 1):
            raise ValueError(f"eps must be 0 or 1, got {self.eps}")

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_pseudo_anosov(self) -> bool:
        return "L" in self.letters and "R" in self.letters

    def require_pseudo_anosov(self) -> None:
        if not self.is_pseudo_anosov:
            raise NotPseudoAnosovError(f"word {self.letters} is not pseudo-Anosov (needs both L and R)")

    @property
    def signs(self) -> tuple[int, ...]:
        """epsilon_k = -1 for L, +1 for R."""
        return tuple(-1 if c == "L" else 1 for c in self.letters)

    def rotated(self, shift: int = 1) -> "MonodromyWord":
        s = shift % len(self.letters)
        return MonodromyWord(self.letters[s:] + self.letters[:s], self.eps)


@dataclass(frozen=True)
class EdgeWeights:
    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.a == 0 or self.b == 0 or self.c == 0:
            raise DegenerateWeightError(f"edge weights must be nonzero, got {self}")

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (self.a, self.b, self.c)

    @property
    def product(self) -> complex:
        return self.a * self.b * self.c

    def distance(self, other: "EdgeWeights") -> float:
        """Max componentwise relative distance."""
        return max(abs(s - o) / max(1.0, abs(o)) for s, o in zip(self.as_tuple(), other.as_tuple()))


@dataclass(frozen=True)
class SweepWeights:
    word: MonodromyWord
    steps: tuple[EdgeWeights, ...]

    def periodicity_defect(self) -> float:
        return self.steps[-1].distance(self.steps[0])

    @property
    def is_periodic(self) -> bool:
        return self.periodicity_defect() < PERIODIC_TOL

    def to_dict(self) -> dict:
        return {
            "word": self.word.letters,
            "eps": self.word.eps,
            "steps": [[_pair(z) for z in w.as_tuple()] for w in self.steps],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepWeights":
        word = MonodromyWord(d["word"], d.get("eps", 0))
        steps = tuple(EdgeWeights(*(complex(*p) for p in s)) for s in d["steps"])
        return cls(word, steps)


@dataclass(frozen=True)
class GeomResult:
    shapes: tuple[complex, ...]
    volume: float

    def to_dict(self) -> dict:
        return {"shapes": [_pair(z) for z in self.shapes], "volume": self.volume}


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def step(w: EdgeWeights, letter: str) -> EdgeWeights:
    a, b, c = w.as_tuple()
    flipped = b if letter == "L" else c
    if flipped == -1 or abs(1 + flipped) < 1e-14:
        raise DegenerateWeightError(f"diagonal exchange is degenerate: flipped weight {flipped} = -1")
    s = (1 + flipped) ** 2
    if letter == "L":
        return EdgeWeights(1 / b, s * a, b * b * c / s)
    if letter == "R":
        return EdgeWeights(1 / c, s * b, c * c * a / s)
    raise ValueError(f"letter must be 'L' or 'R', got {letter!r}")


def sweep(word: MonodromyWord, initial: EdgeWeights) -> SweepWeights:
    steps = [initial]
    for k, letter in enumerate(word.letters, start=1):
        try:
            steps.append(step(steps[-1], letter))
        except DegenerateWeightError as exc:
            raise DegenerateWeightError(f"sweep step {k} ({letter}): {exc}") from exc
    return SweepWeights(word, tuple(steps))


def solve_periodic_llr(a0: complex, branch: str = "-", family: int = 1) -> EdgeWeights:
    """Closed-form periodic initial weights for phi = LLR on the chosen curve.

    Uses the principal complex square root for both radicals.
    """
    a0 = complex(a0)
    if a0 == 0 or a0 == -1:
        raise DegenerateWeightError(f"a0={a0} is excluded")
    if branch not in ("+", "-"):
        raise ValueError(f"branch must be '+' or '-', got {branch!r}")
    sign = 1 if branch == "+" else -1
    denom = 2 * (a0 + 1)
    if family == 1:
        b0 = -(2 * a0 + 1) / denom + sign * 1j * cmath.sqrt(8 * a0**2 + 11 * a0 + 4) / (denom * cmath.sqrt(a0))
    elif family == 2:
        b0 = -(2 * a0 + 3) / denom + sign * 1j * cmath.sqrt(3 * a0 + 4) / (denom * cmath.sqrt(a0))
    else:
        raise ValueError(f"family must be 1 or 2, got {family}")
    if b0 == 0 or b0 == -1:
        raise DegenerateWeightError(f"a0={a0} gives excluded b0={b0}")
    c0 = (1 + a0 * (1 + b0) ** 2) ** 2 / (a0**3 * b0**2 * (1 + b0) ** 2)
    w = EdgeWeights(a0, b0, c0)
    sweep(MonodromyWord("LLR"), w)  # raises on intermediate degeneracy
    return w


def _holomorphic_jacobian(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray) -> np.ndarray:
    # central differences along the real axis give the complex derivative of a holomorphic map
    m = len(x)
    cols = []
    for j in range(m):
        h = 1e-7 * (1 + abs(x[j]))
        e = np.zeros(m, dtype=complex)
        e[j] = h
        cols.append((f(x + e) - f(x - e)) / (2 * h))
    return np.column_stack(cols)


def _newton(f, x0: np.ndarray, max_iter: int = MAX_NEWTON_ITER, tol: float = NEWTON_TOL) -> np.ndarray:
    """Damped Newton for a square holomorphic system; returns the root."""
    x = np.asarray(x0, dtype=complex)
    r = f(x)
    for _ in range(max_iter):
        res = float(np.abs(r).max())
        if res < tol:
            return x
        J = _holomorphic_jacobian(f, x)
        if not np.all(np.isfinite(J)) or abs(np.linalg.det(J)) < 1e-300:
            raise SolverError("singular Jacobian in Newton iteration")
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular Jacobian in Newton iteration: {exc}") from exc
        t = 1.0
        while True:
            trial = x + t * dx
            try:
                r_trial = f(trial)
            except DegenerateWeightError:
                r_trial = None
            if r_trial is not None and np.all(np.isfinite(r_trial)) and np.abs(r_trial).max() < res:
                break
            t *= 0.5
            if t < 1e-6:
                # no decrease found: take the full step so Newton can leave flat regions
                trial = x + dx
                r_trial = f(trial)
                break
        x, r = trial, r_trial
        if not np.all(np.isfinite(r)):
            raise SolverError("Newton iterate left the domain")
    if float(np.abs(r).max()) < tol:
        return x
    raise SolverError(f"Newton did not converge in {max_iter} iterations (residual {np.abs(r).max():.3e})")


def solve_periodic_newton(word: MonodromyWord, seed: EdgeWeights, fix_a0: complex) -> SweepWeights:
    """Periodic weights with a0 frozen; Newton in (b0, c0) on the (b, c) closing residual."""
    word.require_pseudo_anosov()
    a0 = complex(fix_a0)

    def residual(x):
        s = sweep(word, EdgeWeights(a0, x[0], x[1]))
        last = s.steps[-1]
        return np.array([last.b - x[0], last.c - x[1]])

    try:
        x = _newton(residual, np.array([seed.b, seed.c]))
    except DegenerateWeightError as exc:
        raise SolverError(f"Newton hit a degenerate sweep: {exc}") from exc
    s = sweep(word, EdgeWeights(a0, x[0], x[1]))
    full = max(abs(u - v) for u, v in zip(s.steps[-1].as_tuple(), s.steps[0].as_tuple()))
    if full >= NEWTON_TOL * max(1.0, max(abs(z) for z in s.steps[0].as_tuple())):
        raise SolverError(f"a-component of periodicity not closed (defect {full:.3e})")
    return s


def tetra_shapes(s: SweepWeights) -> tuple[complex, ...]:
    """Shape of the tetrahedron layered at each step: minus the flipped weight."""
    shapes = []
    for w, letter in zip(s.steps[:-1], s.word.letters):
        shapes.append(-(w.b if letter == "L" else w.c))
    return tuple(shapes)


def _canonical_key(s: SweepWeights):
    w = s.steps[0]
    return tuple(round(v, 8) for z in w.as_tuple() for v in (z.real, z.imag))


def _closing_residual(word: MonodromyWord):
    # multiple shooting on a*b*c = 1 in log coordinates: unknowns log a_k, log b_k
    k0 = len(word)
    letters = word.letters

    def residual(x):
        with np.errstate(all="ignore"):
            a, b = np.exp(x[:k0]), np.exp(x[k0:])
            out = np.empty(2 * k0, dtype=complex)
            for k in range(k0):
                nxt = step(EdgeWeights(a[k], b[k], 1 / (a[k] * b[k])), letters[k])
                j = (k + 1) % k0
                out[k] = np.log(nxt.a / a[j])
                out[k0 + j] = np.log(nxt.b / b[j])
        return out

    return residual


def _regular_seed(word: MonodromyWord) -> np.ndarray:
    """Layer weights (a_k..., b_k...) whose flipped edge gives a regular ideal tetrahedron."""
    w = cmath.exp(2j * math.pi / 3)
    # L flips b, R flips c = 1/(a b); either way the flipped weight sits at w
    a = np.array([w.conjugate() if c == "L" else 1.0 for c in word.letters], dtype=complex)
    b = np.array([w if c == "L" else w.conjugate() for c in word.letters], dtype=complex)
    return np.concatenate([a, b])


def solve_hyperbolic(word: MonodromyWord, seeds: int = 64, rng_seed: int = 0) -> SweepWeights:
    """The periodic weights of the complete hyperbolic structure.

    Solves the closing equations on the slice a*b*c = 1 by multiple shooting
    (all layers as unknowns), then polishes (a0, b0) by single shooting. A
    solution is geometric when all tetrahedron shapes lie strictly in the
    lower half-plane (the orientation of the known LLR solution).
    Starts: the regular-tetrahedra seed and known seeds; only if none of them
    lands on a geometric solution, ``seeds`` random starts alternating between
    perturbations of the regular seed and points of the annulus 0.3 < |w| < 3.
    """
    word.require_pseudo_anosov()
    k0 = len(word)
    multi = _closing_residual(word)

    def single(x):
        a, b = x
        s = sweep(word, EdgeWeights(a, b, 1 / (a * b)))
        last = s.steps[-1]
        return np.array([last.a - a, last.b - b])

    def structured_starts():
        yield np.log(_regular_seed(word))
        if word.letters in KNOWN_HYPERBOLIC_SEEDS:
            a0, b0 = KNOWN_HYPERBOLIC_SEEDS[word.letters]
            s = sweep(word, EdgeWeights(a0, b0, 1 / (a0 * b0)))
            yield np.log([w.a for w in s.steps[:-1]] + [w.b for w in s.steps[:-1]])

    def random_starts():
        rng = np.random.default_rng(rng_seed)
        base = np.log(_regular_seed(word))
        for i in range(seeds):
            if i % 2 == 0:
                yield base + rng.normal(0, 0.3, 2 * k0) + 1j * rng.normal(0, 0.3, 2 * k0)
            else:
                yield np.log(rng.uniform(0.3, 3.0, 2 * k0)) + 1j * rng.uniform(-math.pi, math.pi, 2 * k0)

    def attempt(x0):
        try:
            x = np.exp(_newton(multi, x0))
            a, b = _newton(single, x[[0, k0]])
            s = sweep(word, EdgeWeights(a, b, 1 / (a * b)))
        except (SolverError, DegenerateWeightError, ZeroDivisionError, FloatingPointError):
            return None
        if not all(z.imag < -1e-9 for z in tetra_shapes(s)):
            return None
        return (float(np.abs(single(np.array([a, b]))).max()), _canonical_key(s), s)

    for group in (structured_starts(), random_starts()):
        found = [r for r in map(attempt, group) if r is not None]
        if found:
            found.sort(key=lambda item: (item[0] > 1e-12, item[1], item[0]))
            return found[0][2]
    raise SolverError(f"no geometric solution for {word.letters} among {seeds} random starts")


def geometry(word: MonodromyWord, seeds: int = 64, rng_seed: int = 0) -> GeomResult:
    s = solve_hyperbolic(word, seeds=seeds, rng_seed=rng_seed)
    shapes = tetra_shapes(s)
    return GeomResult(shapes, abs(sum(bloch_wigner(z) for z in shapes)))


def volume(word: MonodromyWord, seeds: int = 64, rng_seed: int = 0) -> float:
    """Hyperbolic volume of the mapping torus, |sum of Bloch-Wigner over the shapes|."""
    return geometry(word, seeds=seeds, rng_seed=rng_seed).volume


def shapes_volume(shapes: Sequence[complex]) -> float:
    return abs(sum(bloch_wigner(z) for z in shapes))


def sweep_to_json(s: SweepWeights) -> str:
    return json.dumps(s.to_dict(), indent=2)
