"""Per-mode polynomial-in-1/n fits of ell(n) = log|Trace|/n and the volume comparison."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .trace_engine import TraceSeries

MIN_POINTS = 10
CLASSES = (1, 3)


@dataclass(frozen=True)
class ClassFit:
    residue: int
    coefficients: tuple[float, ...]  # a, b, c, ... of a + b/n + c/n^2 + ...
    rms: float
    count: int
    ns: tuple[int, ...]

    @property
    def limit(self) -> float:
        return self.coefficients[0]

    def evaluate(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        return _design(n, len(self.coefficients) - 1) @ np.array(self.coefficients)

    def to_dict(self) -> dict:
        return {
            "residue": self.residue,
            "coefficients": list(self.coefficients),
            "limit": self.limit,
            "rms": self.rms,
            "count": self.count,
        }


@dataclass(frozen=True)
class FitResult:
    classes: dict[int, ClassFit]
    n_cut: int
    degree: int
    parity_flag: int = 0

    @property
    def limits(self) -> dict[int, float]:
        return {r: c.limit for r, c in self.classes.items()}

    def to_dict(self) -> dict:
        return {
            "n_cut": self.n_cut,
            "degree": self.degree,
            "parity_flag": self.parity_flag,
            "classes": {str(r): c.to_dict() for r, c in self.classes.items()},
        }

    def curves_csv(self) -> str:
        """Fitted ell at each data n, for external plotting."""
        buf = io.StringIO()
        buf.write("n,mode,ell_fit\n")
        rows = sorted((n, r, float(c.evaluate([n])[0])) for r, c in self.classes.items() for n in c.ns)
        for n, r, v in rows:
            buf.write(f"{n},{r},{v:.17g}\n")
        return buf.getvalue()


def _design(n: np.ndarray, degree: int) -> np.ndarray:
    return np.column_stack([n ** (-p) for p in range(degree + 1)])


def fit_class(ns, ells, degree: int = 4, residue: int = 0) -> ClassFit:
    ns = np.asarray(ns, dtype=float)
    ells = np.asarray(ells, dtype=float)
    if len(ns) < max(MIN_POINTS, degree + 1):
        raise ValueError(f"class n = {residue} mod 4 has {len(ns)} usable points, need {max(MIN_POINTS, degree + 1)}")
    X = _design(ns, degree)
    Q, R = np.linalg.qr(X)
    coef = np.linalg.solve(R, Q.T @ ells)
    rms = float(np.sqrt(np.mean((X @ coef - ells) ** 2)))
    return ClassFit(residue, tuple(float(c) for c in coef), rms, len(ns), tuple(int(n) for n in ns))


def fit(s: TraceSeries, n_cut: int = 51, degree: int = 4) -> FitResult:
    """Least-squares fit of each mode (n mod 4 in {1, 3}) over rows with n >= n_cut."""
    classes = {}
    for r in CLASSES:
        rows = [row for row in s.good_rows() if row.n % 4 == r and row.n >= n_cut]
        classes[r] = fit_class([row.n for row in rows], [row.ell for row in rows], degree, r)
    return FitResult(classes, n_cut, degree, s.parity)


def compare_volume(f: FitResult, vol: float, tol: float = 5e-4) -> dict:
    target = vol / (4 * math.pi)
    report = {"volume": vol, "volume_over_4pi": target, "tolerance": tol, "parity_flag": f.parity_flag}
    per_class = {}
    for r, c in f.classes.items():
        dev = abs(c.limit - target)
        per_class[str(r)] = {"limit": c.limit, "abs_dev": dev, "rel_dev": dev / abs(target)}
    report["classes"] = per_class
    if f.parity_flag % 2:
        report["verdict"] = "no prediction"
    else:
        report["verdict"] = "pass" if all(v["abs_dev"] < tol for v in per_class.values()) else "fail"
    return report


def report_json(f: FitResult, comparison: dict | None = None) -> str:
    d = f.to_dict()
    if comparison is not None:
        d["comparison"] = comparison
    return json.dumps(d, indent=2)
