"""Command-line front end: ``qtorus solve|lift|trace|fit|volume|run|verify``.

Exit codes: 0 success, 2 degenerate geometry (including words that are not
pseudo-Anosov), 3 solver or branch failure.
"""

from __future__ import annotations

import functools
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import asymptotics, charvar, lifting, trace_engine
from .errors import BranchInconsistencyError, DegenerateWeightError, SolverError

EXIT_DEGENERATE = 2
EXIT_SOLVER = 3


def parse_complex(text: str) -> complex:
    """Parse "a+bi", "a - bi", "-0.75-0.1i", "2i", "3"."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    if s[-1] in "ij":
        body = s[:-1]
        # split at the last sign that is not an exponent sign or leading
        for pos in range(len(body) - 1, 0, -1):
            if body[pos] in "+-" and body[pos - 1] not in "eE":
                re_part, im_part = body[:pos], body[pos:]
                break
        else:
            re_part, im_part = "0", body
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        return complex(float(re_part), float(im_part))
    return complex(float(s), 0.0)


@dataclass
class RunConfig:
    word: str = "LLR"
    eps: int = 0
    a0: str = "hyperbolic"
    family: int = 1
    branch: str = "-"
    eta: int = 0
    k: int = 1
    n_min: int = 3
    n_max: int = 301
    method: str = "product"
    n_cut: int = 51
    seed: int = 0
    out: str = "out"
    workers: int | None = None

    def __post_init__(self):
        if not self.word:
            raise click.BadParameter("word must be nonempty")
        if self.n_min % 2 == 0 or self.n_max % 2 == 0:
            raise click.BadParameter(f"n-min and n-max must be odd, got {self.n_min}, {self.n_max}")
        if self.n_min > self.n_max:
            raise click.BadParameter(f"n-min={self.n_min} exceeds n-max={self.n_max}")

    @property
    def monodromy(self) -> charvar.MonodromyWord:
        return charvar.MonodromyWord(self.word, self.eps)

    @property
    def outdir(self) -> Path:
        return Path(self.out)


def solve_weights(cfg: RunConfig) -> charvar.SweepWeights:
    word = cfg.monodromy
    word.require_pseudo_anosov()
    if cfg.a0.strip().lower() == "hyperbolic":
        return charvar.solve_hyperbolic(word, rng_seed=cfg.seed)
    try:
        a0 = parse_complex(cfg.a0)
    except ValueError as exc:
        raise click.BadParameter(f"cannot parse a0={cfg.a0!r}: {exc}") from exc
    if word.letters == "LLR":
        s = charvar.sweep(word, charvar.solve_periodic_llr(a0, cfg.branch, cfg.family))
        if not s.is_periodic:
            raise SolverError(f"closed-form weights are not periodic (defect {s.periodicity_defect():.3e})")
        return s
    # no closed form: continue from the hyperbolic point with a0 frozen
    hyp = charvar.solve_hyperbolic(word, rng_seed=cfg.seed)
    return charvar.solve_periodic_newton(word, hyp.steps[0], a0)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _stage(name: str):
    """Map library errors to exit codes with a one-line diagnostic naming the stage."""

    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except DegenerateWeightError as exc:
                click.echo(f"{name}: degenerate geometry: {exc}", err=True)
                sys.exit(EXIT_DEGENERATE)
            except (SolverError, BranchInconsistencyError) as exc:
                click.echo(f"{name}: solver failure: {exc}", err=True)
                sys.exit(EXIT_SOLVER)

        return wrapper

    return deco


def _common(fn):
    opts = [
        click.option("--word", default="LLR", show_default=True, help="Monodromy word over {L, R}."),
        click.option("--eps", type=click.IntRange(0, 1), default=0, show_default=True),
        click.option("--a0", default="hyperbolic", show_default=True, help='Complex "a+bi" or "hyperbolic".'),
        click.option("--family", type=click.IntRange(1, 2), default=1, show_default=True),
        click.option("--branch", type=click.Choice(["+", "-"]), default="-", show_default=True),
        click.option("--eta", type=int, default=0, show_default=True),
        click.option("--k", type=int, default=1, show_default=True, help="Root exponent, q = exp(2 pi i k/n)."),
        click.option("--n-min", type=int, default=3, show_default=True),
        click.option("--n-max", type=int, default=301, show_default=True),
        click.option("--method", type=click.Choice(trace_engine.METHODS), default="product", show_default=True),
        click.option("--n-cut", type=int, default=51, show_default=True),
        click.option("--seed", type=int, default=0, show_default=True, help="RNG seed for multi-start solving."),
        click.option("--out", default="out", show_default=True, help="Output directory."),
        click.option("--workers", type=int, default=None, envvar="QTORUS_WORKERS", help="Worker processes."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _config(kwargs) -> RunConfig:
    return RunConfig(**kwargs)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Quantum trace invariants of punctured-torus bundles."""


@main.command()
@_common
@_stage("solve")
def solve(**kwargs):
    """Solve for periodic edge weights and write sweep.json."""
    cfg = _config(kwargs)
    s = solve_weights(cfg)
    _write(cfg.outdir / "sweep.json", charvar.sweep_to_json(s))
    w = s.steps[0]
    click.echo(f"a0={w.a:.12g} b0={w.b:.12g} c0={w.c:.12g} defect={s.periodicity_defect():.2e}")


@main.command("lift")
@_common
@_stage("lift")
def lift_cmd(**kwargs):
    """Lift the weights to logarithms and write lift.json."""
    cfg = _config(kwargs)
    lg = lifting.lift(solve_weights(cfg), eta=cfg.eta)
    _write(cfg.outdir / "lift.json", lg.to_json())
    click.echo(f"correction factors (lhat, mhat, nhat) = {lg.hats}, parity = {lg.parity}")


@main.command()
@_common
@_stage("trace")
def trace(**kwargs):
    """Scan odd n and write trace.csv."""
    cfg = _config(kwargs)
    lg = lifting.lift(solve_weights(cfg), eta=cfg.eta)
    ts = trace_engine.series(cfg.monodromy, lg, cfg.n_min, cfg.n_max, cfg.method, cfg.workers, cfg.k)
    _write(cfg.outdir / "trace.csv", ts.to_csv())
    click.echo(f"{len(ts.rows)} rows, {len(ts.rows) - len(ts.good_rows())} flagged degenerate")


@main.command("fit")
@click.option("--out", default="out", show_default=True, help="Directory holding trace.csv (and lift.json).")
@click.option("--n-cut", type=int, default=51, show_default=True)
@click.option("--degree", type=int, default=4, show_default=True)
@click.option("--volume", "vol", type=float, default=None, help="Hyperbolic volume to compare against.")
@_stage("fit")
def fit_cmd(out, n_cut, degree, vol):
    """Fit an existing trace.csv and write fit.json."""
    outdir = Path(out)
    hats, parity, word = (0, 0, 0), 0, ""
    lift_path = outdir / "lift.json"
    if lift_path.exists():
        lg = lifting.LogLift.from_dict(json.loads(lift_path.read_text()))
        hats, parity, word = lg.hats, lg.parity, lg.letters
    ts = trace_engine.TraceSeries.from_csv((outdir / "trace.csv").read_text(), word, hats, parity)
    try:
        f = asymptotics.fit(ts, n_cut, degree)
    except ValueError as exc:
        click.echo(f"fit: {exc}", err=True)
        sys.exit(1)
    cmp = asymptotics.compare_volume(f, vol) if vol is not None else None
    _write(outdir / "fit.json", asymptotics.report_json(f, cmp))
    _echo_fit(f, cmp)


@main.command("volume")
@click.option("--word", default="LLR", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_stage("volume")
def volume_cmd(word, seed):
    """Hyperbolic volume of the mapping torus."""
    g = charvar.geometry(charvar.MonodromyWord(word), rng_seed=seed)
    click.echo(f"volume={g.volume:.12f} volume/4pi={g.volume / (4 * 3.141592653589793):.12f}")
    for z in g.shapes:
        click.echo(f"  shape {z.real:+.12f}{z.imag:+.12f}i")


@main.command()
@_common
@_stage("run")
def run(**kwargs):
    """Full pipeline: sweep.json, lift.json, trace.csv, fit.json."""
    cfg = _config(kwargs)
    run_pipeline(cfg)


def run_pipeline(cfg: RunConfig) -> dict:
    word = cfg.monodromy
    s = solve_weights(cfg)
    _write(cfg.outdir / "sweep.json", charvar.sweep_to_json(s))
    lg = lifting.lift(s, eta=cfg.eta)
    _write(cfg.outdir / "lift.json", lg.to_json())
    ts = trace_engine.series(word, lg, cfg.n_min, cfg.n_max, cfg.method, cfg.workers, cfg.k)
    _write(cfg.outdir / "trace.csv", ts.to_csv())
    geom = charvar.geometry(word, rng_seed=cfg.seed)
    try:
        f = asymptotics.fit(ts, cfg.n_cut)
    except ValueError as exc:
        click.echo(f"run: fit skipped: {exc}", err=True)
        f, cmp = None, None
    else:
        cmp = asymptotics.compare_volume(f, geom.volume)
        _write(cfg.outdir / "fit.json", asymptotics.report_json(f, cmp))
    click.echo(f"word={word.letters} hats={lg.hats} volume={geom.volume:.10f}")
    if f is not None:
        _echo_fit(f, cmp)
    return {"sweep": s, "lift": lg, "series": ts, "fit": f, "comparison": cmp, "volume": geom.volume}


def _echo_fit(f: asymptotics.FitResult, cmp: dict | None) -> None:
    for r, c in sorted(f.classes.items()):
        click.echo(f"mode n={r} mod 4: limit={c.limit:.8f} rms={c.rms:.2e} points={c.count}")
    if cmp is not None:
        click.echo(f"vol/4pi={cmp['volume_over_4pi']:.8f} verdict={cmp['verdict']}")


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
def verify(seed):
    """Run the property suite at small n; nonzero exit on any failure."""
    from .verify import run_all

    results = run_all(seed)
    for name, ok, detail in results:
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    if not all(ok for _, ok, _ in results):
        sys.exit(1)


if __name__ == "__main__":
    main()
