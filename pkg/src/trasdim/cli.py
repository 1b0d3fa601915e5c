"""Command-line entry point.

Exit codes: ``decide`` returns 0 for SAT, 1 for UNSAT and 2 for UNKNOWN;
``verify`` returns 0 iff every check passes (1 otherwise); any usage or
input error returns 64.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import click

from .borst import ExplicitSystem, TruncatedA, ord_of_system, ord_truncated_A
from .covers import build_lomega_cover, build_zn_cover, validate_cover
from .ordinal import render
from .solver import (
    CACHE_ENV,
    DEFAULT_BUDGET,
    BudgetExhausted,
    DecisionInstance,
    ResultCache,
    Verdict,
    decide_cover,
    min_diameter,
)
from .spaces import WindowSpec, make_window
from .verify import ALIASES, SUITES, run_suite

EXIT_USAGE = 64
MIN_BUDGET = 10**4


@dataclass
class RunConfig:
    command: str
    spec: WindowSpec | None = None
    radii: tuple = ()
    diameter: int | None = None
    sides: tuple = ()
    diam_cap: int | None = None
    r_max: int | None = None
    budget: int = DEFAULT_BUDGET
    cache_dir: str | None = None
    out: str | None = None
    fmt: str = "json"
    canonical: bool = True
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.budget < MIN_BUDGET:
            raise click.BadParameter(f"budget must be >= {MIN_BUDGET}", param_hint="--budget")

    def cache(self) -> ResultCache | None:
        d = self.cache_dir or os.environ.get(CACHE_ENV)
        return ResultCache(d) if d else None


def _parse_radii(text: str | None) -> tuple:
    if not text:
        raise click.BadParameter("at least one radius is required", param_hint="--radii")
    try:
        radii = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise click.BadParameter(f"cannot parse {text!r}", param_hint="--radii")
    if min(radii) < 1:
        raise click.BadParameter("radii must be >= 1", param_hint="--radii")
    return radii


def _parse_range(text: str, hint: str) -> tuple:
    try:
        if ".." in text:
            a, b = text.split("..")
            values = tuple(range(int(a), int(b) + 1))
        else:
            values = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise click.BadParameter(f"cannot parse {text!r}", param_hint=hint)
    if not values:
        raise click.BadParameter("empty range", param_hint=hint)
    return values


def _spec(space, side, dims, scale, level_cap, spec_json) -> WindowSpec:
    if spec_json:
        try:
            return WindowSpec.from_json(json.loads(spec_json))
        except (ValueError, TypeError) as exc:
            raise click.BadParameter(str(exc), param_hint="--spec")
    if space is None or side is None:
        raise click.BadParameter("--space and --side (or --spec) are required")
    try:
        return WindowSpec(space, side, dims=dims, scale=scale, level_cap=level_cap)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


space_options = [
    click.option("--space", type=click.Choice(["zn", "kzn", "lomega", "linf"])),
    click.option("--side", type=int, help="sup-norm bound of the window"),
    click.option("--dims", type=int, default=1, show_default=True),
    click.option("--scale", type=int, default=1, show_default=True, help="k for kzn"),
    click.option("--level-cap", type=int, default=1, show_default=True),
    click.option("--spec", "spec_json", help='WindowSpec JSON, e.g. {"family":"lomega","side":6,"level_cap":3}'),
]
run_options = [
    click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True, help="search node budget"),
    click.option("--cache-dir", type=click.Path(file_okay=False), help=f"result cache (default ${CACHE_ENV})"),
    click.option("--out", type=click.Path(dir_okay=False), help="write output here instead of stdout"),
]


def _apply(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return deco


@click.group()
def cli():
    """Colored-cover search and Ord computations on windows of lattice spaces."""


@cli.command()
@_apply(space_options)
@click.option("--radii", help="comma-separated disjointness radii, e.g. 3,3")
@click.option("--diam", "diameter", type=int, required=True, help="block diameter bound D")
@_apply(run_options)
@click.option("--fast", is_flag=True, help="any valid witness instead of the canonical one")
def decide(space, side, dims, scale, level_cap, spec_json, radii, diameter, budget, cache_dir, out, fast):
    """Decide whether a cover with the given radii and diameter bound exists."""
    cfg = RunConfig("decide", _spec(space, side, dims, scale, level_cap, spec_json), _parse_radii(radii),
                    diameter, budget=budget, cache_dir=cache_dir, out=out, canonical=not fast)
    if diameter < 0:
        raise click.BadParameter("must be >= 0", param_hint="--diam")
    sys.exit(cmd_decide(cfg))


def cmd_decide(cfg: RunConfig) -> int:
    W = make_window(cfg.spec)
    inst = DecisionInstance(W, cfg.radii, cfg.diameter)
    cert = decide_cover(inst, cfg.budget, cfg.cache(), cfg.canonical)
    doc = {"window": cfg.spec.to_json(), "radii": list(cfg.radii), "diameter": cfg.diameter,
           "points": len(W), "certificate": cert.to_json()}
    _emit(_dump(doc), cfg.out)
    return {Verdict.SAT: 0, Verdict.UNSAT: 1, Verdict.UNKNOWN: 2}[cert.verdict]


SCAN_COLUMNS = ["side", "radii", "points", "min_diameter", "status", "nodes"]


def _scan_row(args):
    spec, radii, cap, budget, cache_dir = args
    W = make_window(spec)
    cache = ResultCache(cache_dir) if cache_dir else None
    row = {"side": spec.side, "radii": " ".join(map(str, radii)), "points": len(W)}
    try:
        if cap is not None:
            cert = decide_cover(DecisionInstance(W, radii, cap), budget, cache)
            if cert.verdict is Verdict.UNSAT:
                row.update(min_diameter=f"UNSAT-at-{cap}", status="UNSAT-at-cap", nodes=cert.nodes)
                return row
            if cert.verdict is Verdict.UNKNOWN:
                row.update(min_diameter="", status="UNKNOWN", nodes=cert.nodes)
                return row
        value, nodes = min_diameter(W, radii, budget, cache)
    except BudgetExhausted as exc:
        row.update(min_diameter=f"[{exc.lower},{exc.upper}]", status="UNKNOWN", nodes="")
        return row
    # re-check the witness at the reported value before it is written
    cert = decide_cover(DecisionInstance(W, radii, value), budget, cache)
    if cert.verdict is not Verdict.SAT or not validate_cover(cert.witness, W, value).accepted:
        raise AssertionError(f"scan row for side {spec.side} failed re-validation")
    row.update(min_diameter=value, status="OK", nodes=nodes)
    return row


@cli.command()
@_apply(space_options)
@click.option("--radii", help="comma-separated disjointness radii")
@click.option("--sides", required=True, help="side range a..b or list a,b,c")
@click.option("--diam-cap", type=int, help="report UNSAT-at-cap instead of searching above this D")
@_apply(run_options)
@click.option("--jobs", type=int, default=1, show_default=True)
def scan(space, side, dims, scale, level_cap, spec_json, radii, sides, diam_cap, budget, cache_dir, out, jobs):
    """Minimal block diameter for growing windows, as CSV."""
    sides = _parse_range(sides, "--sides")
    base = _spec(space, sides[0], dims, scale, level_cap, spec_json)
    cfg = RunConfig("scan", base, _parse_radii(radii), sides=sides, diam_cap=diam_cap, budget=budget,
                    cache_dir=cache_dir, out=out, fmt="csv", jobs=jobs)
    sys.exit(cmd_scan(cfg))


def cmd_scan(cfg: RunConfig) -> int:
    cache_dir = cfg.cache_dir or os.environ.get(CACHE_ENV)
    tasks = []
    for s in cfg.sides:
        doc = cfg.spec.to_json()
        doc["side"] = s
        tasks.append((WindowSpec.from_json(doc), cfg.radii, cfg.diam_cap, cfg.budget, None))
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(_scan_row, tasks))
    else:
        # sequential rows may share the cache directly
        rows = [_scan_row(t[:-1] + (cache_dir,)) for t in tasks]
    buf = io.StringIO()
    w = csv.DictWriter(buf, SCAN_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _emit(buf.getvalue(), cfg.out)
    return 2 if any(r["status"] == "UNKNOWN" for r in rows) else 0


@cli.command()
@click.option("--suite", required=True, help=f"one of: all, {', '.join(SUITES)}")
@click.option("--trials", type=int, help="number of random cases (suite default if omitted)")
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--k", type=int, help="lattice scale (obstruction) or dimension (plane-pair)")
@click.option("--n", type=int, help="lattice dimension for obstruction")
@click.option("--diam-cap", type=int, help="largest D for the obstruction/plane-pair searches")
@_apply(run_options)
def verify(suite, trials, seed, k, n, diam_cap, budget, cache_dir, out):
    """Run a verification suite and print a JSON report."""
    if suite != "all" and suite not in SUITES and suite not in ALIASES:
        raise click.BadParameter(f"unknown suite {suite!r}", param_hint="--suite")
    cfg = RunConfig("verify", budget=budget, cache_dir=cache_dir, out=out,
                    extra={"suite": suite, "trials": trials, "seed": seed, "k": k, "n": n, "diam_cap": diam_cap})
    sys.exit(cmd_verify(cfg))


def cmd_verify(cfg: RunConfig) -> int:
    x = cfg.extra
    checks = run_suite(x["suite"], x["trials"], x["seed"], k=x["k"], n=x["n"], diam_cap=x["diam_cap"],
                       budget=cfg.budget, cache=cfg.cache())
    ok = all(c.ok for c in checks)
    doc = {"suite": x["suite"], "seed": x["seed"], "ok": ok, "checks": [c.to_json() for c in checks]}
    _emit(_dump(doc), cfg.out)
    return 0 if ok else 1


@cli.command()
@_apply(space_options)
@click.option("--kind", type=click.Choice(["zn", "lomega"]), required=True)
@click.option("--n", type=int, required=True, help="lattice dimension / tower level")
@click.option("--r", "radius", type=int, help="disjointness for the zn construction")
@click.option("--tau", help="comma-separated radii for the lomega construction")
@click.option("--out", type=click.Path(dir_okay=False))
def cover(space, side, dims, scale, level_cap, spec_json, kind, n, radius, tau, out):
    """Build an explicit cover, validate it and print it as JSON."""
    spec = _spec(space, side, dims, scale, level_cap, spec_json)
    W = make_window(spec)
    try:
        if kind == "zn":
            if radius is None:
                raise click.BadParameter("required for --kind zn", param_hint="--r")
            built = build_zn_cover(n, radius, W)
        else:
            built = build_lomega_cover(_parse_radii(tau), n, W)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    D = built.max_diameter(W)
    report = validate_cover(built, W, D)
    _emit(_dump({"window": spec.to_json(), "diameter": D, "report": report.to_json(),
                 "cover": built.to_json()}), out)
    sys.exit(0 if report.accepted else 1)


@cli.command()
@_apply(space_options)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--distances", is_flag=True, help="CSV: include the full distance matrix")
@click.option("--out", type=click.Path(dir_okay=False))
def window(space, side, dims, scale, level_cap, spec_json, fmt, distances, out):
    """Export the points of a window (and optionally its distances)."""
    W = make_window(_spec(space, side, dims, scale, level_cap, spec_json))
    if fmt == "csv":
        _emit(W.to_csv(with_distances=distances), out)
    else:
        _emit(json.dumps(W.to_json(), separators=(",", ":")) + "\n", out)
    sys.exit(0)


@cli.command()
@click.option("--system", "system_json", help='explicit system JSON {"universe":[..],"members":[[..]]}')
@click.option("--truncated", "truncated_json", help='{"window":{WindowSpec},"diameter":D,"r_max":R}')
@_apply(run_options)
def ord(system_json, truncated_json, budget, cache_dir, out):
    """Ord of an explicit set system or of a solver-backed truncated A."""
    if bool(system_json) == bool(truncated_json):
        raise click.BadParameter("give exactly one of --system / --truncated")
    try:
        if system_json:
            M = ExplicitSystem.from_json(json.loads(system_json))
            doc = {"system": M.to_json(), "ordinal": render(ord_of_system(M))}
        else:
            cfg = RunConfig("ord", budget=budget, cache_dir=cache_dir)
            tA = TruncatedA.from_json(json.loads(truncated_json), budget=budget, cache=cfg.cache())
            value = ord_truncated_A(tA)
            members = [sorted(s) for s, v in sorted(tA.verdicts.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
                       if v is Verdict.UNSAT]
            doc = {"truncated": tA.to_json(), "ordinal": str(value), "members": members}
    except (ValueError, KeyError, TypeError) as exc:
        raise click.BadParameter(str(exc))
    _emit(_dump(doc), out)
    sys.exit(0)


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="trasdim", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
