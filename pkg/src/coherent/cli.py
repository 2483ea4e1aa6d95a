"""Command-line entry point: ``coherent <command> ...``.

Exit codes: 0 success (including an Incoherent verdict), 1 usage error,
2 I/O error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import bounds as bnd
from .coherence import check_coherence, quick_incoherence, verify_verdict
from .extremal import (
    ExtremalError,
    Grid,
    InfeasibleTarget,
    InvariantViolation,
    TargetFunction,
    attaining_points,
    eps_sweep,
    independent_search,
    optimize_target,
    two_by_two_probe,
)
from .laws import DiscreteJointLaw, LawError, daisy, dp80_attaining
from .numeric import RationalParseError, fmt, parse_rational
from .polytope import (
    Rect,
    central_rectangles,
    enumerate_vertices,
    random_rectangles,
    rect_feasibility,
    vertex_histogram,
)

log = logging.getLogger("coherent")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVARIANT = 0, 1, 2, 3

COMMANDS = ("check", "optimize", "sweep", "daisy", "polygon", "conjecture", "bound")
TARGETS = ("gap", "max", "absdiff", "product")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    out: Optional[str] = None
    csv: Optional[str] = None
    grid: Optional[dict] = None
    augment_attaining: bool = False
    target: str = "gap"
    delta: Optional[str] = None
    deltas: list = field(default_factory=list)
    p: Optional[str] = None
    r: Optional[str] = None
    n: Optional[int] = None
    seed: int = 0
    restarts: int = 100
    budget: tuple = (2, 2)
    which: str = "independent"
    rect: Optional[list] = None
    sweep: Optional[int] = None
    central: bool = False
    bound_id: Optional[str] = None
    bound_args: list = field(default_factory=list)
    attaining: bool = False
    mode: str = "exact"
    jobs: int = 1
    report: Optional[str] = None

    def echo(self) -> dict:
        """Settings that determine the result; output destinations are left out."""
        d = asdict(self)
        for key in ("out", "csv", "report"):
            d.pop(key)
        d["budget"] = list(self.budget)
        return {k: v for k, v in d.items() if v not in (None, [], False) or k in ("mode", "seed")}


def _q(text, name: str) -> Fraction:
    try:
        return parse_rational(str(text))
    except RationalParseError as exc:
        raise UsageError(f"--{name}: {exc}") from None


def parse_deltas(tokens, step=None) -> list[Fraction]:
    """``["1/10..9/20", "step", "1/20"]`` or an explicit list of values."""
    tokens = [str(t) for t in tokens]
    if "step" in tokens:
        k = tokens.index("step")
        if k + 1 >= len(tokens):
            raise UsageError("'step' needs a value")
        step = tokens[k + 1]
        tokens = tokens[:k] + tokens[k + 2:]
    out = []
    for tok in tokens:
        if ".." in tok:
            lo, hi = (_q(s, "deltas") for s in tok.split(".."))
            if step is None:
                raise UsageError("a delta range needs a step")
            st = _q(step, "step")
            if st <= 0:
                raise UsageError("step must be positive")
            v = lo
            while v <= hi:
                out.append(v)
                v += st
        else:
            out.append(_q(tok, "deltas"))
    if any(not 0 <= d <= 1 for d in out):
        raise UsageError("deltas must lie in [0,1]")
    return out


def grid_spec_from_tokens(tokens, tokens_y=None) -> Optional[dict]:
    if not tokens:
        return None
    kind = tokens[0]
    if kind == "uniform" and len(tokens) == 2:
        spec = {"kind": "uniform", "n": int(tokens[1])}
    elif kind in ("list", "explicit") and len(tokens) == 2:
        spec = {"kind": "explicit", "x": tokens[1].split(",")}
    else:
        raise UsageError("--grid expects 'uniform N' or 'list v1,v2,...'")
    if tokens_y:
        spec["y"] = tokens_y[1].split(",") if tokens_y[0] in ("list", "explicit") else None
        if spec["y"] is None:
            raise UsageError("--grid-y expects 'list v1,v2,...'")
    return spec


def build_grid(spec: Optional[dict], extra=()) -> Grid:
    if spec is None:
        raise UsageError("a grid is required (--grid uniform N | --grid list v1,...)")
    try:
        if spec.get("kind") == "uniform":
            g = Grid.uniform(int(spec["n"]))
            if "y" in spec:
                g = Grid(g.x_values, tuple(_q(v, "grid") for v in spec["y"]))
        elif spec.get("kind") == "explicit":
            xs = tuple(_q(v, "grid") for v in spec["x"])
            ys = tuple(_q(v, "grid") for v in spec.get("y", spec["x"]))
            g = Grid(xs, ys)
        else:
            raise UsageError(f"unknown grid kind {spec.get('kind')!r}")
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad grid spec: {exc}") from None
    return g.augment(tuple(extra)) if extra else g


def _target(cfg: RunConfig) -> TargetFunction:
    if cfg.target == "gap":
        if cfg.delta is None:
            raise UsageError("target 'gap' needs --delta")
        return TargetFunction.gap_indicator(_q(cfg.delta, "delta"))
    if cfg.target == "max":
        return TargetFunction.max_xy()
    if cfg.target == "product":
        return TargetFunction.product_xy()
    if cfg.target == "absdiff":
        r = cfg.r or "1"
        try:
            return TargetFunction.abs_diff_pow(int(r))
        except ValueError:
            return TargetFunction.abs_diff_pow(float(r))
    raise UsageError(f"unknown target {cfg.target!r}")


PROVENANCE = {
    "lower": "2*delta/(1+delta), attained by the three-point deldis law",
    "upper": "min(2*delta, 1)",
    "eps_2x2": "2*delta/(1+delta) if delta < 1/2 else 1",
    "conj_independent": "2*delta*(1-delta)",
}


def cmd_check(cfg: RunConfig) -> tuple[int, dict]:
    law = _read_law(cfg.input)
    verdict = check_coherence(law, cfg.mode)
    if not verdict.coherent and law.k == 2:
        quick = quick_incoherence(law)
        if quick is not None:
            from dataclasses import replace

            verdict = replace(verdict, quick=quick)
    if not verify_verdict(law, verdict):
        raise InvariantViolation("verdict evidence failed exact re-verification")
    payload = {"law": law.to_dict(), "means": [fmt(m) for m in law.means()], **verdict.to_dict(law)}
    return EXIT_OK, payload


def cmd_optimize(cfg: RunConfig) -> tuple[int, dict]:
    target = _target(cfg)
    extra = ()
    p = None if cfg.p is None else _q(cfg.p, "p")
    if cfg.augment_attaining:
        if cfg.delta is not None:
            extra = attaining_points(_q(cfg.delta, "delta"))
        if p is not None:
            extra = tuple(extra) + (Fraction(0), p, Fraction(1))
    grid = build_grid(cfg.grid, extra)
    try:
        res = optimize_target(grid, target, p, cfg.mode)
    except InfeasibleTarget:
        return EXIT_OK, {"status": "Infeasible", "grid": grid.to_dict(), "target": target.describe()}
    return EXIT_OK, {"status": "Optimal", "target": target.describe(), "result": res.to_dict()}


def cmd_sweep(cfg: RunConfig) -> tuple[int, dict]:
    deltas = [d if isinstance(d, Fraction) else _q(d, "deltas") for d in cfg.deltas]
    if not deltas:
        raise UsageError("sweep needs --deltas")

    def family(d):
        return build_grid(cfg.grid, attaining_points(d) if cfg.augment_attaining else ())

    for d in deltas:
        family(d)
    rows = eps_sweep(deltas, family, cfg.mode, cfg.jobs)
    payload = {"rows": [r.to_dict() for r in rows], "bounds": PROVENANCE}
    if cfg.csv:
        _write_text(cfg.csv, _sweep_csv(rows))
    return EXIT_OK, payload


def _sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["delta", "delta_float", "value", "value_float", "lower", "upper", "within_bounds", "excess"])
    for r in rows:
        w.writerow([fmt(r.delta), repr(float(r.delta)), fmt(r.value), repr(float(r.value)),
                    fmt(r.lower), fmt(r.upper), r.within_bounds, r.excess])
    return buf.getvalue()


def cmd_daisy(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.n is None or cfg.p is None:
        raise UsageError("daisy needs --n and --p")
    p = _q(cfg.p, "p")
    try:
        law = dp80_attaining(cfg.n, p) if cfg.attaining else daisy(cfg.n, p)
    except LawError as exc:
        raise UsageError(str(exc)) from None
    verdict = check_coherence(law, cfg.mode)
    emax = law.expect(lambda pt: max(pt))
    return EXIT_OK, {
        "law": law.to_dict(),
        "coherent": verdict.coherent,
        "means": [fmt(m) for m in law.means()],
        "E_max": fmt(emax),
        "p_n": fmt(bnd.daisy_pn(cfg.n, p)),
        "dp80_max": fmt(bnd.dp80_max(cfg.n, p)),
    }


def cmd_polygon(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.rect:
        R = Rect(*(_q(v, "rect") for v in cfg.rect))
        res = enumerate_vertices(R)
        return EXIT_OK, res.to_dict()
    if cfg.sweep is None and not cfg.central:
        raise UsageError("polygon needs --rect x1 x2 y1 y2, --sweep N or --central")
    rects = random_rectangles(cfg.sweep, cfg.seed) if cfg.sweep else []
    if cfg.central:
        rects += central_rectangles()
    results = _map(enumerate_vertices, rects, cfg.jobs)
    for R, res in zip(rects, results):
        if res.status != rect_feasibility(R)[0].replace("Nonempty", "Polygon"):
            raise InvariantViolation(f"status mismatch for {R}")
        if res.status == "Polygon" and not 2 <= res.count <= 8:
            raise InvariantViolation(f"{res.count} vertices for {R}")
    statuses: dict[str, int] = {}
    for r in results:
        statuses[r.status] = statuses.get(r.status, 0) + 1
    return EXIT_OK, {
        "rectangles": len(rects),
        "status_counts": dict(sorted(statuses.items())),
        "histogram": {str(k): v for k, v in vertex_histogram(results).items()},
        "rows": [{"rect": r.rect.to_list(), "status": r.status, "vertex_count": r.count} for r in results],
    }


def cmd_conjecture(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.which == "two-by-two":
        m, n = cfg.budget
        rows = two_by_two_probe((m, n), cfg.restarts, cfg.seed, mode=cfg.mode)
        return EXIT_OK, {
            "which": "two-by-two",
            "rows": [r.to_dict() for r in rows],
            "counterexamples": sum(1 for r in rows if r.gap > 0),
        }
    if cfg.delta is None:
        raise UsageError("conjecture needs --delta")
    report = Path(cfg.report) if cfg.report else None
    try:
        res = independent_search(_q(cfg.delta, "delta"), tuple(cfg.budget), cfg.restarts, cfg.seed,
                                 report_path=report)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK, {"which": "independent", **res.to_dict(), "bounds": {"bound": PROVENANCE["conj_independent"]}}


def cmd_bound(cfg: RunConfig) -> tuple[int, dict]:
    try:
        v = bnd.evaluate(cfg.bound_id, *cfg.bound_args)
    except (bnd.BoundDomainError, RationalParseError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK, {"bound": cfg.bound_id, "args": list(cfg.bound_args), "value": fmt(v), "value_float": float(v)}


HANDLERS = {
    "check": cmd_check, "optimize": cmd_optimize, "sweep": cmd_sweep, "daisy": cmd_daisy,
    "polygon": cmd_polygon, "conjecture": cmd_conjecture, "bound": cmd_bound,
}


def _map(fn, items, jobs):
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _read_law(path: Optional[str]) -> DiscreteJointLaw:
    if not path:
        raise UsageError("check needs a law file")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    try:
        return DiscreteJointLaw.from_json(text)
    except (json.JSONDecodeError, LawError, RationalParseError) as exc:
        raise UsageError(f"malformed law file {path}: {exc}") from None


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text)


def run(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.command not in HANDLERS:
        raise UsageError(f"unknown command {cfg.command!r}")
    if cfg.mode not in ("exact", "float-certified"):
        raise UsageError("--mode must be 'exact' or 'float-certified'")
    if cfg.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    code, payload = HANDLERS[cfg.command](cfg)
    return code, {"command": cfg.command, "config": cfg.echo(), **payload}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coherent", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, grid=False):
        sp.add_argument("--config", help="JSON file with option defaults")
        sp.add_argument("--out", help="write JSON result here instead of stdout")
        sp.add_argument("--mode", choices=("exact", "float-certified"))
        sp.add_argument("--jobs", type=int)
        if grid:
            sp.add_argument("--grid", nargs=2, metavar=("KIND", "ARG"))
            sp.add_argument("--grid-y", nargs=2, metavar=("KIND", "ARG"))
            sp.add_argument("--augment-attaining", action="store_true", default=None)

    sp = sub.add_parser("check", help="decide coherence of a law file")
    sp.add_argument("input")
    common(sp)

    sp = sub.add_parser("optimize", help="sup E t(X,Y) over coherent laws on a grid")
    common(sp, grid=True)
    sp.add_argument("--target", choices=TARGETS)
    sp.add_argument("--delta")
    sp.add_argument("--p")
    sp.add_argument("--r")

    sp = sub.add_parser("sweep", help="grid values of eps(delta) with bounds")
    common(sp, grid=True)
    sp.add_argument("--deltas", nargs="+")
    sp.add_argument("--step")
    sp.add_argument("--csv")

    sp = sub.add_parser("daisy", help="(n,p)-daisy or its E-max attaining variant")
    common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p")
    sp.add_argument("--attaining", action="store_true", default=None)

    sp = sub.add_parser("polygon", help="extreme 2x2 coherent laws on a rectangle")
    common(sp)
    sp.add_argument("--rect", nargs=4, metavar=("X1", "X2", "Y1", "Y2"))
    sp.add_argument("--sweep", type=int)
    sp.add_argument("--central", action="store_true", default=None)
    sp.add_argument("--seed", type=int)

    sp = sub.add_parser("conjecture", help="searches probing the open conjectures")
    common(sp)
    sp.add_argument("--which", choices=("independent", "two-by-two"))
    sp.add_argument("--delta")
    sp.add_argument("--restarts", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--budget", nargs=2, type=int, metavar=("M", "N"))
    sp.add_argument("--report", help="counterexample artifact path")

    sp = sub.add_parser("bound", help="evaluate a closed-form bound")
    sp.add_argument("bound_id", choices=sorted(bnd.BOUNDS))
    sp.add_argument("bound_args", nargs="*")
    sp.add_argument("--out")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        try:
            values.update(json.loads(Path(args.config).read_text()))
        except OSError:
            raise
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from None
    ns = vars(args)
    for key, val in ns.items():
        if key in ("config", "verbose", "grid", "grid_y", "step") or val is None:
            continue
        values[key] = val
    if ns.get("grid"):
        values["grid"] = grid_spec_from_tokens(ns["grid"], ns.get("grid_y"))
    if "deltas" in values:
        raw = values["deltas"]
        if isinstance(raw, dict):
            values["deltas"] = parse_deltas([f"{raw['start']}..{raw['stop']}"], raw["step"])
        else:
            values["deltas"] = parse_deltas(raw, ns.get("step") or values.pop("step", None))
    values.pop("step", None)
    if "input" in values and args.command != "check":
        values.pop("input")
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "budget" in values:
        values["budget"] = tuple(values["budget"])
    return RunConfig(**values)


def _serialize(payload: dict) -> str:
    def default(o):
        if isinstance(o, Fraction):
            return fmt(o)
        raise TypeError(type(o).__name__)

    return json.dumps(payload, indent=2, sort_keys=True, default=default) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        code, payload = run(cfg)
        text = _serialize(payload)
        if cfg.out:
            _write_text(cfg.out, text)
        else:
            sys.stdout.write(text)
        return code
    except UsageError as exc:
        print(f"coherent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"coherent: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvariantViolation, ExtremalError) as exc:
        print(f"coherent: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
