"""Command-line front end.

Every command prints a JSON report on standard output and writes its
artifacts (the same JSON, plus CSV/SVG where relevant) to the output
directory.  Floats are written with 17 significant digits so that reports
round-trip exactly.

Exit codes: 0 success, 2 validation failure, 3 budget exhausted (the best
result found is still printed), 1 anything else, including a failed
``check``.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .desitter import DSPoint, in_domain
from .errors import BudgetExceeded, PlateauWarning, ValidationError
from .glue import (
    ALPHA,
    BETA,
    GluedSurface,
    PolygonSpec,
    build_T_theta_x,
    build_T_theta_xy,
    first_return,
    glue,
    trace_leaf,
)
from .hiet import s_of_x, x_of_s
from .moebius import ProjectivePoint
from .rotation import RotationNumber, rotation_number
from .solve import (
    closed_leaf_circle,
    realize_irrational,
    realize_pair,
    realize_rational,
    surgery_compose,
    surgery_realize,
)

EXIT_OK, EXIT_INTERNAL, EXIT_VALIDATION, EXIT_BUDGET = 0, 1, 2, 3
OUTPUT_ENV = "DSTORI_OUTPUT_DIR"


# ----------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    rotation_tol: float = 1e-8
    return_tol: float = 1e-9
    geometry_tol: float = 1e-9
    irrational_tol: float = 1e-6
    pair_tol: float = 1e-3
    budget: int = 200_000
    bisection_depth: int = 200
    pair_grid: int = 24
    sweep_points: int = 200
    q_max: int = 64
    workers: int = 1
    seed: int = 0
    output_dir: str = "dstori-out"

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if f.type == "float":
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ValidationError(f"config {f.name} must be a number")
                v = float(v)
                setattr(self, f.name, v)
                if f.name.endswith("_tol") and not v > 0.0:
                    raise ValidationError(f"config {f.name} must be > 0")
            elif f.type == "int":
                if isinstance(v, bool) or not isinstance(v, int):
                    raise ValidationError(f"config {f.name} must be an integer")
                if f.name != "seed" and v < 1:
                    raise ValidationError(f"config {f.name} must be >= 1")
            elif not isinstance(v, str) or not v:
                raise ValidationError(f"config {f.name} must be a non-empty string")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ValidationError("a config file holds one flat JSON object")
        known = {f.name for f in fields(cls)}
        extra = sorted(set(d) - known)
        if extra:
            raise ValidationError(f"unknown config keys: {', '.join(extra)}")
        return cls(**d)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "RunConfig":
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from exc
        return cls.from_json(d)

    def save(self, path: str | os.PathLike) -> None:
        Path(path).write_text(dumps(self.to_json()) + "\n")


def resolve_config(args) -> RunConfig:
    """File values, then the output-dir environment variable, then flags."""
    d = RunConfig().to_json()
    if args.config:
        d.update(RunConfig.load(args.config).to_json())
    env = os.environ.get(OUTPUT_ENV)
    if env:
        d["output_dir"] = env
    for f in fields(RunConfig):
        v = getattr(args, "cfg_" + f.name, None)
        if v is not None:
            d[f.name] = v
    return RunConfig(**d)


# ----------------------------------------------------------------------
# serialization


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    t = format(v, ".17g")
    return t if any(c in t for c in ".en") else t + ".0"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "to_json"):
        return dumps(obj.to_json(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_text(header: list[str], rows: list[list]) -> str:
    def cell(v) -> str:
        if v is None:
            return ""
        if isinstance(v, (float, np.floating)):
            return _fmt_float(float(v)).strip('"')
        return str(v)

    lines = [",".join(header)] + [",".join(cell(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


class Output:
    """Collects artifacts; nothing touches the disk until ``flush``."""

    def __init__(self, cfg: RunConfig, enabled: bool = True) -> None:
        self.dir = Path(cfg.output_dir)
        self.enabled = enabled
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def flush(self) -> list[str]:
        if not self.enabled:
            return []
        self.dir.mkdir(parents=True, exist_ok=True)
        for name, text in self.files.items():
            with open(self.dir / name, "w", newline="\n") as fh:
                fh.write(text)
        return [str(self.dir / n) for n in self.files]


# ----------------------------------------------------------------------
# surfaces from arguments


def _x_arg(v: str) -> ProjectivePoint:
    try:
        return ProjectivePoint.parse(v)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a point of RP^1: {v!r}") from exc


def _pair_arg(v: str) -> tuple[str, str]:
    parts = v.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated values")
    return parts[0].strip(), parts[1].strip()


def surface_from_args(args) -> GluedSurface:
    family = args.family
    if family == "rect-torus":
        return build_T_theta_x(args.theta, args.x)
    if family == "l-torus":
        if args.y is None:
            raise ValidationError("l-torus needs --y")
        return build_T_theta_xy(args.theta, args.x, args.y)
    if family == "custom":
        if not args.spec:
            raise ValidationError("custom surfaces need --spec FILE")
        return load_custom(args.spec)
    raise ValidationError(f"unknown family {family!r}")


def load_custom(path: str) -> GluedSurface:
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read polygon spec {path}: {exc}") from exc
    if not isinstance(d, dict):
        raise ValidationError("a polygon spec is a JSON object with edges and pairings")
    spec = PolygonSpec.from_json(d)
    return glue(spec, sections={k: tuple(v) for k, v in d.get("sections", {}).items()})


def _surface_report(surf: GluedSurface) -> dict:
    d = surf.to_json()
    d["singular_orbits"] = surf.singular_orbits()
    d["euler_ok"] = surf.euler_characteristic == 0
    return d


def _diagnose(args) -> str:
    """Quadrant and pairing report for a spec that failed to glue."""
    if getattr(args, "family", None) != "custom" or not getattr(args, "spec", None):
        return ""
    try:
        spec = PolygonSpec.from_json(json.loads(Path(args.spec).read_text()), check=False)
        surf = glue(spec, require_gauss_bonnet=False)
    except Exception:  # the report is best effort
        return ""
    return dumps([r.to_json() for r in surf.quadrant_report])


# ----------------------------------------------------------------------
# commands


def cmd_build(args, cfg: RunConfig, out: Output) -> dict:
    surf = surface_from_args(args)
    rep = _surface_report(surf)
    if args.family == "l-torus":
        rep["in_domain"] = in_domain(args.theta, args.x, args.y)
    out.add("build.json", dumps(rep) + "\n")
    return rep


def _rotation_entry(surf: GluedSurface, kind: str, cfg: RunConfig) -> dict:
    P = first_return(surf, kind)
    try:
        r = rotation_number(P, budget=cfg.budget, tol=cfg.rotation_tol, q_max=cfg.q_max, return_tol=cfg.return_tol)
        status = "ok"
    except BudgetExceeded as exc:
        r, status = exc.best, "budget"
    return {
        "foliation": kind,
        "section": list(surf.sections.get(kind, ())),
        "pieces": len(P.coeffs),
        "rotation": r.to_json(),
        "inverse_value": (-r.value) % 1.0,
        "status": status,
    }


def cmd_rotation(args, cfg: RunConfig, out: Output) -> dict:
    surf = surface_from_args(args)
    kinds = [BETA, ALPHA] if args.foliation == "both" else [args.foliation]
    rep = {"params": surf.params, "returns": [_rotation_entry(surf, k, cfg) for k in kinds]}
    out.add("rotation.json", dumps(rep) + "\n")
    if any(e["status"] == "budget" for e in rep["returns"]):
        raise BudgetExceeded("rotation number not resolved within the budget", best=rep)
    return rep


def _sweep_rotation_row(job) -> list:
    theta, s, tol, budget, q_max = job
    x = x_of_s(theta, s)
    surf = build_T_theta_x(theta, x)
    P = first_return(surf, BETA)
    try:
        r = rotation_number(P, budget=budget, tol=tol, q_max=q_max)
    except BudgetExceeded as exc:
        r = exc.best
    # P is E^-1; report rho(E) as a lift in [0, 1] running from x = 1 to x = inf
    rho = (-r.value) % 1.0
    tau = 1.0 if s >= 1.0 else rho
    p, q = (None, None) if not r.is_rational else ((r.q - r.p) % r.q, r.q)
    return [x.to_real(), s, rho, tau, r.error_bound, r.kind, p, q]


def _sweep_surgery_row(job) -> list:
    theta, x, u, tol, budget, q_max = job
    surf = build_T_theta_x(theta, x)
    P = first_return(surf, BETA)
    circle, _ = closed_leaf_circle(surf)
    res = surgery_compose(P, circle, u, tol=tol, budget=budget, q_max=q_max)
    r = res.rotation
    return [u, r.value, r.tau, r.error_bound, r.kind, r.p if r.is_rational else None, r.q if r.is_rational else None]


def run_pool(fn, jobs: list, workers: int) -> list:
    """``map`` over a process pool; results come back in input order."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def cmd_sweep(args, cfg: RunConfig, out: Output) -> dict:
    n = args.n if args.n is not None else cfg.sweep_points
    if args.what == "rotation":
        grid = np.linspace(0.0, 1.0, n)
        jobs = [(args.theta, float(s), cfg.rotation_tol, cfg.budget, cfg.q_max) for s in grid]
        rows = run_pool(_sweep_rotation_row, jobs, cfg.workers)
        header = ["x", "s", "rho", "tau", "bound", "kind", "p", "q"]
        taus = [r[3] for r in rows]
        bounds = [r[4] for r in rows]
    else:
        if args.x is None:
            raise ValidationError("sweep surgery needs --x")
        grid = np.linspace(0.0, 1.0, n)
        jobs = [(args.theta, args.x, float(u), cfg.rotation_tol, cfg.budget, cfg.q_max) for u in grid]
        rows = run_pool(_sweep_surgery_row, jobs, cfg.workers)
        header = ["u", "rho", "tau", "bound", "kind", "p", "q"]
        taus = [r[2] for r in rows]
        bounds = [r[3] for r in rows]
    drops = [
        i for i in range(1, len(taus)) if taus[i] < taus[i - 1] - 2.0 * max(bounds[i], bounds[i - 1]) - 1e-12
    ]
    rep = {
        "what": args.what,
        "theta": args.theta,
        "points": len(rows),
        "monotone": not drops,
        "violations": drops,
        "rational_points": sum(1 for r in rows if r[header.index("kind")] == "rational"),
        "csv": f"sweep-{args.what}.csv",
    }
    out.add(f"sweep-{args.what}.csv", csv_text(header, rows))
    out.add(f"sweep-{args.what}.json", dumps(rep) + "\n")
    return rep


def cmd_realize(args, cfg: RunConfig, out: Output) -> dict:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PlateauWarning)
        if args.target == "rational":
            res = realize_rational(args.theta, args.p, args.q, return_tol=cfg.return_tol)
        elif args.target == "irrational":
            res = realize_irrational(
                args.theta, args.rho, tol=cfg.irrational_tol, budget=max(cfg.budget, 2_000_000),
                q_max=cfg.q_max, max_steps=cfg.bisection_depth,
            )
        else:
            res = realize_pair(args.theta, args.rho_alpha, args.rho_beta, tol=cfg.pair_tol, grid=cfg.pair_grid)
    rep = {"target": args.target, "result": res.to_json(), "warnings": [str(w.message) for w in caught]}
    out.add("realize.json", dumps(rep) + "\n")
    return rep


def cmd_trace(args, cfg: RunConfig, out: Output) -> dict:
    surf = surface_from_args(args)
    start = DSPoint.of(*args.start)
    tr = trace_leaf(surf, start, args.kind, max_jumps=args.jumps)
    rep = {
        "params": surf.params,
        "kind": tr.kind,
        "start": start.as_list(),
        "segments": len(tr.segments),
        "jumps": [e for e, _ in tr.jumps],
        "crossing_counts": {str(k): v for k, v in sorted(tr.crossing_counts.items())},
        "status": tr.status,
        "corner": None if tr.corner is None else tr.corner.as_list(),
    }
    out.add("trace.csv", tr.to_csv(surf.spec))
    out.add("trace.svg", tr.to_svg(surf.spec))
    out.add("trace.json", dumps(rep) + "\n")
    return rep


def cmd_surgery(args, cfg: RunConfig, out: Output) -> dict:
    surf = build_T_theta_x(args.theta, args.x)
    P = first_return(surf, BETA)
    circle, hol = closed_leaf_circle(surf)
    kw = {"tol": cfg.rotation_tol, "budget": cfg.budget, "q_max": cfg.q_max}
    if args.p is not None:
        if args.q is None:
            raise ValidationError("--p needs --q")
        res = surgery_realize(P, circle, args.p, args.q, **kw)
    else:
        res = surgery_compose(P, circle, args.u, **kw)
    rep = {"params": surf.params, "circle": circle.to_json(), "holonomy": hol.rows(), **res.to_json()}
    out.add("surgery.json", dumps(rep) + "\n")
    return rep


def cmd_check(args, cfg: RunConfig, out: Output) -> dict:
    from .checks import SUITES, suite_random_words

    names = list(SUITES) + ["random-words"] if args.suite == "all" else [args.suite]
    suites = {}
    for name in names:
        results = suite_random_words(seed=cfg.seed) if name == "random-words" else SUITES[name]()
        suites[name] = {"ok": all(r.ok for r in results), "results": [r.to_json() for r in results]}
    rep = {"ok": all(s["ok"] for s in suites.values()), "seed": cfg.seed, "suites": suites}
    out.add("check.json", dumps(rep) + "\n")
    return rep


# ----------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", help="flat JSON config file; flags override it")
    g.add_argument("--output-dir", dest="cfg_output_dir", help=f"artifact directory (env {OUTPUT_ENV})")
    g.add_argument("--workers", dest="cfg_workers", type=int)
    g.add_argument("--seed", dest="cfg_seed", type=int)
    g.add_argument("--rotation-tol", dest="cfg_rotation_tol", type=float)
    g.add_argument("--return-tol", dest="cfg_return_tol", type=float)
    g.add_argument("--budget", dest="cfg_budget", type=int)
    g.add_argument("--q-max", dest="cfg_q_max", type=int)
    g.add_argument("--no-write", action="store_true", help="print the report only")
    return p


def _surface_args(p: argparse.ArgumentParser, families=("rect-torus", "l-torus", "custom")) -> None:
    p.add_argument("--family", choices=families, default=families[0])
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--x", type=_x_arg, default=ProjectivePoint.parse(2.0))
    p.add_argument("--y", type=float)
    p.add_argument("--spec", help="polygon spec JSON (custom family)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="dstori", description="Singular de Sitter tori and their lightlike dynamics.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="glue a polygon and report orbits, angles, area")
    p.add_argument("family", choices=["rect-torus", "l-torus", "custom"])
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--x", type=_x_arg, default=ProjectivePoint.parse(2.0))
    p.add_argument("--y", type=float)
    p.add_argument("--spec")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("rotation", parents=[common], help="rotation numbers of first-return maps")
    _surface_args(p)
    p.add_argument("--foliation", choices=[ALPHA, BETA, "both"], default=BETA)
    p.set_defaults(func=cmd_rotation)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweeps written as CSV")
    p.add_argument("what", choices=["rotation", "surgery"])
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--x", type=_x_arg)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("realize", parents=[common], help="solve for prescribed rotation numbers")
    p.add_argument("target", choices=["rational", "irrational", "pair"])
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--rho-alpha", type=float)
    p.add_argument("--rho-beta", type=float)
    p.add_argument("--tol", dest="tol", type=float, help="target tolerance (irrational or pair)")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("trace", parents=[common], help="trace a lightlike leaf to CSV and SVG")
    _surface_args(p)
    p.add_argument("--start", type=_pair_arg, default=("2", "0"), help="x,y of the start point")
    p.add_argument("--kind", choices=[ALPHA, BETA], default=ALPHA)
    p.add_argument("--jumps", type=int, default=100)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("surgery", parents=[common], help="compose the beta return map with an automorphism")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--x", type=_x_arg, default=ProjectivePoint.parse(2.0))
    p.add_argument("--u", type=float, default=0.0)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.set_defaults(func=cmd_surgery)

    p = sub.add_parser("check", parents=[common], help="run an invariant suite")
    p.add_argument("suite", choices=["traces", "gauss-bonnet", "words", "cross-validation", "random-words", "all"])
    p.set_defaults(func=cmd_check)
    return parser


def _check_target_args(args) -> None:
    if args.command != "realize":
        return
    need = {"rational": ("p", "q"), "irrational": ("rho",), "pair": ("rho_alpha", "rho_beta")}[args.target]
    missing = [n for n in need if getattr(args, n) is None]
    if missing:
        raise ValidationError(f"realize {args.target} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "realize" and args.tol is not None:
            key = "pair_tol" if args.target == "pair" else "irrational_tol"
            cfg = RunConfig(**{**cfg.to_json(), key: args.tol})
        _check_target_args(args)
        out = Output(cfg, enabled=not args.no_write)
        rep = args.func(args, cfg, out)
    except ValidationError as exc:
        print(f"dstori: validation failed: {exc}", file=sys.stderr)
        diag = _diagnose(args)
        if diag:
            print(diag, file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetExceeded as exc:
        print(f"dstori: budget exhausted: {exc}", file=sys.stderr)
        best = exc.best
        print(dumps({"status": "budget", "best": best if isinstance(best, (dict, list, tuple)) or hasattr(best, "to_json") else repr(best)}))
        if "out" in locals():
            out.flush()
        return EXIT_BUDGET
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"dstori: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    out.flush()
    print(dumps(rep))
    if args.command == "check" and not rep["ok"]:
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
