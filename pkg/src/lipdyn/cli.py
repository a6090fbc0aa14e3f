"""Command-line front end: ``lipdyn {orbit,classify,analyze,sweep}``.

Single analyses print JSON, orbits and sweeps print CSV. Floats are written
with 17 significant digits so every double round-trips. Exit codes: 0 ok,
1 usage/parse/config error, 2 numerical condition (orbit escape).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from lipdyn.dsl import MapDefinition, parse_map
from lipdyn.errors import DSLError, IoError, LipdynError
from lipdyn.lipschitz import (
    NeighborhoodSpec, classify_fixed_point, classify_fixed_point_smooth, classify_periodic_orbit,
)
from lipdyn.lyapunov import ESCAPED, SkipPolicy, classify_chaos, lyapunov_number
from lipdyn.maps import FAMILY_PARAMETERS, ParamFamily, ScalarMap, builtin, from_dsl
from lipdyn.orbit import find_fixed_points, iterate, polish_fixed_point, refine_periodic_orbit

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    map_source: Optional[str]
    x0: float = 0.3
    iters: int = 100
    burn_in: int = 0
    seed: int = 0
    period_tol: float = 1e-8
    fp_tol: float = 1e-10
    margin: float = 0.05
    radius: float = 1e-2
    max_period: int = 64
    skip_mode: str = "skip"
    fmt: str = "json"
    out: Optional[str] = None

    def validate(self):
        if not self.map_source:
            raise UsageError("--map is required")
        for name in ("period_tol", "fp_tol", "margin", "radius"):
            if not getattr(self, name) > 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.iters < 1:
            raise UsageError("--iters must be >= 1")
        if self.burn_in < 0:
            raise UsageError("--burn-in must be >= 0")


@dataclass
class SweepSpec:
    family: str
    param: str
    start: float
    stop: float
    steps: int
    fixed: dict = field(default_factory=dict)
    config: RunConfig = field(default_factory=lambda: RunConfig(map_source=None))

    def validate(self):
        if self.family not in FAMILY_PARAMETERS:
            raise UsageError(f"unknown family {self.family!r}")
        if self.param not in FAMILY_PARAMETERS[self.family]:
            raise UsageError(f"family {self.family!r} has no parameter {self.param!r}")
        if not self.start < self.stop:
            raise UsageError("--from must be smaller than --to")
        if self.steps < 2:
            raise UsageError("--steps must be >= 2")

    def values(self) -> list[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]


# ---------------------------------------------------------------- output


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _json(obj, indent=0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json(str(k))}: {_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _json(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with 17-significant-digit floats; non-finite floats become null."""
    return _json(obj) + "\n"


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return v


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- maps


def load_map_file(path: str) -> MapDefinition:
    """Read and parse a ``.map`` file."""
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read map file {path!r}: {exc.strerror or exc}") from exc
    return parse_map(source)


def parse_builtin_spec(spec: str) -> ParamFamily:
    """``name`` or ``name:key=value,...`` (without the ``builtin:`` prefix)."""
    name, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise UsageError(f"malformed builtin parameter {item!r} (expected key=value)")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"parameter {key!r} is not a number: {value!r}") from None
    return ParamFamily(name.strip(), params)


def resolve_map(source: str) -> ScalarMap:
    if source.startswith("builtin:"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return builtin(parse_builtin_spec(source[len("builtin:"):]))
    try:
        return from_dsl(load_map_file(source))
    except DSLError as exc:
        raise UsageError(f"{source}:{exc.line}:{exc.column}: {exc.message}") from exc


# ---------------------------------------------------------------- commands


def cmd_orbit(cfg: RunConfig) -> tuple[int, str]:
    f = resolve_map(cfg.map_source)
    orbit = iterate(f, cfg.x0, cfg.iters, cfg.burn_in)
    first = cfg.burn_in + 1
    records = [(first + i, x) for i, x in enumerate(orbit.samples)]
    if cfg.fmt == "csv":
        text = _csv_text(["index", "x"], records)
    else:
        text = dumps({
            "command": "orbit",
            "map": f.label,
            "x0": float(cfg.x0),
            "burn_in": cfg.burn_in,
            "escaped": orbit.escaped,
            "records": [{"index": i, "x": x} for i, x in records],
        })
    return (EXIT_NUMERIC if orbit.escaped else EXIT_OK), text


def _estimate_dict(est):
    return {
        "c_hat": est.c_hat, "r_hat": est.r_hat, "deriv_sup": est.deriv_sup,
        "deriv_inf": est.deriv_inf, "pairs_used": est.pairs_used,
    }


def _classification_dict(f: ScalarMap, p: float, cls) -> dict:
    d = cls.details
    entry = {
        "p": p,
        "residual": d.get("residual"),
        "verdict": cls.verdict.value,
        "method": cls.method,
        "margin": cls.margin,
        "c_evidence": cls.c_value,
        "c_source": cls.c_source,
        "r_evidence": cls.r_value,
        "r_source": cls.r_source,
        "monotone": d.get("monotone"),
        "at_breakpoint": d.get("at_breakpoint"),
        "estimate": _estimate_dict(cls.evidence),
        "one_sided": {
            "left_slope": d["left_slope"],
            "right_slope": d["right_slope"],
            "left_slope_range": d["left_slope_range"],
            "right_slope_range": d["right_slope_range"],
        },
    }
    if "period" in d:
        entry["period"] = d["period"]
        entry["multiplier"] = d.get("multiplier")
        oracle = d.get("oracle_verdict")
        entry["smooth_oracle"] = None if oracle is None else {
            "verdict": oracle, "derivative": d.get("multiplier")}
        return entry
    try:
        oracle = classify_fixed_point_smooth(f, p)
        entry["smooth_oracle"] = {"verdict": oracle.verdict.value,
                                  "derivative": oracle.details["derivative"]}
    except LipdynError:
        entry["smooth_oracle"] = None
    return entry


def cmd_classify(cfg: RunConfig, point: Optional[float] = None, auto: bool = False,
                 interval=(0.0, 1.0), grid_n: int = 1000, period: int = 1) -> tuple[int, str]:
    f = resolve_map(cfg.map_source)
    if auto:
        points = [c.p for c in find_fixed_points(f, interval, grid_n, cfg.fp_tol)]
    elif point is not None:
        points = [float(point)] if period > 1 else [polish_fixed_point(f, point)]
    else:
        raise UsageError("classify needs --point or --auto")

    results = []
    for p in points:
        if period > 1:
            cycle = refine_periodic_orbit(f, period, p, min(cfg.fp_tol, 1e-12))
            cls = classify_periodic_orbit(f, cycle, cfg.radius, cfg.margin, rng_seed=cfg.seed)
            entry = _classification_dict(f, cycle[0], cls)
            entry["cycle"] = list(cycle)
        else:
            nbhd = NeighborhoodSpec(p, cfg.radius, rng_seed=cfg.seed)
            entry = _classification_dict(f, p, classify_fixed_point(f, p, nbhd, cfg.margin))
        results.append(entry)

    if cfg.fmt == "csv":
        rows = [(r["p"], r["verdict"], r["method"], r["c_evidence"], r["c_source"],
                 r["r_evidence"], r["r_source"],
                 (r["smooth_oracle"] or {}).get("verdict", "")) for r in results]
        text = _csv_text(["p", "verdict", "method", "c_evidence", "c_source", "r_evidence",
                          "r_source", "oracle_verdict"], rows)
    else:
        text = dumps({
            "command": "classify",
            "map": f.label,
            "map_notes": list(f.notes),
            "margin": cfg.margin,
            "radius": cfg.radius,
            "seed": cfg.seed,
            "results": results,
        })
    return EXIT_OK, text


def analyze_report(f: ScalarMap, cfg: RunConfig) -> dict:
    report = classify_chaos(f, cfg.x0, cfg.iters, cfg.burn_in, cfg.max_period,
                            SkipPolicy(cfg.skip_mode), cfg.period_tol)
    est = report.exponent
    if est.status == ESCAPED:
        big_l, flagged = None, True
    else:
        big_l, flagged = lyapunov_number(est)
    det = report.asymptotically_periodic
    return {
        "command": "analyze",
        "map": f.label,
        "map_notes": list(f.notes),
        "x0": float(cfg.x0),
        "iters": cfg.iters,
        "burn_in": cfg.burn_in,
        "h_n": est.h_n,
        "L": big_l,
        "L_flagged": flagged,
        "status": est.status,
        "n_used": est.n_used,
        "skipped": est.skipped,
        "bounded": report.bounded,
        "period": det.period if det else None,
        "cycle": list(det.cycle) if det else None,
        "chaotic": report.chaotic,
        "float_artifact": report.float_artifact,
        "notes": list(report.notes),
    }


def cmd_analyze(cfg: RunConfig) -> tuple[int, str]:
    f = resolve_map(cfg.map_source)
    rep = analyze_report(f, cfg)
    if cfg.fmt == "csv":
        keys = ["h_n", "L", "status", "n_used", "skipped", "period", "chaotic", "float_artifact"]
        row = ["" if rep[k] is None else rep[k] for k in keys]
        text = _csv_text(keys, [row])
    else:
        text = dumps(rep)
    return (EXIT_NUMERIC if not rep["bounded"] else EXIT_OK), text


def _sweep_point(args):
    family, params, cfg, value = args
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            f = builtin(ParamFamily(family, params))
        rep = classify_chaos(f, cfg.x0, cfg.iters, cfg.burn_in, cfg.max_period,
                             SkipPolicy(cfg.skip_mode), cfg.period_tol)
        det = rep.asymptotically_periodic
        return [value, rep.exponent.h_n, rep.exponent.status,
                det.period if det else "", not rep.bounded]
    except (LipdynError, ValueError, ArithmeticError) as exc:
        return [value, math.nan, f"error: {exc}", "", ""]


def cmd_sweep(spec: SweepSpec, jobs: int = 1) -> tuple[int, str]:
    spec.validate()
    cfg = spec.config
    tasks = []
    for i, value in enumerate(spec.values()):
        params = dict(spec.fixed, **{spec.param: value})
        # per-point seed: the run seed xor the step index
        point_cfg = RunConfig(**{**cfg.__dict__, "seed": cfg.seed ^ i})
        tasks.append((spec.family, params, point_cfg, value))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    header = ["param", "h_n", "status", "detected_period", "escaped"]
    if cfg.fmt == "json":
        text = dumps({
            "command": "sweep",
            "family": spec.family,
            "parameter": spec.param,
            "rows": [{k: (None if v == "" else v) for k, v in zip(header, r)} for r in rows],
        })
    else:
        text = _csv_text(header, rows)
    return EXIT_OK, text


# ---------------------------------------------------------------- argparse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}") from None
    return lo, hi


def _assignments(text: str) -> dict:
    return parse_builtin_spec("_:" + text).params


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", dest="map_source",
                        help="path to a .map file or builtin:NAME[:key=value,...]")
    common.add_argument("--x0", type=float, default=0.3, help="initial value (default 0.3)")
    common.add_argument("--iters", type=int, help="number of iterates kept")
    common.add_argument("--burn-in", type=int, help="iterates discarded first")
    common.add_argument("--seed", type=int, default=0, help="sampling seed (default 0)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"))
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--period-tol", type=float, default=1e-8)
    common.add_argument("--fp-tol", type=float, default=1e-10)
    common.add_argument("--margin", type=float, default=0.05)
    common.add_argument("--radius", type=float, default=1e-2)
    common.add_argument("--max-period", type=int, default=64)
    common.add_argument("--skip-mode", choices=("skip", "perturb", "fail"), default="skip")

    parser = _Parser(prog="lipdyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("orbit", parents=[common], help="print orbit iterates")

    p = sub.add_parser("classify", parents=[common], help="classify fixed points / cycles")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--point", type=float, help="fixed point (or cycle seed with --period)")
    g.add_argument("--auto", action="store_true", help="locate fixed points on --interval")
    p.add_argument("--interval", type=_pair, default=(0.0, 1.0),
                   help="LO,HI search interval for --auto (use --interval=-2,3 for negatives)")
    p.add_argument("--grid-n", type=int, default=1000)
    p.add_argument("--period", type=int, default=1, help="classify the k-cycle through --point")

    sub.add_parser("analyze", parents=[common], help="Lyapunov exponent and chaos report")

    p = sub.add_parser("sweep", parents=[common], help="exponent/period dataset over a parameter")
    p.add_argument("--family", required=True, choices=sorted(FAMILY_PARAMETERS))
    p.add_argument("--param", required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--set", dest="fixed", type=_assignments, default={},
                   help="other family parameters, key=value,...")
    p.add_argument("--jobs", type=int, default=1)
    return parser


_DEFAULTS = {
    # command: (iters, burn_in, format)
    "orbit": (100, 0, "csv"),
    "classify": (100, 0, "json"),
    "analyze": (100_000, 1000, "json"),
    "sweep": (10_000, 1000, "csv"),
}


def _config(ns) -> RunConfig:
    iters, burn_in, fmt = _DEFAULTS[ns.command]
    return RunConfig(
        map_source=ns.map_source,
        x0=ns.x0,
        iters=ns.iters if ns.iters is not None else iters,
        burn_in=ns.burn_in if ns.burn_in is not None else burn_in,
        seed=ns.seed,
        period_tol=ns.period_tol,
        fp_tol=ns.fp_tol,
        margin=ns.margin,
        radius=ns.radius,
        max_period=ns.max_period,
        skip_mode=ns.skip_mode,
        fmt=ns.fmt or fmt,
        out=ns.out,
    )


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = _config(ns)
    try:
        if ns.command == "sweep":
            if cfg.map_source:
                raise UsageError("sweep takes --family, not --map")
            cfg.map_source = f"builtin:{ns.family}"
            cfg.validate()
            spec = SweepSpec(ns.family, ns.param, ns.start, ns.stop, ns.steps, ns.fixed, cfg)
            code, text = cmd_sweep(spec, ns.jobs)
        else:
            cfg.validate()
            if ns.command == "orbit":
                code, text = cmd_orbit(cfg)
            elif ns.command == "classify":
                if ns.period < 1:
                    raise UsageError("--period must be >= 1")
                code, text = cmd_classify(cfg, ns.point, ns.auto, ns.interval, ns.grid_n,
                                          ns.period)
            else:
                code, text = cmd_analyze(cfg)
        _emit(text, cfg.out)
        return code
    except (UsageError, LipdynError, ValueError) as exc:
        print(f"lipdyn {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
