"""Command line entry point.

Every subcommand prints one JSON document on stdout.  Exit codes: 0 success,
1 usage error, 2 computation error (or a failed reproduction), 3 budget
exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .config import ConfigError, load_config
from .lyapunov import PlanarSystem, quintic_family
from .polyalg import CANONICAL, PARAMETERS, ParseError, PolyError, parse, to_string

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_BUDGET = 0, 1, 2, 3
SCHEMA = "centerkit.system/1"
_SYSTEM_KEYS = {"schema", "P", "Q", "params", "metadata"}


class UsageError(Exception):
    pass


class SchemaError(ValueError):
    """Invalid system description; ``path`` names the offending field."""

    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


# ---------------------------------------------------------------------------
# system files


def system_from_json(data, where: str = "$") -> PlanarSystem:
    if not isinstance(data, dict):
        raise SchemaError(where, "expected a JSON object")
    extra = sorted(set(data) - _SYSTEM_KEYS)
    if extra:
        raise SchemaError(f"{where}.{extra[0]}", "unknown field")
    if "schema" in data and data["schema"] != SCHEMA:
        raise SchemaError(f"{where}.schema", f"expected {SCHEMA!r}")
    polys = {}
    for key in ("P", "Q"):
        if key not in data:
            raise SchemaError(f"{where}.{key}", "missing")
        if not isinstance(data[key], str):
            raise SchemaError(f"{where}.{key}", "expected a string")
        try:
            polys[key] = parse(data[key], CANONICAL)
        except (ParseError, PolyError) as exc:
            raise SchemaError(f"{where}.{key}", str(exc)) from None
        stray = set(polys[key].variables()) - {"x", "y", *PARAMETERS}
        if stray:
            raise SchemaError(f"{where}.{key}", f"unexpected variables {sorted(stray)}")
    sys_ = PlanarSystem(polys["P"], polys["Q"])
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError(f"{where}.params", "expected an object")
    binding = {}
    for k, v in params.items():
        if k not in PARAMETERS:
            raise SchemaError(f"{where}.params.{k}", "only a0..a5 may be bound")
        try:
            binding[k] = Fraction(str(v))
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"{where}.params.{k}", f"not a rational: {v!r}") from None
    meta = data.get("metadata", {})
    if not isinstance(meta, dict):
        raise SchemaError(f"{where}.metadata", "expected an object")
    if meta.get("family") == "quintic":
        fam = quintic_family()
        if sys_.P != fam.P or sys_.Q != fam.Q:
            raise SchemaError(f"{where}.Q", "does not have the shape of the quintic family")
    return sys_.evaluate(binding) if binding else sys_


def load_system(path: str) -> PlanarSystem:
    """Parse and validate a system description file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SchemaError("$", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"malformed JSON: {exc}") from None
    return system_from_json(data)


def _params(text: str | None):
    from .globalcenter import FamilyParameters

    return FamilyParameters.parse(text or "")


def _system_arg(args) -> PlanarSystem:
    if args.system:
        sys_ = load_system(args.system)
    else:
        sys_ = quintic_family()
    if args.at:
        sys_ = sys_.evaluate({k: v for k, v in _params(args.at).as_dict().items()
                              if k in sys_.parameters()})
    return sys_


def _point(text: str) -> tuple:
    try:
        parts = [Fraction(p.strip()) for p in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad point {text!r}") from None
    if len(parts) != 2:
        raise UsageError(f"a point needs two coordinates, got {text!r}")
    return tuple(parts)


def _seeds(text: str) -> list:
    out = []
    for chunk in text.split(";"):
        if chunk.strip():
            try:
                out.append(tuple(float(c) for c in chunk.split(",")))
            except ValueError:
                raise UsageError(f"bad seed {chunk!r}") from None
            if len(out[-1]) != 2:
                raise UsageError(f"a seed needs two coordinates, got {chunk!r}")
    if not out:
        raise UsageError("no seeds given")
    return out


def _gens(path: str) -> list:
    from .polyalg import from_json

    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError("$", f"cannot read generators from {path}: {exc}") from None
    if isinstance(data, dict) and "generators" in data:
        data = data["generators"]
    if not isinstance(data, list):
        raise SchemaError("$", "expected a list of polynomials")
    out = []
    for i, g in enumerate(data):
        try:
            out.append(parse(g) if isinstance(g, str) else from_json(g, CANONICAL))
        except (ParseError, PolyError, KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"$[{i}]", str(exc)) from None
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_lyapunov(args, cfg):
    from .lyapunov import lyapunov_constants

    seq = lyapunov_constants(_system_arg(args), args.count, reduce=args.reduce)
    return {"constants": {f"L{j}": to_string(p) for j, p in seq.entries},
            "reduced": list(seq.reduced)}


def cmd_center_check(args, cfg):
    from .globalcenter import center_check

    return center_check(_params(args.at), args.max_n or cfg.lyapunov_max_n).to_json()


def cmd_global_center(args, cfg):
    from .globalcenter import global_center_check

    return global_center_check(_params(args.at), args.mode, args.depth or cfg.desing_depth).to_json()


def cmd_compactify(args, cfg):
    from .compactify import CHARTS, chart_system, infinite_equilibria

    sys_ = _system_arg(args)
    charts = CHARTS if args.chart == "all" else (args.chart,)
    out = {"charts": [chart_system(sys_, c).to_json() for c in charts]}
    if not sys_.parameters():
        inf = infinite_equilibria(sys_)
        out["infinite_equilibria"] = [{"chart": p.chart, "x": p.coordinate_json(),
                                       "multiplicity": p.multiplicity} for p in inf]
        out["line_of_equilibria"] = inf.line_of_equilibria
    return out


def cmd_classify(args, cfg):
    from .compactify import chart_system
    from .desing import classify, resolve_local_portrait

    sys_ = _system_arg(args)
    if args.chart:
        sys_ = chart_system(sys_, args.chart).system
    marks = json.loads(args.marks) if args.marks else None
    pt = _point(args.point)
    if args.resolve:
        rep = resolve_local_portrait(sys_, pt, args.depth or cfg.desing_depth, marks=marks)
    else:
        rep = classify(sys_, pt, marks=marks)
    return rep.to_json()


def cmd_ideal(args, cfg):
    from .ideals import (Budget, MonomialOrder, buchberger, ideal_member, intersect,
                         is_in_radical)

    gens = _gens(args.gens)
    order = MonomialOrder(args.order)
    budget = Budget(cfg.gb_steps, args.budget if args.budget is not None else cfg.gb_seconds)
    if args.action == "gb":
        gb = buchberger(gens, order, budget)
        return {"basis": [to_string(g) for g in gb.generators], "order": order.to_json(),
                "steps": gb.steps}
    if args.action == "intersect":
        if not args.gens2:
            raise UsageError("intersect needs --gens2")
        return {"generators": [to_string(g) for g in intersect(gens, _gens(args.gens2), budget=budget)]}
    if not args.poly:
        raise UsageError(f"{args.action} needs --poly")
    p = parse(args.poly)
    if args.action == "member":
        return {"member": ideal_member(p, gens, order, budget)}
    return {"in_radical": is_in_radical(p, gens, order, budget)}


def cmd_portrait(args, cfg):
    from .portrait import RenderSpec, render_disc

    spec = RenderSpec(_seeds(args.seeds), tol=args.tol or cfg.integration_tol,
                      max_steps=args.max_steps or cfg.integration_steps, scale=args.scale,
                      out=args.out, both_directions=not args.forward_only)
    svg, traces = render_disc(_system_arg(args), spec)
    out = {"out": args.out, "bytes": len(svg.encode()),
           "orbits": [[t.to_json() for t in runs] for runs in traces]}
    if args.out is None:
        out["svg"] = svg
    if any(t.verdict == "budget" for runs in traces for t in runs):
        out["_exit"] = EXIT_BUDGET
    return out


def cmd_reproduce(args, cfg):
    from . import reproduce

    if args.list:
        return {"targets": reproduce.list_targets()}
    if not args.target:
        raise UsageError("reproduce needs --target NAME or --list")
    names = list(reproduce.TARGETS) if args.target == "all" else [args.target]
    results = []
    for name in names:
        if name not in reproduce.TARGETS:
            raise UsageError(f"unknown target {name!r}; see reproduce --list")
        results.append(reproduce.run(name, cfg, garbled_t3=args.garbled_t3))
    out = results[0] if len(results) == 1 else {"results": results}
    if any(r["ok"] is False for r in results):
        out["_exit"] = EXIT_COMPUTE
    return out


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="centerkit", description="Centers and global centers of planar polynomial systems.")
    p.add_argument("--config", help="JSON file with budget overrides")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def with_system(sp):
        sp.add_argument("--system", help="system description JSON (default: the quintic family)")
        sp.add_argument("--at", help="parameter values such as a3=-1,a5=-1")

    s = sub.add_parser("lyapunov", help="Lyapunov constants")
    with_system(s)
    s.add_argument("--count", type=int, default=9)
    s.add_argument("--reduce", action="store_true")
    s.set_defaults(fn=cmd_lyapunov)

    s = sub.add_parser("center-check", help="center verdict for the family")
    s.add_argument("--at", required=True)
    s.add_argument("--max-n", type=int)
    s.set_defaults(fn=cmd_center_check)

    s = sub.add_parser("global-center", help="global center verdict for the family")
    s.add_argument("--at", required=True)
    s.add_argument("--mode", choices=("theorem", "pipeline"), default="theorem")
    s.add_argument("--depth", type=int)
    s.set_defaults(fn=cmd_global_center)

    s = sub.add_parser("compactify", help="chart systems at infinity")
    with_system(s)
    s.add_argument("--chart", choices=("U1", "U2", "V1", "V2", "all"), default="all")
    s.set_defaults(fn=cmd_compactify)

    s = sub.add_parser("classify", help="classify an equilibrium")
    with_system(s)
    s.add_argument("--chart", choices=("U1", "U2", "V1", "V2"))
    s.add_argument("--point", default="0,0")
    s.add_argument("--resolve", action="store_true", help="blow up degenerate points")
    s.add_argument("--depth", type=int)
    s.add_argument("--marks", help='JSON object label -> curve, e.g. {"infinity": "y"}')
    s.set_defaults(fn=cmd_classify)

    s = sub.add_parser("ideal", help="Groebner basis computations")
    s.add_argument("action", choices=("gb", "member", "radical", "intersect"))
    s.add_argument("--gens", required=True)
    s.add_argument("--gens2")
    s.add_argument("--poly")
    s.add_argument("--order", choices=("lex", "degrevlex"), default="degrevlex")
    s.add_argument("--budget", type=float, help="seconds")
    s.set_defaults(fn=cmd_ideal)

    s = sub.add_parser("portrait", help="Poincare disc SVG")
    with_system(s)
    s.add_argument("--seeds", required=True, help='"x,y;x,y;..."')
    s.add_argument("--out")
    s.add_argument("--tol", type=float)
    s.add_argument("--max-steps", type=int)
    s.add_argument("--scale", type=float, default=1.0)
    s.add_argument("--forward-only", action="store_true")
    s.set_defaults(fn=cmd_portrait)

    s = sub.add_parser("reproduce", help="recompute displayed results")
    s.add_argument("--target")
    s.add_argument("--list", action="store_true")
    s.add_argument("--garbled-t3", action="store_true", help="allow the garbled T3 fixture")
    s.set_defaults(fn=cmd_reproduce)
    return p


def _emit(obj, stream) -> None:
    json.dump(obj, stream, indent=2, sort_keys=True, default=str)
    stream.write("\n")


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    from .globalcenter import GlobalCenterError
    from .ideals import BudgetExhausted
    from .portrait import PortraitError

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "fn", None):
            raise UsageError("missing subcommand")
        cfg = load_config(args.config)
        out = args.fn(args, cfg)
    except UsageError as exc:
        stderr.write(parser.format_usage())
        _emit({"error": "usage", "message": str(exc)}, stdout)
        return EXIT_USAGE
    except BudgetExhausted as exc:
        _emit({"error": "budget", "message": str(exc)}, stdout)
        return EXIT_BUDGET
    except SchemaError as exc:
        _emit({"error": "schema", "path": exc.path, "message": str(exc)}, stdout)
        return EXIT_COMPUTE
    except (ConfigError, GlobalCenterError, PortraitError, ParseError, PolyError, ValueError,
            ArithmeticError, KeyError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, stdout)
        return EXIT_COMPUTE
    code = out.pop("_exit", EXIT_OK) if isinstance(out, dict) else EXIT_OK
    _emit(out, stdout)
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
