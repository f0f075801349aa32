"""``abelos`` command-line interface.

Exit status: 0 ok, 2 validation error, 3 cap exceeded, 4 bound violation.
Every numeric output comes from integer or exact quadratic arithmetic.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

from .bounds import (
    BoundInput,
    Objective,
    bound_general,
    bound_haloui,
    bound_simple,
    closed_form_max,
    polygon_max_bruteforce,
)
from .curves import Genus2CurveModel, count_report, parse_curve
from .errors import AbelosError, InvalidInput
from .ff import prime_power
from .isogeny import SurfaceWeilData, WeilRestrictionMeta, classify_no_low_genus, weil_restriction
from .productlab import build_code, check_against_bounds, measure
from .search import ALL_TRACES, EXPLICIT_TRACES, RESTRICTION_TRACES, SearchGrid, run_search, to_csv


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _need(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise InvalidInput("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _int_list(text) -> list[int]:
    """'3,5,7' or '3-6' or a JSON list."""
    if isinstance(text, list):
        return [int(v) for v in text]
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        span = re.fullmatch(r"(-?\d+)-(-?\d+)", part)
        if span:
            out.extend(range(int(span[1]), int(span[2]) + 1))
        else:
            out.append(int(part))
    return out


def _load_json_arg(value):
    if value is None or isinstance(value, dict):
        return value
    path = Path(value)
    if path.exists():
        return json.loads(path.read_text())
    return json.loads(value)


def _surface(args) -> tuple[SurfaceWeilData, WeilRestrictionMeta | None]:
    """Weil data from --q/--t1/--t2, --weil-restriction --q --tr-e, or a genus-2 --curve."""
    if getattr(args, "curve", None) is not None:
        curve = parse_curve(_load_json_arg(args.curve))
        if not isinstance(curve, Genus2CurveModel):
            raise InvalidInput("classification needs a genus-2 curve (its Jacobian is the surface)")
        return count_report(curve).weil, None
    if getattr(args, "weil_restriction", False):
        _need(args, "q", "tr_e")
        p = prime_power(args.q)[0]
        return weil_restriction(args.q, args.tr_e), WeilRestrictionMeta(p, args.q, args.tr_e)
    _need(args, "q", "t1", "t2")
    return SurfaceWeilData(args.q, args.t1, args.t2), None


def _add_surface_opts(sp, curve: bool = False) -> None:
    sp.add_argument("--q", type=int)
    sp.add_argument("--t1", type=int)
    sp.add_argument("--t2", type=int)
    sp.add_argument("--weil-restriction", action="store_true", help="surface is Res(E) for E over F_{q^2}")
    sp.add_argument("--tr-e", type=int, help="trace of E over F_{q^2} (with --weil-restriction)")
    if curve:
        sp.add_argument("--curve", help="genus-2 curve JSON (inline or file)")


def cmd_classify(args) -> int:
    W, meta = _surface(args)
    rep = classify_no_low_genus(W, meta)
    out = rep.to_json()
    out["case"] = rep.case
    _emit(out)
    return 0


def _bound_input(args) -> BoundInput:
    W, meta = _surface(args)
    _need(args, "r")
    cls = classify_no_low_genus(W, meta)
    unsafe = args.unsafe_ell and not cls.grants(args.ell)
    return BoundInput.from_weil(W, args.h2, args.r, ell=args.ell, galois_degree=args.e, license=cls, unsafe=unsafe)


def cmd_bound(args) -> int:
    inp = _bound_input(args)
    general = bound_general(inp)
    out = bound_simple(inp, sharpened=args.sharpened).to_json()
    out["d_general"] = general.d_lower
    out["rule"] = inp.license.rule
    if inp.H2 == 2 and inp.ell == 1:
        out["d_haloui"] = bound_haloui(inp).d_lower
    _emit(out)
    return 0


def cmd_phi_max(args) -> int:
    W, _ = _surface(args)
    _need(args, "r")
    inp = BoundInput.from_weil(W, args.h2, args.r, ell=args.ell, unsafe=True)
    pm = polygon_max_bruteforce(inp, Objective(args.objective))
    closed = closed_form_max(inp)
    _emit(
        {
            "objective": Objective(args.objective).value,
            "value": str(pm.value),
            "value_decimal": pm.value.decimal(6),
            "argmax": list(pm.argmax),
            "points": pm.points,
            "closed_form": str(closed),
            "closed_form_decimal": closed.decimal(6),
            "closed_form_dominates": closed >= pm.value,
        }
    )
    return 0


def cmd_count(args) -> int:
    _need(args, "curve")
    curve = parse_curve(_load_json_arg(args.curve))
    _emit(count_report(curve, tuple(_int_list(args.degrees))).to_json())
    return 0


def cmd_lab(args) -> int:
    _need(args, "curve1", "curve2")
    E1 = parse_curve(_load_json_arg(args.curve1))
    E2 = parse_curve(_load_json_arg(args.curve2))
    code = build_code(E1, E2, args.r, args.mode)
    meas = measure(code, exact=args.exact)
    rep = check_against_bounds(code, meas)
    out = rep.to_json()
    out["injectivity_log"] = meas.injectivity_log
    if args.dump_generator:
        Path(args.dump_generator).write_text(code.format_generator() + "\n")
        out["generator_file"] = args.dump_generator
    _emit(out)
    return 0


def _grid(args) -> SearchGrid:
    _need(args, "qs")
    explicit = []
    if args.traces == EXPLICIT_TRACES:
        _need(args, "pairs")
        for item in str(args.pairs).split(","):
            if item.strip():
                t1, t2 = item.split(":")
                explicit.append((int(t1), int(t2)))
    return SearchGrid(
        qs=_int_list(args.qs),
        trace_source=args.traces,
        explicit=explicit,
        rs=_int_list(args.rs),
        ells=_int_list(args.ells),
        h2=args.h2,
        unsafe=args.ell_policy == "unsafe",
    )


def cmd_search(args) -> int:
    rows = run_search(_grid(args), jobs=args.jobs)
    text = to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.figures:
        from .plotting import render_report_figures

        for path in render_report_figures(rows, Path(args.figures)):
            print(f"# figure {path}", file=sys.stderr)
    return 0


def cmd_report(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = run_search(_grid(args), jobs=args.jobs)
    (outdir / "search.csv").write_text(to_csv(rows))
    from .plotting import render_report_figures

    figures = render_report_figures(rows, outdir)
    _emit({"rows": len(rows), "csv": str(outdir / "search.csv"), "figures": [str(p) for p in figures]})
    return 0


def cmd_verify(args) -> int:
    from .verify import run_suite

    echo = None if args.json else print
    results = run_suite(args.suite, echo=echo)
    ok = all(r.passed for r in results)
    if args.json:
        _emit({"suite": args.suite, "passed": ok, "checks": [r.to_json() for r in results]})
    else:
        print(f"{'OK' if ok else 'FAILED'}: {sum(r.passed for r in results)}/{len(results)} checks passed")
    return 0 if ok else 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abelos", description="Evaluation codes on abelian surfaces over finite fields.")
    parser.add_argument("--config", help="JSON file whose keys supply option defaults (and optionally 'command')")
    sub = parser.add_subparsers(dest="command")

    sp = sub.add_parser("classify", help="classify an isogeny class")
    _add_surface_opts(sp, curve=True)
    sp.set_defaults(func=cmd_classify)

    def bound_opts(sp):
        _add_surface_opts(sp)
        sp.add_argument("--h2", type=int, default=2)
        sp.add_argument("--r", type=int)
        sp.add_argument("--ell", type=int, default=1)

    sp = sub.add_parser("bound", help="minimum-distance lower bounds")
    bound_opts(sp)
    sp.add_argument("--e", type=int, default=1, help="Galois degree over which H splits")
    sp.add_argument("--sharpened", action="store_true")
    sp.add_argument("--unsafe-ell", action="store_true", help="allow an unlicensed ell; output is watermarked")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("phi-max", help="lattice-point max of the zero-count objective")
    bound_opts(sp)
    sp.add_argument("--objective", choices=[o.value for o in Objective], default=Objective.THEOREM_PHI.value)
    sp.set_defaults(func=cmd_phi_max)

    sp = sub.add_parser("count", help="point counts and zeta data of a curve")
    sp.add_argument("--curve")
    sp.add_argument("--degrees", default="1,2")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("lab", help="build and measure a code on E1 x E2")
    sp.add_argument("--curve1")
    sp.add_argument("--curve2")
    sp.add_argument("--r", type=int, default=3)
    sp.add_argument("--mode", choices=["punctured", "full"], default="punctured")
    sp.add_argument("--exact", action="store_true", help="enumerate every codeword")
    sp.add_argument("--dump-generator", metavar="PATH")
    sp.set_defaults(func=cmd_lab)

    def grid_opts(sp):
        sp.add_argument("--qs", "--q", dest="qs", help="list such as 16 or 4,8,16")
        sp.add_argument("--traces", choices=[RESTRICTION_TRACES, ALL_TRACES, EXPLICIT_TRACES], default=RESTRICTION_TRACES)
        sp.add_argument("--pairs", help="explicit t1:t2 pairs, comma separated")
        sp.add_argument("--rs", "--r", dest="rs", default="3", help="list or range such as 3-6")
        sp.add_argument("--ells", default="1,2")
        sp.add_argument("--h2", type=int, default=2)
        sp.add_argument("--ell-policy", choices=["licensed", "unsafe"], default="licensed")
        sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("search", help="CSV table of bounds over a grid")
    grid_opts(sp)
    sp.add_argument("--out")
    sp.add_argument("--figures", metavar="DIR", help="also render figures into DIR")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("report", help="search CSV plus figures in one directory")
    grid_opts(sp)
    sp.add_argument("--outdir", default="abelos-report")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--suite", choices=["all", "lab-only", "fast"], default="all")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    cfg = json.loads(Path(known.config).read_text())
    command = cfg.pop("command", None)
    defaults = {k.replace("-", "_"): v for k, v in cfg.items()}
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for sp in subparsers.choices.values():
        sp.set_defaults(**defaults)
    if command and not any(a in subparsers.choices for a in argv):
        argv = argv + [command]
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help()
            return 2
        return args.func(args)
    except AbelosError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
