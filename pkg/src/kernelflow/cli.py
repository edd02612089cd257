"""``kernelflow`` command line: classify | unfold | portrait | verify.

JSON goes to stdout, diagnostics to stderr.  Exit codes: 0 success, 1 failed
verification, 2 usage or parse error, 3 codimension not stable at the
working order.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from kernelflow import __version__
from kernelflow.classifier import NOT_IN_CATALOG, classify
from kernelflow.forms import OneForm, field_of_form
from kernelflow.jet import JetError
from kernelflow.parse import ParseError, parse_expr
from kernelflow.unfolding import (UnfoldingError, UnfoldingFamily, build_unfolding,
                                  check_transversality, parse_parameters, unfold_germ)

SCHEMA_VERSION = 1
DEFAULT_ORDER = 12

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_UNSTABLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def default_order() -> int:
    env = os.environ.get("KERNELFLOW_ORDER")
    if env is None:
        return DEFAULT_ORDER
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"KERNELFLOW_ORDER must be an integer, got {env!r}") from None


def split_pair(text: str) -> tuple[str, str]:
    """Split ``"P,Q"`` on the one comma outside parentheses."""
    depth, cut = 0, []
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            cut.append(i)
    if len(cut) != 1:
        raise ParseError("a form is written as 'P,Q' with exactly one top-level comma",
                         cut[1] if len(cut) > 1 else len(text), text)
    i = cut[0]
    return text[:i], text[i + 1:]


def read_form(args, order: int) -> tuple[OneForm, dict]:
    if args.dg is not None:
        # one extra order so that dg is known to the working order
        g = parse_expr(args.dg, order + 1)
        return OneForm.exact(g), {"dg": args.dg}
    P, Q = split_pair(args.form)
    return OneForm(parse_expr(P, order), parse_expr(Q, order)), {"form": {"P": P.strip(), "Q": Q.strip()}}


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def analyze(args, with_family: bool) -> tuple[dict, int]:
    order = args.order
    if order < 2:
        raise UsageError("--order must be at least 2")
    a, form_echo = read_form(args, order)
    f = parse_expr(args.f, order)
    nf = classify(a, f)
    cr = nf.codim_result
    warnings = list(nf.notes)
    code = EXIT_OK
    if not cr.is_finite:
        code = EXIT_UNSTABLE
    if cr.codim == 0:
        warnings.append("no bifurcations: codimension 0")
    family = None
    if with_family and cr.is_finite:
        try:
            F = build_unfolding(nf, a) if nf.cls != NOT_IN_CATALOG else unfold_germ(f, a)
            if nf.cls == NOT_IN_CATALOG:
                warnings.append("family built from the input germ, not a catalog model")
            family = dict(F.to_json(), describe=F.describe(), transversal=check_transversality(F))
        except UnfoldingError as exc:
            warnings.append(f"no family: {exc}")
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "kernelflow", "version": __version__},
        "input": dict(form_echo, f=args.f, order=order),
        "form": a.truncate(min(a.order, order)).to_json(),
        "field": field_of_form(a).to_json(),
        "codim": cr.to_json(),
        "normal_form": dict(nf.to_json(), label=nf.label),
        "family": family,
        "warnings": warnings,
    }
    return report, code


def cmd_classify(args) -> int:
    report, code = analyze(args, with_family=False)
    sys.stdout.write(_dumps(report))
    return code


def cmd_unfold(args) -> int:
    report, code = analyze(args, with_family=True)
    sys.stdout.write(_dumps(report))
    return code


def _load_family(args) -> tuple[UnfoldingFamily, tuple, float | None]:
    from kernelflow.portrait import FIGURES

    if args.preset:
        pre = FIGURES[args.preset]
        return pre.family(args.order), tuple((v,) for v in pre.c), pre.window
    if args.family_from:
        data = json.loads(Path(args.family_from).read_text())
        fam = data.get("family", data) if "base" not in data else data
        if not fam:
            raise UsageError(f"{args.family_from} holds no unfolding family")
        return UnfoldingFamily.from_json(fam), (), None
    if args.f is None or (args.form is None and args.dg is None):
        raise UsageError("portrait needs --preset, --family-from, or --form/--dg with --f")
    report, code = analyze(args, with_family=True)
    if report["family"] is None:
        raise UsageError("input has no unfolding family to render")
    return UnfoldingFamily.from_json(report["family"]), (), None


def cmd_portrait(args) -> int:
    from kernelflow.portrait import PortraitError, PortraitSpec, build_scene, render_svg, topology, write_csv

    F, preset_c, preset_window = _load_family(args)
    window = args.window if args.window is not None else (preset_window or 0.5)
    if window <= 0:
        raise UsageError("--window must be positive")
    if args.c:
        grid = [tuple(parse_parameters(text)) for text in args.c]
    else:
        grid = list(preset_c) or [tuple(0 for _ in F.monomials)]
    nx, ny = (int(v) for v in args.seeds.split(","))
    try:
        spec = PortraitSpec(window=(window, window), seed_grid=(nx, ny), step=args.step,
                            max_steps=args.max_steps)
    except PortraitError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    panels = []
    for i, c in enumerate(grid):
        if len(c) != len(F.monomials):
            raise UsageError(f"family has {len(F.monomials)} parameters, --c gave {len(c)}")
        scene = build_scene(F, c, spec)
        svg = render_svg(scene, out / f"panel_{i:02d}.svg")
        csv_path = write_csv(scene, out / f"panel_{i:02d}.csv")
        panels.append({"c": [str(v) for v in c], "svg": svg.name, "csv": csv_path.name,
                       "topology": topology(scene)})
    manifest = {"schema_version": SCHEMA_VERSION,
                "tool": {"name": "kernelflow", "version": __version__},
                "family": F.describe(), "window": window, "step": args.step,
                "max_steps": args.max_steps, "panels": panels}
    (out / "manifest.json").write_text(_dumps(manifest))
    sys.stdout.write(_dumps(manifest))
    return EXIT_OK


def cmd_verify(args) -> int:
    from kernelflow import verify

    if args.list:
        for name in verify.CHECKS:
            print(name)
        return EXIT_OK
    return EXIT_VERIFY if verify.run() else EXIT_OK


def _add_inputs(p: argparse.ArgumentParser, required: bool):
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--form", metavar="P,Q", help="the 1-form P dx + Q dy as two expressions")
    src.add_argument("--dg", metavar="G", help="use the closed form dG")
    p.add_argument("--f", required=required, metavar="EXPR", help="multiplier f of the field f X_a")
    p.add_argument("--order", type=int, default=None,
                   help=f"truncation order N (default {DEFAULT_ORDER}, or $KERNELFLOW_ORDER)")


def build_parser() -> argparse.ArgumentParser:
    from kernelflow.portrait import FIGURES

    parser = argparse.ArgumentParser(
        prog="kernelflow",
        description="Normal forms and unfoldings of planar fields f X_a in the kernel of a 1-form a.",
        epilog="Contact orders start at 0: a curve transverse to the leaf is RegularCurve(0).")
    parser.add_argument("--version", action="version", version=f"kernelflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="report codimension and normal form")
    _add_inputs(p, True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("unfold", help="classify and build a transversal unfolding")
    _add_inputs(p, True)
    p.set_defaults(func=cmd_unfold)

    p = sub.add_parser("portrait", help="render phase portraits of an unfolding family")
    _add_inputs(p, False)
    p.add_argument("--family-from", metavar="JSON", help="report written by 'unfold' (or a bare family)")
    p.add_argument("--preset", choices=sorted(FIGURES), help="one of the built-in figure families")
    p.add_argument("--c", action="append", metavar="V1,V2,...",
                   help="parameter vector for one panel; repeat for a sweep")
    p.add_argument("--window", type=float, default=None, help="half-width of the square window")
    p.add_argument("--step", type=float, default=1e-2)
    p.add_argument("--max-steps", type=int, default=4000)
    p.add_argument("--seeds", default="7,7", metavar="NX,NY")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_portrait)

    p = sub.add_parser("verify", help="run the built-in identity suite")
    p.add_argument("--list", action="store_true", help="only print the check names")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "order", None) is None and args.command != "verify":
            args.order = default_order()
        return args.func(args)
    except ParseError as exc:
        print(f"kernelflow: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, UnfoldingError, JetError, ValueError) as exc:
        print(f"kernelflow: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"kernelflow: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
