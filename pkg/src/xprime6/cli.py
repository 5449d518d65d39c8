"""Command-line front end.

Exit status: 0 on success, 1 when a verification step fails or a scan finds
a violation, 2 on malformed input.
"""
from __future__ import annotations

import argparse
import platform
import sys
import time
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import InputError, ResourceError
from .funcfield import format_rational, invert_j, to_fraction
from .groups import FinGroup, closure, det_surjective, subgroup_from_elements
from .modring import GL2Codec, Mat2
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

SUITES = ("groups", "symbolic", "level49", "goursat36")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def load_group_file(path, *, close: bool = True) -> FinGroup:
    """Read a group file: a ``mod <n>`` header, then one ``a,b;c,d`` per line.

    Blank lines and ``#`` comments are ignored.  With ``close=False`` the
    listed matrices must already form a group.
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    n = None
    mats: list[Mat2] = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if n is None:
            parts = text.split()
            if len(parts) != 2 or parts[0] != "mod" or not parts[1].isdigit() or int(parts[1]) < 1:
                raise InputError(f"{path}:{lineno}: expected header 'mod <n>', got {text!r}")
            n = int(parts[1])
            continue
        try:
            m = Mat2.parse(text, n)
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        if not m.is_invertible():
            raise InputError(f"{path}:{lineno}: {m} has det {m.det}, not a unit mod {n}")
        mats.append(m)
    if n is None:
        raise InputError(f"{path}: missing 'mod <n>' header")
    if close:
        return closure(mats, n)
    codec = GL2Codec(n)
    return subgroup_from_elements(codec, sorted({m.code for m in mats} | {codec.identity}))


def _parse_gens(texts: Sequence[str], n: int) -> list[Mat2]:
    mats = []
    for k, text in enumerate(texts, start=1):
        try:
            m = Mat2.parse(text, n)
        except InputError as exc:
            raise InputError(f"--gen #{k}: {exc}") from None
        if not m.is_invertible():
            raise InputError(f"--gen #{k}: {m} has det {m.det}, not a unit mod {n}")
        mats.append(m)
    return mats


def _group_from_args(args) -> FinGroup:
    if args.file:
        G = load_group_file(args.file)
        if G.modulus != args.level:
            raise InputError(f"{args.file}: modulus {G.modulus} does not match --level {args.level}")
        return G
    return closure(_parse_gens(args.gen or [], args.level), args.level)


# ---------------------------------------------------------------------------
# verbs


def _suite(name: str) -> Report:
    if name == "groups":
        from .catalog import verify_groups_suite

        return verify_groups_suite()
    if name == "symbolic":
        from .funcfield import verify_symbolic

        return verify_symbolic()
    if name == "level49":
        from .catalog import verify_level49_steps

        return verify_level49_steps()
    if name == "goursat36":
        from .catalog import verify_goursat36

        return verify_goursat36()
    raise InputError(f"unknown suite {name!r}")


def cmd_verify(args, out) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    rep = Report()
    for name in names:
        rep.extend(_suite(name))
    print(rep, file=out)
    print(f"summary: {sum(s.passed for s in rep.steps)}/{len(rep.steps)} steps passed", file=out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_model(args, out) -> int:
    from .curves import specialize_integral

    t = to_fraction(args.t)
    model = specialize_integral(t)
    E = model.curve
    line = (
        f"a={format_rational(E.a)} b={format_rational(E.b)} "
        f"disc={format_rational(E.discriminant)} j={format_rational(E.j)}"
    )
    if E.has_cm:
        line += " cm=true"
    print(line, file=out)
    return EXIT_OK


def cmd_invert_j(args, out) -> int:
    roots = sorted(invert_j(to_fraction(args.j)))
    for t in roots:
        print(f"t={format_rational(t)}", file=out)
    if not roots:
        print("none", file=out)
    return EXIT_OK


def cmd_scan(args, out) -> int:
    from .curves import CurveQ, entanglement_scan

    if args.pmax < 2:
        raise InputError(f"--pmax must be at least 2, got {args.pmax}")
    E = CurveQ.parse(args.curve)
    result = entanglement_scan(E, args.pmax)
    for rec in result.records:
        if args.all or rec.three_full:
            print(rec.line(), file=out)
    print(result.summary(), file=out)
    return EXIT_FAIL if result.violations else EXIT_OK


def cmd_classify(args, out) -> int:
    from .catalog import LEVEL, classify_mod36, is_serre_obstructed

    if args.level != LEVEL:
        raise InputError(f"classification is at level {LEVEL}, got --level {args.level}")
    H = _group_from_args(args)
    result = classify_mod36(H)
    witness = f" witness={result.witness}" if result.witness is not None else ""
    print(f"order={H.order} class={result.label}{witness}", file=out)
    if det_surjective(H):
        obstructed, reason = is_serre_obstructed({LEVEL: H})
        print(f"serre_obstructed={str(obstructed).lower()} reason={reason}", file=out)
    else:
        print("serre_obstructed=n/a reason=determinant not surjective", file=out)
    return EXIT_OK


def cmd_density(args, out) -> int:
    from .density import ImageSpec, correction_factor, hooley_delta

    H = _group_from_args(args)
    spec = ImageSpec(args.level, H)
    delta = hooley_delta(spec, args.cutoff)
    c = correction_factor(spec, args.cutoff)
    print(f"order={H.order} level={args.level}", file=out)
    print(f"delta: {delta.render()}", file=out)
    print(f"correction: C={format_rational(c.value)}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="xprime6", description="Finite and symbolic checks for curves with Q(E[2]) inside Q(E[3]).")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--meta", action="store_true", help="print run metadata (timing, platform) after the report")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.set_defaults(fn=cmd_verify)

    m = sub.add_parser("model", help="integral model of the family at t")
    m.add_argument("--t", required=True)
    m.set_defaults(fn=cmd_model)

    j = sub.add_parser("invert-j", help="rational t with j(t) = j0")
    j.add_argument("--j", required=True)
    j.set_defaults(fn=cmd_invert_j)

    s = sub.add_parser("scan", help="Frobenius sampling test of Q(E[2]) inside Q(E[3])")
    s.add_argument("--curve", required=True, help="'a,b' for y^2 = x^3 + a x + b")
    s.add_argument("--pmax", type=int, default=1000)
    s.add_argument("--all", action="store_true", help="print every good prime, not only those with full 3-torsion")
    s.set_defaults(fn=cmd_scan)

    for name, fn, helptext in (
        ("classify", cmd_classify, "classify a subgroup of GL2(Z/36)"),
        ("density", cmd_density, "cyclicity density and correction factor"),
    ):
        c = sub.add_parser(name, help=helptext)
        c.add_argument("--level", type=int, required=True)
        c.add_argument("--gen", action="append", help="generator 'a,b;c,d' (repeatable)")
        c.add_argument("--file", help="group file with a 'mod <n>' header")
        if name == "density":
            c.add_argument("--cutoff", type=int, default=100)
        c.set_defaults(fn=fn)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        code = args.fn(args, out)
    except (InputError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.meta:
        print(
            f"meta: seconds={time.perf_counter() - start:.3f} python={platform.python_version()} version={__version__}",
            file=out,
        )
    return code


if __name__ == "__main__":
    sys.exit(main())
