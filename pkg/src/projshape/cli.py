"""Command-line front end: one JSON document per invocation.

Exit codes: 0 success, 1 domain error, 2 usage or parse error. Landmark
indices are 1-based in all output. ``PROJSHAPE_TOL`` sets the rank tolerance.
"""

import argparse
import hashlib
import json
import sys
from math import gcd

from . import __version__
from .constraints import (
    SubspaceNumbers,
    constraint_flats,
    hausdorff_violations,
    is_free,
    is_maximal_numbers,
    is_splittable,
    isotropy_dimension,
    is_tyler_regular,
    satisfies_subspace_numbers,
    tyler_numbers,
)
from .core import configuration_rank, load
from .errors import InstanceTooLarge, InvalidSubspaceNumbers, InvariantViolation, ParseError, ProjShapeError
from .frames import find_frame, first_base, find_pseudo_frame, graph_of, pseudo_frame_coordinates, shape_equal
from .topology import (
    blur_sequence,
    merge_sequence,
    nonhausdorff_witness,
    random_general_position,
    random_with_constraint,
)
from .tyler import align_signs, is_standardizable, tyler_standardize

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _digest(c):
    return "sha256:" + hashlib.sha256(c.matrix.tobytes() + repr(c.matrix.shape).encode()).hexdigest()


def _numbers_arg(text):
    try:
        return SubspaceNumbers(tuple(int(x) for x in text.split(",")))
    except ValueError as exc:
        raise UsageError(f"subspace numbers must be comma-separated integers: {text!r}") from exc


def _load(path):
    try:
        return load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except InvariantViolation as exc:
        raise UsageError(f"{path}: {exc}") from exc


def cmd_analyze(args):
    c = _load(args.file)
    report = constraint_flats(c)
    out = {
        "input": {"digest": _digest(c), "d": c.d, "k": c.k},
        "rank": configuration_rank(c),
        "flats": report.to_dict()["flats"],
        "general_position": not report.has_nontrivial,
    }
    notes = []
    try:
        w = is_splittable(c)
        out["splittable"] = w is not None
        out["witness"] = None if w is None else w.to_dict()
        out["free"] = w is None
    except InstanceTooLarge as exc:
        out["splittable"] = out["witness"] = out["free"] = None
        notes.append(str(exc))
    out["isotropy_dimension"] = isotropy_dimension(c)
    out["tyler_regular"] = is_tyler_regular(c, report=report)
    out["standardizable"] = is_standardizable(c, report=report).to_dict()
    frame = find_frame(c)
    out["frame"] = None if frame is None else [i + 1 for i in frame]
    base = first_base(c)
    out["base"] = None if base is None else [i + 1 for i in base]
    out["graph"] = None if base is None else graph_of(c, base).to_dict()
    pf = find_pseudo_frame(c)
    out["pseudo_frame"] = None if pf is None else pf.to_dict()
    out["chart_dimension"] = None
    if pf is not None:
        out["chart_dimension"] = pseudo_frame_coordinates(c, pf).dimension
    if args.sn is not None:
        n = _numbers_arg(args.sn)
        if n.d != c.d:
            raise UsageError(f"expected {c.d} subspace numbers, got {n.d}")
        out["subspace_numbers"] = {
            "n": n.tolist(),
            "satisfied": satisfies_subspace_numbers(c, n, report=report),
            "hausdorff": not hausdorff_violations(n, c.d, c.k),
        }
    out["notes"] = notes
    return out


def cmd_standardize(args):
    c = _load(args.file)
    std = tyler_standardize(c, tol=args.tol, max_iter=args.max_iter)
    return {"input": {"digest": _digest(c), "d": c.d, "k": c.k}, **std.to_dict()}


def cmd_distance(args):
    a, b = _load(args.file_a), _load(args.file_b)
    if a.matrix.shape != b.matrix.shape:
        raise UsageError(f"configurations differ in size: {a.matrix.shape} vs {b.matrix.shape}")
    sa, sb = tyler_standardize(a), tyler_standardize(b)
    res = align_signs(sa, sb)
    return {
        **res.to_dict(),
        "residuals": [sa.residual, sb.residual],
        "iterations": [sa.iterations, sb.iterations],
    }


def _dk(args):
    if args.d < 1 or args.k < args.d + 3:
        raise UsageError(f"need d >= 1 and k >= d+3, got d={args.d}, k={args.k}")
    return args.d, args.k


def cmd_tyler_numbers(args):
    d, k = _dk(args)
    t = tyler_numbers(d, k)
    return {
        "t": t.tolist(),
        "hausdorff": not hausdorff_violations(t, d, k),
        "maximal": is_maximal_numbers(t, d, k),
        "gcd": gcd(k, d + 1),
    }


def cmd_check_sn(args):
    d, k = _dk(args)
    n = _numbers_arg(args.numbers)
    if n.d != d:
        raise UsageError(f"expected {d} subspace numbers, got {n.d}")
    bad = hausdorff_violations(n, d, k)
    return {
        "n": n.tolist(),
        "hausdorff": not bad,
        "violating_j": max(bad) if bad else None,
        "violations": bad,
        "maximal": None if bad else is_maximal_numbers(n, d, k),
    }


def cmd_witness(args):
    d, k = _dk(args)
    pair = nonhausdorff_witness(d, k)
    p, q = pair.p(), pair.q()
    return {
        **pair.to_dict(),
        "p_free": is_free(p),
        "q_free": is_free(q),
        "p_frame": [i + 1 for i in find_frame(p)],
        "q_frame": [i + 1 for i in find_frame(q)],
        "shape_equal": shape_equal(p, q),
    }


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def cmd_blur(args):
    return blur_sequence(_load(args.file), n_terms=args.terms).to_dict()


def cmd_merge(args):
    d, k = _dk(args)
    return merge_sequence(nonhausdorff_witness(d, k), n_terms=args.terms).to_dict()


def _constraint_arg(text):
    try:
        idx, j = text.split(":")
        return [int(x) - 1 for x in idx.split(",")], int(j)
    except ValueError as exc:
        raise UsageError(f"constraint must look like 1,2,3:2, got {text!r}") from exc


def cmd_generate(args):
    if args.d < 1 or args.k < args.d + 2:
        raise UsageError(f"need d >= 1 and k >= d+2, got d={args.d}, k={args.k}")
    if args.constraint is None:
        c = random_general_position(args.d, args.k, args.seed)
    else:
        c = random_with_constraint(
            args.d, args.k, _constraint_arg(args.constraint), args.seed, complement=args.complement
        )
    return {**c.to_dict(), "seed": args.seed}


def build_parser():
    parser = argparse.ArgumentParser(prog="projshape", description="Projective shape analysis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="constraints, classifications, frames and charts")
    p.add_argument("file")
    p.add_argument("--sn", metavar="N1,...,Nd", help="also test these subspace numbers")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("standardize", help="Tyler standardization")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=_positive, default=10000)
    p.set_defaults(func=cmd_standardize)

    p = sub.add_parser("distance", help="sign-minimized projection distance")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.set_defaults(func=cmd_distance)

    for name, func, helptext in (
        ("tyler-numbers", cmd_tyler_numbers, "Tyler subspace numbers"),
        ("witness", cmd_witness, "non-separable pair of shapes"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("d", type=int)
        p.add_argument("k", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("check-sn", help="Hausdorff and maximality test for subspace numbers")
    p.add_argument("d", type=int)
    p.add_argument("k", type=int)
    p.add_argument("numbers", metavar="N1,...,Nd")
    p.set_defaults(func=cmd_check_sn)

    p = sub.add_parser("blur", help="blur sequence of a splittable configuration")
    p.add_argument("file")
    p.add_argument("--terms", type=_positive, default=10)
    p.set_defaults(func=cmd_blur)

    p = sub.add_parser("merge", help="sequence converging to both shapes of the witness pair")
    p.add_argument("d", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--terms", type=_positive, default=10)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("generate", help="random configuration")
    p.add_argument("d", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--constraint", metavar="I:j", help="plant a constraint, e.g. 1,2,3:2")
    p.add_argument("--complement", action="store_true", help="also constrain the complement")
    p.set_defaults(func=cmd_generate)
    return parser


def _error_doc(exc):
    doc = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("residual", "iterations"):
        if getattr(exc, attr, None) is not None:
            doc[attr] = getattr(exc, attr)
    return {"schema_version": SCHEMA_VERSION, "error": doc}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except (UsageError, ParseError, InvalidSubspaceNumbers) as exc:
        print(f"projshape {args.command}: {exc}", file=stderr)
        return 2
    except ProjShapeError as exc:
        print(f"projshape {args.command}: {type(exc).__name__}: {exc}", file=stderr)
        print(json.dumps(_error_doc(exc)), file=stdout)
        return 1
    print(json.dumps({"schema_version": SCHEMA_VERSION, "command": args.command, **result}), file=stdout)
    return 0


run = main
