"""Command-line front end.

Commands: ``analyze``, ``simulate``, ``decompose``, ``bounds``, ``reach``.
Exit codes: 0 success, 2 usage, 3 input validation, 4 numerical failure.

``--tensor`` takes a path to an ``mlds-tensor/1`` document or
``builtin:<name>`` for a bundled example (``example1``, ``example2``,
``example2-printed``). Without ``--out`` results go to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import string
import sys
from pathlib import Path

import numpy as np

from . import fixtures
from .dynamics import simulate
from .errors import InputError, NumericalError, SymmetryViolation
from .io import (
    decomposition_to_doc,
    dumps,
    load_system,
    load_tensor,
    trajectory_csv,
    write_atomic,
)
from .reachability import ControlledSystem, reachability_test
from .spectral import bound_report, odeco_decompose
from .stability import AnalysisConfig, analyze

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4


def _parse_ic(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"initial condition {text!r} must be comma-separated reals")
    if not vals:
        raise argparse.ArgumentTypeError("empty initial condition")
    return np.array(vals)


def _ic_labels(count):
    letters = string.ascii_lowercase
    return [letters[i] if i < len(letters) else f"ic{i + 1}" for i in range(count)]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized internals (default 0)")
    common.add_argument("--out", type=Path, help="output directory (default: print to stdout)")
    common.add_argument("--tol-sym", type=float, default=None,
                        help="symmetry tolerance (default 1e-9 x max|entry|)")
    common.add_argument("--tol-power", type=float, default=1e-12, help="power-iteration tolerance")
    common.add_argument("--max-iter", type=int, default=2000, help="power-iteration step limit")

    tensor = argparse.ArgumentParser(add_help=False)
    tensor.add_argument("--tensor", required=True, help="tensor file or builtin:<name>")

    ics = argparse.ArgumentParser(add_help=False)
    ics.add_argument("--ic", type=_parse_ic, action="append", default=[],
                     help="initial condition as comma-separated reals (repeatable)")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--horizon", type=int, default=100)
    sim.add_argument("--conv-eps", type=float, default=1e-9)
    sim.add_argument("--div-cap", type=float, default=1e12)

    parser = argparse.ArgumentParser(prog="mlds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common, tensor, ics],
                       help="stability verdicts per initial condition")
    p.add_argument("--tol-boundary", type=float, default=1e-9,
                   help="band around 1 reported as (non-asymptotically) stable")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", parents=[common, tensor, ics, sim], help="trajectory CSVs")
    p.add_argument("--stride", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decompose", parents=[common, tensor], help="orthogonal decomposition JSON")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("bounds", parents=[common, tensor], help="Z-spectral-radius bounds JSON")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("reach", parents=[common], help="reachable-subspace rank test (experimental)")
    p.add_argument("--system", required=True, type=Path,
                   help='JSON {"tensor": <document or path>, "B": [[column], ...]}')
    p.add_argument("--tol-rank", type=float, default=1e-8)
    p.set_defaults(func=cmd_reach)
    return parser


def _load(args):
    if args.tensor.startswith("builtin:"):
        name = args.tensor.split(":", 1)[1]
        try:
            return fixtures.builtin_tensor(name)
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
    return load_tensor(args.tensor, args.tol_sym)


def _emit(args, files: dict):
    """Write ``{name: text}`` under ``--out`` or print it."""
    if args.out is None:
        for name, text in files.items():
            if len(files) > 1:
                print(f"# {name}")
            sys.stdout.write(text)
        return
    for name, text in files.items():
        write_atomic(args.out / name, text)
    print("\n".join(str(args.out / name) for name in files))


def _check_ics(args, parser_error, n):
    if not args.ic:
        parser_error("at least one --ic is required")
    for x in args.ic:
        if x.size != n:
            raise InputError(f"initial condition {x.tolist()} has {x.size} components, tensor dimension is {n}")


def cmd_analyze(args, parser_error):
    A = _load(args)
    _check_ics(args, parser_error, A.dim)
    cfg = AnalysisConfig(power_tol=args.tol_power, max_iter=args.max_iter,
                         boundary_tol=args.tol_boundary, seed=args.seed)
    dec = odeco_decompose(A, tol=cfg.power_tol, max_iter=cfg.max_iter, seed=cfg.seed)
    files = {}
    table = _io.StringIO()
    w = csv.writer(table, lineterminator="\n")
    w.writerow(["ic", "max_certificate", "frobenius_product", "verdict"])
    for label, x in zip(_ic_labels(len(args.ic)), args.ic):
        rep = analyze(A, x, cfg, decomposition=dec)
        files[f"report_{label}.json"] = dumps(dict(rep.to_dict(), ic=label))
        frob = next(t for t in rep.sufficient if t.method.value == "frobenius-norm")
        cert = "" if rep.exact is None else format(rep.exact.value, ".17g")
        w.writerow([label, cert, format(frob.value, ".17g"), rep.headline.label.value])
    files["table.csv"] = table.getvalue()
    if args.out is None:
        sys.stdout.write(files["table.csv"])
    else:
        _emit(args, files)


def cmd_simulate(args, parser_error):
    A = _load(args)
    _check_ics(args, parser_error, A.dim)
    files = {}
    for label, x in zip(_ic_labels(len(args.ic)), args.ic):
        traj = simulate(A, x, args.horizon, args.conv_eps, args.div_cap, args.stride)
        files[f"trajectory_{label}.csv"] = trajectory_csv(traj)
    _emit(args, files)


def cmd_decompose(args, parser_error):
    A = _load(args)
    dec = odeco_decompose(A, tol=args.tol_power, max_iter=args.max_iter, seed=args.seed)
    _emit(args, {"decomposition.json": dumps(decomposition_to_doc(dec))})


def cmd_bounds(args, parser_error):
    A = _load(args)
    dec = None
    if A.order >= 3:
        try:
            dec = odeco_decompose(A, tol=args.tol_power, max_iter=args.max_iter, seed=args.seed)
        except NumericalError:
            dec = None
    rep = bound_report(A, dec)
    _emit(args, {"bounds.json": dumps(rep.to_dict())})


def cmd_reach(args, parser_error):
    A, B = load_system(args.system, args.tol_sym)
    res = reachability_test(ControlledSystem(A, B), args.tol_rank)
    _emit(args, {"reach.json": dumps(res.to_dict())})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    def usage_error(msg):
        parser.error(msg)

    try:
        args.func(args, usage_error)
    except SymmetryViolation as exc:
        print(f"mlds: input error: {exc} (max deviation {exc.max_deviation:.17g})", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"mlds: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"mlds: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
