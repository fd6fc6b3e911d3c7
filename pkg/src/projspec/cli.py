"""Command line front end.

Subcommands: ``charpoly`` (serialize the characteristic polynomial),
``analyze`` (the three-way equivalence report), ``spectrum`` (CSV curve
samples for a pair), ``generate`` (deterministic test tuples).

Exit codes: 0 success/consistent, 1 run completed but the report flags a
non-normal gap or an inconsistency, 2 input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .commute import equivalence_report
from .config import Config
from .errors import DocumentError, ProjspecError
from .generate import KINDS, from_document, generate, to_document
from .poly import charpoly
from .spectra import sample_curve

log = logging.getLogger("projspec")


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tol", type=float, default=1e-7, help="verdict tolerance")
    parser.add_argument("--seed", type=int, default=42, help="seed for all sampling")
    parser.add_argument("--grid", type=int, default=41,
                        help="sampling size (w-points for spectrum, plane samples for analyze)")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (json except spectrum, which defaults to csv)")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="projspec",
        description="joint point spectra and characteristic polynomials of matrix tuples",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("charpoly", help="characteristic polynomial of a tuple document")
    sp.add_argument("input", help="path to a JSON tuple document")
    _common_flags(sp)

    sp = sub.add_parser("analyze", help="commutativity/reducibility/spectrum report")
    sp.add_argument("input", help="path to a JSON tuple document")
    _common_flags(sp)

    sp = sub.add_parser("spectrum", help="sample the spectral curve of a pair (n = 2)")
    sp.add_argument("input", help="path to a JSON tuple document with n = 2")
    _common_flags(sp)

    sp = sub.add_parser("generate", help="emit a deterministic tuple document")
    sp.add_argument("kind", choices=KINDS)
    sp.add_argument("-N", "--dim", type=int, default=2, help="matrix size N")
    sp.add_argument("-n", "--arity", type=int, default=2, help="tuple arity n")
    _common_flags(sp)
    return p


def _load_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON in {path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _require_json_format(args) -> None:
    if args.format == "csv":
        raise DocumentError(f"{args.command} only supports json output")


def _cmd_charpoly(args) -> int:
    _require_json_format(args)
    tup = from_document(_load_document(args.input))
    p = charpoly(tup)

    # self-check: the interpolant must reproduce the determinant off-grid
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(10):
        z = rng.standard_normal(tup.arity) + 1j * rng.standard_normal(tup.arity)
        direct = np.linalg.det(tup.pencil(z))
        worst = max(worst, abs(p.evaluate(z) - direct) / (1.0 + abs(direct)))
    log.info("charpoly self-check: max relative mismatch %.3e at 10 random points", worst)
    margin = p.leading_margin()
    if margin < 100.0:
        log.warning(
            "leading coefficients sit within %.1fx of the prune threshold; "
            "the polynomial degree may be numerically ambiguous", margin,
        )
    _emit_json(p.to_json_dict(), args.out)
    return 0


def _cmd_analyze(args) -> int:
    _require_json_format(args)
    tup = from_document(_load_document(args.input))
    cfg = Config(tol=args.tol, seed=args.seed, hyperplane_samples=max(1, args.grid))
    report = equivalence_report(tup, cfg)
    _emit_json(report.to_json_dict(), args.out)
    return 0 if report.consistent and not report.non_normal_gap else 1


def _cmd_spectrum(args) -> int:
    tup = from_document(_load_document(args.input))
    if tup.arity != 2:
        raise DocumentError(f"spectrum sampling needs a pair (n = 2), got n = {tup.arity}")
    w_grid = np.linspace(-1.0, 1.0, max(2, args.grid))
    sample = sample_curve(tup[0], tup[1], w_grid)
    if args.format == "json":
        rows = [
            {"w": [r.w.real, r.w.imag], "z": [r.z.real, r.z.imag],
             "residual": r.residual, "multiple": r.multiple}
            for r in sample.rows
        ]
        _emit_json({"rows": rows, "dropped": sample.dropped}, args.out)
    else:
        _emit(sample.to_csv(), args.out)
    return 0


def _cmd_generate(args) -> int:
    _require_json_format(args)
    mats = generate(args.kind, args.dim, args.arity, args.seed)
    labels = [f"A_{j + 1}" for j in range(len(mats))]
    _emit_json(to_document(mats, labels=labels, seed=args.seed), args.out)
    return 0


_COMMANDS = {
    "charpoly": _cmd_charpoly,
    "analyze": _cmd_analyze,
    "spectrum": _cmd_spectrum,
    "generate": _cmd_generate,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr, format="%(message)s")
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DocumentError as exc:
        print(f"projspec: input error: {exc}", file=sys.stderr)
        return 2
    except (ProjspecError, np.linalg.LinAlgError) as exc:
        print(f"projspec: numeric failure: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
