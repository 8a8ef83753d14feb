"""Command-line front end.

Exit codes: 0 success with no falsified claim, 1 some claim FALSIFIED
(results still printed), 2 usage error, 3 runtime error (I/O, checkpoint).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import exact
from .checkpoint import Checkpoint
from .claims import DEFAULT_MAX_WITNESSES, check_claim, get_claim, list_claims
from .errors import CollatzError, UnknownClaim
from .render import any_falsified, render
from .sweep import DEFAULT_CHUNK, DEFAULT_CLAIMS, SweepConfig, resume, sweep_range
from .trajectory import DEFAULT_BUDGET, compute_trajectory

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _claims_epilog() -> str:
    lines = ["claims:"]
    lines += [f"  {c.one_line()}" for c in list_claims()]
    return "\n".join(lines)


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    p.add_argument("--timing", action="store_true", help="include wall-clock figures")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(
        prog="collatzxy",
        description="Collatz parity decomposition (X, Y), exact convergence quantities and claim verification.",
        epilog=_claims_epilog(),
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="command", metavar="{trajectory,claims,sweep,report}")
    sub.required = True

    p = sub.add_parser("trajectory", help="inspect one trajectory", formatter_class=fmt)
    p.add_argument("n", type=_positive)
    p.add_argument("--tuple", action="store_true", help="print the k-tuple")
    p.add_argument("--exact", action="store_true", help="print Z, eps, eps_n, n', {n'} and f")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    _add_output(p)

    p = sub.add_parser("claims", help="check registry claims over a range", epilog=_claims_epilog(), formatter_class=fmt)
    p.add_argument("--from", dest="lo", type=_positive, default=1)
    p.add_argument("--to", dest="hi", type=_positive, default=1000)
    p.add_argument("--claim", action="append", metavar="ID", help="claim id, repeatable (default: all)")
    p.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    p.add_argument("--max-witnesses", type=_positive, default=DEFAULT_MAX_WITNESSES)
    _add_output(p)

    p = sub.add_parser("sweep", help="parallel range sweep with inline claim checks", epilog=_claims_epilog(), formatter_class=fmt)
    p.add_argument("--from", dest="lo", type=_positive)
    p.add_argument("--to", dest="hi", type=_positive)
    p.add_argument("--claim", action="append", metavar="ID",
                   help=f"per-number claim id, repeatable (default: {', '.join(DEFAULT_CLAIMS)})")
    p.add_argument("--budget", type=_positive)
    p.add_argument("--chunk", type=_positive, help=f"numbers per work unit (default {DEFAULT_CHUNK})")
    p.add_argument("--workers", type=_positive, help="worker processes (default: CPU count)")
    p.add_argument("--checkpoint", metavar="PATH", help="record completed chunks in PATH")
    p.add_argument("--resume", metavar="PATH", help="finish the sweep recorded in checkpoint PATH")
    _add_output(p)

    p = sub.add_parser("report", help="re-render a saved JSON result", formatter_class=fmt)
    p.add_argument("--in", dest="infile", required=True, metavar="PATH")
    _add_output(p)
    return parser


def _claim_ids(raw: list[str] | None, default) -> list[str]:
    ids = raw or list(default)
    try:
        return sorted({get_claim(c).id for c in ids}, key=lambda c: int(c[1:]))
    except UnknownClaim as exc:
        raise UsageError(str(exc)) from None


def _cmd_trajectory(args) -> dict:
    rec = compute_trajectory(args.n, args.budget, keep_tuple=args.tuple)
    doc = {"kind": "trajectory", **rec.to_json()}
    if args.exact:
        w = exact.exact_witness(rec.n, rec.x_count, rec.y_count).to_json()
        doc["exact"] = {
            "z": w["z"],
            "epsilon": w["epsilon"],
            "epsilon_n": w["epsilon_n"],
            "n_prime": w["n_prime"],
            "frac_n_prime": w["frac_n_prime"],
            "floor_n_prime": str(exact.recover_n(exact.canonical_decomposition(rec.n, rec.x_count, rec.y_count))),
            "f": w["f"],
        }
    return doc


def _cmd_claims(args) -> dict:
    if args.lo > args.hi:
        raise UsageError(f"--from {args.lo} exceeds --to {args.hi}")
    ids = _claim_ids(args.claim, [c.id for c in list_claims()])
    results = [check_claim(cid, args.lo, args.hi, args.budget, args.max_witnesses).to_json() for cid in ids]
    return {"kind": "claims", "results": results}


def _sweep_config(args) -> SweepConfig:
    ids = _claim_ids(args.claim, DEFAULT_CLAIMS)
    if args.resume:
        # fill unspecified flags from the checkpoint so only explicit ones can mismatch
        echo = Checkpoint.load(args.resume).config
        try:
            base = SweepConfig.from_echo(echo)
        except (KeyError, TypeError, ValueError) as exc:
            raise CollatzError(f"checkpoint {args.resume} has an invalid configuration: {exc}") from exc
        cfg = SweepConfig(
            lo=args.lo or base.lo,
            hi=args.hi or base.hi,
            chunk_size=args.chunk or base.chunk_size,
            workers=args.workers,
            budget=args.budget or base.budget,
            claims=tuple(ids) if args.claim else base.claims,
        )
    else:
        if args.lo is None or args.hi is None:
            raise UsageError("sweep needs --from and --to (or --resume PATH)")
        cfg = SweepConfig(
            lo=args.lo,
            hi=args.hi,
            chunk_size=args.chunk or DEFAULT_CHUNK,
            workers=args.workers,
            budget=args.budget or DEFAULT_BUDGET,
            claims=tuple(ids),
            checkpoint_path=args.checkpoint,
        )
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _cmd_sweep(args) -> dict:
    if args.resume and args.checkpoint and Path(args.resume) != Path(args.checkpoint):
        raise UsageError("--checkpoint and --resume name different files")
    cfg = _sweep_config(args)
    if args.resume:
        summary = resume(args.resume, cfg)
    else:
        summary = sweep_range(cfg)
    return summary.to_json(timing=args.timing)


def _cmd_report(args) -> dict:
    with open(args.infile, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or doc.get("kind") not in ("trajectory", "claims", "sweep"):
        raise CollatzError(f"{args.infile} is not a collatzxy JSON result")
    return doc


COMMANDS = {
    "trajectory": _cmd_trajectory,
    "claims": _cmd_claims,
    "sweep": _cmd_sweep,
    "report": _cmd_report,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    t0 = time.perf_counter()
    try:
        doc = COMMANDS[args.command](args)
        if args.timing and args.command != "sweep" and "wall_time_ms" not in doc:
            doc["wall_time_ms"] = round((time.perf_counter() - t0) * 1000)
        text = render(doc, args.format)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"collatzxy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CollatzError, OSError, ValueError) as exc:
        print(f"collatzxy: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_FALSIFIED if any_falsified(doc) else EXIT_OK


def main() -> None:
    sys.exit(run())
