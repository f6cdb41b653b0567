"""Command-line entry point."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .checkpoint import Interrupted
from .errors import CheckpointError, InputError, SautPermError
from .report import MonotonicityError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CHECKPOINT = 0, 1, 2, 3


def parse_degrees(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None
    if a < 1 or b < a:
        raise argparse.ArgumentTypeError(f"bad degree range {text!r}")
    return a, b


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("SAUTPERM_THREADS", "1")))
    except ValueError:
        return 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sautperm", description="Lower bounds for permutation actions of SAut(F_n).")
    p.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    p.add_argument("-v", "--verbose", action="store_true", help="progress lines on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("search", help="sweep a degree range for one rank")
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--degrees", type=parse_degrees, required=True, metavar="LO..HI")
    s.add_argument("--threads", type=int, default=default_threads())
    s.add_argument("--checkpoint", type=Path)
    s.add_argument("--out", type=Path, help="report directory (default: the checkpoint directory)")
    s.add_argument("--injectivity", choices=["auto", "on", "off"], default="auto")
    s.add_argument("--compat", choices=["on", "off"], default="on")
    s.add_argument("--budget-tau", type=int, default=10**9)
    s.add_argument("--node-budget", type=int, default=10**8)
    s.add_argument("--multiset-bound", type=int, default=10**6)
    s.add_argument("--shard-size", type=int, default=1 << 20)
    s.add_argument("--screen", choices=["single", "all"], default="single")
    s.add_argument("--no-early-stop", action="store_true")
    s.add_argument("--no-plot", action="store_true")
    s.add_argument("--stop-after", type=int, help=argparse.SUPPRESS)

    r = sub.add_parser("resume", help="continue a checkpointed search")
    r.add_argument("--checkpoint", type=Path, required=True)
    r.add_argument("--threads", type=int, default=default_threads())
    r.add_argument("--out", type=Path)
    r.add_argument("--no-plot", action="store_true")
    r.add_argument("--stop-after", type=int, help=argparse.SUPPRESS)

    v = sub.add_parser("verify", help="audit a certificate file against every relation")
    v.add_argument("file", type=Path)

    c = sub.add_parser("control", help="emit a known action as a certificate")
    c.add_argument("model", choices=["psl"])
    c.add_argument("--rank", type=int, required=True)
    c.add_argument("--out", type=Path)

    t = sub.add_parser("selftest", help="internal consistency checks")
    t.add_argument("suite", choices=["gersten"])
    t.add_argument("--rank", type=int, required=True)
    return p


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def cmd_search(args) -> int:
    from .runner import SearchConfig, run_search

    checkpoint = args.checkpoint
    root = os.environ.get("SAUTPERM_CHECKPOINT_ROOT")
    if checkpoint is None and root:
        lo, hi = args.degrees
        checkpoint = Path(root) / f"rank{args.rank}_m{lo}-{hi}"
    cfg = SearchConfig(
        rank=args.rank, m_lo=args.degrees[0], m_hi=args.degrees[1], threads=args.threads,
        checkpoint=str(checkpoint) if checkpoint else None, injectivity=args.injectivity,
        compat=args.compat == "on", budget_tau=args.budget_tau, node_budget=args.node_budget,
        multiset_bound=args.multiset_bound, early_stop=not args.no_early_stop,
        shard_size=args.shard_size, screen=args.screen,
    )
    report = run_search(cfg, out_dir=args.out, plot=not args.no_plot, stop_after=args.stop_after)
    _emit(args, report.to_record(), report.human())
    return EXIT_OK


def cmd_resume(args) -> int:
    from .runner import resume

    report = resume(args.checkpoint, threads=args.threads, out_dir=args.out,
                    plot=not args.no_plot, stop_after=args.stop_after)
    _emit(args, report.to_record(), report.human())
    return EXIT_OK


def cmd_verify(args) -> int:
    from .search import Certificate, classify, verify_certificate

    try:
        rec = json.loads(args.file.read_text())
        cert = Certificate.from_record(rec)
    except FileNotFoundError:
        raise InputError(f"no such file: {args.file}") from None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise InputError(f"cannot parse certificate: {e}") from None
    if cert.kind == "exhausted":
        payload = {"file": str(args.file), "kind": "exhausted", "passed": True, "counts": cert.counts}
        _emit(args, payload, f"{args.file}: exhausted certificate for n={cert.n}, m={cert.m}; "
                             f"{cert.counts.get('candidates_tested', 0)} candidates tested, nothing to audit")
        return EXIT_OK
    audit = verify_certificate(cert.images)
    cls = classify(cert.images)
    payload = {"file": str(args.file), "kind": cert.kind, "classification": cls, **audit.to_record()}
    checked = ", ".join(f"{k} {v}" for k, v in sorted(audit.checked.items()))
    if audit.passed:
        text = f"{args.file}: PASS ({checked}); classified {cls}"
    else:
        shown = "\n  ".join(audit.failures[:10])
        text = f"{args.file}: FAIL, {len(audit.failures)} relation instances violated\n  {shown}"
    _emit(args, payload, text)
    return EXIT_OK if audit.passed else EXIT_FAIL


def cmd_control(args) -> int:
    from .controls import psl_action
    from .search import images_certificate

    cert = images_certificate(psl_action(args.rank), note="action on the nonzero vectors of F_2^n")
    out = args.out or Path(f"control_psl_n{args.rank}.json")
    out.write_text(json.dumps(cert.to_record(), sort_keys=True, indent=2) + "\n")
    payload = {"file": str(out), "degree": cert.m, **cert.audit.to_record()}
    _emit(args, payload, f"wrote {out}: degree {cert.m}, audit {'PASS' if cert.audit.passed else 'FAIL'}")
    return EXIT_OK if cert.audit.passed else EXIT_FAIL


def cmd_selftest(args) -> int:
    from .freegroup import check_gersten

    rep = check_gersten(args.rank)
    payload = {"rank": args.rank, "checked": rep.checked, "failures": rep.failures}
    text = f"relations for n={args.rank}: " + ", ".join(f"{k} {v}" for k, v in sorted(rep.checked.items()))
    text += "; all hold" if rep.ok else f"; {len(rep.failures)} FAIL"
    _emit(args, payload, text)
    return EXIT_OK if rep.ok else EXIT_FAIL


COMMANDS = {"search": cmd_search, "resume": cmd_resume, "verify": cmd_verify,
            "control": cmd_control, "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose and not args.json else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except CheckpointError as e:
        print(f"checkpoint error: {e}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Interrupted as e:
        print(f"interrupted: {e}", file=sys.stderr)
        return EXIT_FAIL
    except MonotonicityError as e:
        print(f"inconsistent outcomes: {e}", file=sys.stderr)
        return EXIT_FAIL
    except SautPermError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
