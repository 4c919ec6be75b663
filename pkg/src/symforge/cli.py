"""Command-line front end: ``symforge search|certify|count|report``.

Exit codes: 0 all pass, 1 certification failure (or search exhausted),
2 inconclusive certificate, 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .counting import BRUTE_CAP
from .genericity import FAIL, INCONCLUSIVE, PASS
from .report import (
    build_report,
    campaign_table,
    certify_bundle,
    parse_primes,
    render_text,
    run_campaign,
    validate_report,
)
from .search import MAX_ITER, search_instance
from .threefold import load_instance

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("symforge")


class InputError(Exception):
    pass


def _exit_for(status: str) -> int:
    return {PASS: EXIT_OK, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}[status]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def _load(args):
    if not args.instance:
        raise InputError("--instance is required")
    try:
        return load_instance(args.instance)
    except OSError as exc:
        raise InputError(f"cannot read {args.instance}: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _primes(text):
    try:
        return parse_primes(text)
    except ValueError:
        raise InputError(f"bad prime list {text!r}") from None


def cmd_search(args) -> int:
    good = _primes(args.good_primes) if args.good_primes else []
    inst, stats = search_instance(args.seed, args.bound, args.require_d, args.max_iter, good)
    if args.stats_out:
        _write(args.stats_out, _dump(stats.to_json()))
    log.info("search: %d iterations, rejections %s", stats.iterations, dict(stats.rejections))
    if inst is None:
        sys.stderr.write(_dump(stats.to_json()))
        return EXIT_FAIL
    _write(args.out, inst.dumps())
    if args.certs_out:
        _write(args.certs_out, _dump(inst.certify().to_json()))
    return EXIT_OK


def cmd_certify(args) -> int:
    inst = _load(args)
    chart_primes = _primes(args.primes) if args.primes else (11, 13)
    bundle = certify_bundle(inst, chart_primes=chart_primes)
    _write(args.out, _dump(bundle))
    if bundle["failed"]:
        sys.stderr.write("failed: " + ", ".join(bundle["failed"]) + "\n")
    return _exit_for(bundle["status"])


def cmd_count(args) -> int:
    inst = _load(args)
    status = inst.certify().status
    if status != PASS:
        sys.stderr.write(f"instance is not certified ({status})\n")
        return _exit_for(status)
    campaign = run_campaign(inst, _primes(args.primes), args.brute_cap, args.timings)
    sys.stderr.write(campaign_table(campaign) + "\n")
    if args.out:
        _write(args.out, _dump(campaign))
    return EXIT_OK if campaign["pass"] else EXIT_FAIL


def cmd_report(args) -> int:
    inst = _load(args)
    report = build_report(inst, args.fiber_q, _primes(args.primes), args.brute_cap, args.timings)
    validate_report(report)
    _write(args.out, _dump(report))
    text = render_text(report)
    if args.text:
        _write(args.text, text)
    else:
        sys.stderr.write(text)
    return _exit_for(report["status"])


class _Parser(argparse.ArgumentParser):
    # usage errors are parse errors, not "inconclusive"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="symforge", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", help="search for a certified instance")
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--bound", type=int, default=5)
    s.add_argument("--require-d", type=int, default=None)
    s.add_argument("--max-iter", type=int, default=MAX_ITER)
    s.add_argument("--good-primes", default="", help="only accept instances for which these are good")
    s.add_argument("--out", default=None, help="instance JSON (default stdout)")
    s.add_argument("--certs-out", default=None)
    s.add_argument("--stats-out", default=None, help="search statistics JSON")
    s.set_defaults(func=cmd_search)

    c = sub.add_parser("certify", help="certify an instance file")
    c.add_argument("--instance", required=True)
    c.add_argument("--primes", default="11,13", help="primes for the chart scans")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_certify)

    n = sub.add_parser("count", help="run the counting campaign")
    n.add_argument("--instance", required=True)
    n.add_argument("--primes", default="3..100")
    n.add_argument("--brute-cap", type=int, default=BRUTE_CAP)
    n.add_argument("--timings", action="store_true", help="record elapsed times (output no longer deterministic)")
    n.add_argument("--out", default=None)
    n.set_defaults(func=cmd_count)

    r = sub.add_parser("report", help="consolidated JSON report plus text rendering")
    r.add_argument("--instance", required=True)
    r.add_argument("--fiber-q", type=int, default=11)
    r.add_argument("--primes", default="3..100")
    r.add_argument("--brute-cap", type=int, default=BRUTE_CAP)
    r.add_argument("--timings", action="store_true")
    r.add_argument("--out", default=None)
    r.add_argument("--text", default=None, help="write the text rendering here (default stderr)")
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # --help and usage errors; keep main() returning an exit code
        return exc.code if isinstance(exc.code, int) else EXIT_IO
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
