"""``ellselberg-verify``: run identity suites and write a report.

Exit status is 0 when every check passes, 1 when any fails and 2 on a
configuration or output error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .verify import DEFAULT_P, DEFAULT_Q, SUITES, SuiteConfig, render_report, run_suites


def _keyval(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    return key, float(value)


def _cap(text):
    dims, sep, value = text.partition("=")
    if not sep:
        return None, int(dims)
    return int(dims), int(value)


def build_parser():
    ap = argparse.ArgumentParser(prog="ellselberg-verify", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file with SuiteConfig fields; flags override it")
    ap.add_argument("--suite", action="append", choices=SUITES + ("all",),
                    help="suite to run (repeatable; default: all)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--count", type=int, help="instances per check, for every suite")
    ap.add_argument("--p-mod", type=float)
    ap.add_argument("--p-arg", type=float)
    ap.add_argument("--q-mod", type=float)
    ap.add_argument("--q-arg", type=float)
    ap.add_argument("--tol", action="append", type=_keyval, default=[], metavar="CHECK_ID=VALUE")
    ap.add_argument("--quad-cap", action="append", type=_cap, default=[], metavar="[DIMS=]M",
                    help="node cap per dimension; a bare M applies to dims 1 and 2")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--format", choices=("text", "json"))
    ap.add_argument("--timing", action="store_true",
                    help="record wall-clock runtimes (reports are then not byte-stable)")
    return ap


def config_from_args(args):
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    suites = base.get("suites", list(SUITES))
    if args.suite:
        suites = list(SUITES) if "all" in args.suite else args.suite
    counts = dict(base.get("counts", {}))
    if args.count is not None:
        counts = {s: args.count for s in SUITES}
    p = list(base.get("p", DEFAULT_P))
    q = list(base.get("q", DEFAULT_Q))
    if args.p_mod is not None:
        p[0] = args.p_mod
    if args.p_arg is not None:
        p[1] = args.p_arg
    if args.q_mod is not None:
        q[0] = args.q_mod
    if args.q_arg is not None:
        q[1] = args.q_arg
    tol = dict(base.get("tol", {}))
    tol.update(dict(args.tol))
    caps = {int(k): int(v) for k, v in base.get("quad_caps", {}).items()}
    for dims, value in args.quad_cap:
        if dims is None:
            caps[1] = caps[2] = value
        else:
            caps[dims] = value
    return SuiteConfig(
        suites=tuple(suites),
        seed=args.seed if args.seed is not None else int(base.get("seed", 0)),
        counts=counts,
        p=tuple(p),
        q=tuple(q),
        tol=tol,
        quad_caps=caps,
        out=args.out if args.out is not None else base.get("out"),
        format=args.format or base.get("format", "text"),
        timing=args.timing or bool(base.get("timing", False)),
    )


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        print(f"ellselberg-verify: configuration error: {exc}", file=sys.stderr)
        return 2
    reports = run_suites(config)
    payload = render_report(reports, config.format)
    if config.out:
        try:
            with open(config.out, "wb") as fh:
                fh.write(payload)
        except OSError as exc:
            print(f"ellselberg-verify: cannot write {config.out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
