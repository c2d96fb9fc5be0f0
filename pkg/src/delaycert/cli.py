"""Command-line front end.

Exit codes: 0 success or verified, 1 negative answer from the method,
2 usage or input error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import certio
from .assembly import BLOCKDIAG, FULL, X_STRUCTURES
from .feasibility import check, verify_certificate
from .frontier import sweep_csv, sweep_table, table_sweep
from .simulation import DELAY_KINDS, DelaySequence, constant_history, lkf_values, simulate
from .systems import BUNDLED, DescriptionError, bundled, load_description

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def _load(source: str):
    if not Path(source).exists() and source in BUNDLED:
        return bundled(source)
    return load_description(source)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers; got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers; got {text!r}") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _print_margins(cert, stream=sys.stderr):
    m = cert.margins
    if m is None:
        print("no candidate point returned", file=stream)
        return
    for k, v in m.pos.items():
        print(f"  min eig {k:<3} {v: .6e}", file=stream)
    print(f"  min eig RCC {m.rcc_min: .6e}", file=stream)
    print(f"  max eig Pi(h1) {m.pi_h1_max: .6e}", file=stream)
    print(f"  max eig Pi(h2) {m.pi_h2_max: .6e}", file=stream)


def cmd_check(args) -> int:
    desc = _load(args.file)
    if desc.h2 is None:
        raise UsageError("check needs h2 in the system file")
    cert = check(desc.system(), args.x_structure, name=desc.name)
    print(f"h1={desc.h1} h2={desc.h2} X={args.x_structure}: solver {cert.solver_status}, "
          f"verified={'yes' if cert.verified else 'no'}", file=sys.stderr)
    _print_margins(cert)
    if cert.vars is not None and (cert.verified or args.out):
        _emit(certio.dumps(cert), args.out)
    return EXIT_OK if cert.verified else EXIT_NEGATIVE


def cmd_maxdelay(args) -> int:
    desc = _load(args.file)
    h1s = _int_list(args.h1) if args.h1 else [desc.h1]
    if not h1s or min(h1s) < 1:
        raise UsageError("h1 values must be >= 1")
    res = table_sweep(desc.A, desc.Ad, h1s, args.x_structure, args.limit, args.jobs)
    _emit(sweep_csv(res), args.out)
    print(sweep_table(res), file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    """Both X structures side by side."""
    desc = _load(args.file)
    h1s = _int_list(args.h1) if args.h1 else [desc.h1]
    if not h1s or min(h1s) < 1:
        raise UsageError("h1 values must be >= 1")
    rows = []
    for xs in (FULL, BLOCKDIAG):
        rows += table_sweep(desc.A, desc.Ad, h1s, xs, args.limit, args.jobs)
    _emit(sweep_csv(rows), args.out)
    print(sweep_table(rows), file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    desc = _load(args.file)
    n = desc.n
    h1 = desc.h1
    h2 = desc.h2 if desc.h2 is not None else h1
    x0 = np.array(_float_list(args.init)) if args.init else np.ones(n)
    if x0.shape != (n,):
        raise UsageError(f"--init has {x0.size} entries; the system has n={n}")
    cert = None
    if args.cert:
        cert = certio.read_certificate(args.cert)
        if cert.vars is None or cert.vars.n != n:
            raise UsageError("certificate dimensions do not match the system")
    kind = args.delays
    extra = {}
    if kind == "explicit-list":
        if not args.delay_list:
            raise UsageError("--delays explicit-list needs --delay-list")
        extra["values"] = tuple(_int_list(args.delay_list))
    elif kind == "constant":
        extra["value"] = args.delay_value
    elif kind == "uniform-random":
        extra["seed"] = args.seed
    try:
        seq = DelaySequence(kind, h1, h2, **extra)
        system = desc.system(h1, h2)
        traj = simulate(system, seq, constant_history(x0, h2), args.steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    values = lkf_values(traj, cert.vars) if cert is not None else None
    _emit(traj.to_csv(values), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    desc = _load(args.file)
    cert = certio.read_certificate(args.cert)
    if cert.vars is None:
        raise UsageError("certificate holds no matrices")
    if cert.vars.n != desc.n:
        raise UsageError(f"certificate has n={cert.vars.n}; system file has n={desc.n}")
    system = desc.system(cert.system.h1, cert.system.h2) if desc.h2 is None else desc.system()
    margins, ok = verify_certificate(system, cert.vars)
    print(f"h1={system.h1} h2={system.h2}: verified={'yes' if ok else 'no'}")
    for k, v in margins.as_dict().items():
        if k != "scaled":
            print(f"  {k} {v:.17g}")
    return EXIT_OK if ok else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="delaycert", description="Delay-dependent stability certificates "
                                "for discrete-time systems with interval time-varying delay.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)
    file_help = f"system description JSON, or one of {', '.join(BUNDLED)}"

    c = sub.add_parser("check", help="solve and verify the LMIs at the file's (h1, h2)")
    c.add_argument("file", help=file_help)
    c.add_argument("--x-structure", choices=X_STRUCTURES, default=FULL)
    c.add_argument("--out", help="write the certificate JSON here (default stdout)")
    c.set_defaults(func=cmd_check)

    for name, func, hlp in (("maxdelay", cmd_maxdelay, "largest verified h2 for each h1"),
                            ("sweep", cmd_sweep, "maxdelay for both X structures")):
        m = sub.add_parser(name, help=hlp)
        m.add_argument("file", help=file_help)
        m.add_argument("--h1", help="comma-separated h1 values (default: the file's h1)")
        m.add_argument("--limit", type=int, default=200, help="largest h2 tried (default 200)")
        if name == "maxdelay":
            m.add_argument("--x-structure", choices=X_STRUCTURES, default=FULL)
        m.add_argument("--jobs", type=int, default=1, help="parallel h1 entries")
        m.add_argument("--out", help="CSV destination (default stdout)")
        m.set_defaults(func=func)

    s = sub.add_parser("simulate", help="simulate a trajectory and export CSV")
    s.add_argument("file", help=file_help)
    s.add_argument("--cert", help="certificate JSON; adds a V column")
    s.add_argument("--delays", choices=DELAY_KINDS, default="sinusoidal-pattern")
    s.add_argument("--delay-value", type=int, help="delay for --delays constant (default h1)")
    s.add_argument("--delay-list", help="comma-separated delays for --delays explicit-list")
    s.add_argument("--seed", type=int, default=0, help="seed for --delays uniform-random")
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--init", help="comma-separated initial state, held on [-h2, 0]")
    s.add_argument("--out", help="CSV destination (default stdout)")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="re-verify a stored certificate")
    v.add_argument("file", help=file_help)
    v.add_argument("cert")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (DescriptionError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
