"""Command-line interface: ramacf {eval, identity, minpoly, integrate}.

Exit status: 0 when every check passes, 1 when any check fails or a
polynomial is not found, 2 on usage or domain errors.
"""

from __future__ import annotations

import argparse
import sys

import mpmath

from . import algid, harness, hypergeom
from .numerics import ConvergenceError, DomainError, PrecisionContext, PrecisionError, integrate
from .report import format_table, fmt, reports_to_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _split_params(pairs, extra):
    """Collect --param k=v pairs and bare --k v options into a dict of strings."""
    params = {}
    for item in pairs or []:
        if "=" not in item:
            raise DomainError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = v.strip()
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise DomainError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise DomainError(f"option {tok} needs a value")
            val = extra[i + 1]
            i += 2
        params[key] = val
    return params


def _ctx(args, cfg):
    bits = args.prec if args.prec is not None else cfg["precision_bits"]
    guard = args.guard if args.guard is not None else cfg["guard_bits"]
    return PrecisionContext(bits, guard)


def _digits(ctx):
    return max(15, int(ctx.working_bits * 0.30103))


def cmd_eval(args, extra, cfg):
    if args.quantity not in harness.ROUTES:
        raise DomainError(f"unknown quantity {args.quantity!r}; try 'ramacf eval --list'")
    ctx = _ctx(args, cfg)
    params = _split_params(args.param, extra)
    value = harness._call(args.quantity, params, ctx)
    print(mpmath.nstr(value, _digits(ctx)))
    return EXIT_OK


def cmd_identity(args, extra, cfg):
    if extra:
        raise DomainError(f"unexpected arguments {extra}")
    ctx = _ctx(args, cfg)
    cases = harness.build_cases(cfg)
    if args.name:
        reports = [harness.run_identity(args.name, _split_params(args.param, []), ctx, cases=cases,
                                        max_degree=cfg["max_degree"])]
    else:
        filt = "all" if args.all else args.category
        reports = harness.run_suite(filt, ctx, workers=args.workers, config=cfg)
    print(format_table(reports))
    if args.json:
        reports_to_json(reports, args.json)
    return EXIT_FAIL if harness.failing(reports) else EXIT_OK


def cmd_minpoly(args, extra, cfg):
    if args.quantity not in harness.ROUTES:
        raise DomainError(f"unknown quantity {args.quantity!r}")
    ctx = _ctx(args, cfg)
    params = _split_params(args.param, extra)
    max_degree = args.max_degree if args.max_degree is not None else cfg["max_degree"]
    cand = algid.min_poly(lambda c: harness._call(args.quantity, params, c), max_degree, ctx)
    if cand is None:
        print(f"not found (degree <= {max_degree}, height < 10^30)")
        return EXIT_FAIL
    print(algid.format_poly(cand.coefficients))
    print(f"coefficients (ascending): {list(cand.coefficients)}")
    print(f"degree {cand.degree}, height {cand.height}, residual {fmt(cand.residual, 8)}, "
          f"confirmed at {2 * ctx.working_bits} bits ({fmt(cand.confirm_residual, 8)})")
    return EXIT_OK


def cmd_integrate(args, extra, cfg):
    if extra:
        raise DomainError(f"unexpected arguments {extra}")
    if args.name not in hypergeom.INTEGRANDS:
        raise DomainError(f"unknown integrand {args.name!r}; choose from {sorted(hypergeom.INTEGRANDS)}")
    ctx = _ctx(args, cfg)
    a = harness.parse_real(args.a, ctx.internal())
    b = harness.parse_real(args.b, ctx.internal())
    value = integrate(hypergeom.INTEGRANDS[args.name], a, b, ctx)
    print(mpmath.nstr(value, _digits(ctx)))
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, help="working precision in bits")
    common.add_argument("--guard", type=int, help="guard bits")
    common.add_argument("--config", help="JSON config file (default: $RAMACF_CONFIG)")

    p = argparse.ArgumentParser(prog="ramacf", description="High-precision q-series and continued fraction checks.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate a registered quantity")
    e.add_argument("quantity", nargs="?")
    e.add_argument("--param", action="append", metavar="K=V")
    e.add_argument("--list", action="store_true", help="list quantities")
    e.set_defaults(func=cmd_eval)

    i = sub.add_parser("identity", parents=[common], help="run identity checks")
    g = i.add_mutually_exclusive_group(required=True)
    g.add_argument("name", nargs="?")
    g.add_argument("--category", choices=harness.CATEGORIES)
    g.add_argument("--all", action="store_true")
    i.add_argument("--param", action="append", metavar="K=V", help="override a case parameter")
    i.add_argument("--json", help="write the reports to this path")
    i.add_argument("--workers", type=int, default=1)
    i.add_argument("--list", action="store_true", help="list case names")
    i.set_defaults(func=cmd_identity)

    m = sub.add_parser("minpoly", parents=[common], help="find an integer minimal polynomial")
    m.add_argument("quantity")
    m.add_argument("--param", action="append", metavar="K=V")
    m.add_argument("--max-degree", type=int)
    m.set_defaults(func=cmd_minpoly)

    n = sub.add_parser("integrate", parents=[common], help="tanh-sinh quadrature of a registered integrand")
    n.add_argument("name")
    n.add_argument("--a", required=True)
    n.add_argument("--b", required=True)
    n.set_defaults(func=cmd_integrate)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # listing needs no positional argument
    if argv[:1] == ["eval"] and "--list" in argv:
        print("\n".join(sorted(harness.ROUTES)))
        return EXIT_OK
    if argv[:1] == ["identity"] and "--list" in argv:
        print("\n".join(harness.select_cases("all")))
        return EXIT_OK
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command in ("eval",) and not args.quantity:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = harness.load_config(args.config)
        return args.func(args, extra, cfg)
    except (DomainError, PrecisionError, harness.UnknownCaseError, TypeError, ValueError, ConvergenceError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
