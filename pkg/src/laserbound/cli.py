"""Command-line interface.

Exit codes: 0 when a bound certifies (or a certificate verifies), 1 for a
sound result that does not certify (or a refuted certificate), 2 for usage
and input errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from .constructions import get_construction
from .omega import (
    DEFAULT_MARGIN,
    SUPPORTED_POWERS,
    BoundCertificate,
    CertificateError,
    NonCertifyingError,
    certificate_from_analysis,
    level_of,
    omega_search,
    verify_certificate,
)
from .power import analyze_power, component_support, power_support
from .reporting import (
    FormatError,
    SweepRow,
    ValueTableCache,
    atomic_write,
    default_cache_dir,
    load_warm_start,
    sweep_csv,
)
from .solvers import SolverConfig
from .support import induced_group, kernel_basis, orbits

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def default_q(construction: str, power: int) -> int:
    if construction == "cw":
        return 6 if power <= 2 else 5
    return 4 if power == 1 else 3


def _add_common(p: argparse.ArgumentParser, power_required: bool = True) -> None:
    p.add_argument("construction_pos", nargs="?", choices=("cw", "asym"), metavar="CONSTRUCTION",
                   help="same as --construction")
    p.add_argument("--construction", choices=("cw", "asym"))
    p.add_argument("--q", type=int, help="seed size parameter (default depends on construction and power)")
    p.add_argument("--power", type=int, choices=SUPPORTED_POWERS, required=power_required)


def _add_solver(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algorithm", choices=("A", "B", "hybrid"), default="A")
    p.add_argument("-A", dest="algorithm", action="store_const", const="A", help="shorthand for --algorithm A")
    p.add_argument("-B", dest="algorithm", action="store_const", const="B", help="shorthand for --algorithm B")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=SolverConfig.restarts)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN, help="safety margin in log units")
    p.add_argument("--cache", nargs="?", const="", default=None, metavar="DIR",
                   help="reuse solved levels (default dir: $LASERBOUND_CACHE or ~/.cache/laserbound)")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="laserbound", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="bound V_rho of one power and write a certificate")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--warm-start", type=Path, action="append", default=[])

    p = sub.add_parser("omega", help="search the smallest certifying rho")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--q-range", help="inclusive range A..B of q values to try")
    p.add_argument("--rho-tol", type=float, default=1e-7)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("sweep", help="bounds over a rho grid as CSV")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--rho-min", type=float)
    p.add_argument("--rho-max", type=float)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--rho", type=float, action="append", default=[], help="explicit rho value (repeatable)")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("verify", help="recompute a certificate from its distributions")
    p.add_argument("path", type=Path)

    p = sub.add_parser("kernel", help="orbit counts and compatibility degrees")
    _add_common(p)
    p.add_argument("--component", help="only this component, as a,b,c")
    return ap


def _construction(args, parser):
    name = args.construction or args.construction_pos
    if name is None:
        parser.error("a construction is required (cw or asym)")
    if args.construction and args.construction_pos and args.construction != args.construction_pos:
        parser.error("conflicting constructions")
    q = args.q if args.q is not None else default_q(name, args.power)
    if q < 1:
        parser.error("--q must be positive")
    return get_construction(name, q)


def _config(args) -> SolverConfig:
    return SolverConfig(rng_seed=args.seed, restarts=args.restarts)


def _cache(args, cfg):
    if args.cache is None:
        return None
    return ValueTableCache(args.cache or default_cache_dir(), cfg)


def _describe(log_value: float) -> str:
    if log_value < 700:
        return f"{math.exp(log_value):.10g}"
    return f"exp({log_value:.12g})"


def _summary(pa, margin: float) -> tuple[str, bool]:
    thr = pa.spec.threshold(pa.r)
    row = SweepRow(pa.rho, pa.log_bound, thr)
    ok = pa.log_bound - margin >= thr
    lines = [
        f"construction {pa.spec.name} q={pa.spec.q} power {2**pa.r} rho={pa.rho!r} algorithm {pa.algorithm}",
        f"  V bound   {_describe(pa.log_bound)}   (log {pa.log_bound:.17g})",
        f"  threshold {_describe(thr)}   (log {thr:.17g})",
        f"  margin    {row.margin_linear:+.6e} (linear), {row.margin_log:+.3e} (log)",
        f"  {'CERTIFIES omega < ' + repr(pa.rho) if ok else 'does not certify'}",
    ]
    bad = [c for c in pa.components if c.error]
    if bad:
        lines.append(f"  warning: {len(bad)} component(s) fell back to uniform certificates")
    return "\n".join(lines), ok


def cmd_analyze(args, parser) -> int:
    spec = _construction(args, parser)
    cfg = _config(args)
    warm = []
    for path in args.warm_start:
        try:
            warm.extend(load_warm_start(path))
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: cannot read warm start {path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if not 2.0 <= args.rho <= 3.0:
        parser.error("--rho must lie in [2, 3]")
    pa = analyze_power(spec, level_of(args.power), args.rho, args.algorithm, cfg, warm, args.workers,
                       _cache(args, cfg))
    text, ok = _summary(pa, args.margin)
    print(text)
    if args.out:
        cert = certificate_from_analysis(pa, cfg, args.margin)
        atomic_write(args.out, cert.dumps())
        print(f"  certificate written to {args.out}")
    return EXIT_OK if ok else EXIT_FAIL


def _q_values(args, parser, name):
    if args.q_range:
        try:
            a, b = (int(x) for x in args.q_range.split(".."))
        except ValueError:
            parser.error("--q-range must look like A..B")
        if not 1 <= a <= b:
            parser.error("--q-range must satisfy 1 <= A <= B")
        return list(range(a, b + 1))
    return [args.q if args.q is not None else default_q(name, args.power)]


def cmd_omega(args, parser) -> int:
    name = args.construction or args.construction_pos
    if name is None:
        parser.error("a construction is required (cw or asym)")
    cfg = _config(args)
    r = level_of(args.power)
    results = []
    for q in _q_values(args, parser, name):
        spec = get_construction(name, q)
        try:
            res = omega_search(spec, r, args.algorithm, cfg, args.rho_tol, args.margin, workers=args.workers,
                               cache=_cache(args, cfg))
        except NonCertifyingError as exc:
            print(f"q={q}: {exc}")
            continue
        results.append((res.omega, q, res))
        note = "" if res.monotone else "  (non-monotone bound detected)"
        print(f"q={q}: omega < {res.omega!r}{note}")
    if not results:
        print("no q value certifies an exponent below 3")
        return EXIT_FAIL
    best = min(results)
    print(f"best: q={best[1]} gives omega < {best[0]!r}")
    if args.out:
        cert = certificate_from_analysis(best[2].analysis, cfg, args.margin)
        atomic_write(args.out, cert.dumps())
        print(f"certificate written to {args.out}")
    return EXIT_OK


def cmd_sweep(args, parser) -> int:
    spec = _construction(args, parser)
    cfg = _config(args)
    rhos = list(args.rho)
    if args.rho_min is not None or args.rho_max is not None:
        if args.rho_min is None or args.rho_max is None or args.steps < 1:
            parser.error("--rho-min, --rho-max and --steps >= 1 go together")
        n = args.steps
        rhos += [args.rho_min + (args.rho_max - args.rho_min) * i / max(n - 1, 1) for i in range(n)]
    if not rhos:
        parser.error("give --rho values or a --rho-min/--rho-max grid")
    r = level_of(args.power)
    cache = _cache(args, cfg)
    rows = []
    for rho in sorted(set(rhos)):
        pa = analyze_power(spec, r, rho, args.algorithm, cfg, (), args.workers, cache)
        rows.append(SweepRow(rho, pa.log_bound, spec.threshold(r)))
        print(f"rho={rho!r}: margin {rows[-1].margin_linear:+.4e}", file=sys.stderr)
    text = sweep_csv(rows)
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args, parser) -> int:
    try:
        cert = BoundCertificate.loads(args.path.read_text())
        rep = verify_certificate(cert)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificateError as exc:
        print(f"malformed certificate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"{cert.construction} q={cert.q} power {cert.power} rho={cert.rho!r}")
    for c in rep.components:
        print(f"  component {c['abc']} level {c['level']}: log value {c['recomputed']:.17g} "
              f"(stored {c['claimed']:.17g}, residual {c['residual']:+.2e})")
    for e in rep.errors:
        print(f"  error: {e}")
    print(f"  recomputed V bound {_describe(rep.log_bound)}, threshold {_describe(rep.threshold_log)}")
    if rep.ok:
        print(f"VERIFIED: omega < {rep.omega!r}")
        return EXIT_OK
    print(rep.status)
    return EXIT_FAIL


def cmd_kernel(args, parser) -> int:
    spec = _construction(args, parser)
    r = level_of(args.power)
    S = power_support(spec, r)
    G = induced_group(S, spec.symmetry)
    if args.component is None:
        K = kernel_basis(S, G)
        print(f"{spec.name} power {args.power}: |S|={len(S)} dim={K.dim} chi={K.chi}")
    if r == 0:
        return EXIT_OK
    S_prev = power_support(spec, r - 1)
    targets = []
    if args.component:
        try:
            t = tuple(int(x) for x in args.component.split(","))
            assert len(t) == 3
        except (ValueError, AssertionError):
            parser.error("--component must look like a,b,c")
        if t not in S:
            parser.error(f"{t} is not in the support of power {args.power}")
        targets = [t]
    else:
        targets = sorted({spec.orbit_representative(t) for t in S.triples}, reverse=True)
    print(f"{'(a,b,c)':>14} {'|S|':>5} {'d':>4} {'chi':>4}")
    for t in targets:
        prob = component_support(S_prev, t)
        boundary = spec.boundary_index(t, r) is not None
        K = kernel_basis(prob.support, prob.group)
        tag = "  boundary" if boundary else ""
        print(f"{str(t):>14} {len(prob.support):>5} {orbits(prob.support, prob.group).orbit_count:>4} "
              f"{K.chi:>4}{tag}")
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "omega": cmd_omega, "sweep": cmd_sweep, "verify": cmd_verify,
            "kernel": cmd_kernel}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        return COMMANDS[args.command](args, sub)
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
