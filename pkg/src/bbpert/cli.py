"""
Command-line front end.

    bbpert series --K 2 --J 50 --out quartic.json
    bbpert pade quartic.json --N-max 23 --with-oracle
    bbpert truncate quartic.json --search-bound 40
    bbpert figure quartic.json sextic.json --format svg --out fig1.svg
    bbpert compare quartic.json
    bbpert oracle --K 3
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import mpmath

from . import __version__
from .analysis import (
    LOG_BASE,
    convergence_profile,
    max_pade_order,
    optimal_truncation,
    pade_diagonal,
    pade_table,
)
from .bbcore import AnsatzSpec, BBSeries, PotentialSpec
from .errors import BBError, PadeError
from .numkernel import DEFAULT_PRECISION, scalar, to_decimal, working_precision
from .oracle import OracleConfig, reference_result, scaled_eigenvalue
from .store import compute_or_load, default_cache_dir, load_series, write_series

log = logging.getLogger("bbpert")

PROFILE_COLUMN = f"log{LOG_BASE}_abs_Ej_over_E0"


def _parse_potential(text: str) -> PotentialSpec:
    """``"2=1,4=0.5"`` -> ``x**2 + 0.5 x**4``."""
    pairs = []
    for item in text.split(","):
        exp, _, value = item.partition("=")
        if not value:
            raise argparse.ArgumentTypeError(f"bad potential term {item!r}; expected EXP=VALUE")
        pairs.append((int(exp), value.strip()))
    return PotentialSpec(tuple(pairs))


def series_label(series: BBSeries) -> str:
    pot = series.potential
    if pot.is_pure_power():
        label = f"K={pot.K}"
    else:
        label = "V=" + "+".join(f"{mpmath.nstr(v, 6)}x^{e}" for e, v in pot.coeffs)
    if series.ansatz.p != pot.K - 1:
        label += f" (p={series.ansatz.p})"
    return label


def _emit(text: str, out) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _oracle_config(args) -> OracleConfig:
    return OracleConfig(basis_size=args.basis_size, precision=args.oracle_precision,
                        convergence_window=args.window, target_digits=args.target_digits,
                        max_basis_size=args.max_basis_size)


def _oracle_for(series: BBSeries, config: OracleConfig):
    pot = series.potential
    if not pot.is_pure_power():
        raise BBError("the eigenvalue oracle only handles pure powers c*x^(2K)")
    with working_precision(config.precision):
        return scaled_eigenvalue(pot.K, pot.coeffs[0][1], config)


def cmd_series(args) -> int:
    if args.potential:
        potential = _parse_potential(args.potential)
    elif args.K is not None:
        potential = PotentialSpec.pure_power(args.K, scalar(args.coupling))
    else:
        raise BBError("series needs --K or --potential")
    ansatz = AnsatzSpec(args.p if args.p is not None else potential.K - 1)
    out = args.out or f"series_K{potential.K}_p{ansatz.p}_J{args.J}.json"
    text, hit = compute_or_load(potential, ansatz, args.J, args.precision, args.cache_dir)
    manifest = write_series(out, text, potential, ansatz, args.J, args.precision, sys.argv, hit)
    summary = {"out": str(out), "terms": args.J + 1, "cache_hit": hit, "sha256": manifest.series_sha256}
    if args.format == "csv":
        sys.stdout.write(_csv_text(list(summary), [list(summary.values())]))
    else:
        sys.stdout.write(json.dumps(summary, indent=1) + "\n")
    return 0


def cmd_pade(args) -> int:
    series = load_series(args.series)
    feasible = max_pade_order(series)
    n_max = feasible if args.N_max is None else args.N_max
    if n_max > feasible:
        raise PadeError(f"insufficient terms: {len(series.terms)} terms support N <= {feasible}, "
                        f"requested {n_max}")
    table = pade_table(series, n_max)
    first = 0 if n_max == 0 else 1
    with working_precision(series.precision):
        rows = [(N, to_decimal(v)) for N, v in table.rows() if N >= first]
    if args.with_oracle:
        exact = _oracle_for(series, _oracle_config(args))
        rows.append(("Exact", mpmath.nstr(exact, args.oracle_precision - 5)))
    if args.format == "json":
        text = json.dumps([{"N": n, "value": v} for n, v in rows], indent=1) + "\n"
    else:
        text = _csv_text(["N", "value"], rows)
    _emit(text, args.out)
    return 0


def cmd_truncate(args) -> int:
    series = load_series(args.series)
    with working_precision(series.precision):
        report = optimal_truncation(series, args.search_bound)
        if args.format == "csv":
            rows = [(j, to_decimal(E), to_decimal(s), int(j == report.argmin_index))
                    for j, (E, s) in enumerate(zip(series.energies, report.partial_sums))]
            text = _csv_text(["j", "E_j", "partial_sum", "smallest_term"], rows)
        else:
            text = json.dumps(report.to_json(), indent=1) + "\n"
    _emit(text, args.out)
    return 0


def cmd_figure(args) -> int:
    fmt = args.format or "csv"
    if fmt not in ("csv", "svg", "png"):
        raise BBError(f"figure format must be csv, svg or png, not {fmt}")
    labels = list(args.label or [])
    rows, profiles = [], {}
    for i, path in enumerate(args.series):
        series = load_series(path)
        label = labels[i] if i < len(labels) else series_label(series)
        points = []
        with working_precision(series.precision):
            for pt in convergence_profile(series):
                value = "" if pt.terminated else mpmath.nstr(pt.value, 17)
                rows.append((label, pt.j, value, int(pt.terminated)))
                if not pt.terminated:
                    points.append((pt.j, pt.value))
        profiles[label] = points
    table = _csv_text(["label", "j", PROFILE_COLUMN, "terminated"], rows)
    if fmt == "csv":
        _emit(table, args.out)
        return 0
    if not args.out:
        raise BBError(f"--out is required for {fmt} output")
    from .plotting import render_profiles

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    render_profiles(profiles, out)
    out.with_suffix(".csv").write_text(table, encoding="utf-8")
    return 0


def cmd_compare(args) -> int:
    series = load_series(args.series)
    config = _oracle_config(args)
    with working_precision(series.precision):
        trunc = optimal_truncation(series, args.search_bound)
        if args.N is not None:
            n, pade = args.N, pade_diagonal(series, args.N)
        else:
            # terminating series make every higher approximant degenerate
            for n in range(max_pade_order(series), -1, -1):
                try:
                    pade = pade_diagonal(series, n)
                    break
                except PadeError:
                    log.info("[%d,%d] degenerate, trying a lower order", n, n)
    exact = _oracle_for(series, config)
    digits = min(series.precision, config.precision) - 5
    with working_precision(max(series.precision, config.precision)):
        report = {
            "label": series_label(series),
            "truncation": {"argmin_index": trunc.argmin_index, "estimate": mpmath.nstr(trunc.best_estimate, digits),
                           "abs_error": mpmath.nstr(abs(trunc.best_estimate - exact), 6)},
            "pade": {"N": n, "value": mpmath.nstr(pade, digits), "abs_error": mpmath.nstr(abs(pade - exact), 6)},
            "oracle": {"eigenvalue": mpmath.nstr(exact, config.precision - 5)},
        }
    _emit(json.dumps(report, indent=1) + "\n", args.out)
    return 0


def cmd_oracle(args) -> int:
    config = _oracle_config(args)
    if args.coupling != "1":
        with working_precision(config.precision):
            value = scaled_eigenvalue(args.K, scalar(args.coupling), config)
            payload = {"K": args.K, "coupling": args.coupling, "eigenvalue": mpmath.nstr(value, config.precision - 5),
                       "basis_size": None, "converged": True}
    else:
        payload = reference_result(args.K, config).to_json()
    if args.format == "csv":
        text = _csv_text(list(payload), [list(payload.values())])
    else:
        text = json.dumps(payload, indent=1) + "\n"
    _emit(text, args.out)
    return 0


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS,
                        help=f"working precision in decimal digits (default {DEFAULT_PRECISION})")
    common.add_argument("--cache-dir", default=argparse.SUPPRESS,
                        help="series cache directory (default $BBPERT_CACHE_DIR or ~/.cache/bbpert)")
    common.add_argument("--format", default=argparse.SUPPRESS, choices=["json", "csv", "svg", "png"],
                        help="output format")
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    return common


def _oracle_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("oracle")
    g.add_argument("--basis-size", type=int, default=40)
    g.add_argument("--window", type=int, default=20, help="basis states added for the convergence check")
    g.add_argument("--oracle-precision", type=int, default=30)
    g.add_argument("--target-digits", type=int, default=14)
    g.add_argument("--max-basis-size", type=int, default=320)


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="bbpert", parents=[common],
                                     description="Riccati perturbation series for x^(2K) ground states")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("series", parents=[common], help="compute E_j, f_j, W_j for j = 0..J")
    p.add_argument("--K", type=int)
    p.add_argument("--p", type=int, help="ansatz offset (default K-1)")
    p.add_argument("--J", type=int, default=50)
    p.add_argument("--coupling", default="1", help="coefficient of x^(2K)")
    p.add_argument("--potential", help="general even potential, e.g. 2=1,4=0.1")
    p.add_argument("--out")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("pade", parents=[common], help="diagonal Pade table at beta=1")
    p.add_argument("series")
    p.add_argument("--N-max", type=int, dest="N_max")
    p.add_argument("--with-oracle", action="store_true")
    p.add_argument("--out")
    _oracle_flags(p)
    p.set_defaults(func=cmd_pade)

    p = sub.add_parser("truncate", parents=[common], help="smallest-term truncation report")
    p.add_argument("series")
    p.add_argument("--search-bound", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_truncate)

    p = sub.add_parser("figure", parents=[common], help="log10|E_j/E_0| profile as CSV or figure")
    p.add_argument("series", nargs="+")
    p.add_argument("--label", action="append")
    p.add_argument("--out")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("compare", parents=[common], help="truncation and Pade against the oracle")
    p.add_argument("series")
    p.add_argument("--search-bound", type=int)
    p.add_argument("--N", type=int, help="Pade order (default: largest feasible)")
    p.add_argument("--out")
    _oracle_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", parents=[common], help="Rayleigh-Ritz reference eigenvalue")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--coupling", default="1")
    p.add_argument("--out")
    _oracle_flags(p)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.precision = getattr(args, "precision", DEFAULT_PRECISION)
    args.cache_dir = getattr(args, "cache_dir", None) or default_cache_dir()
    args.format = getattr(args, "format", None)
    verbose = getattr(args, "verbose", 0) or 0
    logging.basicConfig(level=logging.DEBUG if verbose > 1 else logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (BBError, ValueError, OSError) as exc:
        print(f"bbpert {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
