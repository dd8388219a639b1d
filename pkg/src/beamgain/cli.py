"""Command-line front end: CSV tables of patterns, CDFs, capacities and simulations.

Every subcommand writes a provenance comment line, a header row and then the
data, with floats printed to 12 significant digits. Exit status is 0 on
success, 2 on usage errors and 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import __version__
from .beams import ArrayConfig, beam_pattern, first_beam_direction
from .dist import (
    RicianParams,
    antenna_selection_dist,
    beam_selection_dist,
    bound_q_dist,
    theta0_lower_dist,
    theta0_upper_dist,
)
from .mc import SimConfig, ks_distance, run_simulation, write_samples
from .perf import (
    IntegrationError,
    ergodic_capacity,
    ergodic_capacity_approx,
    growth_diagnostics,
    mean_gain,
)

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def _m_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integer or comma list, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty M list")
    return values


def _theta_arg(text: str):
    if text in ("zero", "nu"):
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"theta must be degrees, 'zero' or 'nu', got {text!r}")


def _theta_rad(theta, cfg: ArrayConfig) -> float:
    if theta == "zero":
        return 0.0
    if theta == "nu":
        return first_beam_direction(cfg)
    return math.radians(theta)


def _single_m(args) -> int:
    if len(args.M) != 1:
        raise UsageError(f"{args.command} takes a single --M value")
    return args.M[0]


def _provenance(args) -> str:
    parts = []
    for key in ("M", "spacing", "K_db", "theta", "rho_db", "n", "seed", "grid_points", "full"):
        if not hasattr(args, key):
            continue
        value = getattr(args, key)
        if key == "M":
            value = ",".join(str(m) for m in value)
        if key == "full":
            if value:
                parts.append("--full")
            continue
        parts.append(f"--{key.replace('_', '-')} {value}")
    return f"# beamgain v1 {args.command} " + " ".join(parts)


def cmd_beam_pattern(args):
    cfg = ArrayConfig(_single_m(args), args.spacing)
    nu = first_beam_direction(cfg)
    if args.full:
        grid = np.linspace(-90.0, 90.0, args.grid_points)
        rad = np.radians(grid)
    else:
        rad = np.linspace(0.0, nu, args.grid_points)
        grid = np.degrees(rad)
    header = ["theta_deg", "theta_rad"] + [f"gamma_{m}" for m in range(1, cfg.M + 1)]
    rows = []
    for deg, th in zip(grid, rad):
        rows.append([deg, th, *beam_pattern(float(th), cfg).gammas])
    return header, rows


def cmd_cdf(args):
    cfg = ArrayConfig(_single_m(args), args.spacing)
    rician = RicianParams.from_db(args.K_db)
    theta = _theta_rad(args.theta, cfg)
    beam = beam_selection_dist(theta, cfg, rician)
    ant = antenna_selection_dist(cfg, rician)
    beam_nu = beam_selection_dist(first_beam_direction(cfg), cfg, rician)
    q_m = bound_q_dist(cfg.M, rician)
    columns = [("beam", beam), ("antenna", ant), ("beam_nu", beam_nu), ("bound_Q_M", q_m)]
    if cfg.M >= 4:
        columns += [
            ("beam_zero", beam_selection_dist(0.0, cfg, rician)),
            ("bound_Qa2", theta0_upper_dist(cfg, rician)),
            ("bound_Qa2_Qb2_W", theta0_lower_dist(cfg, rician)),
        ]
    x_hi = max(d.quantile(1 - 1e-6) for _, d in columns)
    x = np.linspace(0.0, x_hi, args.grid_points)
    values = [d.cdf(x) for _, d in columns]
    header = ["x"] + [name for name, _ in columns]
    rows = [[xi, *(v[i] for v in values)] for i, xi in enumerate(x)]
    return header, rows


def cmd_capacity(args):
    rician = RicianParams.from_db(args.K_db)
    rho = 10.0 ** (args.rho_db / 10.0)
    header = ["M", "exact_nu", "approx_nu", "gap_nu", "exact_0", "approx_0", "gap_0"]
    rows = []
    for M in args.M:
        cfg = ArrayConfig(M, args.spacing)
        e_nu = ergodic_capacity("nu", cfg, rician, rho)
        a_nu = ergodic_capacity_approx("nu", cfg, rician, rho)
        e_0 = ergodic_capacity("zero", cfg, rician, rho)
        a_0 = ergodic_capacity_approx("zero", cfg, rician, rho) if M >= 4 else math.nan
        rows.append([M, e_nu, a_nu, abs(e_nu - a_nu), e_0, a_0, abs(e_0 - a_0)])
    return header, rows


def cmd_simulate(args):
    if args.n < 1000:
        raise UsageError("simulate needs --n >= 1000")
    cfg = ArrayConfig(_single_m(args), args.spacing)
    rician = RicianParams.from_db(args.K_db)
    theta = _theta_rad(args.theta, cfg)
    sim = SimConfig(args.n, args.seed, theta, cfg, rician)
    beam_emp, ant_emp = run_simulation(sim, workers=args.workers)
    beam = beam_selection_dist(theta, cfg, rician)
    ant = antenna_selection_dist(cfg, rician)
    if args.dump:
        write_samples(f"{args.dump}.beam.bin", beam_emp, sim)
        write_samples(f"{args.dump}.antenna.bin", ant_emp, sim)
    x = np.linspace(0.0, max(beam_emp.sorted_samples[-1], ant_emp.sorted_samples[-1]), args.grid_points)
    header = ["x", "empirical_beam", "analytic_beam", "empirical_antenna", "analytic_antenna"]
    cols = [beam_emp(x), beam.cdf(x), ant_emp(x), ant.cdf(x)]
    rows = [[xi, *(c[i] for c in cols)] for i, xi in enumerate(x)]
    summary = {
        "ks_beam": ks_distance(beam_emp, beam),
        "ks_antenna": ks_distance(ant_emp, ant),
        "ks_tolerance": 1.5 * 1.36 / math.sqrt(args.n),
        "mean_beam": beam_emp.mean,
        "se_beam": beam_emp.std_error,
        "analytic_mean_beam": mean_gain(beam),
        "mean_antenna": ant_emp.mean,
        "se_antenna": ant_emp.std_error,
        "analytic_mean_antenna": mean_gain(ant),
    }
    for key, value in summary.items():
        print(f"{key}: {_fmt(value)}", file=sys.stderr)
    return header, rows


def cmd_growth(args):
    rician = RicianParams.from_db(args.K_db)
    rho = 10.0 ** (args.rho_db / 10.0)
    theta = args.theta if isinstance(args.theta, str) else math.radians(args.theta)
    table = growth_diagnostics(args.M, rician, rho, args.spacing, theta)
    header = list(table[0].keys())
    return header, [[row[k] for k in header] for row in table]


COMMANDS = {
    "beam-pattern": cmd_beam_pattern,
    "cdf": cmd_cdf,
    "capacity": cmd_capacity,
    "simulate": cmd_simulate,
    "growth": cmd_growth,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamgain",
        description="Beam selection vs antenna selection gains over Rician fading.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, m_default="4", theta=True, k=True, rho=False):
        p.add_argument("--M", type=_m_list, default=_m_list(m_default),
                       help="antenna count, or comma-separated list where accepted")
        p.add_argument("--spacing", type=float, default=0.5, help="element spacing d/lambda")
        if k:
            p.add_argument("--K-db", dest="K_db", type=float, default=0.0, help="Rician K in dB")
        if theta:
            p.add_argument("--theta", type=_theta_arg, default="nu",
                           help="azimuth in degrees, or 'zero' / 'nu'")
        if rho:
            p.add_argument("--rho-db", dest="rho_db", type=float, default=5.0, help="SNR in dB")
        p.add_argument("--grid-points", dest="grid_points", type=int, default=101)
        p.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")

    p = sub.add_parser("beam-pattern", help="per-beam line-of-sight gains over azimuth")
    common(p, theta=False, k=False)
    p.add_argument("--full", action="store_true", help="sweep -90..90 degrees instead of 0..nu")

    p = sub.add_parser("cdf", help="exact CDFs and stochastic bounds")
    common(p)

    p = sub.add_parser("capacity", help="ergodic capacity, exact and approximate")
    common(p, m_default="2,4,8,16,32,64", theta=False, rho=True)

    p = sub.add_parser("simulate", help="Monte Carlo validation against the analytic CDFs")
    common(p)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dump", default=None, help="prefix for binary sample dumps")

    p = sub.add_parser("growth", help="order-of-growth diagnostics over M")
    common(p, m_default="2,4,8,16,32,64,128", rho=True)
    return parser


def _write_csv(stream, provenance: str, header, rows) -> None:
    stream.write(provenance + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.grid_points < 2:
        parser.error("--grid-points must be >= 2")
    try:
        header, rows = COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"beamgain: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationError, ArithmeticError, FloatingPointError) as exc:
        print(f"beamgain: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    buf = io.StringIO()
    _write_csv(buf, _provenance(args), header, rows)
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
