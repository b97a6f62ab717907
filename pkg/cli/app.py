#!/usr/bin/env python3
"""
markovgf command line

Subcommands:
- analyze: full exact report for a chain, identity verdicts decide the exit code
- gf: one hitting-time generating function and its series prefix
- plot-data: CSV samples of the pi_v(x) family on [0, 1]
- simulate: Monte Carlo hitting times (or geometric stopping) against exact values

Exit codes: 0 success, 1 identity failure or simulation error, 2 bad input.
"""

import argparse
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from markovgf.chain import Chain, load_chain
from markovgf.config import Settings, get_settings
from markovgf.detcore import char_bundle
from markovgf.errors import (
    ChainError,
    ConfigError,
    InvariantViolation,
    MarkovGFError,
    ShiftTooLarge,
    SimulationError,
)
from markovgf.exactalg import format_decimal, format_rational, parse_rational
from markovgf.hitting import hitting_gf, stationary
from markovgf.mcsim import SimConfig, histogram_csv, simulate_geometric_stop, simulate_hitting
from markovgf.report import build_report

logger = logging.getLogger(__name__)

LOG_FORMAT = '[%(asctime)s] [%(levelname)s] %(message)s'
LOG_DATEFMT = '%Y-%m-%dT%H:%M:%S%z'


def configure_logging(settings: Settings, verbose: bool = False) -> None:
    """Log to stderr, and to $LOG_DIR/markovgf.log when LOG_DIR is set."""
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.log_dir is not None:
        settings.log_dir.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(settings.log_dir / "markovgf.log", encoding='utf-8'))
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.log_level,
        format=LOG_FORMAT,
        datefmt=LOG_DATEFMT,
        handlers=handlers,
        force=True,
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        path = Path(out).expanduser()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        logger.info(f"Wrote {path}")
    else:
        sys.stdout.write(text)


def _load(args) -> Chain:
    return load_chain(args.input, args.format)


def _mixture_law(c: Chain, u, t: int, n: int) -> list[Fraction]:
    """P_u(tau_X^{>=t} = m), X ~ rho, for m < n."""
    rho = stationary(c)
    law = [Fraction(0)] * n
    for weight, v in zip(rho, c.states):
        for m, p in enumerate(hitting_gf(c, u, v, t).series(n)):
            law[m] += weight * p
    return law


# subcommands

def cmd_analyze(args, settings: Settings) -> int:
    chain = _load(args)
    k_max = settings.k_max if args.kmax is None else args.kmax
    summary = None
    if args.simulate:
        cfg = SimConfig(
            seed=settings.seed if args.seed is None else args.seed,
            n_paths=settings.n_paths if args.paths is None else args.paths,
            max_steps=settings.max_steps,
        )
        summary = simulate_hitting(chain, chain.states[0], None, 1, cfg)
    simulation = None if summary is None else {**summary.to_dict(), "seed": cfg.seed}
    report = build_report(chain, k_max, settings, simulation)
    if summary is not None:
        exact = report.kemeny.by_mean_hitting
        simulation["exact_mean"] = format_rational(exact)
        z = summary.z_score(exact)
        # undefined when the standard error is zero
        simulation["z_score"] = z if math.isfinite(z) else None
    if args.out:
        _emit(report.to_json(), args.out)
    print("\n".join(report.summary_lines()))
    return 0 if report.all_identities_pass else 1


def cmd_gf(args, settings: Settings) -> int:
    chain = _load(args)
    n = settings.series_len if args.series_len is None else args.series_len
    result = hitting_gf(chain, args.u, args.v, args.t, cross_check=True, settings=settings)
    gf = result.gf
    print(f"G_{{{result.u},{result.v}}}^{{>={result.t}}}(x) = {gf}")
    print("numerator: " + " ".join(gf.num.to_strings() or ["0"]))
    print("denominator: " + " ".join(gf.den.to_strings()))
    print("series: " + " ".join(format_rational(p) for p in gf.series(n)))
    return 0


def cmd_plot_data(args, settings: Settings) -> int:
    chain = _load(args)
    samples = settings.samples if args.samples is None else args.samples
    if samples < 2:
        raise ConfigError(f"--samples must be >= 2, got {samples}")
    bundle = char_bundle(chain)
    render = format_rational if args.exact else format_decimal
    lines = ["x," + ",".join(f"pi_{k + 1}" for k in range(chain.d))]
    for k in range(samples):
        x0 = Fraction(k, samples - 1)
        values = bundle.pi_at(x0)
        if 0 < x0 < 1 and any(p <= 0 for p in values):
            logger.warning(f"pi_v({x0}) not positive: {values}")
        lines.append(",".join([render(x0)] + [render(p) for p in values]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_simulate(args, settings: Settings) -> int:
    chain = _load(args)
    cfg = SimConfig(
        seed=settings.seed if args.seed is None else args.seed,
        n_paths=settings.n_paths if args.paths is None else args.paths,
        max_steps=settings.max_steps if args.max_steps is None else args.max_steps,
        workers=args.workers,
    )
    if args.stop_at is not None:
        x0 = parse_rational(args.stop_at)
        summary = simulate_geometric_stop(chain, args.u, x0, cfg)
        print(f"Geometric stop: u={summary.u} x0={format_rational(x0)} seed={cfg.seed} paths={cfg.n_paths}")
        print("state,count,empirical,exact,std_error,z_score")
        for v in chain.states:
            print(
                f"{v},{summary.counts[v]},{summary.empirical[v]:.6f},"
                f"{format_decimal(summary.exact[v])},{summary.std_errors[v]:.6f},"
                f"{summary.z_scores[v]:.3f}"
            )
        return 0

    if args.t > settings.t_max:
        raise ShiftTooLarge(args.t, settings.t_max)
    summary = simulate_hitting(chain, args.u, args.v, args.t, cfg)
    if args.v is None:
        def law_of(n):
            return _mixture_law(chain, args.u, args.t, n)
        rho = stationary(chain)
        exact_mean = sum(
            (w * hitting_gf(chain, args.u, v, args.t).mean() for w, v in zip(rho, chain.states)),
            Fraction(0),
        )
    else:
        gf = hitting_gf(chain, args.u, args.v, args.t)
        law_of = gf.series
        exact_mean = gf.mean()
    target = "X~rho" if summary.v is None else summary.v
    print(f"Simulation: u={summary.u} v={target} t={summary.t} seed={cfg.seed} paths={cfg.n_paths}")
    print(f"empirical mean: {summary.mean:.6f}")
    print(f"std error: {summary.std_error:.6f}")
    print(f"exact mean: {format_rational(exact_mean)} ({format_decimal(exact_mean)})")
    print(f"delta: {summary.mean - float(exact_mean):.6f}")
    print(f"z-score: {summary.z_score(exact_mean):.3f}")
    if args.histogram:
        exact_law = law_of(max(summary.histogram) + 1)
        _emit(histogram_csv(summary, exact_law), args.histogram)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--input', '-i', required=True, help='Chain file (JSON or CSV)')
    common.add_argument('--format', '-f', choices=['json', 'csv'],
                        help='Input format (default: from the file suffix)')
    common.add_argument('--verbose', '-v', action='store_true', help='Verbose output')

    parser = argparse.ArgumentParser(
        prog='markovgf',
        description='Exact hitting-time generating functions for finite Markov chains',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    analyze = sub.add_parser('analyze', parents=[common], help='Full exact report')
    analyze.add_argument('--out', '-o', help='Write the JSON report here')
    analyze.add_argument('--kmax', type=int,
                         help='Highest factorial moment (default: 4, practical bound: 8)')
    analyze.add_argument('--simulate', action='store_true',
                         help='Attach a Monte Carlo estimate of the Kemeny constant')
    analyze.add_argument('--seed', type=int, help='Simulation seed')
    analyze.add_argument('--paths', type=int, help='Simulated paths')
    analyze.set_defaults(handler=cmd_analyze)

    gf = sub.add_parser('gf', parents=[common], help='Hitting-time generating function')
    gf.add_argument('u', help='Start state')
    gf.add_argument('v', help='Target state')
    gf.add_argument('--t', type=int, default=0, help='Shift t in tau_v^{>=t} (default: 0)')
    gf.add_argument('--series-len', type=int, help='Series coefficients to print (default: 20)')
    gf.set_defaults(handler=cmd_gf)

    plot = sub.add_parser('plot-data', parents=[common], help='CSV samples of pi_v(x)')
    plot.add_argument('--samples', type=int, help='Equispaced points on [0, 1] (default: 101)')
    plot.add_argument('--exact', action='store_true', help='Write exact rationals')
    plot.add_argument('--out', '-o', help='Output CSV (default: stdout)')
    plot.set_defaults(handler=cmd_plot_data)

    simulate = sub.add_parser('simulate', parents=[common], help='Monte Carlo hitting times')
    simulate.add_argument('--u', required=True, help='Start state')
    simulate.add_argument('--v', help='Target state (default: X ~ stationary law)')
    simulate.add_argument('--t', type=int, default=1, help='Shift t (default: 1)')
    simulate.add_argument('--seed', type=int, help='Seed (default: 20240101)')
    simulate.add_argument('--paths', type=int, help='Number of paths (default: 100000)')
    simulate.add_argument('--max-steps', type=int, help='Step cap per path')
    simulate.add_argument('--workers', type=int, default=1, help='Worker threads')
    simulate.add_argument('--stop-at', help='Simulate C at a Geometric time with parameter x0')
    simulate.add_argument('--histogram', help='Write histogram CSV here')
    simulate.set_defaults(handler=cmd_simulate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for CLI usage."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = get_settings()
    except ConfigError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 2
    configure_logging(settings, args.verbose)

    try:
        return args.handler(args, settings)
    except (ChainError, ShiftTooLarge, ConfigError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 2
    except (InvariantViolation, SimulationError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 1
    except MarkovGFError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
