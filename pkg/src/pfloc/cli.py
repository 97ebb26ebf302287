"""Command-line driver: map generation, experiment batches, grid oracle.

Subcommands:
  gen-map   write a synthetic fingerprint map (JSON)
  run       run stationary-robot filter trials against a map; CSV + optional SVG
  oracle    dump the single-observation grid posterior as CSV

Every command is deterministic given its flags; the seed defaults to the
PFLOC_SEED environment variable (then 0) when not passed explicitly.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import grid, plotting, sim
from .filtering import DegenerateFilterError, FilterConfig
from .rfmap import MapFormatError, Point2, load_map, save_map


def _default_seed() -> int:
    return int(os.environ.get("PFLOC_SEED", "0"))


def _parse_area(text: str) -> tuple[float, float]:
    try:
        length, width = text.lower().split("x")
        length, width = float(length), float(width)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LENGTHxWIDTH, got {text!r}")
    if length <= 0 or width <= 0:
        raise argparse.ArgumentTypeError(f"area dimensions must be positive, got {text!r}")
    return length, width


def _parse_point(text: str) -> Point2:
    try:
        x, y = (float(v) for v in text.split(","))
        return Point2(x, y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y, got {text!r}")


def _parse_aps(text: str) -> list[Point2]:
    try:
        return [_parse_point(part) for part in text.split(";") if part.strip()]
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"expected X,Y;X,Y;..., got {text!r}")


def _resolve_aps(args, area_length: float, area_width: float) -> list[Point2]:
    if args.aps is not None:
        return args.aps
    return sim.corner_center_aps(area_length, area_width)


def _radio_model(args) -> sim.RadioModel:
    return sim.RadioModel(p0=args.p0, path_loss_exponent=args.exponent, d0=args.d0)


def _add_radio_flags(parser) -> None:
    parser.add_argument("--aps", type=_parse_aps, default=None,
                        help="AP positions as 'x,y;x,y;...' (default: corners + center)")
    parser.add_argument("--p0", type=float, default=-40.0,
                        help="reference RSS at d0, dBm (default -40)")
    parser.add_argument("--exponent", type=float, default=2.2,
                        help="path-loss exponent (default 2.2)")
    parser.add_argument("--d0", type=float, default=1.0,
                        help="reference distance, m (default 1)")


def cmd_gen_map(args) -> int:
    model = _radio_model(args)
    length, width = args.area
    aps = _resolve_aps(args, length, width)
    fmap = sim.generate_synthetic_map(length, width, aps, args.spacing, model, seed=args.seed)
    save_map(fmap, args.out)
    print(f"wrote {args.out}: {fmap.n_landmarks} landmarks, {fmap.n_aps} APs, "
          f"{fmap.area_length:.4g}x{fmap.area_width:.4g} m")
    return 0


def _run_one_batch(args, fmap, aps, model, n_particles: int):
    scenario = sim.ScenarioConfig(
        fmap=fmap,
        ap_positions=aps,
        model=model,
        robot_position=args.robot,
        filter=FilterConfig(
            n_particles=n_particles,
            sigma=args.sigma,
            jitter=args.jitter,
            seed=args.seed,
        ),
        iterations=args.iters,
        trials=args.trials,
        observation_noise_sigma=args.noise,
        fixed_observation=args.fixed_observation,
    )
    return scenario, sim.run_batch(scenario)


def _summary_line(summary: sim.BatchSummary) -> str:
    return (
        f"mean_error_m={summary.mean_error_m:.4f} "
        f"min={summary.min_error_m:.4f} max={summary.max_error_m:.4f} "
        f"trials={len(summary.results)} failures={len(summary.failures)}"
    )


def cmd_run(args) -> int:
    fmap = load_map(args.map)
    aps = _resolve_aps(args, fmap.area_length, fmap.area_width)
    model = _radio_model(args)

    if args.table1:
        columns = {}
        for n_particles in (300, 1000):
            _, summary = _run_one_batch(args, fmap, aps, model, n_particles)
            columns[n_particles] = summary
        print(f"{'':>3} {'Np=300':>22} {'Error (m)':>10} {'Np=1000':>22} {'Error (m)':>10}")
        rows = max(len(s.results) for s in columns.values())
        for i in range(rows):
            cells = [f"{i + 1:>3}"]
            for n_particles in (300, 1000):
                results = columns[n_particles].results
                if i < len(results):
                    r = results[i]
                    cells.append(f"({r.estimate.x:.4f}, {r.estimate.y:.4f})".rjust(22))
                    cells.append(f"{r.error_m:.4f}".rjust(10))
                else:
                    cells.extend([" " * 22, " " * 10])
            print(" ".join(cells))
        print(f"{'avg':>3} {'':>22} {columns[300].mean_error_m:>10.4f} "
              f"{'':>22} {columns[1000].mean_error_m:>10.4f}")
        for n_particles in (300, 1000):
            print(f"Np={n_particles}: {_summary_line(columns[n_particles])}")
        summary = columns[1000]
        scenario = None
    else:
        scenario, summary = _run_one_batch(args, fmap, aps, model, args.particles)
        print(_summary_line(summary))

    if not summary.results:
        print("error: every trial degenerated", file=sys.stderr)
        return 1
    sim.write_results_csv(summary, args.out)

    if args.plot and scenario is not None:
        last = summary.results[-1]
        _, final_set = sim.run_trial_with_particles(
            scenario, scenario.filter.seed + last.trial_index, last.trial_index
        )
        plotting.render_run_plot(
            fmap,
            final_set.positions,
            args.robot,
            [r.estimate for r in summary.results],
            args.plot,
            title=f"Np={args.particles}, {args.trials} trials",
        )
    return 0


def cmd_oracle(args) -> int:
    fmap = load_map(args.map)
    aps = _resolve_aps(args, fmap.area_length, fmap.area_width)
    model = _radio_model(args)
    observed = sim.simulate_measurement(model, aps, args.robot, noise_sigma=0.0, rng=None)
    posterior = grid.grid_posterior(fmap, observed, args.sigma, args.cell)
    grid.write_posterior_csv(posterior, args.out)
    mean = grid.posterior_mean(posterior)
    print(f"posterior_mean=({mean.x:.4f}, {mean.y:.4f}) cells={posterior.probabilities.size}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfloc",
        description="WiFi-RSS fingerprint particle-filter localization toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen-map", help="generate a synthetic fingerprint map")
    p_gen.add_argument("--area", type=_parse_area, default=(10.0, 10.0),
                       help="area as LENGTHxWIDTH in meters (default 10x10)")
    p_gen.add_argument("--spacing", type=float, default=1.0,
                       help="landmark grid spacing, m (default 1)")
    _add_radio_flags(p_gen)
    p_gen.add_argument("--seed", type=int, default=_default_seed())
    p_gen.add_argument("--out", required=True, help="output map JSON path")
    p_gen.set_defaults(func=cmd_gen_map)

    p_run = sub.add_parser("run", help="run stationary-robot localization trials")
    p_run.add_argument("--map", required=True, help="fingerprint map JSON path")
    p_run.add_argument("--robot", type=_parse_point, default=Point2(2.4, 3.6),
                       help="true robot position X,Y (default 2.4,3.6)")
    p_run.add_argument("--particles", type=int, default=300)
    p_run.add_argument("--iters", type=int, default=50)
    p_run.add_argument("--trials", type=int, default=10)
    p_run.add_argument("--sigma", type=float, default=4.0,
                       help="likelihood spread, dBm (default 4)")
    p_run.add_argument("--jitter", type=float, default=0.05,
                       help="uniform position-noise half-width, m (default 0.05)")
    p_run.add_argument("--noise", type=float, default=0.5,
                       help="observation noise sigma, dBm (default 0.5)")
    _add_radio_flags(p_run)
    p_run.add_argument("--seed", type=int, default=_default_seed())
    p_run.add_argument("--out", required=True, help="output results CSV path")
    p_run.add_argument("--plot", default=None, help="optional scatter figure path (SVG)")
    p_run.add_argument("--fixed-observation", action="store_true",
                       help="reuse one RSS sample for every iteration")
    p_run.add_argument("--table1", action="store_true",
                       help="run both Np=300 and Np=1000 batches, print a two-column table")
    p_run.set_defaults(func=cmd_run)

    p_or = sub.add_parser("oracle", help="grid Bayes posterior for one noiseless observation")
    p_or.add_argument("--map", required=True)
    p_or.add_argument("--robot", type=_parse_point, default=Point2(2.4, 3.6))
    p_or.add_argument("--sigma", type=float, default=4.0)
    p_or.add_argument("--cell", type=float, default=0.1, help="grid cell size, m (default 0.1)")
    _add_radio_flags(p_or)
    p_or.add_argument("--out", required=True, help="output posterior CSV path")
    p_or.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MapFormatError, DegenerateFilterError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
