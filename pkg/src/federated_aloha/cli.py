"""
Command-line interface for the simulator.

Example usage:

Single config:
    PYTHONPATH=src python3 -m federated_aloha.cli simulate \\
      --config src/data/configs/fig2_adaptive.cfg --out outputs/fig2_adaptive.csv

Preset (one CSV per policy/sweep point plus index.csv):
    PYTHONPATH=src python3 -m federated_aloha.cli preset --name fig2 \\
      --out-dir outputs/fig2 --runs 20 --seed 0
"""

from __future__ import annotations

import argparse
import logging
import sys
import traceback
from pathlib import Path

from . import access, channel, model
from .simulation import io as io_module
from .simulation import presets
from .simulation.config import ConfigValidationError, config_help, load_config, render_config
from .simulation.runner import run_many


CONFIG_EPILOG = "Config keys and defaults (key=value, one per line):\n" + config_help()


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="federated_aloha",
        description="Simulate federated learning over a multichannel ALOHA uplink.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=CONFIG_EPILOG,
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Log debug messages to stderr.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser(
        "simulate",
        help="Run one config file and write its CSV trajectory.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=CONFIG_EPILOG,
    )
    simulate.add_argument(
        "--config",
        required=True,
        help="Path to the key=value config document.",
    )
    simulate.add_argument(
        "--out",
        help="CSV file to write (default: stdout).",
    )
    simulate.add_argument(
        "--workers",
        type=int,
        default=1,
        help="Processes used for the runs (default: 1).",
    )

    preset = subparsers.add_parser(
        "preset",
        help="Run a named experiment preset.",
    )
    preset.add_argument(
        "--name",
        required=True,
        choices=presets.PRESET_NAMES,
        help="Preset to run.",
    )
    preset.add_argument(
        "--out-dir",
        required=True,
        help="Directory to write outputs into.",
    )
    preset.add_argument(
        "--runs",
        type=int,
        default=presets.DEFAULT_RUNS,
        help=f"Runs averaged per config (default: {presets.DEFAULT_RUNS}).",
    )
    preset.add_argument(
        "--seed",
        type=int,
        default=0,
        help="Base seed; run r uses seed XOR r (default: 0).",
    )
    preset.add_argument(
        "--workers",
        type=int,
        default=1,
        help="Processes used for the runs (default: 1).",
    )

    return parser.parse_args(argv)


def _simulate(args: argparse.Namespace) -> None:
    config = load_config(Path(args.config))
    print(render_config(config), end="", file=sys.stderr)
    summary = run_many(config, workers=args.workers)
    io_module.emit_csv(summary, Path(args.out) if args.out else None)


def _preset(args: argparse.Namespace) -> None:
    if args.runs < 1:
        raise ConfigValidationError(f"--runs must be at least 1, got {args.runs}")
    if args.seed < 0:
        raise ConfigValidationError(f"--seed must be nonnegative, got {args.seed}")
    out_dir = Path(args.out_dir)
    summaries = presets.run_preset(
        args.name, out_dir, runs=args.runs, seed=args.seed, workers=args.workers
    )
    print(f"Preset {args.name} complete. Outputs written to {out_dir}")
    print(f"  - {len(summaries)} trajectories averaged over {args.runs} runs")
    print(f"  - Index: {out_dir / presets.INDEX_FILE}")


def main(argv: list[str] | None = None) -> None:
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        if args.command == "simulate":
            _simulate(args)
        else:
            _preset(args)
    except FileNotFoundError as e:
        print(f"[error] {e}", file=sys.stderr)
        sys.exit(1)
    except ConfigValidationError as e:
        print(f"[config error] {e}", file=sys.stderr)
        sys.exit(1)
    except (model.ModelError, channel.ChannelError, access.AccessError) as e:
        print(f"[simulation error] {e}", file=sys.stderr)
        sys.exit(1)
    except OSError as e:
        print(f"[io error] {e}", file=sys.stderr)
        sys.exit(1)
    except Exception as e:
        traceback.print_exc(file=sys.stderr)
        print(f"[unexpected error] {e}", file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
