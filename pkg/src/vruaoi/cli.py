"""Command-line front end: ``vruaoi run``, ``vruaoi sweep``, ``vruaoi defaults``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import config as cfgmod
from .config import Architecture
from .engine import BOTH, run, run_pair, sweep_density, sweep_interarrival
from .errors import ConfigError
from .output import records_from_sweep, render, result_to_dict

log = logging.getLogger("vruaoi")


def parse_values(text: str) -> list[float]:
    """``25,50,75`` or an inclusive range ``10:100:10``."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError(f"range must be start:stop:step with step > 0, got {text!r}")
        start, stop, step = parts
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    return [float(v) for v in text.split(",") if v.strip()]


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args):
    config = cfgmod.load_config(args.config)
    if args.seed is not None:
        config = cfgmod.check_valid(config.replace(seed=args.seed))
    return config


def cmd_run(args) -> int:
    config = _load(args)
    if args.arch == "both":
        pair = run_pair(config, args.replication)
        results = [pair[a] for a in BOTH]
    else:
        results = [run(config.replace(architecture=Architecture(args.arch)), args.replication)]
    log.info("seed=%d replication=%d", config.seed, args.replication)
    payload = {"results": [result_to_dict(r) for r in results]}
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_sweep(args) -> int:
    config = _load(args)
    try:
        values = parse_values(args.values)
    except ValueError as exc:
        raise ConfigError(f"--values: {exc}") from None
    if not values:
        raise ConfigError("--values: no values given")
    if args.axis == "density":
        if any(v != int(v) or v < 1 for v in values):
            raise ConfigError("--values: VRU counts must be positive integers")
        sweep = sweep_density(config, [int(v) for v in values], args.reps, args.workers)
    else:
        sweep = sweep_interarrival(config, [v / 1e3 for v in values], args.reps, args.workers)
    log.info("seed=%d reps=%d points=%d", config.seed, args.reps, len(values))
    _emit(render(records_from_sweep(sweep), args.format), args.out)
    return 0


def cmd_defaults(args) -> int:
    _emit(cfgmod.dumps(cfgmod.calibrated_defaults()) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vruaoi", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one replication")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--arch", choices=["mec", "conventional", "both"], default="both")
    p.add_argument("--replication", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="VRU density or inter-arrival time sweep")
    p.add_argument("config")
    p.add_argument("--axis", choices=["density", "interarrival"], required=True)
    p.add_argument("--values", required=True,
                   help="comma list or start:stop:step; VRU counts, or periods in ms")
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("defaults", help="print the calibrated default config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_defaults)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"vruaoi: config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - any runtime failure maps to exit 2
        print(f"vruaoi: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
