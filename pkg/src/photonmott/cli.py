"""Command-line interface.

    photonmott params     --preset mott
    photonmott validate   --preset mott
    photonmott mott       --preset mott --out out/mott --traj 1
    photonmott transition --preset transition --out out/transition
    photonmott scan       --preset mott --sweep "Omega=7.9e11:7.9e12:25:log"
    photonmott compare    --left ts.csv --right ts.csv --out out/cmp

Exit codes: 0 success, 2 configuration error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .config import (
    ConfigError,
    RunConfig,
    apply_overrides,
    load_config,
    preset_config,
)
from .dynamics import IntegrationError
from .fockspace import BasisTooLargeError
from .scenarios import (
    run_compare,
    run_mott,
    run_params,
    run_scan,
    run_timeseries_scenario,
    run_transition,
    run_validate,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat-key YAML config file")
    p.add_argument("--preset", choices=("mott", "transition", "circuit-qed"),
                   help="named parameter preset (overridden by --set)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override one config key")
    p.add_argument("--out", help="output directory (overrides out_dir)")
    p.add_argument("--seed", type=int, help="trajectory RNG seed")
    p.add_argument("--threads", type=int, help="trajectory worker threads")
    p.add_argument("--solver", choices=("master", "trajectory", "both"),
                   help="effective-model solver selection")
    p.add_argument("--traj", type=int, help="number of trajectories")


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        config = load_config(args.config)
    elif args.preset:
        config = preset_config(args.preset)
    else:
        raise ConfigError("a --config file or a --preset is required")

    overrides = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"malformed --set {item!r}; expected KEY=VALUE")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.threads is not None:
        overrides["threads"] = str(args.threads)
    if args.solver is not None:
        overrides["solver"] = args.solver
    if args.traj is not None:
        overrides["n_traj"] = str(args.traj)
    return apply_overrides(config, overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonmott",
        description="EIT cavity-array nonlinearity and photonic Mott simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, doc in (
        ("params", "derived parameters, validity checks, figures of merit"),
        ("validate", "polariton-oracle vs formula report"),
        ("mott", "Mott-insulator scenario: full and effective dynamics"),
        ("transition", "Mott-to-superfluid drive ramp scenario"),
        ("scan", "parameter sweeps of U, Gamma and validity"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_config_args(p)
        if name == "scan":
            p.add_argument("--sweep", action="append", default=[],
                           metavar="NAME=LO:HI:N[:log]", required=True,
                           help="sweep axis (repeat for a 2-D grid)")
            p.add_argument("--disorder", action="append", default=[],
                           metavar="KNOB=WIDTH",
                           help="per-cavity disorder draw, e.g. g24_scale=0.5")

    p = sub.add_parser("compare", help="deviations between two timeseries files")
    p.add_argument("--left", required=True, help="left CSV (minuend)")
    p.add_argument("--right", required=True, help="right CSV (subtrahend)")
    p.add_argument("--left-prefix", default="full_")
    p.add_argument("--right-prefix", default="bh_master_")
    p.add_argument("--out", help="directory for deviations.csv")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "compare":
            result = run_compare(args.left, args.right,
                                 left_prefix=args.left_prefix,
                                 right_prefix=args.right_prefix,
                                 out_dir=args.out)
            print(json.dumps(result, indent=2, sort_keys=True))
            return EXIT_OK

        config = _resolve_config(args)
        if args.command == "params":
            print(json.dumps(run_params(config), indent=2, sort_keys=True))
        elif args.command == "validate":
            print(json.dumps(run_validate(config), indent=2, sort_keys=True))
        elif args.command == "mott":
            summary = run_mott(config)
            print(json.dumps(summary, indent=2, sort_keys=True))
        elif args.command == "transition":
            summary = run_transition(config)
            print(json.dumps(summary, indent=2, sort_keys=True))
        elif args.command == "scan":
            disorder = {}
            for item in args.disorder:
                if "=" not in item:
                    raise ConfigError(f"malformed --disorder {item!r}")
                key, width = item.split("=", 1)
                disorder[key.strip()] = float(width)
            result = run_scan(config, args.sweep, disorder=disorder or None)
            print(json.dumps(result, indent=2, sort_keys=True))
        else:  # pragma: no cover - argparse enforces the choices
            parser.error(f"unknown command {args.command!r}")
        return EXIT_OK
    except (ConfigError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, BasisTooLargeError, RuntimeError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
