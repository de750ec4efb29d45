"""Command-line entry point.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 the
configuration could not be used (bad JSON, unknown scenario or suite,
malformed section polynomials).  On exit 2 no report file is written.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ._version import __version__
from .errors import ConfigError
from .scenarios import ScenarioConfig, list_scenarios, run_scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypersymplectic",
        description=(
            "verify the identities of the hyper-symplectic / hypercomplex "
            "structure triple on a model fibration and report the residuals"
        ),
    )
    parser.add_argument("--config", type=Path, help="JSON configuration file")
    parser.add_argument("--scenario", help="scenario name (overrides the config file)")
    parser.add_argument("--output", type=Path, help="write the JSON report here")
    parser.add_argument("--seed", type=int, help="sampling seed (overrides the config file)")
    parser.add_argument(
        "--tolerance-fd",
        type=float,
        dest="tolerance_fd",
        help="tolerance for finite-difference residuals",
    )
    parser.add_argument(
        "--fd-step", type=float, dest="fd_step", help="central-difference step size"
    )
    parser.add_argument(
        "--list", action="store_true", help="list scenarios and suites, then exit"
    )
    return parser


def _load_config(args: argparse.Namespace) -> ScenarioConfig:
    raw: dict = {}
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")

    if args.scenario is not None:
        raw["scenario"] = args.scenario
    if args.seed is not None:
        raw.setdefault("sampling", {})["seed"] = args.seed
    if args.fd_step is not None:
        raw.setdefault("sampling", {})["fd_step"] = args.fd_step
    if args.tolerance_fd is not None:
        raw.setdefault("tolerances", {})["fd"] = args.tolerance_fd
    if args.output is not None:
        raw["output"] = str(args.output)
    return ScenarioConfig.from_dict(raw)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        print(list_scenarios())
        return 0

    try:
        config = _load_config(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    document = run_scenario(config)

    if config.output is not None:
        Path(config.output).write_text(document.to_json())
        for line in document.summary_lines():
            print(line)
        print(f"report written to {config.output}")
    else:
        sys.stdout.write(document.to_json())
        for line in document.summary_lines():
            print(line, file=sys.stderr)

    return 0 if document.verdict == "pass" else 1


if __name__ == "__main__":
    raise SystemExit(main())
