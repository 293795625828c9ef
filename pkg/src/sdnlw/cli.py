"""Command-line front end.

Subcommands:
  sdnlw renorm --alpha A --n-ladder 4:4096:x2 --out DIR
  sdnlw study strong|weak|wick|tuned --config FILE --seed S --workers W --out DIR
  sdnlw plotdata --in DIR --out DIR

Study configuration files are TOML with a [study] table holding StudySpec
fields (n_ladder, alpha, kappa, gamma, t_final, epsilon, mc_replicas,
initial_data, tuned_branch).  Exit codes: 0 all assertions pass, 2 a trend
assertion failed, 3 blow-up budget exceeded, 4 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .studies import (
    EXIT_CONFIG,
    ConfigError,
    StudySpec,
    emit_plotdata,
    run_lambda_study,
    RUNNERS,
)

STUDY_ALIASES = {
    "strong": "strong_triviality",
    "weak": "weak_limit",
    "wick": "wick_decay",
    "tuned": "tuned_damping",
    "lambda": "lambda_asymptotics",
}

SPEC_KEYS = (
    "n_ladder", "alpha", "kappa", "gamma", "tuned_branch", "t_final",
    "epsilon", "mc_replicas", "initial_data",
)


def parse_ladder(text: str) -> tuple[int, ...]:
    """Parse START:END:xFACTOR (geometric) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or not parts[2].startswith("x"):
            raise ConfigError(f"bad ladder {text!r}; expected START:END:xFACTOR")
        try:
            start, end, factor = int(parts[0]), int(parts[1]), int(parts[2][1:])
        except ValueError as exc:
            raise ConfigError(f"bad ladder {text!r}") from exc
        if start < 2 or end < start or factor < 2:
            raise ConfigError(f"bad ladder {text!r}")
        ladder = []
        n = start
        while n <= end:
            ladder.append(n)
            n *= factor
        return tuple(ladder)
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad ladder {text!r}") from exc


def load_study_config(path: str) -> dict:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    table = data.get("study", data)
    unknown = set(table) - set(SPEC_KEYS) - {"study"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return table


def resolve_workers(cli_value: int | None) -> int:
    if cli_value is not None:
        return cli_value
    env = os.environ.get("SDNLW_WORKERS")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"bad SDNLW_WORKERS value {env!r}") from exc
    return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdnlw", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("renorm", help="mass-constant asymptotics study")
    pr.add_argument("--alpha", type=float, default=1.0)
    pr.add_argument("--n-ladder", default="4:4096:x2")
    pr.add_argument("--out", required=True)
    pr.add_argument("--seed", type=int, default=0)

    ps = sub.add_parser("study", help="run a Monte-Carlo ladder study")
    ps.add_argument("kind", choices=sorted(STUDY_ALIASES))
    ps.add_argument("--config", default=None)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--workers", type=int, default=None)
    ps.add_argument("--out", required=True)

    pp = sub.add_parser("plotdata", help="emit tidy figure CSVs and a manifest")
    pp.add_argument("--in", dest="in_dir", required=True)
    pp.add_argument("--out", required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "renorm":
            spec = StudySpec(
                study="lambda_asymptotics",
                output_dir=args.out,
                n_ladder=parse_ladder(args.n_ladder),
                alpha=args.alpha,
                seed=args.seed,
            )
            return run_lambda_study(spec)
        if args.command == "study":
            table = load_study_config(args.config) if args.config else {}
            table.pop("study", None)
            if "n_ladder" in table:
                table["n_ladder"] = tuple(int(x) for x in table["n_ladder"])
            spec = StudySpec(
                study=STUDY_ALIASES[args.kind],
                output_dir=args.out,
                seed=args.seed,
                workers=resolve_workers(args.workers),
                **table,
            )
            return RUNNERS[spec.study](spec)
        if args.command == "plotdata":
            return emit_plotdata(args.in_dir, args.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, tomllib.TOMLDecodeError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
