"""Command-line interface: coeff, qexp and relation commands."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

import colorlog

from .config import (
    CONF_MAX_CUTOFF,
    CONF_OUTPUT_FORMAT,
    CONF_PRECISION_BITS,
    CONF_SERIES_ORDER,
    CONF_TARGET_ERROR,
    CONF_THREADS,
    RunConfig,
    load_run_config,
)
from .const import (
    COEFF_FAMILIES,
    EXIT_INVALID_INPUT,
    EXIT_OK,
    EXIT_REFUTED,
    EXIT_UNREACHABLE_TOLERANCE,
    FAMILY_MAASS_ZERO,
    METHOD_KERNEL,
    METHOD_SOLVER,
    OUTPUT_FORMATS,
    PACKAGE,
)
from .errors import InvalidRelationError, PoincareRelationsError, UnreachableTolerance
from .exactarith import WeightProfile
from .helpers import to_fraction
from .poincare import poincare_coeff
from .qseries import (
    PrincipalPart,
    delta,
    eisenstein,
    j_invariant,
    tau_coeffs,
    weakly_holomorphic_level1,
)
from .relations import (
    corollary_relation,
    find_relations,
    relation_from_json_dict,
    solve_principal_part_level1,
    verify_relation_numeric,
)
from .render import (
    render_coeff,
    render_relations,
    render_report,
    render_reports,
    render_series,
    render_unsolved,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .qseries import QSeries
    from .relations import Relation

_LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s"

EXPR_EISENSTEIN = "Es"
EXPR_DELTA = "Delta"
EXPR_J = "j"
EXPR_TAU = "Es/Delta^r"
EXPR_WEAKLY = "F(j)"
QEXP_EXPRESSIONS = (EXPR_EISENSTEIN, EXPR_DELTA, EXPR_J, EXPR_TAU, EXPR_WEAKLY)


def setup_logging(config: RunConfig, verbosity: int = 0) -> None:
    """Install a colored stderr handler on the package logger."""
    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(LOG_FORMAT))
    logger = logging.getLogger(PACKAGE)
    logger.handlers.clear()
    logger.addHandler(handler)
    logger.propagate = False
    if verbosity > 0:
        level = logging.DEBUG
    elif verbosity < 0:
        level = logging.WARNING
    else:
        level = logging.getLevelName(config.log_level.upper())
    logger.setLevel(level)
    for name, module_level in config.log_levels.items():
        logging.getLogger(name).setLevel(logging.getLevelName(module_level.upper()))


def _rational_list(text: str) -> list[Any]:
    """Parse "1,-744,1/2" into rationals."""
    try:
        return [to_fraction(part) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as err:
        msg = f"invalid rational list {text!r}"
        raise argparse.ArgumentTypeError(msg) from err


def _principal_part(text: str) -> PrincipalPart:
    """Parse "3:1,2:48,1:-195660" into a principal part."""
    try:
        terms = dict(item.split(":", 1) for item in text.split(",") if item.strip())
        return PrincipalPart.from_mapping(terms)
    except (ValueError, PoincareRelationsError) as err:
        msg = f"invalid principal part {text!r}"
        raise argparse.ArgumentTypeError(msg) from err


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser with all subcommands."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, help="working precision in bits")
    common.add_argument("--target-error", type=float, help="absolute error target")
    common.add_argument("--order", type=int, help="q-expansion order")
    common.add_argument("--threads", type=int, help="worker threads for c-sums")
    common.add_argument("--max-cutoff", type=int, help="largest modulus c")
    common.add_argument("--output", choices=OUTPUT_FORMATS, help="output format")
    common.add_argument("--config", type=Path, help="YAML run configuration")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")

    parser = argparse.ArgumentParser(
        prog=PACKAGE,
        description="Poincare series coefficients, q-expansions and linear relations.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    coeff = commands.add_parser("coeff", parents=[common], help="certified coefficient")
    coeff.add_argument("family", choices=COEFF_FAMILIES)
    coeff.add_argument("--m", type=int, required=True)
    coeff.add_argument("--k", type=to_fraction, required=True)
    coeff.add_argument("--N", type=int, default=1)
    coeff.add_argument("--n", type=int, default=0)
    coeff.set_defaults(handler=cmd_coeff)

    qexp = commands.add_parser("qexp", parents=[common], help="exact q-expansion")
    qexp.add_argument("expression", choices=QEXP_EXPRESSIONS)
    qexp.add_argument("--s", type=int, default=4, help="Eisenstein weight")
    qexp.add_argument("--r", type=int, default=1, help="power of Delta")
    qexp.add_argument("--k", type=int, help="weight 2 - k of F(j) forms")
    qexp.add_argument(
        "--F", type=_rational_list, default=[1], help="F coefficients, constant first"
    )
    qexp.set_defaults(handler=cmd_qexp)

    relation = commands.add_parser("relation", help="linear relations")
    actions = relation.add_subparsers(dest="action", required=True)

    corollary = actions.add_parser("corollary", parents=[common])
    corollary.add_argument("--k", type=int, required=True)
    corollary.set_defaults(handler=cmd_relation)

    find = actions.add_parser("find", parents=[common])
    find.add_argument("--k", type=int, required=True)
    find.add_argument("--mmax", type=int, required=True)
    find.add_argument(
        "--method", choices=(METHOD_KERNEL, METHOD_SOLVER), default=METHOD_KERNEL
    )
    find.set_defaults(handler=cmd_relation)

    verify = actions.add_parser("verify", parents=[common])
    verify.add_argument("--file", type=Path, required=True)
    verify.add_argument("--k", type=to_fraction)
    verify.add_argument("--N", type=int)
    verify.add_argument("--nmax", type=int, default=5)
    verify.set_defaults(handler=cmd_relation)

    solve = actions.add_parser("solve", parents=[common])
    solve.add_argument("--k", type=int, required=True)
    solve.add_argument("--pp", type=_principal_part, required=True)
    solve.set_defaults(handler=cmd_relation)
    return parser


def _emit(text: str) -> None:
    print(text)  # noqa: T201


def cmd_coeff(args: argparse.Namespace, config: RunConfig) -> int:
    """Print a certified coefficient of P or Q."""
    w = WeightProfile.create(args.k, args.N)
    n = 0 if args.family == FAMILY_MAASS_ZERO else args.n
    result = poincare_coeff(args.family, w, args.m, n, config=config)
    _emit(render_coeff(result, config.output_format))
    return EXIT_OK


def cmd_qexp(args: argparse.Namespace, config: RunConfig) -> int:
    """Print an exact q-expansion."""
    order = config.series_order if args.order is None else args.order
    series: QSeries
    if args.expression == EXPR_EISENSTEIN:
        series = eisenstein(args.s, order)
    elif args.expression == EXPR_DELTA:
        series = delta(order)
    elif args.expression == EXPR_J:
        series = j_invariant(order)
    elif args.expression == EXPR_TAU:
        series = tau_coeffs(args.r, args.s, order)
    else:
        if args.k is None:
            msg = "F(j) expansions need --k"
            raise InvalidRelationError(msg)
        series = weakly_holomorphic_level1(args.k, args.F, order)
    _emit(render_series(series, config.output_format))
    return EXIT_OK


def _load_relations(args: argparse.Namespace) -> tuple[list[Relation], bool]:
    """
    Read and validate a relation file, checking --k/--N when given.

    Accepts a single relation object, as written by `relation corollary`, or a
    list of them, as written by `relation find`. Returns the relations and
    whether the file held a list.
    """
    try:
        data = json.loads(args.file.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        msg = f"Cannot read relation file {args.file}: {err}"
        raise InvalidRelationError(msg) from err
    as_list = isinstance(data, list)
    entries = data if as_list else [data]
    if not all(isinstance(entry, dict) for entry in entries):
        msg = f"{args.file} must contain a relation object or a list of them"
        raise InvalidRelationError(msg)
    relations = [relation_from_json_dict(entry) for entry in entries]
    for rel in relations:
        if args.k is not None and args.k != rel.k:
            msg = f"--k {args.k} does not match the relation weight {rel.k}"
            raise InvalidRelationError(msg)
        if args.N is not None and args.N != rel.N:
            msg = f"--N {args.N} does not match the relation level {rel.N}"
            raise InvalidRelationError(msg)
    return relations, as_list


def cmd_relation(args: argparse.Namespace, config: RunConfig) -> int:
    """Run one of the relation subcommands."""
    fmt = config.output_format
    if args.action == "corollary":
        _emit(render_relations([corollary_relation(args.k)], fmt))
        return EXIT_OK
    if args.action == "find":
        _emit(render_relations(find_relations(args.k, args.mmax, args.method), fmt))
        return EXIT_OK
    if args.action == "verify":
        relations, as_list = _load_relations(args)
        reports = [
            verify_relation_numeric(rel, args.nmax, config=config) for rel in relations
        ]
        if as_list:
            _emit(render_reports(reports, fmt))
        else:
            _emit(render_report(reports[0], fmt))
        return EXIT_REFUTED if any(report.refuted for report in reports) else EXIT_OK
    order = config.series_order if args.order is None else args.order
    form = solve_principal_part_level1(args.k, args.pp, order)
    if form is None:
        _emit(render_unsolved(args.pp, fmt))
        return EXIT_OK
    _emit(render_series(form, fmt))
    return EXIT_OK


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        CONF_PRECISION_BITS: args.precision,
        CONF_TARGET_ERROR: args.target_error,
        CONF_SERIES_ORDER: args.order,
        CONF_THREADS: args.threads,
        CONF_MAX_CUTOFF: args.max_cutoff,
        CONF_OUTPUT_FORMAT: args.output,
    }


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_OK if err.code == 0 else EXIT_INVALID_INPUT

    try:
        config = load_run_config(args.config, overrides=_overrides(args))
    except PoincareRelationsError as err:
        _LOGGER.error("%s", err)  # noqa: TRY400
        return EXIT_INVALID_INPUT
    setup_logging(config, 1 if args.verbose else -1 if args.quiet else 0)

    try:
        return args.handler(args, config)
    except UnreachableTolerance as err:
        _LOGGER.error("Tolerance unreachable: %s", err)  # noqa: TRY400
        return EXIT_UNREACHABLE_TOLERANCE
    except PoincareRelationsError as err:
        _LOGGER.error("Invalid input: %s", err)  # noqa: TRY400
        return EXIT_INVALID_INPUT
