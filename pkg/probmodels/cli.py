"""Command line tool: count models, solve puzzles, list models and run the corpus.

Exit codes: 0 ok, 1 usage or I/O, 2 parse, 3 semantic, 4 no possible models,
5 corpus mismatch.
"""

import json
import logging
import sys
from typing import Dict, List

import configargparse
import yaml

from probmodels.core import Interpretation, Signature
from probmodels.corpus import DEFAULT_ORACLE_CHECK_LIMIT, run_corpus
from probmodels.exceptions import (
    ProbModelsError,
    TheoryParseError,
    ZeroPossibleModels,
)
from probmodels.logconfig import setup_logging
from probmodels.oracle import DEFAULT_MAX_ASSIGNMENTS, OracleBudget
from probmodels.parser import load_theory
from probmodels.probability import Rational, check_claim, solve_puzzle
from probmodels.solver import count_models, enumerate_models

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_SEMANTIC = 3
EXIT_ZERO_POSSIBLE = 4
EXIT_CORPUS_MISMATCH = 5

COMMANDS = ("count", "solve", "models", "corpus")

example_config = f"""# probmodels configuration, command line options take precedence
workers: 1
oracle-budget: {DEFAULT_MAX_ASSIGNMENTS}
oracle-check-limit: {DEFAULT_ORACLE_CHECK_LIMIT}
verbose: false
"""


class _ArgParser(configargparse.ArgParser):
    """Usage errors exit with 1 instead of argparse's 2, which is the parse error code"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def claim(text: str) -> Rational:
    return Rational.parse(text)


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError(f"{value} is not positive")
    return value


def model_limit(text: str) -> int:
    value = int(text)
    if value != -1 and value < 1:
        raise ValueError(f"{value} is neither -1 nor positive")
    return value


def build_parser() -> configargparse.ArgParser:
    parser = _ArgParser(
        prog="probmodels",
        config_file_parser_class=configargparse.YAMLConfigFileParser,
        auto_env_var_prefix="PROBMODELS_",
        description="Solve probability puzzles by counting the finite models of "
        "first order theories: the probability is the number of favorable models "
        "divided by the number of possible models.",
    )
    parser.add_argument(
        "-c", "--config", is_config_file=True, help="yaml config file path"
    )
    parser.add_argument(
        "command", nargs="?", choices=COMMANDS, help="what to do, see below"
    )
    parser.add_argument(
        "theory", nargs="?", help="theory file for the count and models commands"
    )

    parser.add_argument(
        "--possible", help="solve: theory whose models are the possible outcomes"
    )
    parser.add_argument(
        "--favorable", help="solve: constraints selecting the favorable outcomes"
    )
    parser.add_argument(
        "--claim",
        type=claim,
        help="solve: a claimed probability a/b to check against the exact one",
    )
    parser.add_argument(
        "--limit",
        type=model_limit,
        default=-1,
        help="models: print at most this many models, -1 for all",
    )
    parser.add_argument(
        "--format",
        choices=("text", "json"),
        default="text",
        help="output format",
    )
    parser.add_argument(
        "--oracle",
        action="store_true",
        help="corpus: cross-check every case with the brute force oracle",
    )
    parser.add_argument(
        "--corpus-dir", default=None, help="corpus: run the cases of this directory"
    )
    parser.add_argument("--csv", default=None, help="corpus: save the report table")

    parser.add_argument(
        "--workers",
        type=positive_int,
        default=1,
        help="processes used to count models",
    )
    parser.add_argument(
        "--oracle-budget",
        type=positive_int,
        default=DEFAULT_MAX_ASSIGNMENTS,
        help="largest assignment space the brute force oracle will sweep",
    )
    parser.add_argument(
        "--oracle-check-limit",
        type=positive_int,
        default=DEFAULT_ORACLE_CHECK_LIMIT,
        help="corpus: largest assignment space cross-checked without --oracle",
    )
    parser.add_argument(
        "--log-config", default=None, help="json logging configuration file"
    )
    parser.add_argument(
        "--verbose", action="store_true", help="log debugging information"
    )
    parser.add_argument(
        "--example-config",
        default=None,
        metavar="PATH",
        help="write an example config file to PATH and exit",
    )
    return parser


def _emit(payload):
    print(json.dumps(payload, sort_keys=True, indent=2))


def run_count(args) -> int:
    theory = load_theory(args.theory)
    result = count_models(theory, workers=args.workers)
    if args.format == "json":
        _emit(
            {
                "theory": args.theory,
                "count": result.count,
                "exhausted": result.exhausted,
            }
        )
    elif result.exhausted:
        print(result.count)
    else:
        print(f"{result.count} (stopped at max_models)")
    return EXIT_OK


def run_solve(args) -> int:
    possible = load_theory(args.possible)
    favorable = load_theory(args.favorable)
    outcome = solve_puzzle(possible, favorable, workers=args.workers)
    verdict = None if args.claim is None else check_claim(outcome, args.claim)
    if args.format == "json":
        payload = {
            "possible": outcome.possible.count,
            "favorable": outcome.favorable.count,
            "probability": outcome.record(),
        }
        if verdict is not None:
            payload["claim"] = {"claimed": str(args.claim), "verdict": verdict}
        _emit(payload)
    else:
        print(outcome.text())
        if verdict is not None:
            print(f"claimed {args.claim} is {verdict}")
    return EXIT_OK


def model_tables(signature: Signature, model: Interpretation) -> Dict[str, List[int]]:
    """Table values per symbol in argument order, predicates as 0/1"""
    tables = {}
    for name in signature.order:
        if signature.is_predicate(name):
            table = {args: int(value) for args, value in model.predicates[name].items()}
        else:
            table = model.functions[name]
        tables[name] = [table[args] for args in sorted(table)]
    return tables


def model_row(signature: Signature, model: Interpretation) -> str:
    """One symbol table after another, e.g. ``s = 0 1 1 1 1 1 | W = 5``"""
    return " | ".join(
        f"{name} = {' '.join(str(value) for value in values)}"
        for name, values in model_tables(signature, model).items()
    )


def run_models(args) -> int:
    theory = load_theory(args.theory)
    limits = [limit for limit in (args.limit, theory.limit) if limit != -1]
    limit = min(limits) if limits else -1
    # One model past the limit tells whether the listing was cut short
    models = list(enumerate_models(theory, -1 if limit == -1 else limit + 1))
    truncated = limit != -1 and len(models) > limit
    if truncated:
        models = models[:limit]

    if args.format == "json":
        _emit(
            {
                "theory": args.theory,
                "truncated": truncated,
                "models": [model_tables(theory.signature, model) for model in models],
            }
        )
        return EXIT_OK
    for index, model in enumerate(models, start=1):
        print(f"{index}: {model_row(theory.signature, model)}")
    if truncated:
        print(f"(stopped after {limit} models)")
    elif not models:
        print("(no models)")
    return EXIT_OK


def run_corpus_command(args) -> int:
    report = run_corpus(
        corpus_dir=args.corpus_dir,
        workers=args.workers,
        force_oracle=args.oracle,
        budget=OracleBudget(args.oracle_budget),
        check_limit=args.oracle_check_limit,
    )
    if args.csv is not None:
        csv_path = report.to_csv(args.csv)
        logger.info(f"Saved report to {csv_path}")
    if args.format == "json":
        _emit({"cases": report.records(), "summary": report.summary()})
    else:
        print(report.text())
    return EXIT_OK if report.passed else EXIT_CORPUS_MISMATCH


RUNNERS = {
    "count": run_count,
    "solve": run_solve,
    "models": run_models,
    "corpus": run_corpus_command,
}


def _check_command(parser, args):
    if args.command is None:
        parser.error(f"a command is required, one of {', '.join(COMMANDS)}")
    if args.command in ("count", "models") and args.theory is None:
        parser.error(f"{args.command} needs a theory file")
    if args.command in ("solve", "corpus") and args.theory is not None:
        parser.error(f"{args.command} takes no theory file argument")
    if args.command == "solve" and (args.possible is None or args.favorable is None):
        parser.error("solve needs both --possible and --favorable")


def exit_code(exc: Exception) -> int:
    """Map an error raised while running a command to the process exit code"""
    if isinstance(exc, TheoryParseError):
        return EXIT_PARSE
    if isinstance(exc, ZeroPossibleModels):
        return EXIT_ZERO_POSSIBLE
    if isinstance(exc, ProbModelsError):
        return EXIT_SEMANTIC
    return EXIT_USAGE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.example_config is None:
            _check_command(parser, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    if args.example_config is not None:
        try:
            with open(args.example_config, "w") as cf:
                cf.write(example_config)
        except OSError as exc:
            print(f"Could not write example config: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"Wrote example config to {args.example_config}")
        return EXIT_OK

    try:
        setup_logging(args.log_config, verbose=args.verbose)
    except (OSError, ValueError) as exc:
        print(f"Could not set up logging: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return RUNNERS[args.command](args)
    except TheoryParseError:
        # load_theory already logged every diagnostic
        return EXIT_PARSE
    except (ProbModelsError, OSError, yaml.YAMLError, KeyError, ValueError) as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exit_code(exc)
    except RecursionError:
        logger.error("A formula nests too deeply to ground or evaluate")
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
