"""Run the bundled puzzle corpus and compare every count with the expected one"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pandas
import yaml

from probmodels.exceptions import BudgetExceeded, ProbModelsError
from probmodels.oracle import OracleBudget, assignment_space, brute_force_count
from probmodels.parser import load_theory, merge_theories
from probmodels.probability import (
    PuzzleOutcome,
    Rational,
    check_claim,
    outcome_from_counts,
)
from probmodels.solver import count_models

logger = logging.getLogger(__name__)

MANIFEST_NAME = "cases.yaml"
DEFAULT_ORACLE_CHECK_LIMIT = 100_000

ORACLE_AGREES = "agree"
ORACLE_DISAGREES = "DISAGREE"
ORACLE_SKIPPED = "skipped"
ORACLE_OVER_BUDGET = "over budget"
ORACLE_OFF = "off"


def default_corpus_dir() -> Path:
    return Path(__file__).parent / "puzzles"


@dataclass(frozen=True)
class PuzzleCase:
    name: str
    puzzle: str
    possible_file: Path
    favorable_file: Path
    expected_possible: int
    expected_favorable: int
    oracle: bool = True
    claims: Tuple[str, ...] = ()


def load_cases(corpus_dir=None) -> List[PuzzleCase]:
    """Read the cases.yaml manifest of a corpus directory"""
    corpus_path = Path(corpus_dir) if corpus_dir is not None else default_corpus_dir()
    manifest_path = corpus_path / MANIFEST_NAME
    try:
        with open(manifest_path, "r") as f:
            manifest = yaml.safe_load(f)
    except Exception:
        logger.error(f"Could not read corpus manifest at {manifest_path}")
        raise

    cases = []
    try:
        for entry in manifest["cases"]:
            cases.append(
                PuzzleCase(
                    name=entry["name"],
                    puzzle=entry.get("puzzle", entry["name"]),
                    possible_file=corpus_path / entry["possible"],
                    favorable_file=corpus_path / entry["favorable"],
                    expected_possible=int(entry["expected_possible"]),
                    expected_favorable=int(entry["expected_favorable"]),
                    oracle=bool(entry.get("oracle", True)),
                    claims=tuple(str(claim) for claim in entry.get("claims", ())),
                )
            )
    except (KeyError, TypeError, ValueError):
        logger.error(f"Malformed case entry in {manifest_path}")
        raise
    logger.debug(f"Loaded {len(cases)} cases from {manifest_path}")
    return cases


@dataclass
class CaseResult:
    """Counts of one case, None when loading or counting the case failed"""

    case: PuzzleCase
    possible: Optional[int]
    favorable: Optional[int]
    outcome: Optional[PuzzleOutcome]
    elapsed_ms: float
    oracle: str = ORACLE_OFF
    claims: Dict[str, str] = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return (
            self.error is None
            and self.possible == self.case.expected_possible
            and self.favorable == self.case.expected_favorable
            and self.oracle != ORACLE_DISAGREES
        )

    def record(self) -> dict:
        return {
            "case": self.case.name,
            "possible": self.possible,
            "favorable": self.favorable,
            "probability": None if self.outcome is None else self.outcome.record(),
            "elapsed_ms": self.elapsed_ms,
            "pass": self.passed,
        }

    def mismatches(self) -> List[str]:
        if self.possible is None:
            return [self.error]
        found = []
        if self.possible != self.case.expected_possible:
            found.append(
                f"possible {self.possible} vs expected {self.case.expected_possible}"
            )
        if self.favorable != self.case.expected_favorable:
            found.append(
                f"favorable {self.favorable} vs expected {self.case.expected_favorable}"
            )
        if self.oracle == ORACLE_DISAGREES:
            found.append("oracle count differs from solver count")
        if self.error is not None:
            found.append(self.error)
        return found


@dataclass
class RunReport:
    results: List[CaseResult]

    def __post_init__(self):
        self.results = sorted(self.results, key=lambda result: result.case.name)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    def puzzle_tally(self) -> Tuple[int, int]:
        """(puzzles passed, puzzles), a puzzle passes when all its encodings do"""
        puzzles: Dict[str, bool] = {}
        for result in self.results:
            puzzles[result.case.puzzle] = (
                puzzles.get(result.case.puzzle, True) and result.passed
            )
        return sum(puzzles.values()), len(puzzles)

    def summary(self) -> str:
        puzzles_passed, puzzles = self.puzzle_tally()
        cases_passed = sum(result.passed for result in self.results)
        return (
            f"{puzzles_passed}/{puzzles} puzzles passed "
            f"({cases_passed}/{len(self.results)} cases)"
        )

    def records(self) -> List[dict]:
        return [result.record() for result in self.results]

    def to_frame(self) -> pandas.DataFrame:
        rows = []
        for result in self.results:
            outcome = result.outcome
            rows.append(
                {
                    "case": result.case.name,
                    "possible": "-" if result.possible is None else result.possible,
                    "favorable": "-" if result.favorable is None else result.favorable,
                    "raw": "-" if outcome is None else str(outcome.raw),
                    "probability": "-" if outcome is None else str(outcome.probability),
                    "decimal": "-" if outcome is None else outcome.decimal,
                    "oracle": result.oracle,
                    "elapsed_ms": round(result.elapsed_ms, 1),
                    "pass": result.passed,
                }
            )
        return pandas.DataFrame(rows)

    def to_csv(self, filename) -> Path:
        """Save the report table, returning the absolute path written"""
        file_path = Path(filename)
        try:
            self.to_frame().to_csv(file_path, index=False)
        except OSError:
            logger.error(f"Could not write report to {file_path}")
            raise
        return file_path.absolute()

    def text(self) -> str:
        lines = [self.to_frame().to_string(index=False), ""]
        for result in self.results:
            for claim, verdict in result.claims.items():
                lines.append(f"{result.case.name}: claimed {claim} is {verdict}")
            for mismatch in result.mismatches():
                lines.append(f"{result.case.name}: FAIL {mismatch}")
        lines.append(self.summary())
        return "\n".join(lines)


def _oracle_check(
    case: PuzzleCase,
    possible,
    merged,
    possible_count: int,
    favorable_count: int,
    force: bool,
    budget: OracleBudget,
    check_limit: int,
    workers: int,
) -> str:
    if not case.oracle:
        return ORACLE_OFF
    space = assignment_space(merged)
    if not force and space > check_limit:
        logger.info(f"{case.name}: oracle skipped, {space} assignments")
        return ORACLE_SKIPPED
    try:
        oracle_possible = brute_force_count(possible, budget, workers).count
        oracle_favorable = brute_force_count(merged, budget, workers).count
    except BudgetExceeded as exc:
        logger.info(f"{case.name}: {exc}")
        return ORACLE_OVER_BUDGET
    if (oracle_possible, oracle_favorable) != (possible_count, favorable_count):
        logger.error(
            f"{case.name}: oracle counts {oracle_possible}, {oracle_favorable} "
            f"differ from solver counts {possible_count}, {favorable_count}"
        )
        return ORACLE_DISAGREES
    return ORACLE_AGREES


def run_case(
    case: PuzzleCase,
    workers: int = 1,
    force_oracle: bool = False,
    budget: OracleBudget = OracleBudget(),
    check_limit: int = DEFAULT_ORACLE_CHECK_LIMIT,
) -> CaseResult:
    start = time.perf_counter()
    try:
        possible = load_theory(case.possible_file)
        merged = merge_theories(possible, load_theory(case.favorable_file))
        start = time.perf_counter()
        possible_count = count_models(possible, workers=workers)
        favorable_count = count_models(merged, workers=workers)
    except (ProbModelsError, OSError) as exc:
        logger.error(f"{case.name}: {type(exc).__name__}: {exc}")
        return CaseResult(
            case,
            None,
            None,
            None,
            (time.perf_counter() - start) * 1000,
            error=f"{type(exc).__name__}: {exc}",
        )
    elapsed_ms = (time.perf_counter() - start) * 1000

    outcome = None
    error = None
    try:
        outcome = outcome_from_counts(possible_count, favorable_count)
    except ProbModelsError as exc:
        error = str(exc)

    oracle = _oracle_check(
        case,
        possible,
        merged,
        possible_count.count,
        favorable_count.count,
        force_oracle,
        budget,
        check_limit,
        workers,
    )
    claims = {}
    if outcome is not None:
        for claim in case.claims:
            claims[claim] = check_claim(outcome, Rational.parse(claim))

    result = CaseResult(
        case,
        possible_count.count,
        favorable_count.count,
        outcome,
        elapsed_ms,
        oracle,
        claims,
        error,
    )
    logger.info(
        f"{case.name}: {result.favorable} / {result.possible} "
        f"({'pass' if result.passed else 'FAIL'})"
    )
    return result


def run_corpus(
    corpus_dir=None,
    workers: int = 1,
    force_oracle: bool = False,
    budget: OracleBudget = OracleBudget(),
    check_limit: int = DEFAULT_ORACLE_CHECK_LIMIT,
) -> RunReport:
    """Count every case of a corpus and check it against its expected counts"""
    cases = load_cases(corpus_dir)
    return RunReport(
        [
            run_case(case, workers, force_oracle, budget, check_limit)
            for case in cases
        ]
    )
