"""Laplace probability of a puzzle: favorable models over possible models.

The possible-models theory is counted once, then counted again with the
favorable constraints merged in. Both counts must be exhaustive.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Union

from probmodels.core import ModelCount, Theory
from probmodels.exceptions import NonExhaustiveCount, ZeroPossibleModels
from probmodels.parser import merge_theories
from probmodels.solver import count_models

logger = logging.getLogger(__name__)

CONFIRMED = "confirmed"
TOO_HIGH = "too high"
TOO_LOW = "too low"


@dataclass(frozen=True)
class Rational:
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError(f"Denominator must be positive, got {self.denominator}")
        if self.numerator < 0:
            raise ValueError(f"Numerator must be non-negative, got {self.numerator}")

    @classmethod
    def parse(cls, text: str) -> "Rational":
        """Read ``a/b`` (or a bare integer) as an unreduced rational"""
        numerator, _, denominator = text.strip().partition("/")
        try:
            return cls(int(numerator), int(denominator) if denominator else 1)
        except ValueError:
            raise ValueError(f"Expected a fraction like 91/216, got {text!r}")

    def reduce(self) -> "Rational":
        return reduce(self)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def decimal(self) -> str:
        """Six significant digits, for display only"""
        return f"{self.numerator / self.denominator:.6g}"

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


def reduce(r: Rational) -> Rational:
    """Divide out the gcd, 0/k becomes 0/1"""
    divisor = math.gcd(r.numerator, r.denominator)
    return Rational(r.numerator // divisor, r.denominator // divisor)


@dataclass(frozen=True)
class PuzzleOutcome:
    possible: ModelCount
    favorable: ModelCount
    raw: Rational
    probability: Rational

    def __post_init__(self):
        if not (self.possible.exhausted and self.favorable.exhausted):
            raise NonExhaustiveCount("Both model counts must be exhaustive")
        if not 0 <= self.probability.as_fraction() <= 1:
            raise ValueError(f"Probability {self.probability} lies outside [0, 1]")

    @property
    def decimal(self) -> str:
        return self.probability.decimal()

    def text(self) -> str:
        return (
            f"{self.favorable.count} / {self.possible.count} = "
            f"{self.probability} ≈ {self.decimal}"
        )

    def record(self) -> Dict[str, Union[int, str]]:
        return {
            "num": self.probability.numerator,
            "den": self.probability.denominator,
            "raw_num": self.raw.numerator,
            "raw_den": self.raw.denominator,
            "decimal": self.decimal,
        }


def outcome_from_counts(possible: ModelCount, favorable: ModelCount) -> PuzzleOutcome:
    """Form the probability from two counts, refusing truncated or empty ones"""
    if not possible.exhausted or not favorable.exhausted:
        logger.error(
            f"Counts {possible.count} and {favorable.count} were cut short by max_models"
        )
        raise NonExhaustiveCount(
            "Probability needs exhaustive counts, assign(max_models, -1) in both theories"
        )
    if possible.count == 0:
        raise ZeroPossibleModels(
            "The possible-models theory has no model, the puzzle encoding is inconsistent"
        )
    raw = Rational(favorable.count, possible.count)
    return PuzzleOutcome(possible, favorable, raw, reduce(raw))


def solve_puzzle(
    possible: Theory, favorable_extra: Theory, workers: int = 1
) -> PuzzleOutcome:
    """Count the possible models, then the models left after adding the favorable constraints"""
    merged = merge_theories(possible, favorable_extra)
    possible_count = count_models(possible, workers=workers)
    logger.info(f"Possible models: {possible_count.count}")
    favorable_count = count_models(merged, workers=workers)
    logger.info(f"Favorable models: {favorable_count.count}")
    return outcome_from_counts(possible_count, favorable_count)


def check_claim(outcome: PuzzleOutcome, claim: Rational) -> str:
    """Compare a claimed answer, e.g. a naive 1/2, with the exact probability"""
    claimed = claim.as_fraction()
    exact = outcome.probability.as_fraction()
    if claimed == exact:
        return CONFIRMED
    return TOO_HIGH if claimed > exact else TOO_LOW
