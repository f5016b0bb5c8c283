"""Brute force model counting, used to cross-check the solver.

Every assignment of every cell is built and checked with core.is_model. Nothing
here grounds, folds or prunes, so it shares no code path with the solver beyond
the evaluator in core.
"""

import concurrent.futures
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from probmodels.core import Interpretation, ModelCount, Theory, is_model
from probmodels.exceptions import BudgetExceeded

logger = logging.getLogger(__name__)

DEFAULT_MAX_ASSIGNMENTS = 10_000_000


@dataclass(frozen=True)
class OracleBudget:
    max_assignments: int = DEFAULT_MAX_ASSIGNMENTS

    def __post_init__(self):
        if self.max_assignments < 1:
            raise ValueError(
                f"Oracle budget must be positive, got {self.max_assignments}"
            )


def assignment_space(theory: Theory) -> int:
    return theory.signature.space_size(theory.require_domain_size())


def check_budget(theory: Theory, budget: OracleBudget) -> int:
    """Return the assignment space, raising BudgetExceeded if it is over budget"""
    space = assignment_space(theory)
    if space > budget.max_assignments:
        raise BudgetExceeded(space, budget.max_assignments)
    return space


def _sweep(
    theory: Theory, first_value: Optional[int], cap: Optional[int]
) -> List[Tuple[int, ...]]:
    """Cell values of every model in lexicographic order, at most cap of them.

    With first_value set only assignments whose first cell holds it are tried.
    """
    signature = theory.signature
    domain_size = theory.domain_size
    keys = list(signature.cell_keys(domain_size))
    ranges = [
        range(2) if signature.is_predicate(name) else range(domain_size)
        for name, _ in keys
    ]
    if first_value is not None:
        ranges[0] = range(first_value, first_value + 1)

    # One interpretation whose tables are rewritten in place for every assignment
    functions: Dict[str, Dict[Tuple[int, ...], int]] = {
        name: {} for name in signature.functions
    }
    predicates: Dict[str, Dict[Tuple[int, ...], bool]] = {
        name: {} for name in signature.predicates
    }
    tables = []
    for name, args in keys:
        table = predicates[name] if signature.is_predicate(name) else functions[name]
        table[args] = False if signature.is_predicate(name) else 0
        tables.append((table, args, signature.is_predicate(name)))
    interpretation = Interpretation(domain_size, functions, predicates)
    interpretation.check_signature(signature, domain_size)

    found = []
    for values in itertools.product(*ranges):
        for (table, args, is_predicate), value in zip(tables, values):
            table[args] = bool(value) if is_predicate else value
        if is_model(theory, interpretation, check_signature=False):
            found.append(values)
            if cap is not None and len(found) >= cap:
                break
    return found


def _model_values(
    theory: Theory, budget: OracleBudget, workers: int
) -> Tuple[List[Tuple[int, ...]], bool]:
    space = check_budget(theory, budget)
    limit = theory.limit
    cap = None if limit == -1 else limit + 1
    logger.debug(f"Oracle sweeping {space} assignments")

    first_size = 0
    if theory.signature.order:
        first_name = theory.signature.order[0]
        first_size = 2 if theory.signature.is_predicate(first_name) else theory.domain_size
    if workers > 1 and first_size:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [
                executor.submit(_sweep, theory, value, cap) for value in range(first_size)
            ]
            values = [row for future in futures for row in future.result()]
    else:
        values = _sweep(theory, None, cap)

    if cap is not None and len(values) >= cap:
        return values[:limit], False
    return values, True


def brute_force_count(
    theory: Theory, budget: OracleBudget = OracleBudget(), workers: int = 1
) -> ModelCount:
    """Count models by checking every interpretation of the signature"""
    values, exhausted = _model_values(theory, budget, workers)
    logger.info(f"Oracle counted {len(values)} models (exhausted: {exhausted})")
    return ModelCount(len(values), exhausted)


def brute_force_models(
    theory: Theory, budget: OracleBudget = OracleBudget(), workers: int = 1
) -> List[Interpretation]:
    """Every model, in the same lexicographic order the solver streams them"""
    values, _ = _model_values(theory, budget, workers)
    return [
        Interpretation.from_cells(theory.signature, theory.domain_size, row)
        for row in values
    ]
