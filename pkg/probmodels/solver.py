"""Ground a theory over its domain and enumerate or count its models.

Cells are filled depth first in the canonical cell order with values tried in
ascending order, so models come out in lexicographic order of their cell values.
Each ground constraint is checked when the last cell it can read is assigned.
No symmetry breaking is done: probabilities need the raw labeled counts.
"""

import concurrent.futures
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from probmodels.core import (
    ARITHMETIC_OPERATORS,
    BINARY_CONNECTIVES,
    RELATIONS,
    And,
    Apply,
    ArithOp,
    BoolConst,
    Compare,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    IntLiteral,
    Interpretation,
    ModelCount,
    Not,
    Or,
    PredAtom,
    Term,
    Theory,
    Variable,
    arithmetic_chain,
    connective_chain,
    holds,
)
from probmodels.exceptions import OutOfDomainApplication

logger = logging.getLogger(__name__)

TRUE = BoolConst(True)
FALSE = BoolConst(False)


@dataclass(frozen=True)
class Cell:
    symbol: str
    args: Tuple[int, ...]
    is_predicate: bool

    def size(self, domain_size: int) -> int:
        return 2 if self.is_predicate else domain_size


@dataclass(frozen=True)
class GroundConstraint:
    """A closed quantifier-free formula and the indices of the cells it can read"""

    formula: Formula
    cells: FrozenSet[int]

    @property
    def watch(self) -> int:
        """Cell whose assignment completes every read of this constraint"""
        return max(self.cells, default=-1)


@dataclass(frozen=True)
class GroundProblem:
    domain_size: int
    cells: Tuple[Cell, ...]
    constraints: Tuple[GroundConstraint, ...]

    def cell_index(self) -> Dict[Tuple[str, Tuple[int, ...]], int]:
        return {(cell.symbol, cell.args): i for i, cell in enumerate(self.cells)}


def _ground_term(term: Term, env: Dict[str, int], domain_size: int) -> Term:
    if isinstance(term, Variable):
        return IntLiteral(env[term.name])
    if isinstance(term, Apply):
        args = tuple(_ground_term(arg, env, domain_size) for arg in term.args)
        _check_folded_args(term.symbol, args, domain_size)
        return Apply(term.symbol, args)
    if isinstance(term, ArithOp):
        first, nodes = arithmetic_chain(term)
        result = _ground_term(first, env, domain_size)
        for node in nodes:
            right = _ground_term(node.right, env, domain_size)
            if isinstance(result, IntLiteral) and isinstance(right, IntLiteral):
                result = IntLiteral(
                    ARITHMETIC_OPERATORS[node.op](result.value, right.value)
                )
            else:
                result = ArithOp(node.op, result, right)
        return result
    return term


def _check_folded_args(symbol: str, args: Tuple[Term, ...], domain_size: int):
    if all(isinstance(arg, IntLiteral) for arg in args):
        values = tuple(arg.value for arg in args)
        if any(not 0 <= value < domain_size for value in values):
            raise OutOfDomainApplication(symbol, values, domain_size)


def _fold_not(body: Formula) -> Formula:
    if isinstance(body, BoolConst):
        return BoolConst(not body.value)
    return Not(body)


def _ground_connective(
    node: Formula, left: Formula, env: Dict[str, int], domain_size: int
) -> Formula:
    """Ground a binary connective whose left operand is already grounded"""
    if isinstance(node, And):
        if left == FALSE:
            return FALSE
        right = _ground(node.right, env, domain_size)
        if left == TRUE or right == FALSE:
            return right
        return left if right == TRUE else And(left, right)
    if isinstance(node, Or):
        if left == TRUE:
            return TRUE
        right = _ground(node.right, env, domain_size)
        if left == FALSE or right == TRUE:
            return right
        return left if right == FALSE else Or(left, right)
    if isinstance(node, Implies):
        if left == FALSE:
            return TRUE
        right = _ground(node.right, env, domain_size)
        if left == TRUE or right == TRUE:
            return right
        return _fold_not(left) if right == FALSE else Implies(left, right)
    right = _ground(node.right, env, domain_size)
    if isinstance(left, BoolConst) and isinstance(right, BoolConst):
        return BoolConst(left.value == right.value)
    if isinstance(left, BoolConst):
        return right if left.value else _fold_not(right)
    if isinstance(right, BoolConst):
        return left if right.value else _fold_not(left)
    return Iff(left, right)


def _ground(formula: Formula, env: Dict[str, int], domain_size: int) -> Formula:
    """Substitute, expand quantifiers and fold constants.

    Operands are grounded left to right and short-circuit like core.holds, so a
    decided left side never grounds (or raises for) the right side.
    """
    if isinstance(formula, Compare):
        left = _ground_term(formula.left, env, domain_size)
        right = _ground_term(formula.right, env, domain_size)
        if isinstance(left, IntLiteral) and isinstance(right, IntLiteral):
            return BoolConst(RELATIONS[formula.rel](left.value, right.value))
        if left == right:
            return BoolConst(formula.rel in ("=", "<="))
        return Compare(formula.rel, left, right)
    if isinstance(formula, PredAtom):
        args = tuple(_ground_term(arg, env, domain_size) for arg in formula.args)
        _check_folded_args(formula.symbol, args, domain_size)
        return PredAtom(formula.symbol, args)
    if isinstance(formula, BoolConst):
        return formula
    if isinstance(formula, Not):
        return _fold_not(_ground(formula.body, env, domain_size))
    if isinstance(formula, BINARY_CONNECTIVES):
        first, nodes = connective_chain(formula)
        result = _ground(first, env, domain_size)
        for node in nodes:
            result = _ground_connective(node, result, env, domain_size)
        return result
    if isinstance(formula, (ForAll, Exists)):
        universal = isinstance(formula, ForAll)
        join, unit, zero = (And, TRUE, FALSE) if universal else (Or, FALSE, TRUE)
        instances = []
        for element in range(domain_size):
            instance = _ground(formula.body, {**env, formula.var: element}, domain_size)
            if instance == zero:
                return zero
            if instance != unit:
                instances.append(instance)
        if not instances:
            return unit
        result = instances[0]
        for instance in instances[1:]:
            result = join(result, instance)
        return result
    raise TypeError(f"Not a formula: {formula!r}")


def _split_conjuncts(formula: Formula) -> List[Formula]:
    conjuncts = []
    pending = [formula]
    while pending:
        node = pending.pop()
        if isinstance(node, And):
            pending.append(node.right)
            pending.append(node.left)
        else:
            conjuncts.append(node)
    return conjuncts


class _CellCollector:
    """Indices of the cells a ground formula can read.

    An application whose arguments are all literals reads one cell. Any other
    application can read every cell of its symbol, plus whatever its arguments read.
    """

    def __init__(self, problem_cells: Tuple[Cell, ...]):
        self.index = {(cell.symbol, cell.args): i for i, cell in enumerate(problem_cells)}
        self.by_symbol: Dict[str, List[int]] = {}
        for i, cell in enumerate(problem_cells):
            self.by_symbol.setdefault(cell.symbol, []).append(i)

    def application(self, symbol: str, args: Tuple[Term, ...]) -> set:
        cells = set()
        if all(isinstance(arg, IntLiteral) for arg in args):
            cells.add(self.index[(symbol, tuple(arg.value for arg in args))])
        else:
            cells.update(self.by_symbol[symbol])
        for arg in args:
            cells |= self.term(arg)
        return cells

    def term(self, term: Term) -> set:
        if isinstance(term, Apply):
            return self.application(term.symbol, term.args)
        if isinstance(term, ArithOp):
            first, nodes = arithmetic_chain(term)
            cells = self.term(first)
            for node in nodes:
                cells |= self.term(node.right)
            return cells
        return set()

    def formula(self, formula: Formula) -> set:
        if isinstance(formula, Compare):
            return self.term(formula.left) | self.term(formula.right)
        if isinstance(formula, PredAtom):
            return self.application(formula.symbol, formula.args)
        if isinstance(formula, Not):
            return self.formula(formula.body)
        if isinstance(formula, BINARY_CONNECTIVES):
            first, nodes = connective_chain(formula)
            cells = self.formula(first)
            for node in nodes:
                cells |= self.formula(node.right)
            return cells
        return set()


def ground(theory: Theory) -> GroundProblem:
    """Expand every formula over the domain into cell-annotated ground constraints"""
    domain_size = theory.require_domain_size()
    signature = theory.signature
    cells = tuple(
        Cell(name, args, signature.is_predicate(name))
        for name, args in signature.cell_keys(domain_size)
    )
    collector = _CellCollector(cells)

    constraints = []
    for formula in theory.formulas:
        grounded = _ground(formula, {}, domain_size)
        if grounded == TRUE:
            continue
        for conjunct in _split_conjuncts(grounded):
            constraints.append(
                GroundConstraint(conjunct, frozenset(collector.formula(conjunct)))
            )
    logger.debug(
        f"Grounded {len(theory.formulas)} formulas into {len(constraints)} constraints "
        f"over {len(cells)} cells at domain size {domain_size}"
    )
    return GroundProblem(domain_size, cells, tuple(constraints))


class _AssignmentView:
    """Read access to the values assigned so far, in the shape core.holds expects"""

    def __init__(self, problem: GroundProblem):
        self.domain_size = problem.domain_size
        self.index = problem.cell_index()
        self.values: List[int] = [0] * len(problem.cells)

    def function_value(self, symbol: str, args: Tuple[int, ...]) -> int:
        return self.values[self.index[(symbol, args)]]

    def predicate_value(self, symbol: str, args: Tuple[int, ...]) -> bool:
        return bool(self.values[self.index[(symbol, args)]])


class _Search:
    """Depth first search over cell values with fail-fast constraint checks"""

    def __init__(self, problem: GroundProblem):
        self.problem = problem
        self.sizes = [cell.size(problem.domain_size) for cell in problem.cells]
        self.watched: List[List[Formula]] = [[] for _ in problem.cells]
        self.unsatisfiable = False
        for constraint in problem.constraints:
            if constraint.watch < 0:
                # Ground constraints without cells are constants, only $F survives folding
                self.unsatisfiable |= not holds(constraint.formula, None, {})
            else:
                self.watched[constraint.watch].append(constraint.formula)
        self.last_watch = max(
            (constraint.watch for constraint in problem.constraints), default=-1
        )
        # free_space[i] is the number of completions of cells i.. once no checks remain
        self.free_space = [1] * (len(self.sizes) + 1)
        for i in range(len(self.sizes) - 1, -1, -1):
            self.free_space[i] = self.free_space[i + 1] * self.sizes[i]
        self.view = _AssignmentView(problem)

    def _consistent(self, depth: int) -> bool:
        return all(holds(formula, self.view, {}) for formula in self.watched[depth])

    def _prefixes(self, start: int, stop: int) -> Iterator[None]:
        """Yield once per consistent assignment of cells start..stop-1, left in the view.

        Backtracks with an explicit stack of next values, one entry per cell.
        """
        if self.unsatisfiable:
            return
        if start >= stop:
            yield
            return
        next_value = [0] * stop
        depth = start
        while depth >= start:
            value = next_value[depth]
            if value == self.sizes[depth]:
                depth -= 1
                continue
            next_value[depth] = value + 1
            self.view.values[depth] = value
            if not self._consistent(depth):
                continue
            if depth + 1 == stop:
                yield
            else:
                depth += 1
                next_value[depth] = 0

    def models(self) -> Iterator[Tuple[int, ...]]:
        for _ in self._prefixes(0, len(self.sizes)):
            yield tuple(self.view.values)

    def count(self, start: int = 0, cap: Optional[int] = None) -> int:
        """Number of models with cells before start fixed, never more than cap"""
        # Past the last watched cell every completion is a model
        stop = max(start, self.last_watch + 1)
        completions = self.free_space[stop]
        total = 0
        for _ in self._prefixes(start, stop):
            total += completions
            if cap is not None and total >= cap:
                return cap
        return total

    def count_branch(self, first_value: int, cap: Optional[int]) -> int:
        """Count the subtree where the first cell holds first_value"""
        if self.unsatisfiable:
            return 0
        self.view.values[0] = first_value
        if not self._consistent(0):
            return 0
        return self.count(1, cap)


def _interpretation(theory: Theory, values: Tuple[int, ...]) -> Interpretation:
    return Interpretation.from_cells(theory.signature, theory.domain_size, values)


def enumerate_models(theory: Theory, limit: int = -1) -> Iterator[Interpretation]:
    """Stream the models of a theory in lexicographic order of cell values.

    ``limit`` of -1 streams every model, a positive limit stops after that many.
    """
    problem = ground(theory)
    search = _Search(problem)
    emitted = 0
    for values in search.models():
        if limit != -1 and emitted >= limit:
            return
        emitted += 1
        yield _interpretation(theory, values)


def _count_branch(problem: GroundProblem, first_value: int, cap: Optional[int]) -> int:
    return _Search(problem).count_branch(first_value, cap)


def count_models(theory: Theory, workers: int = 1) -> ModelCount:
    """Count models without materializing them, honouring the theory's max_models.

    With workers > 1 the values of the first cell are counted in separate
    processes. The sum does not depend on scheduling.
    """
    problem = ground(theory)
    limit = theory.limit
    # One extra model tells a cut-off count apart from an exact one
    cap = None if limit == -1 else limit + 1

    if workers > 1 and problem.cells:
        first_size = problem.cells[0].size(problem.domain_size)
        logger.debug(f"Counting {first_size} branches on {workers} workers")
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [
                executor.submit(_count_branch, problem, value, cap)
                for value in range(first_size)
            ]
            total = sum(future.result() for future in futures)
    else:
        total = _Search(problem).count(0, cap)

    if cap is not None and total >= cap:
        result = ModelCount(limit, exhausted=False)
    else:
        result = ModelCount(total, exhausted=True)
    logger.info(f"Counted {result.count} models (exhausted: {result.exhausted})")
    return result
