"""Abstract syntax and finite model semantics for equational first order theories.

Domain elements are the integers 0..n-1. Terms evaluate to unbounded integers so
that sums such as ``Dice1 + Dice2 + Dice3`` can leave the domain, but function and
predicate arguments must stay inside it.
"""

import itertools
import logging
import operator
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterator,
    List,
    Mapping,
    Optional,
    Protocol,
    Sequence,
    Set,
    Tuple,
    Union,
)

from probmodels.exceptions import (
    ArityConflict,
    InvalidTheory,
    OutOfDomainApplication,
    SignatureMismatch,
)

logger = logging.getLogger(__name__)

# Looked up at evaluation time, so tests can substitute other arithmetic
ARITHMETIC_OPERATORS: Dict[str, Callable[[int, int], int]] = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
}

RELATIONS: Dict[str, Callable[[int, int], bool]] = {
    "=": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
}

# > and >= are stored as < and <= with the operands swapped
SWAPPED_RELATIONS = {">": "<", ">=": "<="}


# Terms


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class IntLiteral:
    value: int


@dataclass(frozen=True)
class Apply:
    """Function application, constants are applications with no arguments"""

    symbol: str
    args: Tuple["Term", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class ArithOp:
    op: str
    left: "Term"
    right: "Term"

    def __post_init__(self):
        if self.op not in ARITHMETIC_OPERATORS:
            raise InvalidTheory(f"Unknown arithmetic operator {self.op!r}")


Term = Union[Variable, IntLiteral, Apply, ArithOp]


# Formulas


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Compare:
    rel: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.rel in SWAPPED_RELATIONS:
            left, right = self.left, self.right
            object.__setattr__(self, "rel", SWAPPED_RELATIONS[self.rel])
            object.__setattr__(self, "left", right)
            object.__setattr__(self, "right", left)
        if self.rel not in RELATIONS:
            raise InvalidTheory(f"Unknown relation {self.rel!r}")


@dataclass(frozen=True)
class PredAtom:
    symbol: str
    args: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[
    BoolConst, Compare, PredAtom, Not, And, Or, Implies, Iff, ForAll, Exists
]
BINARY_CONNECTIVES = (And, Or, Implies, Iff)
QUANTIFIERS = (ForAll, Exists)

Binding = Mapping[str, int]
CellKey = Tuple[str, Tuple[int, ...]]


@dataclass(frozen=True)
class ModelCount:
    """A model count, ``exhausted`` is False when max_models cut it short"""

    count: int
    exhausted: bool = True


def connective_chain(formula: Formula) -> Tuple[Formula, List[Formula]]:
    """Split a left-nested run of binary connectives.

    Returns the leftmost operand and the connective nodes above it, innermost
    first: ``a & b | c`` gives ``a`` and ``[a & b, (a & b) | c]``. Every walk over
    formulas goes through this, so ``a & b & ...`` chains of any length are
    handled in a loop.
    """
    nodes = []
    while isinstance(formula, BINARY_CONNECTIVES):
        nodes.append(formula)
        formula = formula.left
    nodes.reverse()
    return formula, nodes


def arithmetic_chain(term: Term) -> Tuple[Term, List[ArithOp]]:
    """Leftmost operand of a left-nested run of arithmetic and the operations above it"""
    nodes = []
    while isinstance(term, ArithOp):
        nodes.append(term)
        term = term.left
    nodes.reverse()
    return term, nodes


def iter_symbol_uses(formula: Formula) -> Iterator[Tuple[str, int, bool]]:
    """Yield (symbol, arity, is_predicate) for every symbol use, left to right"""
    if isinstance(formula, PredAtom):
        yield formula.symbol, len(formula.args), True
        for arg in formula.args:
            yield from _iter_term_symbols(arg)
    elif isinstance(formula, Compare):
        yield from _iter_term_symbols(formula.left)
        yield from _iter_term_symbols(formula.right)
    elif isinstance(formula, Not):
        yield from iter_symbol_uses(formula.body)
    elif isinstance(formula, BINARY_CONNECTIVES):
        first, nodes = connective_chain(formula)
        yield from iter_symbol_uses(first)
        for node in nodes:
            yield from iter_symbol_uses(node.right)
    elif isinstance(formula, QUANTIFIERS):
        yield from iter_symbol_uses(formula.body)


def _iter_term_symbols(term: Term) -> Iterator[Tuple[str, int, bool]]:
    if isinstance(term, Apply):
        yield term.symbol, len(term.args), False
        for arg in term.args:
            yield from _iter_term_symbols(arg)
    elif isinstance(term, ArithOp):
        first, nodes = arithmetic_chain(term)
        yield from _iter_term_symbols(first)
        for node in nodes:
            yield from _iter_term_symbols(node.right)


@dataclass(frozen=True)
class Signature:
    """Function and predicate symbols with their arities.

    ``order`` keeps the order of first appearance across both kinds of symbol, which
    fixes the canonical cell order shared by the solver and the oracle.
    """

    functions: Mapping[str, int] = field(default_factory=dict)
    predicates: Mapping[str, int] = field(default_factory=dict)
    order: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "predicates", dict(self.predicates))
        shared = set(self.functions) & set(self.predicates)
        if shared:
            raise ArityConflict(
                f"Symbols used as both function and predicate: {sorted(shared)}"
            )
        for name, arity in itertools.chain(
            self.functions.items(), self.predicates.items()
        ):
            if arity < 0:
                raise InvalidTheory(f"Symbol {name} has negative arity {arity}")
        if self.order is None:
            order = tuple(self.functions) + tuple(self.predicates)
        else:
            order = tuple(self.order)
        if sorted(order) != sorted(itertools.chain(self.functions, self.predicates)):
            raise InvalidTheory(f"Symbol order {order} does not match the signature")
        object.__setattr__(self, "order", order)

    @classmethod
    def infer(cls, formulas: Sequence[Formula]) -> "Signature":
        """Collect the symbols of the formulas in order of first appearance"""
        functions: Dict[str, int] = {}
        predicates: Dict[str, int] = {}
        order = []
        for formula in formulas:
            for name, arity, is_predicate in iter_symbol_uses(formula):
                table, other = (
                    (predicates, functions) if is_predicate else (functions, predicates)
                )
                if name in other:
                    raise ArityConflict(
                        f"Symbol {name} is used both as a function and as a predicate"
                    )
                if name not in table:
                    table[name] = arity
                    order.append(name)
                elif table[name] != arity:
                    raise ArityConflict(
                        f"Symbol {name} is used with arity {table[name]} and arity {arity}"
                    )
        return cls(functions, predicates, tuple(order))

    def __contains__(self, name: str) -> bool:
        return name in self.functions or name in self.predicates

    def arity(self, name: str) -> int:
        if name in self.functions:
            return self.functions[name]
        return self.predicates[name]

    def is_predicate(self, name: str) -> bool:
        return name in self.predicates

    def union(self, other: "Signature") -> "Signature":
        functions = dict(self.functions)
        predicates = dict(self.predicates)
        order = list(self.order)
        for name in other.order:
            arity = other.arity(name)
            table, rival = (
                (predicates, functions)
                if other.is_predicate(name)
                else (functions, predicates)
            )
            if name in rival:
                raise ArityConflict(
                    f"Symbol {name} is a function in one theory and a predicate in the other"
                )
            if name in table and table[name] != arity:
                raise ArityConflict(
                    f"Symbol {name} has arity {table[name]} and arity {arity}"
                )
            if name not in table:
                table[name] = arity
                order.append(name)
        return Signature(functions, predicates, tuple(order))

    def cell_keys(self, domain_size: int) -> Iterator[CellKey]:
        """Canonical cell order: symbols in signature order, then args lexicographically"""
        for name in self.order:
            for args in itertools.product(range(domain_size), repeat=self.arity(name)):
                yield name, args

    def cell_counts(self, domain_size: int) -> Tuple[int, int]:
        """Number of (function, predicate) cells at this domain size"""
        function_cells = sum(domain_size ** a for a in self.functions.values())
        predicate_cells = sum(domain_size ** a for a in self.predicates.values())
        return function_cells, predicate_cells

    def space_size(self, domain_size: int) -> int:
        """Number of interpretations of this signature over the domain"""
        function_cells, predicate_cells = self.cell_counts(domain_size)
        return domain_size ** function_cells * 2 ** predicate_cells


@dataclass(frozen=True)
class Theory:
    """A finite domain theory: directives plus an ordered list of closed formulas.

    ``domain_size`` and ``max_models`` are None when the text never assigned them,
    which is how constraint-only files (favorable models) are represented.
    """

    domain_size: Optional[int] = None
    max_models: Optional[int] = None
    formulas: Tuple[Formula, ...] = ()
    signature: Optional[Signature] = None
    options: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "formulas", tuple(self.formulas))
        object.__setattr__(self, "options", frozenset(self.options))
        if self.domain_size is not None and self.domain_size < 1:
            raise InvalidTheory(f"domain_size must be at least 1, got {self.domain_size}")
        if self.max_models is not None and not (
            self.max_models == -1 or self.max_models >= 1
        ):
            raise InvalidTheory(f"max_models must be -1 or positive, got {self.max_models}")

        inferred = Signature.infer(self.formulas)
        if self.signature is None:
            object.__setattr__(self, "signature", inferred)
        else:
            for name in inferred.order:
                if name not in self.signature or (
                    self.signature.arity(name) != inferred.arity(name)
                    or self.signature.is_predicate(name) != inferred.is_predicate(name)
                ):
                    raise ArityConflict(
                        f"Symbol {name} is used differently from its declaration"
                    )

        for formula in self.formulas:
            unbound = free_vars(formula)
            if unbound:
                raise InvalidTheory(
                    f"Formula has unbound variables {sorted(unbound)}: {formula}"
                )

    @property
    def limit(self) -> int:
        """max_models with the unassigned default of -1 (all models)"""
        return -1 if self.max_models is None else self.max_models

    def require_domain_size(self) -> int:
        if self.domain_size is None:
            raise InvalidTheory("The theory does not assign domain_size")
        return self.domain_size


class Structure(Protocol):
    """Anything holds() can evaluate against: an Interpretation or a solver view"""

    domain_size: int

    def function_value(self, symbol: str, args: Tuple[int, ...]) -> int:
        ...

    def predicate_value(self, symbol: str, args: Tuple[int, ...]) -> bool:
        ...


@dataclass(frozen=True)
class Interpretation:
    """Total tables for every function and predicate symbol over 0..n-1"""

    domain_size: int
    functions: Mapping[str, Mapping[Tuple[int, ...], int]]
    predicates: Mapping[str, Mapping[Tuple[int, ...], bool]]

    def __post_init__(self):
        if self.domain_size < 1:
            raise InvalidTheory(f"domain_size must be at least 1, got {self.domain_size}")
        object.__setattr__(self, "functions", MappingProxyType(self.functions))
        object.__setattr__(self, "predicates", MappingProxyType(self.predicates))
        for name, table in self.functions.items():
            self._check_total(name, table)
            for args, value in table.items():
                if not 0 <= value < self.domain_size:
                    raise InvalidTheory(
                        f"{name}{args} = {value} lies outside 0..{self.domain_size - 1}"
                    )
        for name, table in self.predicates.items():
            self._check_total(name, table)

    def _check_total(self, name, table):
        arities = {len(args) for args in table}
        if len(arities) != 1:
            raise InvalidTheory(f"Table for {name} is empty or mixes argument lengths")
        (arity,) = arities
        expected = set(itertools.product(range(self.domain_size), repeat=arity))
        if set(table) != expected:
            raise InvalidTheory(f"Table for {name} is not total over the domain")

    @classmethod
    def from_cells(
        cls, signature: Signature, domain_size: int, values: Sequence[int]
    ) -> "Interpretation":
        """Build tables from cell values listed in the canonical cell order"""
        functions: Dict[str, Dict[Tuple[int, ...], int]] = {
            name: {} for name in signature.functions
        }
        predicates: Dict[str, Dict[Tuple[int, ...], bool]] = {
            name: {} for name in signature.predicates
        }
        keys = list(signature.cell_keys(domain_size))
        if len(keys) != len(values):
            raise SignatureMismatch(
                f"Expected {len(keys)} cell values, got {len(values)}"
            )
        for (name, args), value in zip(keys, values):
            if name in predicates:
                predicates[name][args] = bool(value)
            else:
                functions[name][args] = value
        return cls(domain_size, functions, predicates)

    def cell_values(self, signature: Signature) -> Tuple[int, ...]:
        """Cell values in canonical order, predicates as 0/1"""
        values = []
        for name, args in signature.cell_keys(self.domain_size):
            if signature.is_predicate(name):
                values.append(int(self.predicates[name][args]))
            else:
                values.append(self.functions[name][args])
        return tuple(values)

    def function_value(self, symbol: str, args: Tuple[int, ...]) -> int:
        return self.functions[symbol][args]

    def predicate_value(self, symbol: str, args: Tuple[int, ...]) -> bool:
        return self.predicates[symbol][args]

    def check_signature(self, signature: Signature, domain_size: Optional[int] = None):
        """Raise SignatureMismatch unless the tables cover exactly this signature"""
        if domain_size is not None and domain_size != self.domain_size:
            raise SignatureMismatch(
                f"Interpretation has domain size {self.domain_size}, theory has {domain_size}"
            )
        if set(self.functions) != set(signature.functions) or set(
            self.predicates
        ) != set(signature.predicates):
            raise SignatureMismatch(
                f"Tables for {sorted(self.functions) + sorted(self.predicates)} "
                f"do not match signature {list(signature.order)}"
            )
        for name in signature.order:
            table = (
                self.predicates[name]
                if signature.is_predicate(name)
                else self.functions[name]
            )
            arity = signature.arity(name)
            if len(table) != self.domain_size ** arity or any(
                len(args) != arity for args in table
            ):
                raise SignatureMismatch(
                    f"Table for {name} does not have arity {arity}"
                )


def _check_arguments(symbol: str, args: Tuple[int, ...], domain_size: int):
    for value in args:
        if not 0 <= value < domain_size:
            raise OutOfDomainApplication(symbol, args, domain_size)


def eval_term(term: Term, interpretation: Structure, binding: Binding) -> int:
    """Evaluate a term to an unbounded integer"""
    if isinstance(term, IntLiteral):
        return term.value
    if isinstance(term, Variable):
        try:
            return binding[term.name]
        except KeyError:
            raise InvalidTheory(f"Variable {term.name} is not bound")
    if isinstance(term, Apply):
        args = tuple(eval_term(arg, interpretation, binding) for arg in term.args)
        _check_arguments(term.symbol, args, interpretation.domain_size)
        return interpretation.function_value(term.symbol, args)
    if isinstance(term, ArithOp):
        first, nodes = arithmetic_chain(term)
        value = eval_term(first, interpretation, binding)
        for node in nodes:
            right = eval_term(node.right, interpretation, binding)
            value = ARITHMETIC_OPERATORS[node.op](value, right)
        return value
    raise TypeError(f"Not a term: {term!r}")


def _connect(
    node: Formula, left: bool, interpretation: Structure, binding: Binding
) -> bool:
    """Value of a connective given its left operand, reading the right one only if needed"""
    if isinstance(node, And):
        return left and holds(node.right, interpretation, binding)
    if isinstance(node, Or):
        return left or holds(node.right, interpretation, binding)
    if isinstance(node, Implies):
        return not left or holds(node.right, interpretation, binding)
    return left == holds(node.right, interpretation, binding)


def holds(formula: Formula, interpretation: Structure, binding: Binding) -> bool:
    """Tarskian satisfaction, quantifiers range over 0..n-1"""
    if isinstance(formula, Compare):
        left = eval_term(formula.left, interpretation, binding)
        right = eval_term(formula.right, interpretation, binding)
        return RELATIONS[formula.rel](left, right)
    if isinstance(formula, PredAtom):
        args = tuple(eval_term(arg, interpretation, binding) for arg in formula.args)
        _check_arguments(formula.symbol, args, interpretation.domain_size)
        return interpretation.predicate_value(formula.symbol, args)
    if isinstance(formula, BoolConst):
        return formula.value
    if isinstance(formula, Not):
        return not holds(formula.body, interpretation, binding)
    if isinstance(formula, BINARY_CONNECTIVES):
        first, nodes = connective_chain(formula)
        value = holds(first, interpretation, binding)
        for node in nodes:
            value = _connect(node, value, interpretation, binding)
        return value
    if isinstance(formula, ForAll):
        return all(
            holds(formula.body, interpretation, {**binding, formula.var: element})
            for element in range(interpretation.domain_size)
        )
    if isinstance(formula, Exists):
        return any(
            holds(formula.body, interpretation, {**binding, formula.var: element})
            for element in range(interpretation.domain_size)
        )
    raise TypeError(f"Not a formula: {formula!r}")


def is_model(
    theory: Theory, interpretation: Interpretation, check_signature: bool = True
) -> bool:
    """True iff every formula of the theory holds under the empty binding"""
    if check_signature:
        interpretation.check_signature(theory.signature, theory.domain_size)
    return all(holds(formula, interpretation, {}) for formula in theory.formulas)


def free_vars(formula: Formula) -> Set[str]:
    if isinstance(formula, Compare):
        return _term_vars(formula.left) | _term_vars(formula.right)
    if isinstance(formula, PredAtom):
        return set().union(*(_term_vars(arg) for arg in formula.args))
    if isinstance(formula, BoolConst):
        return set()
    if isinstance(formula, Not):
        return free_vars(formula.body)
    if isinstance(formula, BINARY_CONNECTIVES):
        first, nodes = connective_chain(formula)
        return free_vars(first).union(*(free_vars(node.right) for node in nodes))
    if isinstance(formula, QUANTIFIERS):
        return free_vars(formula.body) - {formula.var}
    raise TypeError(f"Not a formula: {formula!r}")


def _term_vars(term: Term) -> Set[str]:
    if isinstance(term, Variable):
        return {term.name}
    if isinstance(term, Apply):
        return set().union(*(_term_vars(arg) for arg in term.args))
    if isinstance(term, ArithOp):
        first, nodes = arithmetic_chain(term)
        return _term_vars(first).union(*(_term_vars(node.right) for node in nodes))
    return set()
