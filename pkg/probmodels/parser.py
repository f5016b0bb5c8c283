"""Read and write the Mace4-style input language of the puzzle theories.

A theory file is a sequence of directives::

    assign(domain_size, 7).
    assign(max_models, -1).
    set(arithmetic).
    formulas(assumptions).
      Dice1 != 0.
    end_of_list.

See ``documentation/grammar.md`` for the precedence table.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import pyparsing as pp

from probmodels.core import (
    BINARY_CONNECTIVES,
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
    Not,
    Or,
    PredAtom,
    Signature,
    Term,
    Theory,
    Variable,
    arithmetic_chain,
    connective_chain,
)
from probmodels.exceptions import (
    ArityConflict,
    DomainMismatch,
    TheoryError,
    TheoryParseError,
)

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

ASSIGN_PARAMETERS = ("domain_size", "max_models")
ACCEPTED_FLAGS = ("arithmetic",)


@dataclass(frozen=True)
class SourceFile:
    text: str
    origin: str = "<memory>"

    @classmethod
    def from_path(cls, filename) -> "SourceFile":
        """Read a theory file, logging the path if it cannot be read"""
        file_path = Path(filename)
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                text = f.read()
        except (OSError, UnicodeDecodeError):
            logger.error(f"Could not read theory file at {file_path}")
            raise
        return cls(text, str(file_path))


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"


@dataclass(frozen=True)
class _Directive:
    kind: str
    name: str
    value: Optional[int]
    loc: int


@dataclass(frozen=True)
class _Statement:
    formula: Formula
    loc: int


@dataclass(frozen=True)
class _Block:
    statements: Tuple[_Statement, ...]


def _fold_left(make):
    """Parse action folding ``a op b op c`` into ((a op b) op c)"""

    def action(tokens):
        result = tokens[0]
        for index in range(1, len(tokens), 2):
            result = make(tokens[index], result, tokens[index + 1])
        return result

    return action


_CONNECTIVES = {"&": And, "|": Or, "->": Implies, "<->": Iff}


def _connective(op, left, right):
    return _CONNECTIVES[op](left, right)


def _check_assign(s, loc, tokens):
    name, value = tokens[0], tokens[1]
    if name not in ASSIGN_PARAMETERS:
        raise pp.ParseFatalException(s, loc, f"unknown assign parameter '{name}'")
    if name == "domain_size" and value < 1:
        raise pp.ParseFatalException(s, loc, "domain_size must be at least 1")
    if name == "max_models" and not (value == -1 or value >= 1):
        raise pp.ParseFatalException(s, loc, "max_models must be -1 or positive")
    return _Directive("assign", name, value, loc)


def _check_flag(s, loc, tokens):
    if tokens[0] not in ACCEPTED_FLAGS:
        raise pp.ParseFatalException(s, loc, f"unsupported flag set({tokens[0]})")
    return _Directive("set", tokens[0], None, loc)


def _check_list_name(s, loc, tokens):
    if tokens[0] != "assumptions":
        raise pp.ParseFatalException(
            s, loc, f"only formulas(assumptions) lists are supported, got '{tokens[0]}'"
        )


def _unknown_directive(s, loc, tokens):
    raise pp.ParseFatalException(s, loc, f"unknown directive '{tokens[0]}'")


def _to_int(s, loc, tokens):
    try:
        return int(tokens[0])
    except ValueError:
        raise pp.ParseFatalException(s, loc, "integer literal is too long")


def _make_grammar() -> pp.ParserElement:
    LPAR, RPAR, COMMA, PERIOD = map(pp.Suppress, "(),.")

    reserved = pp.Keyword("all") | pp.Keyword("exists") | pp.Keyword("end_of_list")
    identifier = ~reserved + pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*")
    integer = pp.Regex(r"\d+").set_parse_action(
        lambda s, loc, t: IntLiteral(_to_int(s, loc, t))
    )
    signed_integer = pp.Regex(r"-?\d+").set_parse_action(_to_int)

    # Terms
    term = pp.Forward().set_name("term")
    arguments = pp.Group(LPAR + term + pp.ZeroOrMore(COMMA + term) + RPAR)
    application = (identifier + arguments).set_parse_action(
        lambda t: Apply(t[0], tuple(t[1]))
    )
    # Resolved to a variable later if a quantifier binds it
    name = identifier.copy().set_parse_action(lambda t: Apply(t[0], ()))
    primary = integer | application | name | (LPAR + term + RPAR)
    product = (primary + pp.ZeroOrMore(pp.Literal("*") + primary)).set_parse_action(
        _fold_left(lambda op, left, right: ArithOp(op, left, right))
    )
    additive_op = pp.Regex(r"\+|-(?!>)")
    term <<= (product + pp.ZeroOrMore(additive_op + product)).set_parse_action(
        _fold_left(lambda op, left, right: ArithOp(op, left, right))
    )

    # Formulas
    formula = pp.Forward().set_name("formula")
    relation = pp.Regex(r"!=|<=|>=|=|<(?!-)|>")
    comparison = (term + relation + term).set_parse_action(
        lambda t: Compare(t[1], t[0], t[2])
    )
    predicate = (identifier + pp.Optional(arguments)).set_parse_action(
        lambda t: PredAtom(t[0], tuple(t[1]) if len(t) > 1 else ())
    )
    truth = (pp.Keyword("$T") | pp.Keyword("$F")).set_parse_action(
        lambda t: BoolConst(t[0] == "$T")
    )
    quantified = (
        (pp.Keyword("all") | pp.Keyword("exists")) + identifier + formula
    ).set_parse_action(
        lambda t: (ForAll if t[0] == "all" else Exists)(t[1], t[2])
    )
    atom = truth | quantified | comparison | predicate | (LPAR + formula + RPAR)
    unary = pp.Forward()
    unary <<= (pp.Suppress(pp.Regex(r"-(?!>)")) + unary).set_parse_action(
        lambda t: Not(t[0])
    ) | atom
    conjunction = (unary + pp.ZeroOrMore(pp.Literal("&") + unary)).set_parse_action(
        _fold_left(_connective)
    )
    disjunction = (
        conjunction + pp.ZeroOrMore(pp.Literal("|") + conjunction)
    ).set_parse_action(_fold_left(_connective))
    implication = (
        disjunction + pp.ZeroOrMore(pp.Literal("->") + disjunction)
    ).set_parse_action(_fold_left(_connective))
    formula <<= (
        implication + pp.ZeroOrMore(pp.Literal("<->") + implication)
    ).set_parse_action(_fold_left(_connective))

    # Directives
    assign = (
        pp.Keyword("assign") - LPAR + identifier + COMMA + signed_integer + RPAR + PERIOD
    ).set_parse_action(lambda s, loc, t: _check_assign(s, loc, t[1:]))
    set_flag = (pp.Keyword("set") - LPAR + identifier + RPAR + PERIOD).set_parse_action(
        lambda s, loc, t: _check_flag(s, loc, t[1:])
    )
    statement = (formula - PERIOD).set_parse_action(
        lambda s, loc, t: _Statement(t[0], loc)
    )
    list_name = identifier.copy().add_parse_action(_check_list_name)
    formulas_block = (
        pp.Keyword("formulas").suppress()
        - LPAR
        + list_name.suppress()
        + RPAR
        + PERIOD
        + pp.Group(pp.ZeroOrMore(statement))
        + pp.Keyword("end_of_list").suppress()
        + PERIOD
    ).set_parse_action(lambda t: _Block(tuple(t[0])))
    unknown = identifier.copy().set_parse_action(_unknown_directive)

    theory = pp.ZeroOrMore(assign | set_flag | formulas_block | unknown) + pp.StringEnd()
    theory.ignore(pp.Regex(r"%.*"))
    return theory


_GRAMMAR = _make_grammar()


def _position(text: str, loc: int) -> Tuple[int, int]:
    """Line and column of loc, pulled back inside the text when it points past the end"""
    loc = min(loc, len(text.rstrip()))
    return pp.lineno(loc, text), pp.col(loc, text)


def _diagnostic(text: str, loc: int, message: str) -> ParseDiagnostic:
    line, column = _position(text, loc)
    return ParseDiagnostic(line, column, message)


def _skip_blank(text: str, loc: int) -> int:
    """First position at or after loc that is neither whitespace nor inside a comment"""
    while loc < len(text):
        if text[loc].isspace():
            loc += 1
        elif text[loc] == "%":
            end = text.find("\n", loc)
            loc = len(text) if end == -1 else end
        else:
            break
    return loc


def _check_parentheses(text: str) -> List[ParseDiagnostic]:
    open_positions = []
    diagnostics = []
    in_comment = False
    for loc, char in enumerate(text):
        if in_comment:
            in_comment = char != "\n"
        elif char == "%":
            in_comment = True
        elif char == "(":
            open_positions.append(loc)
        elif char == ")":
            if open_positions:
                open_positions.pop()
            else:
                diagnostics.append(
                    _diagnostic(text, loc, "unbalanced parentheses: unmatched ')'")
                )
    for loc in open_positions:
        diagnostics.append(_diagnostic(text, loc, "unbalanced parentheses: unmatched '('"))
    return diagnostics


def _describe_failure(exc: pp.ParseBaseException, text: str) -> str:
    if "end_of_list" in exc.msg:
        message = "missing end_of_list"
    else:
        message = exc.msg
    if exc.loc >= len(text.rstrip()):
        return f"{message} at end of input"
    found = text[exc.loc :].split(None, 1)[0][:20]
    return f"{message}, found '{found}'"


def _resolve_term(term: Term, bound: frozenset) -> Term:
    if isinstance(term, Apply):
        if term.symbol in bound:
            if term.args:
                raise ArityConflict(f"Variable {term.symbol} is applied like a function")
            return Variable(term.symbol)
        return Apply(term.symbol, tuple(_resolve_term(a, bound) for a in term.args))
    if isinstance(term, ArithOp):
        first, nodes = arithmetic_chain(term)
        result = _resolve_term(first, bound)
        for node in nodes:
            result = ArithOp(node.op, result, _resolve_term(node.right, bound))
        return result
    return term


def _resolve(formula: Formula, bound: frozenset = frozenset()) -> Formula:
    """Turn unapplied identifiers bound by an enclosing quantifier into variables"""
    if isinstance(formula, Compare):
        return Compare(
            formula.rel,
            _resolve_term(formula.left, bound),
            _resolve_term(formula.right, bound),
        )
    if isinstance(formula, PredAtom):
        if formula.symbol in bound:
            raise ArityConflict(f"Variable {formula.symbol} is used as a predicate")
        return PredAtom(
            formula.symbol, tuple(_resolve_term(a, bound) for a in formula.args)
        )
    if isinstance(formula, Not):
        return Not(_resolve(formula.body, bound))
    if isinstance(formula, BINARY_CONNECTIVES):
        first, nodes = connective_chain(formula)
        result = _resolve(first, bound)
        for node in nodes:
            result = type(node)(result, _resolve(node.right, bound))
        return result
    if isinstance(formula, (ForAll, Exists)):
        return type(formula)(formula.var, _resolve(formula.body, bound | {formula.var}))
    return formula


def parse_theory(src: SourceFile) -> Union[Theory, List[ParseDiagnostic]]:
    """Parse a theory, returning either the Theory or a non-empty list of diagnostics.

    Assign directives are optional so that constraint-only files (favorable
    models) parse too. Unapplied identifiers are variables only under a
    quantifier that binds them, every other one is a constant.
    """
    text = src.text
    diagnostics = _check_parentheses(text)
    if diagnostics:
        return diagnostics

    try:
        parsed = _GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        return [_diagnostic(text, exc.loc, _describe_failure(exc, text))]
    except RecursionError:
        return [_diagnostic(text, 0, "formulas nest too deeply to parse")]

    domain_size = None
    max_models = None
    options = set()
    formulas = []
    signature = Signature()
    for item in parsed:
        if isinstance(item, _Directive):
            if item.kind == "set":
                options.add(item.name)
            elif item.name == "domain_size":
                domain_size = item.value
            else:
                max_models = item.value
            continue
        for statement in item.statements:
            try:
                formula = _resolve(statement.formula)
                signature = signature.union(Signature.infer([formula]))
            except TheoryError as exc:
                loc = _skip_blank(text, statement.loc)
                diagnostics.append(_diagnostic(text, loc, str(exc)))
                continue
            except RecursionError:
                loc = _skip_blank(text, statement.loc)
                diagnostics.append(_diagnostic(text, loc, "formula nests too deeply"))
                continue
            formulas.append(formula)
    if diagnostics:
        return diagnostics

    try:
        theory = Theory(domain_size, max_models, formulas, signature, options)
    except TheoryError as exc:
        return [_diagnostic(text, 0, str(exc))]
    except RecursionError:
        return [_diagnostic(text, 0, "formulas nest too deeply")]
    logger.debug(
        f"Parsed {src.origin}: {len(formulas)} formulas over symbols {list(signature.order)}"
    )
    return theory


def load_theory(filename) -> Theory:
    """Read and parse a theory file, raising TheoryParseError on diagnostics"""
    src = SourceFile.from_path(filename)
    result = parse_theory(src)
    if isinstance(result, Theory):
        return result
    for diagnostic in result:
        logger.error(f"{src.origin}:{diagnostic}")
    raise TheoryParseError(src.origin, result)


def merge_theories(base: Theory, extra: Theory) -> Theory:
    """Append the formulas of extra (usually favorable constraints) to base"""
    if (
        extra.domain_size is not None
        and base.domain_size is not None
        and extra.domain_size != base.domain_size
    ):
        raise DomainMismatch(
            f"Cannot merge a theory over domain size {extra.domain_size} "
            f"into one over domain size {base.domain_size}"
        )
    return Theory(
        base.domain_size if base.domain_size is not None else extra.domain_size,
        base.max_models if base.max_models is not None else extra.max_models,
        base.formulas + extra.formulas,
        base.signature.union(extra.signature),
        base.options | extra.options,
    )


# Printing, binding strength of each node, higher binds tighter
_FORMULA_PRECEDENCE = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}
_FORMULA_SYMBOL = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_ATOM = 6
_TERM_PRECEDENCE = {"+": 1, "-": 1, "*": 2}


def _wrap(text: str, precedence: int, needed: int) -> str:
    return f"({text})" if precedence < needed else text


def _format_term(term: Term) -> Tuple[str, int]:
    if isinstance(term, Variable):
        return term.name, 3
    if isinstance(term, IntLiteral):
        if term.value < 0:
            return f"(0 - {-term.value})", 3
        return str(term.value), 3
    if isinstance(term, Apply):
        if not term.args:
            return term.symbol, 3
        args = ", ".join(_format_term(arg)[0] for arg in term.args)
        return f"{term.symbol}({args})", 3
    first, nodes = arithmetic_chain(term)
    text, precedence = _format_term(first)
    for node in nodes:
        needed = _TERM_PRECEDENCE[node.op]
        right = _wrap(*_format_term(node.right), needed + 1)
        text = f"{_wrap(text, precedence, needed)} {node.op} {right}"
        precedence = needed
    return text, precedence


def _format_formula(formula: Formula) -> Tuple[str, int]:
    if isinstance(formula, Compare):
        return (
            f"{_format_term(formula.left)[0]} {formula.rel} {_format_term(formula.right)[0]}",
            _ATOM,
        )
    if isinstance(formula, PredAtom):
        if not formula.args:
            return formula.symbol, _ATOM
        args = ", ".join(_format_term(arg)[0] for arg in formula.args)
        return f"{formula.symbol}({args})", _ATOM
    if isinstance(formula, BoolConst):
        return ("$T" if formula.value else "$F"), _ATOM
    if isinstance(formula, Not):
        return "-" + _wrap(*_format_formula(formula.body), _FORMULA_PRECEDENCE[Not]), 5
    if isinstance(formula, (ForAll, Exists)):
        keyword = "all" if isinstance(formula, ForAll) else "exists"
        return f"{keyword} {formula.var} {_format_formula(formula.body)[0]}", 0
    first, nodes = connective_chain(formula)
    text, precedence = _format_formula(first)
    for node in nodes:
        needed = _FORMULA_PRECEDENCE[type(node)]
        right = _wrap(*_format_formula(node.right), needed + 1)
        text = f"{_wrap(text, precedence, needed)} {_FORMULA_SYMBOL[type(node)]} {right}"
        precedence = needed
    return text, precedence


def format_formula(formula: Formula) -> str:
    return _format_formula(formula)[0]


def format_theory(theory: Theory) -> str:
    """Render a theory as text that parse_theory reads back to an equal Theory"""
    lines = []
    if theory.domain_size is not None:
        lines.append(f"assign(domain_size, {theory.domain_size}).")
    if theory.max_models is not None:
        lines.append(f"assign(max_models, {theory.max_models}).")
    for flag in sorted(theory.options):
        lines.append(f"set({flag}).")
    lines.append("")
    lines.append("formulas(assumptions).")
    for formula in theory.formulas:
        lines.append(f"  {format_formula(formula)}.")
    lines.append("end_of_list.")
    return "\n".join(lines) + "\n"
