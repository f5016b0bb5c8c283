"""Seeded random theories small enough for the brute force oracle.

Function arguments are only variables, constants, literals inside the domain or
nested applications, so no generated theory can apply a symbol outside the
domain. Arithmetic appears only on the sides of comparisons.
"""

import random

from probmodels.core import (
    And,
    Apply,
    ArithOp,
    BoolConst,
    Compare,
    Exists,
    ForAll,
    Iff,
    Implies,
    IntLiteral,
    Not,
    Or,
    PredAtom,
    Signature,
    Theory,
    Variable,
)

RELATIONS = ("=", "!=", "<", "<=", ">", ">=")
VARIABLES = ("x", "y")


def random_signature(rng: random.Random, domain_size: int, max_cells: int) -> Signature:
    functions = {}
    predicates = {}
    order = []
    cells = 0
    for index in range(rng.randint(1, 4)):
        is_predicate = rng.random() < 0.35
        arity = rng.choice((0, 0, 1, 1, 2))
        if cells + domain_size ** arity > max_cells:
            arity = 0
            if cells + 1 > max_cells:
                break
        name = f"p{index}" if is_predicate else f"f{index}"
        (predicates if is_predicate else functions)[name] = arity
        order.append(name)
        cells += domain_size ** arity
    return Signature(functions, predicates, tuple(order))


class TheoryGenerator:
    def __init__(self, rng: random.Random, signature: Signature, domain_size: int):
        self.rng = rng
        self.signature = signature
        self.domain_size = domain_size
        self.functions = list(signature.functions)
        self.predicates = list(signature.predicates)

    def argument(self, bound, depth):
        """A term whose value always lies inside the domain"""
        choices = ["literal"]
        if bound:
            choices += ["variable", "variable"]
        if self.functions and depth > 0:
            choices += ["application", "application"]
        kind = self.rng.choice(choices)
        if kind == "variable":
            return Variable(self.rng.choice(bound))
        if kind == "application":
            return self.application(bound, depth - 1)
        return IntLiteral(self.rng.randrange(self.domain_size))

    def application(self, bound, depth):
        name = self.rng.choice(self.functions)
        arity = self.signature.arity(name)
        return Apply(name, tuple(self.argument(bound, depth) for _ in range(arity)))

    def side(self, bound):
        """Either side of a comparison, may leave the domain"""
        roll = self.rng.random()
        if roll < 0.15:
            return IntLiteral(self.rng.randrange(self.domain_size + 2))
        if roll < 0.3:
            op = self.rng.choice(("+", "-", "*"))
            return ArithOp(op, self.argument(bound, 1), self.argument(bound, 1))
        return self.argument(bound, 1)

    def atom(self, bound):
        if self.predicates and self.rng.random() < 0.35:
            name = self.rng.choice(self.predicates)
            arity = self.signature.arity(name)
            return PredAtom(name, tuple(self.argument(bound, 1) for _ in range(arity)))
        if self.rng.random() < 0.03:
            return BoolConst(self.rng.random() < 0.5)
        return Compare(self.rng.choice(RELATIONS), self.side(bound), self.side(bound))

    def formula(self, bound=(), depth=3):
        roll = self.rng.random()
        if depth == 0 or roll < 0.3:
            return self.atom(bound)
        if roll < 0.45 and len(bound) < len(VARIABLES):
            var = VARIABLES[len(bound)]
            quantifier = ForAll if self.rng.random() < 0.5 else Exists
            return quantifier(var, self.formula(bound + (var,), depth - 1))
        if roll < 0.55:
            return Not(self.formula(bound, depth - 1))
        connective = self.rng.choice((And, Or, Or, Implies, Iff))
        return connective(
            self.formula(bound, depth - 1), self.formula(bound, depth - 1)
        )


def random_theory(seed: int, max_domain: int = 4, max_cells: int = 6, max_formulas: int = 5):
    rng = random.Random(seed)
    domain_size = rng.randint(1, max_domain)
    signature = random_signature(rng, domain_size, max_cells)
    generator = TheoryGenerator(rng, signature, domain_size)
    formulas = [generator.formula() for _ in range(rng.randint(0, max_formulas))]
    return Theory(domain_size, -1, formulas, signature)


def random_extra(seed: int, theory: Theory) -> Theory:
    """Extra constraints over the signature of theory, without directives"""
    rng = random.Random(seed)
    generator = TheoryGenerator(rng, theory.signature, theory.domain_size)
    formulas = [generator.formula() for _ in range(rng.randint(1, 2))]
    return Theory(formulas=formulas, signature=theory.signature)
