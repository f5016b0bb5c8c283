"""Exceptions raised by probmodels, grouped so the command line can map them to exit codes"""


class ProbModelsError(Exception):
    """Base class for every error raised on purpose by this package"""


class TheoryError(ProbModelsError):
    """A theory is semantically unusable (bad signature, bad domain, bad encoding)"""


class InvalidTheory(TheoryError, ValueError):
    """A theory, signature or interpretation breaks one of its invariants"""


class SignatureMismatch(TheoryError):
    """Interpretation tables do not cover exactly the signature of a theory"""


class OutOfDomainApplication(TheoryError):
    """A function or predicate was applied to an integer outside 0..n-1"""

    def __init__(self, symbol: str, args: tuple, domain_size: int):
        self.symbol = symbol
        self.arguments = tuple(args)
        self.domain_size = domain_size
        rendered = ", ".join(str(arg) for arg in self.arguments)
        super().__init__(
            f"{symbol}({rendered}) applies {symbol} outside the domain 0..{domain_size - 1}"
        )


class DomainMismatch(TheoryError):
    """Two theories being merged assign different domain sizes"""


class ArityConflict(TheoryError):
    """The same symbol is used with two arities, or as both function and predicate"""


class TheoryParseError(ProbModelsError):
    """Input text could not be parsed, carries the list of diagnostics"""

    def __init__(self, origin: str, diagnostics: list):
        self.origin = origin
        self.diagnostics = list(diagnostics)
        lines = [f"{origin}:{d.line}:{d.column}: {d.message}" for d in self.diagnostics]
        super().__init__("\n".join(lines))


class ZeroPossibleModels(ProbModelsError):
    """The possible-models theory has no model, so the probability is undefined"""


class NonExhaustiveCount(TheoryError):
    """A count was cut short by max_models and cannot be used for a probability"""


class BudgetExceeded(ProbModelsError):
    """The brute force oracle refuses an assignment space larger than its budget"""

    def __init__(self, space: int, budget: int):
        self.space = space
        self.budget = budget
        super().__init__(
            f"Assignment space of {space} interpretations exceeds the oracle budget of {budget}"
        )
