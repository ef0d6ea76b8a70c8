"""Exception hierarchy shared across the package.

Everything user-facing derives from SphDesignError so the CLI can map
failures to exit codes uniformly.  Structured verdicts (refutations,
"unknown" outcomes) are *not* exceptions; exceptions mean the requested
operation could not be carried out at all.
"""


class SphDesignError(Exception):
    """Base class for all library errors."""


class IncompatibleRadicands(SphDesignError):
    """Arithmetic attempted between values in different quadratic fields."""


class DivisionByZero(SphDesignError):
    pass


class ParseError(SphDesignError):
    """Malformed input text; carries 1-based line/column when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {column})" if column is not None else ")")
        super().__init__(message + loc)


class InvariantViolation(SphDesignError):
    """A constructed or loaded object violates a declared invariant."""


class UnknownCatalogName(SphDesignError):
    pass


class SelfTestFailed(SphDesignError):
    """A generated constant table failed its parameter self-test."""


class DegreeCapExceeded(SphDesignError):
    pass


class HypothesisNotMet(SphDesignError):
    """Preconditions of a theorem-backed operation do not hold."""


class NonIntegralSolution(SphDesignError):
    """An exactly solved counting system has non-integral entries.

    This is a structured nonexistence signal, not an internal error: the
    hypothesized configuration cannot exist.  Carries the exact values.
    """

    def __init__(self, message, values=None):
        super().__init__(message)
        self.values = values


class CountMismatch(SphDesignError):
    """Solved counts disagree with direct enumeration (internal error)."""


class LevelValueOutOfRange(SphDesignError):
    """An inner product with the functional lies outside the declared set."""

    def __init__(self, message, point=None, value=None):
        super().__init__(message)
        self.point = point
        self.value = value


class AlphaInD(SphDesignError):
    """The derivation direction is (anti)parallel to a configuration point."""


class NormalizationSingular(SphDesignError):
    """A derived-level normalization factor is zero or negative."""


class LevelViolation(LevelValueOutOfRange):
    """Certificate check failed: some inner product is not in {0, +-1}."""


class ScopeTooLarge(SphDesignError):
    pass


class NotTwoDistance(SphDesignError):
    pass


class ParameterMismatch(SphDesignError):
    """Closed-form graph parameters disagree with direct counting."""


class ConditionViolated(SphDesignError):
    """A decomposition condition guaranteed by theory failed on an instance."""


class HypothesisViolated(SphDesignError):
    """Inputs to a lift do not satisfy the required hypotheses."""


class AxiomIvFails(SphDesignError):
    """Triple counting is not constant on some relation; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ResidualNonzero(SphDesignError):
    """An idempotent identity has a nonzero exact residual."""

    def __init__(self, message, block=None, indices=None, residual=None):
        super().__init__(message)
        self.block = block
        self.indices = indices
        self.residual = residual


class StrengthShortfall(SphDesignError):
    """A derived level has lower strength than theory guarantees (bug)."""


class BudgetExceeded(SphDesignError):
    pass
