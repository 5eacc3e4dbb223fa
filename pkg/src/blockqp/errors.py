"""Exception hierarchy shared by all modules."""


class BlockQpError(Exception):
    """Base class for every error raised by this package."""


class InvariantViolation(BlockQpError, ValueError):
    """A problem or spec object breaks one of its structural invariants.

    ``invariant`` names the failed check so callers can report it.
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        msg = f"invariant violated: {invariant}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DimensionMismatch(InvariantViolation):
    pass


class ProblemParseError(BlockQpError, ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class FactorizationError(BlockQpError, ArithmeticError):
    pass


class StructurallySingular(FactorizationError):
    """No admissible zero-corner candidate remains in a block.

    Raised when every available constraint entry of the block is exactly
    zero, which happens when the constraint block is rank deficient.
    """


class SingularPivot(FactorizationError):
    """A selected pivot block has zero determinant."""


class Singular(FactorizationError):
    """Bunch-Kaufman search met a column that is identically zero."""


class SingularBlock(FactorizationError):
    """A diagonal block of B is singular during the substitution."""
