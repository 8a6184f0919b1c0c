"""Error taxonomy shared by every module in the package."""


class DigaussError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(DigaussError):
    """Operands live in different ambient dimensions."""


class ZeroDirection(DigaussError):
    """A direction vector with zero norm was supplied where a direction is required."""


class DegenerateSubspace(DigaussError):
    """The orthogonal complement left no usable direction after projection removal."""


class DegenerateGeometry(DigaussError):
    """Requested packing or layer geometry cannot hold more than a trivial point set."""


class DomainError(DigaussError):
    """An argument lies outside the mathematical domain of the operation."""


class PowerViolation(DigaussError):
    """Codeword energy exceeds the block power budget.

    Carries ``minimal_n``, the smallest block length at which the same layer
    parameters fit the budget.
    """

    def __init__(self, message: str, minimal_n: int | None = None):
        super().__init__(message)
        self.minimal_n = minimal_n


class ExponentTooLarge(DigaussError):
    """Error exponent beyond the admissible region. Carries the cutoff ``e0``."""

    def __init__(self, message: str, e0: float | None = None):
        super().__init__(message)
        self.e0 = e0


class WordNotFound(DigaussError):
    """Codeword id absent from the codebook."""


class SameWord(DigaussError):
    """A pair operation was asked to compare a word with itself."""


class UnknownPath(DigaussError):
    """Branch index sequence does not address a leaf of the code tree."""


class ConfigError(DigaussError):
    """Experiment configuration violates a precondition; message names it."""
