"""Exception hierarchy for lacunaria.

Every error raised by the library derives from LacunariaError and, where one
fits, from the closest builtin so callers can catch either. Mathematical
verdicts (a failed CN check, a non-free word set) are returned as values and
never raised.
"""


class LacunariaError(Exception):
    """Base class for all library errors."""


class InvalidWordError(LacunariaError, ValueError):
    """A letter with index 0 or an otherwise malformed word."""


class WordParseError(InvalidWordError):
    """A word literal could not be parsed."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class MissingImageError(LacunariaError, LookupError):
    """A homomorphism has no image for a generator index in use."""


class BudgetExceededError(LacunariaError):
    """A ball, product, support or sequence cap would be exceeded."""


class AsymmetricLengthError(LacunariaError, ValueError):
    """A length function is not symmetric on the requested set."""


class ConvergenceError(LacunariaError, ArithmeticError):
    """An eigenvalue iteration hit its cap before converging."""


class LacunarityError(LacunariaError, ValueError):
    """The lacunarity constants of a sequence are undefined."""


class ZeroLengthError(LacunarityError):
    """Some element of the sequence has psi-length zero."""


class SequenceTooShortError(LacunarityError):
    """Fewer elements than the operation needs."""


class DuplicateElementError(LacunariaError, ValueError):
    """The same word appears twice where distinct words are required."""


class IdentityElementError(LacunariaError, ValueError):
    """The identity word was passed where nontrivial words are required."""


class DimensionMismatchError(LacunariaError, ValueError):
    """Coefficient dimensions of two group algebra elements differ."""


class RankError(LacunariaError, ValueError):
    """An element lives in a group of the wrong rank."""


class CertificateError(LacunariaError):
    """A bound was requested without the certificate it depends on."""


class ProposalError(LacunariaError):
    """A sequence generator gave up after its attempt budget."""


class ConfigError(LacunariaError, ValueError):
    """Invalid experiment configuration."""


class UnknownWordError(LacunariaError, LookupError):
    """A tabulated function has no value for the requested word."""
