"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage/parse problems give 2,
precision and budget exhaustion give 3.
"""


class CharsubError(Exception):
    """Base class for every error raised by this package."""


class DSLSyntaxError(CharsubError):
    def __init__(self, message, text="", pos=0):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}" + (f": {text[pos:pos + 20]!r}" if text else ""))


class DomainError(CharsubError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PrecisionError(CharsubError):
    """A certified comparison stayed undecided up to the precision cap."""


class BudgetError(CharsubError):
    """A generator, digit or scan budget was exhausted."""


class MagnitudeCapError(BudgetError):
    """A constructed term exceeded the configured magnitude cap.

    ``produced`` holds whatever was built before the cap was hit.
    """

    def __init__(self, message, produced=None):
        super().__init__(message)
        self.produced = list(produced or [])


class MalformedSetError(CharsubError):
    """An interval generator broke the l_k <= r_k < l_{k+1} contract."""


class CapabilityError(CharsubError):
    """The inputs lack something the operation needs (e.g. a divergence witness)."""


class RuleError(CharsubError):
    """A digit rule produced a digit outside its allowed range."""


class StructureError(CharsubError):
    """A precondition on the run structure of a support failed."""


class ThinningExhausted(CharsubError):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class CertificateInvalid(CharsubError):
    """A certificate failed verification at some index."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class HypothesisFailure(CharsubError):
    """Parameters violate the hypotheses of the theorem an experiment realizes."""
