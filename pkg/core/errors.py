"""Error hierarchy shared by every package.

Validation errors (malformed input, wrong shapes) exit with code 2;
mathematical inconsistencies (failed invariants, nonzero residuals) exit with 3.
"""
from typing import Any, Dict, Optional


class DonaldsonError(Exception):
    """Base class for all errors raised by the library."""

    exit_code = 1
    kind = "error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to a machine-readable dictionary."""
        return {
            "type": type(self).__name__,
            "kind": self.kind,
            "message": self.message,
            "exit_code": self.exit_code,
            "details": self.details,
        }


class DonaldsonValidationError(DonaldsonError, ValueError):
    """Input does not have the required shape."""

    exit_code = 2
    kind = "validation"


class InconsistencyError(DonaldsonError):
    """Input is well formed but violates a mathematical invariant."""

    exit_code = 3
    kind = "inconsistency"


# algebra

class VariableMismatchError(DonaldsonValidationError):
    """Operands live in different variable lists."""


class CutoffMismatchError(DonaldsonValidationError):
    """Truncated series with different cutoffs were combined."""


class ConstantTermError(DonaldsonValidationError):
    """Exponential of a series with nonzero constant term."""


# lattice

class LatticeError(DonaldsonValidationError):
    """Malformed lattice or class of the wrong rank."""


class ParityError(InconsistencyError):
    """d0 - d is not an integer, or a sign exponent is not integral."""


# series / transforms

class FlagViolationError(InconsistencyError):
    """A series claims a property it does not have."""


class NotSimpleTypeError(InconsistencyError):
    """Operation needs a strong-simple-type shaped series."""


class NotBasicClassError(InconsistencyError):
    """Requested class is not a basic class of the series."""


# fitting

class InsufficientDepthError(DonaldsonValidationError):
    """Not enough Taylor coefficients for the requested fit."""


class FitInconsistencyError(InconsistencyError):
    """Sampled coefficients are not annihilated by the implied operator."""

    def __init__(self, message: str, index: int, details: Optional[Dict[str, Any]] = None):
        merged = {"index": index}
        merged.update(details or {})
        super().__init__(message, merged)
        self.index = index


class FrequencyError(InconsistencyError):
    """A detected frequency is not a Gaussian integer of the expected kind."""


class ResidualError(InconsistencyError):
    """Reconstructed series does not reproduce its input."""


# documents

class DocumentError(DonaldsonValidationError):
    """JSON document does not follow the published format."""
