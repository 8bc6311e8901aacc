"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit-code contract:
usage/format -> 1, capacity -> 2, verification failure -> 3.
"""


class AltDiffError(Exception):
    """Base class for all package errors."""


class DimensionError(AltDiffError):
    """Operands or matrices with incompatible sizes."""


class DegenerateOperationError(AltDiffError):
    """A defining vector b = 0 would collapse the operation to XOR."""


class CapacityError(AltDiffError):
    """Requested computation exceeds the desk-scale budget."""


class VerificationError(AltDiffError):
    """A required structural property failed to verify."""


class FormatError(AltDiffError):
    """Malformed input file or descriptor string."""
