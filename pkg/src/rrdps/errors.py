"""Exception types shared across the package.

Plain domain violations (a photon number out of range, a probability above
one) raise the built-in :class:`ValueError`.  The classes below cover the
cases callers may want to catch separately.
"""


class NumericError(ArithmeticError):
    """A computation produced a non-finite value or failed to converge."""


class DegenerateInputError(ValueError):
    """Inputs are in range but leave the quantity undefined (e.g. no detections)."""


class ResourceLimitError(ValueError):
    """A brute-force routine was asked for a problem larger than it supports."""
