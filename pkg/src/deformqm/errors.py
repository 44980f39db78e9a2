"""Exception and warning types raised across the package."""


class DomainError(ValueError):
    """A position or arctan coordinate lies outside the deformed domain."""


class GridMismatchError(ValueError):
    """Two objects that must share a grid do not."""


class NormalizationError(ValueError):
    """A state expected to have unit pseudo-norm does not."""


class NotQuasiHermitianError(ValueError):
    """A matrix has complex spectrum or is defective, so no positive metric exists."""


class TruncationWarning(UserWarning):
    """A momentum-space function carries non-negligible mass at the sampled edge."""
