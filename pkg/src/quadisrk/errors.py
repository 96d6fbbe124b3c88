"""Exception hierarchy shared across the package.

Every numerical failure mode raises a subclass of :class:`QuadISRKError`,
so callers (CLI, HTTP service, sweep harness) can distinguish "the math
went wrong" from genuine bugs.
"""


class QuadISRKError(Exception):
    """Base class for all toolkit errors."""


class InvalidModel(QuadISRKError):
    """State-space data is malformed (shapes, non-finite entries, singular E)."""


class SingularShift(QuadISRKError):
    """A shifted pencil sE - A is numerically singular at the requested point."""


class PencilFailure(QuadISRKError):
    """The generalized eigensolver failed or the pencil is not regular."""


class UnstableSystem(QuadISRKError):
    """Operation requires an asymptotically stable system."""


class IllConditioned(QuadISRKError):
    """A solve finished but the residual target could not be met."""


class NotPSD(QuadISRKError):
    """A matrix expected to be positive semidefinite has a significantly negative eigenvalue."""


class InvalidRange(QuadISRKError):
    """Quadrature frequency range or node count is invalid."""


class MissingSample(QuadISRKError):
    """A replay oracle holds no sample close enough to the requested point."""


class DegenerateShift(QuadISRKError):
    """A shift collides with a quadrature node (divided difference would blow up)."""


class RankDeficientData(QuadISRKError):
    """Loewner data matrices are numerically rank deficient."""


class MaxIterExceeded(QuadISRKError):
    """An iteration hit its cap without converging."""


class SizeMismatch(QuadISRKError):
    """Two shift sets of different cardinality were compared."""


class InvalidSpec(QuadISRKError):
    """A benchmark specification is malformed."""
