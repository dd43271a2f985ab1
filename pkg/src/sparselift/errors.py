"""Exception types shared across the solver stack."""


class SparseliftError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SparseliftError):
    """Operands have incompatible shapes."""


class InvalidParams(SparseliftError):
    """Arguments violate a documented precondition."""


class ZeroInverse(SparseliftError):
    """Attempt to invert 0 in a prime field."""


class NoReconstruction(SparseliftError):
    """No fraction within the size bounds matches the residue."""


class SingularMod(SparseliftError):
    """Matrix is singular modulo the working prime (unlucky prime or
    genuinely singular input); callers retry with a fresh prime."""


class SingularHankel(SparseliftError):
    """The projected block-Hankel matrix is singular; callers redraw the
    projection, then the prime."""


class RankCollapse(SparseliftError):
    """Approximant-basis residual lost rank in a way that prevents
    progress (bad projection or prime upstream)."""


class DegreeTooHigh(SparseliftError):
    """Polynomial degree exceeds what the evaluation context supports."""


class Singular(SparseliftError):
    """Input matrix is singular over the rationals."""


class ProjectionFailure(Singular):
    """Retry budget for block projections exhausted without finding a
    working (R, u, v).  Subclasses Singular because a matrix that fails
    every projection under several primes is, in practice, singular."""


class BadMinPoly(SparseliftError):
    """Candidate minimal polynomial failed to solve the system mod p."""


class InvalidBlocking(InvalidParams):
    """Blocking factor does not divide the (padded) dimension."""
