"""Exception types raised across the package."""


class Su2MetroError(Exception):
    """Base class for all package-specific errors."""


class NotHermitian(Su2MetroError):
    """Input matrix fails the Hermiticity precondition."""


class NoConvergence(Su2MetroError):
    """Eigensolver exceeded its iteration budget."""


class DimensionMismatch(Su2MetroError):
    """Operand shapes are inconsistent with the declared dimensions."""


class NotIntegerSpin(Su2MetroError):
    """Group construction requires an integer-J representation."""


class ClosureOverflow(Su2MetroError):
    """Group closure exceeded its element cap (generator transcription bug)."""


class NonIntegerTrace(Su2MetroError):
    """Projector trace is not close to an integer."""


class ZeroProjection(Su2MetroError):
    """Projection of the state onto the invariant subspace vanishes."""


class NoTrivialIrrep(Su2MetroError):
    """The representation contains no invariant states."""


class ZeroNorm(Su2MetroError):
    """A superposition cancelled below the normalizability threshold."""


class NotSymmetricContext(Su2MetroError):
    """Qubit reduced states need at least two constituent qubits."""


class NotOptimalProbe(Su2MetroError):
    """Probe state violates the variance/moment conditions the scheme needs."""


class SingularQfim(Su2MetroError):
    """Fisher information matrix is singular at the requested point."""


class SingularOutcome(Su2MetroError):
    """An outcome has vanishing probability but non-vanishing gradient."""


class SingularCovariance(Su2MetroError):
    """Observable covariance matrix is not invertible."""
