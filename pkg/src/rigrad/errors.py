"""Exception hierarchy shared across the package."""


class RigradError(Exception):
    """Base class for all rigrad-specific errors."""


class InvalidPoint(RigradError):
    """Coordinates do not describe a valid point of the manifold."""


class InvalidTangent(RigradError):
    """Components do not describe a tangent vector at the given base point."""


class InvalidCurve(RigradError):
    """Curve violates a precondition (e.g. vanishing velocity)."""


class InvalidIsometry(RigradError):
    """Isometry parameters fail their normalization constraints."""


class CutLocusAmbiguity(RigradError):
    """The length-minimising geodesic between the two points is not unique."""


class DimensionMismatch(RigradError):
    """Operand dimensions are incompatible."""


class ParseError(RigradError):
    """A configuration or weights document is malformed."""


class WrongManifold(RigradError):
    """Operation is only defined on a different manifold kind."""


class QuadratureNotConverged(RigradError):
    """Node-doubling refinement exhausted max_nodes without meeting tol."""


class EigenSolverFailure(RigradError):
    """Symmetric eigendecomposition did not converge."""
