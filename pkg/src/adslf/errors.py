"""Exception types and the global tolerance."""

import os

DEFAULT_TOL = 1e-9


def tolerance(tol=None):
    """Return ``tol`` if given, else the ADSLF_TOL override, else the default."""
    if tol is not None:
        return float(tol)
    env = os.environ.get("ADSLF_TOL")
    if env:
        return float(env)
    return DEFAULT_TOL


class AdslfError(Exception):
    """Base class for all library errors."""


class NumericFailure(AdslfError):
    """A numerical step could not be carried out (CLI exit code 3)."""

    def __init__(self, message, nodes=None):
        super().__init__(message)
        self.nodes = nodes


class SingularMatrix(NumericFailure):
    pass


class PreconditionViolated(AdslfError, ValueError):
    pass


class TruncationOverflow(AdslfError, ValueError):
    pass


class GridTooSmall(AdslfError, ValueError):
    pass


class NotInBigCell(NumericFailure):
    pass


class NoConvergence(NumericFailure):
    pass


class SingularData(NumericFailure):
    pass


class DegenerateDerivative(NumericFailure):
    pass


class DegenerateGaussMap(NumericFailure):
    pass


class DegenerateOmega(NumericFailure):
    pass


class DegenerateTangent(NumericFailure):
    pass


class DegenerateData(NumericFailure):
    pass


class IncompatibleData(AdslfError, ValueError):
    """Curve data violate a required orthogonality or membership condition."""


class InvalidParameter(AdslfError, ValueError):
    pass


class FullySingular(NumericFailure):
    pass


class SingularAngle(NumericFailure):
    pass


class NoRealAngle(AdslfError, ValueError):
    pass
