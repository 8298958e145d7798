"""Exception types shared across the package."""


class ConericError(Exception):
    """Base class for all package errors."""


class DimensionError(ConericError, ValueError):
    pass


class PreconditionError(ConericError, ValueError):
    """Raised when inputs fail a stated hypothesis of an operation."""


class HypothesisFailure(PreconditionError):
    """The block system violates a hypothesis of the existence result.

    ``hypothesis`` names the violated condition (e.g. ``"B K-nonnegative"``).
    """

    def __init__(self, hypothesis, message=None, detail=None):
        self.hypothesis = hypothesis
        self.detail = detail
        super().__init__(message or f"hypothesis violated: {hypothesis}")


class EquivalenceNegative(ConericError):
    """L is cross-positive but not stable, so no stabilizing solution exists."""

    def __init__(self, report, message=None):
        self.report = report
        super().__init__(
            message
            or f"L is unstable (spectral abscissa {report.spectral_abscissa:.6g}); "
            "no stabilizing K-nonnegative solution exists"
        )


class InconclusiveAtMargin(ConericError):
    """Spectral abscissa of L lies inside the stability dead-band."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"spectral abscissa {report.spectral_abscissa:.3e} is within "
            f"the margin {report.margin_tol:.1e} of zero"
        )


class NonConvergence(ConericError):
    """Fixed-point iteration stopped without meeting the residual tolerance."""

    def __init__(self, message, X=None, iterations=0, trace=None, residual=None):
        self.X = X
        self.iterations = iterations
        self.trace = trace
        self.residual = residual
        super().__init__(message)


class IllPosedSylvester(ConericError):
    """Spectra of D and -A (nearly) intersect."""

    def __init__(self, separation, threshold):
        self.separation = separation
        self.threshold = threshold
        super().__init__(
            f"Sylvester equation ill-posed: min |lambda_D + lambda_A| = "
            f"{separation:.3e} below threshold {threshold:.3e}"
        )


class NumericalConsistencyError(ConericError):
    """A result that theory guarantees failed its numerical check."""


class EigenSolverError(ConericError):
    pass
