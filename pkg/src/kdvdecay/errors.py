"""Exception hierarchy shared by all subpackages."""


class KdvError(Exception):
    """Base class for every error raised by the package."""


class ConfigurationError(KdvError, ValueError):
    """Invalid parameters or inconsistent inputs."""


class NumericalBreakdownError(KdvError):
    """A linear solve or nonlinear iteration failed."""


class BlowUpError(NumericalBreakdownError):
    """Non-finite values appeared in the solution."""

    def __init__(self, time, message=None):
        self.time = float(time)
        super().__init__(message or f"non-finite solution at t={self.time:.6g}")


class PanelTooLongError(NumericalBreakdownError):
    """Picard iteration stopped contracting on a time panel."""

    def __init__(self, panel, time, message=None):
        self.panel = float(panel)
        self.time = float(time)
        super().__init__(
            message
            or f"Picard iteration does not contract on panel of length {self.panel:.4g} "
            f"starting at t={self.time:.6g}; use a smaller panel"
        )


class InsufficientResolutionError(KdvError):
    """The trajectory was not recorded densely enough for the requested quantity."""


class InsufficientDataError(KdvError):
    """Too few usable samples for a fit."""


class UndefinedStatisticError(KdvError):
    """A ratio or normalized statistic has a vanishing denominator."""


class IterationError(KdvError):
    """An eigenvalue iteration did not converge; carries the last estimate."""

    def __init__(self, estimate, iterations, message=None):
        self.estimate = float(estimate)
        self.iterations = int(iterations)
        super().__init__(
            message or f"no convergence after {iterations} iterations (last estimate {estimate:.12g})"
        )


class ExperimentError(KdvError):
    """A scenario run failed; carries the scenario name and the original error."""

    def __init__(self, scenario, cause):
        self.scenario = scenario
        self.cause = cause
        super().__init__(f"scenario {scenario!r}: {type(cause).__name__}: {cause}")
