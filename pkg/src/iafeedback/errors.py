"""Exception types shared across the simulator."""


class IaFeedbackError(Exception):
    """Base class for all library errors."""


class NotHermitianError(IaFeedbackError):
    pass


class NegativeEigenvalueError(IaFeedbackError):
    pass


class CorrelationNotPSDError(IaFeedbackError):
    pass


class BudgetTooLargeError(IaFeedbackError):
    pass


class DegenerateCodewordError(IaFeedbackError):
    pass


class ZeroInputError(IaFeedbackError):
    pass


class RankOneStatisticsError(IaFeedbackError):
    """Raised when the distortion exponent 1/(Mr*Mt - 1) is undefined."""


class NoEligibleLinksError(IaFeedbackError):
    pass


class DimensionMismatchError(IaFeedbackError):
    pass


class QuadratureFailureError(IaFeedbackError):
    pass
