"""Exception types shared across the package."""


class SchedulingError(Exception):
    pass


class UnknownJob(SchedulingError, KeyError):
    pass


class IncompleteSchedule(SchedulingError):
    pass


class InfeasibleInput(SchedulingError):
    """Raised when an operation needs a feasible schedule and did not get one."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class MalformedLP(SchedulingError):
    pass


class UnsupportedCriterion(SchedulingError):
    pass


class InfeasibleLPSolution(SchedulingError):
    pass


class NotAgreeable(SchedulingError):
    """The instance is outside the proven scope of the ordering rules.

    ``pair`` holds the two job ids whose data violate the condition.
    """

    def __init__(self, pair, reason):
        self.pair = tuple(pair)
        self.reason = reason
        super().__init__(f"jobs {self.pair[0]} and {self.pair[1]}: {reason}")


class OrderHypothesisViolated(SchedulingError):
    pass


class PreconditionViolated(SchedulingError):
    pass


class TooLarge(SchedulingError):
    pass


class ReleasesPresent(SchedulingError):
    pass
