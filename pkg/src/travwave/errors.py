"""Exception hierarchy shared by the construction and verification modules."""


class WaveError(Exception):
    """Base class for all travwave errors."""


class OutOfDomain(WaveError):
    pass


class NoCandidates(WaveError):
    pass


class DegenerateEverywhere(WaveError):
    pass


class SignViolation(WaveError):
    pass


class DegenerateEndpoint(WaveError):
    pass


class ValueMismatch(WaveError):
    pass


class InadmissiblePlan(WaveError):
    def __init__(self, message, junction=None, reason=None):
        super().__init__(message)
        self.junction = junction
        self.reason = reason


class SpeedRegimeError(WaveError):
    pass


class DivergentIntegral(WaveError):
    pass


class NotConstructible(WaveError):
    pass


class ComplexSlope(WaveError):
    pass


class UnsupportedOverlap(WaveError):
    pass


class QuadratureFailure(WaveError):
    pass
