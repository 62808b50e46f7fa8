"""Exception hierarchy shared by every module."""


class EntrovolError(ValueError):
    """Base class for all errors raised by entrovol."""


class MalformedRow(EntrovolError):
    def __init__(self, line, reason):
        self.line = line
        super().__init__(f"line {line}: {reason}")


class EmptyFile(EntrovolError):
    pass


class NonMonotonicDates(EntrovolError):
    pass


class TooShort(EntrovolError):
    pass


class IoFailure(EntrovolError):
    pass


class WindowTooWide(EntrovolError):
    pass


class LengthMismatch(EntrovolError):
    pass


class SeriesTooShort(EntrovolError):
    pass


class DegenerateTolerance(EntrovolError):
    pass


class ConstantInput(EntrovolError):
    pass


class LagTooLarge(EntrovolError):
    pass


class InvalidDf(EntrovolError):
    pass


class SingularRegression(EntrovolError):
    pass


class NonConvergence(EntrovolError):
    pass


class SingularFit(EntrovolError):
    pass


class HorizonZero(EntrovolError):
    pass


class InvalidHyperparameter(EntrovolError):
    pass


class InvalidK(EntrovolError):
    pass


class ConstantFeature(EntrovolError):
    pass


class ZeroActualForMape(EntrovolError):
    pass
