"""Exception types shared across the package."""


class RiskbenchError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(RiskbenchError):
    pass


class AllZero(RiskbenchError):
    pass


class NoConvergence(RiskbenchError):
    def __init__(self, iterations, message=""):
        self.iterations = iterations
        super().__init__(message or f"no convergence after {iterations} iterations")


class DomainError(RiskbenchError):
    pass


class EmptyInput(RiskbenchError):
    pass


class EmptyCluster(RiskbenchError):
    pass


class TooLarge(RiskbenchError):
    pass


class EmptyNet(RiskbenchError):
    pass


class EmptyPool(RiskbenchError):
    pass


class Underdetermined(RiskbenchError):
    pass


class SampleTooLarge(RiskbenchError):
    pass


class ParseError(RiskbenchError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class InconsistentWidth(ParseError):
    pass


class ChecksumMismatch(RiskbenchError):
    pass


class NetworkError(RiskbenchError):
    pass
