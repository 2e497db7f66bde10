"""Exception types raised across the package."""


class CachingError(Exception):
    """Base class for all package errors."""


class InvalidRegime(CachingError, ValueError):
    """Raised when the instance does not have more users than files."""


class MemoryOutOfRange(CachingError, ValueError):
    pass


class GranularityMismatch(CachingError, ValueError):
    """File length cannot be split into equal subfiles for centralized placement."""


class RankDeficient(CachingError, ArithmeticError):
    """A random coefficient draw produced a singular system; re-encode with a new seed."""


class EmptyInput(CachingError, ValueError):
    pass


class NegativeDiscriminant(CachingError, ArithmeticError):
    def __init__(self, N: int, K: int, f: int):
        super().__init__(f"f({N},{K}) = {f} < 0, threshold memory is not real")
        self.N, self.K, self.f = N, K, f


class Infeasible(CachingError, ValueError):
    pass


class IdentityViolation(CachingError, ArithmeticError):
    pass


class CertificationFailed(CachingError, AssertionError):
    def __init__(self, K: int, point: dict):
        super().__init__(f"optimality certificate failed for K={K} at {point}")
        self.K, self.point = K, point


class DecodeFailure(CachingError, RuntimeError):
    """Delivery could not be decoded by every user after the retry budget."""
