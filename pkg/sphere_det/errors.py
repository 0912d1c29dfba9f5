from __future__ import annotations


class SphereDetError(Exception):
    """Base class for every error raised by sphere_det."""


class InvalidDimensionError(SphereDetError, ValueError):
    pass


class InvalidIndexError(SphereDetError, ValueError):
    pass


class ConfigError(SphereDetError, ValueError):
    pass


class ScalarDomainError(SphereDetError, ValueError):
    """The requested value does not live in Q[pi^2]."""


class BernoulliRangeError(SphereDetError, ValueError):
    pass


class DegreeBoundError(SphereDetError, ValueError):
    pass


class ParityError(SphereDetError, ValueError):
    pass


class UnsupportedPoleError(SphereDetError, ValueError):
    pass


class KernelDomainError(SphereDetError, ValueError):
    pass


class NonConvergenceError(SphereDetError, ArithmeticError):
    pass


class SignViolationError(SphereDetError, ArithmeticError):
    pass


class TableError(SphereDetError, RuntimeError):
    def __init__(self, failed: list[tuple[int, int]], detail: str = "") -> None:
        self.failed = failed
        cells = ", ".join(f"(n={n}, k={k})" for n, k in failed)
        super().__init__(f"failed cells: {cells}" + (f" ({detail})" if detail else ""))
