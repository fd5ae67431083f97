"""Exception hierarchy for Lerch transcendent evaluation."""


class LerchError(Exception):
    """Base class for all evaluation errors."""


class DomainError(LerchError):
    """Input outside the supported domain (divergent series, branch point, ...)."""


class PoleError(DomainError):
    """Evaluation hit a pole (a + k = 0, sinh(pi*u) = 0, gamma pole, ...)."""


class ConvergenceError(LerchError):
    """An iterative scheme failed to converge within its budget."""


class PrecisionUnreachableError(LerchError):
    """An asymptotic expansion cannot reach the requested precision.

    Carries the attainable truncation data so the caller can decide whether
    a best-effort result is acceptable.
    """

    def __init__(self, msg, k_needed=None, k_max=None):
        super().__init__(msg)
        self.k_needed = k_needed
        self.k_max = k_max


class BoundInvalidError(LerchError):
    """A geometric-comparison error bound does not apply (ratio >= 1)."""
