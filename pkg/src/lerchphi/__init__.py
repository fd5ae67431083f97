"""Arbitrary-precision evaluation of the Lerch transcendent Phi(z, s, a).

Phi(z, s, a) = sum_{k>=0} z^k / (k+a)^s, analytically continued, for complex
z, s, a.  Evaluation combines the defining series (with alternating-series
acceleration), an Euler-Maclaurin formula with rigorous error bounds, two
asymptotic expansions for large parameters/argument, and double-exponential
quadrature of the Hermite-type integral representation as backup.
"""

from .errors import (BoundInvalidError, ConvergenceError, DomainError,
                     LerchError, PoleError, PrecisionUnreachableError)
from .numerics import PrecisionContext
from .result import (ALTERNATING, EULER_MACLAURIN, LARGE_Z_ASYMPTOTIC, LSERIES,
                     METHODS, QUADRATURE, UNIFORM_ASYMPTOTIC, Diagnostics,
                     EvalResult)
from .selector import classify, evaluate, lerch_phi

__version__ = "0.1.0"

__all__ = [
    "evaluate", "lerch_phi", "classify",
    "PrecisionContext", "EvalResult", "Diagnostics",
    "LerchError", "DomainError", "PoleError", "ConvergenceError",
    "PrecisionUnreachableError", "BoundInvalidError",
    "METHODS", "LSERIES", "ALTERNATING", "EULER_MACLAURIN",
    "UNIFORM_ASYMPTOTIC", "LARGE_Z_ASYMPTOTIC", "QUADRATURE",
    "__version__",
]
