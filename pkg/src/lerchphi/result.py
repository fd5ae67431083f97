"""Evaluation result and diagnostics containers."""

from dataclasses import dataclass, field
from typing import Optional

# Method tags, mirroring the evaluation strategies.
LSERIES = "lseries"
ALTERNATING = "alternating"
EULER_MACLAURIN = "euler_maclaurin"
UNIFORM_ASYMPTOTIC = "uniform_asymptotic"
LARGE_Z_ASYMPTOTIC = "large_z_asymptotic"
QUADRATURE = "quadrature"

METHODS = (LSERIES, ALTERNATING, EULER_MACLAURIN, UNIFORM_ASYMPTOTIC,
           LARGE_Z_ASYMPTOTIC, QUADRATURE)


@dataclass
class Diagnostics:
    method: str
    working_prec: int
    n_terms: Optional[int] = None      # N of the Euler-Maclaurin split / K of series
    m_terms: Optional[int] = None      # M Bernoulli terms
    k_terms: Optional[int] = None      # K of an asymptotic expansion
    retries: int = 0
    cancellation_bits: int = 0
    best_effort: bool = False
    flags: list = field(default_factory=list)

    def as_dict(self):
        d = {"method": self.method, "working_prec": self.working_prec,
             "retries": self.retries, "cancellation_bits": self.cancellation_bits}
        if self.n_terms is not None:
            d["N"] = self.n_terms
        if self.m_terms is not None:
            d["M"] = self.m_terms
        if self.k_terms is not None:
            d["K"] = self.k_terms
        if self.best_effort:
            d["best_effort"] = True
        if self.flags:
            d["flags"] = list(self.flags)
        return d


@dataclass
class EvalResult:
    """Value, absolute-error estimate and method diagnostics."""

    value: object          # mpc
    error: object          # mpf, absolute
    method: str
    diagnostics: Diagnostics

    def __iter__(self):
        yield self.value
        yield self.error
