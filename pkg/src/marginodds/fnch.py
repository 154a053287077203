"""Fisher's noncentral hypergeometric distribution for 2 x 2 tables.

With row totals ``n1``, ``n2`` and first-column total ``m1`` fixed, the
top-left cell ``a`` of a 2 x 2 table has probability proportional to
``C(n1, a) C(n2, m1 - a) psi**a`` on ``max(0, m1 - n2) <= a <= min(n1, m1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .special import lgamma_real


@dataclass(frozen=True)
class FnchParams:
    n1: int
    n2: int
    m1: int
    psi: float = 1.0

    def __post_init__(self):
        for name in ("n1", "n2", "m1"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a nonnegative integer")
            object.__setattr__(self, name, int(v))
        if self.m1 > self.n1 + self.n2:
            raise DomainError("column total exceeds the table total")

    @classmethod
    def from_table(cls, x, psi: float = 1.0) -> "FnchParams":
        """Margins of a flattened 2 x 2 table ``(x11, x12, x21, x22)``."""
        x = np.asarray(x).ravel()
        if x.size != 4:
            raise DomainError("expected a 2 x 2 table")
        return cls(int(x[0] + x[1]), int(x[2] + x[3]), int(x[0] + x[2]), psi)


def fnch_support(params: FnchParams) -> tuple[int, int]:
    return max(0, params.m1 - params.n2), min(params.n1, params.m1)


def _log_binom(n: int, k: np.ndarray) -> np.ndarray:
    return lgamma_real(n + 1.0) - lgamma_real(k + 1.0) - lgamma_real(n - k + 1.0)


def _log_weights(params: FnchParams, log_psi) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = fnch_support(params)
    u = np.arange(lo, hi + 1)
    base = _log_binom(params.n1, u) + _log_binom(params.n2, params.m1 - u)
    log_psi = np.asarray(log_psi, dtype=float)
    return u, base + log_psi[..., None] * u


def _logsumexp(a: np.ndarray) -> np.ndarray:
    m = a.max(axis=-1, keepdims=True)
    return m[..., 0] + np.log(np.exp(a - m).sum(axis=-1))


def fnch_log_pmf(a: int, params: FnchParams, psi=None) -> np.ndarray:
    """Log probability of top-left count ``a``.

    ``psi`` overrides ``params.psi`` and may be an array; the normalizing
    constant is a log-sum-exp over the whole support, so large totals and
    extreme odds ratios do not overflow.
    """
    psi = params.psi if psi is None else psi
    psi = np.asarray(psi, dtype=float)
    if np.any(~np.isfinite(psi)) or np.any(psi <= 0):
        raise DomainError("odds ratio must be finite and positive")
    return fnch_log_pmf_logpsi(a, params, np.log(psi))


def fnch_log_pmf_logpsi(a: int, params: FnchParams, log_psi) -> np.ndarray:
    """:func:`fnch_log_pmf` parametrized by ``log psi`` directly."""
    lo, hi = fnch_support(params)
    if int(a) != a or not lo <= a <= hi:
        raise DomainError(f"count {a} outside the support [{lo}, {hi}]")
    u, logw = _log_weights(params, log_psi)
    return logw[..., int(a) - lo] - _logsumexp(logw)


def fnch_pmf(params: FnchParams) -> tuple[np.ndarray, np.ndarray]:
    """Support and probabilities at ``params.psi``."""
    if not params.psi > 0:
        raise DomainError("odds ratio must be positive")
    u, logw = _log_weights(params, np.log(params.psi))
    return u, np.exp(logw - _logsumexp(logw))


def fnch_mean(params: FnchParams) -> float:
    u, pmf = fnch_pmf(params)
    return float(np.dot(u, pmf))
