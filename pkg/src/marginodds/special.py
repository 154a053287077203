"""Complex log-Gamma and closed-form posterior characteristic functions.

Every Gamma ratio is evaluated as a sum of :func:`lgamma_complex` terms and
exponentiated once, so the characteristic functions stay finite for large
counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, PoleError
from .model import (
    Partition,
    as_alpha,
    as_contrast,
    as_counts,
    block_contrast,
    partition_sums,
)

Scheme = Literal["unconstrained", "constrained"]
SCHEMES = ("unconstrained", "constrained")

# Lanczos approximation, g = 7 with 9 coefficients.
LANCZOS_G = 7.0
LANCZOS_COEF = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)


def _lanczos_right(z: np.ndarray) -> np.ndarray:
    """log Gamma(z) for Re(z) >= 0.5."""
    w = z - 1.0
    series = np.full(w.shape, LANCZOS_COEF[0], dtype=complex)
    for k in range(1, LANCZOS_COEF.size):
        series = series + LANCZOS_COEF[k] / (w + k)
    t = w + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(series)


def _shifted_estimate(z: np.ndarray) -> np.ndarray:
    """log Gamma(z) by upward recurrence into the right half-plane.

    Only used to pick the branch of the reflection result; summing principal
    logs of ``z + k`` follows the analytic continuation of log Gamma off the
    negative real axis.
    """
    m = np.ceil(0.5 - z.real).astype(int) + 1
    acc = _lanczos_right(z + m)
    for k in range(int(m.max())):
        acc = acc - np.where(k < m, np.log(z + k), 0.0)
    return acc


def lgamma_complex(z):
    """Principal branch of log Gamma(z) for complex ``z``.

    The branch is the analytic continuation of the real log Gamma from the
    positive axis, cut along the negative real axis (the convention of
    ``scipy.special.loggamma``).  Uses the Lanczos series for Re(z) >= 0.5
    and the reflection formula elsewhere.

    Raises
    ------
    PoleError
        If any ``z`` is a nonpositive integer.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if not np.all(np.isfinite(z)):
        raise DomainError("lgamma_complex needs finite arguments")
    poles = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(poles):
        raise PoleError(f"Gamma has a pole at {z[poles][0].real:g}")
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    if np.any(right):
        out[right] = _lanczos_right(z[right])
    left = ~right
    if np.any(left):
        zl = z[left]
        refl = _LOG_PI - np.log(np.sin(np.pi * zl)) - _lanczos_right(1.0 - zl)
        guess = _shifted_estimate(zl)
        turns = np.round((guess.imag - refl.imag) / (2.0 * np.pi))
        out[left] = refl + 2j * np.pi * turns
    return out[0] if scalar else out


def lgamma_real(x) -> np.ndarray:
    """log Gamma on the positive real axis, via :func:`lgamma_complex`."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("lgamma_real needs positive arguments")
    return lgamma_complex(x).real


def log_dirichlet_cf(t, conc, weights) -> np.ndarray:
    """log E[exp(i t sum_k w_k log p_k)] for p ~ Dirichlet(conc).

    ``t`` may be an array; the result has the shape of ``t``.
    """
    t = np.asarray(t, dtype=float)
    b = np.asarray(conc, dtype=float)
    w = np.asarray(weights, dtype=float)
    itw = 1j * t[..., None] * w
    total = lgamma_complex(np.array(b.sum())) - lgamma_complex(
        b.sum() + itw.sum(axis=-1)
    )
    parts = lgamma_complex(b + itw) - lgamma_complex(b.astype(complex))
    return total + parts.sum(axis=-1)


def _column(c, j: int) -> np.ndarray:
    cm = as_contrast(c)
    if not 0 <= j < cm.shape[1]:
        raise DomainError(f"contrast column {j} out of range")
    return cm[:, j]


def _check_scheme(scheme: str) -> None:
    if scheme not in SCHEMES:
        raise DomainError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def log_cf_rho_dirichlet(t, alpha, x, c, p: Partition, j: int = 0) -> np.ndarray:
    a = as_alpha(alpha) + as_counts(x)
    col = _column(c, j)
    p.check_size(a.size)
    if col.size != a.size:
        raise DomainError("contrast, prior and counts must have the same length")
    out = np.zeros(np.shape(t), dtype=complex)
    for b in p.blocks:
        idx = list(b)
        out = out + log_dirichlet_cf(t, a[idx], col[idx])
    return out


def cf_rho_dirichlet(t, alpha, x, c, p: Partition, j: int = 0):
    """Posterior CF of the within-block part of ``log psi_j``.

    Identical under both sampling schemes: each block's conditional
    probabilities are Dirichlet(alpha_P + x_P) a posteriori.
    """
    return np.exp(log_cf_rho_dirichlet(t, alpha, x, c, p, j))


def log_cf_tau(t, alpha, x, c, p: Partition, scheme: Scheme, j: int = 0):
    _check_scheme(scheme)
    alpha = as_alpha(alpha)
    x = as_counts(x)
    p.check_size(alpha.size)
    col = block_contrast(_column(c, j), p)[:, 0]
    conc = partition_sums(alpha, p)
    if scheme == "unconstrained":
        conc = conc + partition_sums(x, p)
    return log_dirichlet_cf(t, conc, col)


def cf_tau(t, alpha, x, c, p: Partition, scheme: Scheme, j: int = 0):
    """Posterior CF of the block part of ``log psi_j``.

    Under the unconstrained scheme the block probabilities are
    Dirichlet(alpha^P + x^P) a posteriori; under the constrained scheme they
    keep their Dirichlet(alpha^P) prior.
    """
    return np.exp(log_cf_tau(t, alpha, x, c, p, scheme, j))


def cf_logpsi(t, alpha, x, c, p: Partition, scheme: Scheme, j: int = 0):
    """Posterior CF of ``log psi_j`` under a Dirichlet(alpha) prior."""
    return np.exp(
        log_cf_tau(t, alpha, x, c, p, scheme, j)
        + log_cf_rho_dirichlet(t, alpha, x, c, p, j)
    )


def dependent_beta_parameters(alpha, x, scheme: str) -> tuple[float, float, float, float]:
    _check_scheme(scheme)
    a = as_alpha(alpha)
    x = as_counts(x)
    if a.size != 4 or x.size != 4:
        raise DomainError("the dependent-prior model is defined on 2 x 2 tables")
    if scheme == "unconstrained":
        a1 = a[0] + 2 * x[0] + x[1]
        b1 = a[1] + x[1] + x[2] + x[3]
    else:
        a1 = a[0] + x[0]
        b1 = a[1] + x[1]
    return float(a1), float(b1), float(a[2] + x[2]), float(a[3] + x[3])


def cf_dependent_example(t, alpha, x, scheme: Scheme):
    """Posterior CF of the log odds ratio when the row probability equals nu_1.

    Prior: theta^P_{row 1} ~ Beta(alpha_1, alpha_2) and is almost surely
    equal to nu_1; nu_3 ~ Beta(alpha_3, alpha_4) independently.  Then
    ``log psi = logit(nu_1) - logit(nu_3)`` with Beta posteriors for both.
    """
    t = np.asarray(t, dtype=float)
    a1, b1, a3, b3 = dependent_beta_parameters(alpha, x, scheme)
    it = 1j * t
    lg = lgamma_complex
    log_cf = (
        lg(a3 - it) - lg(complex(a3))
        + lg(b3 + it) - lg(complex(b3))
        + lg(a1 + it) - lg(complex(a1))
        + lg(b1 - it) - lg(complex(b1))
    )
    return np.exp(log_cf)


def default_t_grid(tmin: float = -10.0, tmax: float = 10.0, tpoints: int = 401):
    if tpoints < 2 or not tmax > tmin:
        raise DomainError("t grid needs tmax > tmin and at least 2 points")
    return np.linspace(tmin, tmax, tpoints)


@dataclass(frozen=True)
class CFGrid:
    """Characteristic function values on an increasing grid of ``t``."""

    t: np.ndarray
    values: np.ndarray
    scheme: str

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        v = np.array(self.values, dtype=complex)
        if t.ndim != 1 or t.shape != v.shape:
            raise DomainError("t and values must be 1-d arrays of equal length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise DomainError("t grid must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("CF values must be finite")
        at_zero = t == 0
        if np.any(at_zero) and np.any(np.abs(v[at_zero] - 1) > 1e-12):
            raise DomainError("a characteristic function equals 1 at t = 0")
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.t.size


def cf_grid_logpsi(t, alpha, x, c, p: Partition, scheme: Scheme, j: int = 0):
    return CFGrid(t, cf_logpsi(t, alpha, x, c, p, scheme, j), scheme)


def cf_grid_dependent(t, alpha, x, scheme: Scheme):
    return CFGrid(t, cf_dependent_example(t, alpha, x, scheme), scheme)


def cf_zero_set_scan(grid: CFGrid, tol: float = 1e-10) -> list[tuple[float, float]]:
    """Intervals ``(t_lo, t_hi)`` of consecutive grid points with ``|cf| < tol``.

    A clean scan corroborates, but cannot prove, that the CF vanishes only on
    a nowhere-dense set.
    """
    small = np.abs(grid.values) < tol
    intervals = []
    start = None
    for i, flag in enumerate(small):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            intervals.append((float(grid.t[start]), float(grid.t[i - 1])))
            start = None
    if start is not None:
        intervals.append((float(grid.t[start]), float(grid.t[-1])))
    return intervals
