"""Deciding whether two posteriors differ, and how they concentrate.

Closed-form characteristic functions are compared directly where they
exist.  Sampled posteriors are compared with (weighted) two-sample
Kolmogorov-Smirnov statistics, Monte Carlo CF estimates and kernel density
estimates.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, UnreliableResultError
from .model import (
    Partition,
    as_alpha,
    as_contrast,
    as_theta,
    block_contrast,
    enumerate_tables,
    partition_sums,
)
from .samplers import (
    WeightedSample,
    draw_log_theta,
    sample_log_dirichlet,
    stream_rng,
)
from .special import CFGrid, cf_logpsi

# Asymptotic Kolmogorov critical value at level 0.01.
KS_C_01 = 1.628
MIN_ESS = 10.0
CF_DIFF_DECISION = 1e-6


@dataclass(frozen=True)
class KsResult:
    statistic: float
    n1: float
    n2: float
    significant_at_01: bool

    @property
    def threshold(self) -> float:
        return KS_C_01 * np.sqrt((self.n1 + self.n2) / (self.n1 * self.n2))

    def to_json(self) -> str:
        d = asdict(self)
        d["threshold"] = self.threshold
        return json.dumps(d, indent=2)


def _as_1d(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a nonempty 1-d sample")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    return arr


def _ks_decision(stat: float, n1: float, n2: float) -> KsResult:
    stat = float(min(max(stat, 0.0), 1.0))
    crit = KS_C_01 * np.sqrt((n1 + n2) / (n1 * n2))
    return KsResult(stat, float(n1), float(n2), bool(stat > crit))


def ks_two_sample(a, b) -> KsResult:
    """Two-sample KS statistic with the asymptotic 1% decision rule."""
    a = np.sort(_as_1d(a, "a"))
    b = np.sort(_as_1d(b, "b"))
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return _ks_decision(np.max(np.abs(fa - fb)), a.size, b.size)


def _weighted_ecdf(values: np.ndarray, weights: np.ndarray, at: np.ndarray):
    order = np.argsort(values, kind="stable")
    v = values[order]
    cw = np.concatenate([[0.0], np.cumsum(weights[order])])
    cw /= cw[-1]
    return cw[np.searchsorted(v, at, side="right")]


def ks_weighted(a: WeightedSample, b: WeightedSample) -> KsResult:
    """KS distance between weighted ECDFs; effective sizes replace raw sizes.

    Raises
    ------
    UnreliableResultError
        If either sample has an effective sample size below 10.
    """
    va = _as_1d(a.values, "a")
    vb = _as_1d(b.values, "b")
    ess_a, ess_b = a.effective_sample_size, b.effective_sample_size
    if ess_a < MIN_ESS or ess_b < MIN_ESS:
        raise UnreliableResultError(
            f"effective sample sizes {ess_a:.1f}, {ess_b:.1f} are below {MIN_ESS}"
        )
    pooled = np.concatenate([va, vb])
    fa = _weighted_ecdf(va, a.weights, pooled)
    fb = _weighted_ecdf(vb, b.weights, pooled)
    return _ks_decision(np.max(np.abs(fa - fb)), ess_a, ess_b)


def cf_grid_compare(u: CFGrid, c: CFGrid) -> tuple[float, float]:
    """Largest ``|u(t) - c(t)|`` over the common grid, and where it occurs."""
    if u.t.shape != c.t.shape or np.any(u.t != c.t):
        raise DomainError("characteristic functions are on different grids")
    diff = np.abs(u.values - c.values)
    i = int(np.argmax(diff))
    return float(diff[i]), float(u.t[i])


def mc_cf_estimate(s: WeightedSample, t, chunk: int = 8):
    """Weighted empirical characteristic function of a 1-d sample at ``t``."""
    v = _as_1d(s.values, "sample")
    w = s.normalized_weights
    t = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t).ravel()
    out = np.empty(flat.size, dtype=complex)
    for start in range(0, flat.size, chunk):
        tt = flat[start:start + chunk, None] * v
        out[start:start + chunk] = np.cos(tt) @ w + 1j * (np.sin(tt) @ w)
    out[flat == 0] = 1.0
    return out[0] if t.ndim == 0 else out.reshape(t.shape)


# -- density estimation -------------------------------------------------------


@dataclass(frozen=True)
class DensityCurve:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.grid))


def weighted_quantile(values, weights, q) -> np.ndarray:
    """Quantiles of the weighted empirical distribution (inverse weighted ECDF)."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    cw = np.cumsum(np.asarray(weights, dtype=float)[order])
    cw /= cw[-1]
    idx = np.searchsorted(cw, np.asarray(q, dtype=float), side="left")
    return values[order][np.minimum(idx, values.size - 1)]


def silverman_bandwidth(s: WeightedSample) -> float:
    """Silverman's rule with the effective sample size in place of N."""
    v = _as_1d(s.values, "sample")
    sd = float(np.sqrt(s.var()))
    if not sd > 0:
        raise DomainError("sample has zero variance; density is degenerate")
    q25, q75 = weighted_quantile(v, s.weights, [0.25, 0.75])
    spread = min(sd, (q75 - q25) / 1.34) if q75 > q25 else sd
    return 0.9 * spread * s.effective_sample_size ** (-0.2)


def default_kde_grid(s: WeightedSample, bandwidth: float, points: int = 512):
    v = _as_1d(s.values, "sample")
    return np.linspace(v.min() - 5 * bandwidth, v.max() + 5 * bandwidth, points)


def kde(s: WeightedSample, grid=None, bandwidth="auto", chunk: int = 64) -> DensityCurve:
    """Weighted Gaussian kernel density estimate of a 1-d sample.

    ``bandwidth="auto"`` uses :func:`silverman_bandwidth`.  When ``grid`` is
    omitted it spans the sample plus five bandwidths on each side.
    """
    v = _as_1d(s.values, "sample")
    if bandwidth == "auto":
        h = silverman_bandwidth(s)
    else:
        h = float(bandwidth)
        if not h > 0:
            raise DomainError("bandwidth must be positive")
        if not s.var() > 0:
            raise DomainError("sample has zero variance; density is degenerate")
    grid = default_kde_grid(s, h) if grid is None else np.asarray(grid, dtype=float)
    w = s.normalized_weights
    dens = np.empty(grid.size)
    norm = 1.0 / (h * np.sqrt(2.0 * np.pi))
    for start in range(0, grid.size, chunk):
        z = (grid[start:start + chunk, None] - v) / h
        dens[start:start + chunk] = np.exp(-0.5 * z * z) @ w * norm
    return DensityCurve(grid, dens, h)


# -- closed-form comparisons ----------------------------------------------------


def cf_scheme_difference(t, alpha, x, c, p: Partition, j: int = 0):
    """``(max |phi_u - phi_c|, argmax t)`` of the log psi_j posterior CFs."""
    u = CFGrid(t, cf_logpsi(t, alpha, x, c, p, "unconstrained", j), "unconstrained")
    con = CFGrid(t, cf_logpsi(t, alpha, x, c, p, "constrained", j), "constrained")
    return cf_grid_compare(u, con)


def search_noninvariant_table(alpha, c, p: Partition, n: int, t, j: int = 0):
    """Scan every table with total ``n`` for the largest CF difference.

    Returns ``(x, max_diff, argmax_t)`` for the table with the largest
    difference between the two schemes.
    """
    best = None
    for x in enumerate_tables(p.r, n):
        diff, where = cf_scheme_difference(t, alpha, x, c, p, j)
        if best is None or diff > best[1]:
            best = (x, diff, where)
    return best


# -- calibration and concentration ----------------------------------------------


def ks_false_positives(
    draw: Callable[[np.random.Generator], np.ndarray],
    reps: int = 100,
    seed: int = 0,
) -> int:
    """How often two independent samples from ``draw`` test as different at 1%."""
    hits = 0
    for rep in range(reps):
        a = draw(stream_rng(seed, "calibration", rep, 0))
        b = draw(stream_rng(seed, "calibration", rep, 1))
        hits += ks_two_sample(a, b).significant_at_01
    return hits


def table_for_total(theta0, n: int) -> np.ndarray:
    """Counts closest to ``n * theta0`` that sum to ``n`` (largest remainders)."""
    th = as_theta(theta0)
    raw = n * th
    x = np.floor(raw).astype(np.int64)
    short = n - int(x.sum())
    order = np.argsort(-(raw - x), kind="stable")
    x[order[:short]] += 1
    return x


@dataclass(frozen=True)
class ConcentrationTable:
    n: np.ndarray
    variance: np.ndarray
    variance_se: np.ndarray
    scheme: str

    def rows(self) -> list[tuple[int, float]]:
        return [(int(a), float(b)) for a, b in zip(self.n, self.variance)]

    def shrink_factors(self) -> np.ndarray:
        return self.variance[:-1] / self.variance[1:]


def concentration_study(
    theta0,
    c,
    p: Partition,
    n_list: Sequence[int],
    scheme: str,
    n_draws: int,
    rng,
    alpha=None,
    j: int = 0,
) -> ConcentrationTable:
    """Posterior variance of ``log psi_j`` for data ``x(n) ~ n * theta0``."""
    th = as_theta(theta0)
    alpha = np.ones(th.size) if alpha is None else as_alpha(alpha)
    cm = as_contrast(c)
    stats = []
    for n in n_list:
        x = table_for_total(th, int(n))
        log_theta = draw_log_theta(alpha, x, p, scheme, n_draws, rng)
        stats.append(variance_with_se(log_theta @ cm[:, j]))
    var, se = np.array(stats).T
    return ConcentrationTable(np.asarray(n_list, dtype=np.int64), var, se, scheme)


def prior_tau_variance(alpha, c, p: Partition, n_draws: int, rng, j: int = 0):
    """Simulated prior variance of the block part ``tau_j`` and its standard error.

    Under the constrained scheme the block probabilities never leave their
    prior, so this is a floor for the posterior variance of ``log psi_j``.
    """
    alpha = as_alpha(alpha)
    weights = block_contrast(c, p)[:, j]
    tau = sample_log_dirichlet(partition_sums(alpha, p), rng, n_draws) @ weights
    return variance_with_se(tau)


def variance_with_se(v: Iterable[float]) -> tuple[float, float]:
    """Sample variance and its large-sample standard error."""
    v = np.asarray(v, dtype=float)
    centered = v - v.mean()
    var = float(np.mean(centered**2))
    m4 = float(np.mean(centered**4))
    return var, float(np.sqrt(max(m4 - var * var, 0.0) / v.size))
