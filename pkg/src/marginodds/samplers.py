"""Posterior samplers for the four sampling schemes.

All Dirichlet and Beta draws are built from Gamma variates produced by the
Marsaglia-Tsang squeeze method and carried in the log domain, so cells with
tiny probability never underflow to zero before ``log psi`` is taken.

Random streams
--------------
Every command derives its generators from one 64-bit seed with
:func:`stream_rng`.  The stream for ``name`` uses
``SeedSequence(seed, spawn_key=(STREAMS.index(name), *extra))`` driving a
PCG64 generator, so each scheme gets an independent, reproducible stream and
repeated runs (``extra``) never overlap.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeightsWarning, DomainError
from .fnch import FnchParams, fnch_log_pmf_logpsi
from .model import (
    Partition,
    as_alpha,
    as_contrast,
    as_counts,
    odds_ratio_2x2,
    partition_sums,
)
from .special import dependent_beta_parameters

STREAMS = (
    "unconstrained",
    "constrained",
    "dependent",
    "double",
    "prior",
    "calibration",
    "misc",
)

ESS_WARN_FRACTION = 0.01


def stream_rng(seed: int, name: str, *extra: int) -> np.random.Generator:
    """Independent generator for stream ``name`` derived from ``seed``."""
    if name not in STREAMS:
        raise DomainError(f"unknown stream {name!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be an unsigned 64-bit integer")
    ss = np.random.SeedSequence(seed, spawn_key=(STREAMS.index(name), *extra))
    return np.random.Generator(np.random.PCG64(ss))


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.PCG64(rng))


# -- Gamma / Dirichlet --------------------------------------------------------


def _log_gamma_mt(shape: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Marsaglia-Tsang for shape >= 1, returning log of the variate."""
    d = shape - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(shape.shape)
    todo = np.arange(shape.size)
    while todo.size:
        x = rng.standard_normal(todo.size)
        u = rng.random(todo.size)
        dd, cc = d[todo], c[todo]
        v = 1.0 + cc * x
        ok = v > 0
        v = np.where(ok, v * v * v, 1.0)
        x2 = x * x
        accept = ok & (
            (u < 1.0 - 0.0331 * x2 * x2)
            | (np.log(u) < 0.5 * x2 + dd * (1.0 - v + np.log(v)))
        )
        out[todo[accept]] = np.log(dd[accept] * v[accept])
        todo = todo[~accept]
    return out


def log_standard_gamma(shape, rng, size=None) -> np.ndarray:
    """log of Gamma(shape, 1) variates.

    Shapes below one are boosted: ``G(a) = G(a + 1) * U**(1/a)``.
    """
    rng = _as_rng(rng)
    shape = np.asarray(shape, dtype=float)
    if np.any(~np.isfinite(shape)) or np.any(shape <= 0):
        raise DomainError("Gamma shape must be finite and > 0")
    if size is not None:
        shape = np.broadcast_to(shape, size)
    flat = np.ascontiguousarray(shape).ravel()
    small = flat < 1.0
    out = _log_gamma_mt(np.where(small, flat + 1.0, flat), rng)
    if np.any(small):
        u = 1.0 - rng.random(int(small.sum()))
        out[small] += np.log(u) / flat[small]
    return out.reshape(shape.shape)


def standard_gamma(shape, rng, size=None) -> np.ndarray:
    return np.exp(log_standard_gamma(shape, rng, size))


def _normalize_log(log_g: np.ndarray) -> np.ndarray:
    m = log_g.max(axis=-1, keepdims=True)
    return log_g - (m + np.log(np.exp(log_g - m).sum(axis=-1, keepdims=True)))


def sample_log_dirichlet(alpha, rng, size: int | None = None) -> np.ndarray:
    """log of Dirichlet(alpha) draws; shape (size, r), or (r,) when size is None."""
    alpha = as_alpha(alpha)
    shape = alpha.shape if size is None else (int(size), alpha.size)
    return _normalize_log(log_standard_gamma(alpha, rng, shape))


def sample_dirichlet(alpha, rng, size: int | None = None) -> np.ndarray:
    """Dirichlet(alpha) draws from normalized independent Gamma variates."""
    return np.exp(sample_log_dirichlet(alpha, rng, size))


# -- weighted samples ---------------------------------------------------------


@dataclass(frozen=True)
class WeightedSample:
    """Draws of ``log psi`` with nonnegative importance weights.

    ``values`` is (N,) or (N, d); direct samplers use unit weights.
    """

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        w = np.array(self.weights, dtype=float)
        if v.ndim not in (1, 2) or v.shape[0] == 0:
            raise DomainError("values must be a nonempty (N,) or (N, d) array")
        if w.shape != (v.shape[0],):
            raise DomainError("need exactly one weight per draw")
        if np.any(~np.isfinite(w)) or np.any(w < 0) or not w.sum() > 0:
            raise DomainError("weights must be finite, nonnegative, not all zero")
        v.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)

    @classmethod
    def unweighted(cls, values) -> "WeightedSample":
        values = np.asarray(values, dtype=float)
        return cls(values, np.ones(values.shape[0]))

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def effective_sample_size(self) -> float:
        w = self.weights / self.weights.max()
        return float(w.sum() ** 2 / np.dot(w, w))

    @property
    def normalized_weights(self) -> np.ndarray:
        return self.weights / self.weights.sum()

    def column(self, j: int) -> "WeightedSample":
        if self.values.ndim == 1:
            if j != 0:
                raise DomainError("sample has a single column")
            return self
        return WeightedSample(self.values[:, j], self.weights)

    def mean(self) -> np.ndarray:
        return self.normalized_weights @ self.values

    def var(self) -> np.ndarray:
        w = self.normalized_weights
        centered = self.values - self.mean()
        return w @ (centered * centered)


# -- posterior draws of theta ---------------------------------------------------


def draw_log_theta(alpha, x, p: Partition, scheme: str, n_draws: int, rng):
    """Posterior draws of ``log theta`` (n_draws, r) under a Dirichlet prior.

    ``unconstrained``: theta | x ~ Dirichlet(alpha + x).
    ``constrained``: block probabilities keep their Dirichlet(alpha^P) prior
    and each block's conditionals are Dirichlet(alpha_P + x_P), independently.
    """
    rng = _as_rng(rng)
    alpha = as_alpha(alpha)
    x = as_counts(x)
    if x.size != alpha.size:
        raise DomainError("prior and counts must have the same length")
    p.check_size(alpha.size)
    if scheme == "unconstrained":
        return sample_log_dirichlet(alpha + x, rng, n_draws)
    if scheme != "constrained":
        raise DomainError(f"unknown scheme {scheme!r}")
    log_marg = sample_log_dirichlet(partition_sums(alpha, p), rng, n_draws)
    out = np.empty((int(n_draws), alpha.size))
    for b, idx in enumerate(p.blocks):
        idx = list(idx)
        log_nu = sample_log_dirichlet(alpha[idx] + x[idx], rng, n_draws)
        out[:, idx] = log_marg[:, [b]] + log_nu
    return out


def _log_psi(log_theta: np.ndarray, c) -> np.ndarray:
    cm = as_contrast(c)
    if cm.shape[0] != log_theta.shape[1]:
        raise DomainError("contrast has the wrong number of rows")
    return log_theta @ cm


def posterior_unconstrained(alpha, x, c, n_draws: int, rng) -> WeightedSample:
    """Draws of ``log psi`` (N, d) under multinomial sampling."""
    alpha = as_alpha(alpha)
    p = Partition([range(alpha.size)])
    log_theta = draw_log_theta(alpha, x, p, "unconstrained", n_draws, rng)
    return WeightedSample.unweighted(_log_psi(log_theta, c))


def posterior_constrained(alpha, x, p: Partition, c, n_draws: int, rng) -> WeightedSample:
    """Draws of ``log psi`` (N, d) when the block totals of ``p`` are fixed."""
    log_theta = draw_log_theta(alpha, x, p, "constrained", n_draws, rng)
    return WeightedSample.unweighted(_log_psi(log_theta, c))


def posterior_dependent_example(alpha, x, n_draws: int, rng, scheme: str):
    """Log odds ratio draws for the prior where the first row probability equals nu_1.

    Unconstrained: nu_1 ~ Beta(a1 + 2 x1 + x2, a2 + x2 + x3 + x4);
    constrained: nu_1 ~ Beta(a1 + x1, a2 + x2); in both nu_3 ~ Beta(a3 + x3,
    a4 + x4).  Returns ``logit(nu_1) - logit(nu_3)`` as an (N,) sample.
    """
    rng = _as_rng(rng)
    a1, b1, a3, b3 = dependent_beta_parameters(alpha, x, scheme)
    lg = log_standard_gamma(np.array([a1, b1, a3, b3]), rng, (int(n_draws), 4))
    values = (lg[:, 0] - lg[:, 1]) - (lg[:, 2] - lg[:, 3])
    return WeightedSample.unweighted(values)


def posterior_double_constrained(alpha, x, n_draws: int, rng) -> WeightedSample:
    """Log odds ratio posterior of a 2 x 2 table with both margins fixed.

    Importance sampling with the Dirichlet(alpha) prior as proposal: the
    weight of draw ``theta`` is the Fisher noncentral hypergeometric
    probability of the observed top-left cell given both margins and
    ``psi(theta)``.
    """
    rng = _as_rng(rng)
    alpha = as_alpha(alpha)
    x = as_counts(x)
    if alpha.size != 4 or x.size != 4:
        raise DomainError("both-margins posterior is only defined for 2 x 2 tables")
    params = FnchParams.from_table(x)
    log_theta = sample_log_dirichlet(alpha, rng, n_draws)
    values = _log_psi(log_theta, odds_ratio_2x2())[:, 0]
    log_w = fnch_log_pmf_logpsi(int(x[0]), params, values)
    weights = np.exp(log_w)
    if not weights.sum() > 0:
        weights = np.exp(log_w - log_w.max())
    sample = WeightedSample(values, weights)
    ess = sample.effective_sample_size
    if ess < ESS_WARN_FRACTION * len(sample):
        warnings.warn(
            f"importance weights are degenerate: ESS {ess:.1f} from {len(sample)} draws",
            DegenerateWeightsWarning,
            stacklevel=2,
        )
    return sample
