"""Tables, partitions, contrasts and the marginal/conditional reparametrization.

Cells of a table are flattened in row-major (C) order and indexed from 0.
A :class:`Partition` groups the flattened cell indices into blocks; for a
two-way table the natural partitions are its rows and its columns.

Generalized odds ratios are multiplicative contrasts
``psi_j = prod_i theta_i ** c[i, j]`` and are always evaluated in the log
domain.  Given a partition, ``log psi_j`` splits into ``tau_j``, which only
depends on the block probabilities, and ``rho_j``, which only depends on the
within-block conditional probabilities.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateParameterError, DomainError, PartitionError

FLOAT_ZERO_TOL = 1e-12
SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class Partition:
    """Ordered, disjoint blocks of cell indices covering ``range(r)``.

    Blocks are validated when the partition is built.  Block order and the
    order of indices inside each block are kept exactly as given.
    """

    blocks: tuple[tuple[int, ...], ...]
    r: int

    def __init__(self, blocks: Sequence[Sequence[int]], r: int | None = None):
        blocks = tuple(tuple(int(i) for i in b) for b in blocks)
        if not blocks:
            raise PartitionError("a partition needs at least one block")
        flat = [i for b in blocks for i in b]
        if r is None:
            r = max(flat) + 1 if flat else 0
        if any(len(b) == 0 for b in blocks):
            raise PartitionError("partition blocks must be nonempty")
        if len(set(flat)) != len(flat):
            raise PartitionError("partition blocks overlap")
        if sorted(flat) != list(range(r)):
            raise PartitionError(
                f"partition blocks must cover exactly the cells 0..{r - 1}"
            )
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "r", int(r))

    @property
    def k(self) -> int:
        return len(self.blocks)

    def labels(self) -> np.ndarray:
        """Block number of every cell, as an integer array of length r."""
        lab = np.empty(self.r, dtype=np.intp)
        for b, idx in enumerate(self.blocks):
            lab[list(idx)] = b
        return lab

    def indicator(self) -> np.ndarray:
        """The r x k 0/1 matrix mapping cells to blocks."""
        m = np.zeros((self.r, self.k))
        m[np.arange(self.r), self.labels()] = 1.0
        return m

    def check_size(self, r: int) -> None:
        if r != self.r:
            raise PartitionError(
                f"partition covers {self.r} cells but the table has {r}"
            )

    @classmethod
    def from_axis(cls, shape: Sequence[int], axis: int = 0) -> "Partition":
        """Group the cells of a table of ``shape`` by their index on ``axis``.

        ``from_axis((o, p), 0)`` gives the rows of an o x p table and
        ``from_axis((o, p), 1)`` its columns.
        """
        shape = tuple(int(s) for s in shape)
        cells = np.arange(int(np.prod(shape))).reshape(shape)
        moved = np.moveaxis(cells, axis, 0)
        return cls([tuple(moved[i].ravel().tolist()) for i in range(shape[axis])])

    @classmethod
    def rows(cls, n_rows: int, n_cols: int) -> "Partition":
        return cls.from_axis((n_rows, n_cols), 0)

    @classmethod
    def columns(cls, n_rows: int, n_cols: int) -> "Partition":
        return cls.from_axis((n_rows, n_cols), 1)

    def to_list(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


@dataclass(frozen=True)
class DirichletPrior:
    """Dirichlet(alpha) prior on the cell probabilities."""

    alpha: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))

    @property
    def r(self) -> int:
        return self.alpha.size


@dataclass(frozen=True)
class Reparam:
    """Block probabilities ``theta_marg`` and per-block conditionals ``nu``."""

    theta_marg: np.ndarray
    nu: tuple[np.ndarray, ...]

    def __post_init__(self):
        tm = np.array(self.theta_marg, dtype=float)
        nu = tuple(np.array(v, dtype=float) for v in self.nu)
        if len(nu) != tm.size:
            raise PartitionError("need one conditional vector per block")
        _check_open_simplex(tm, "theta_marg")
        for v in nu:
            _check_open_simplex(v, "nu")
        tm.flags.writeable = False
        for v in nu:
            v.flags.writeable = False
        object.__setattr__(self, "theta_marg", tm)
        object.__setattr__(self, "nu", nu)


class DecomposedLogOdds(NamedTuple):
    tau: np.ndarray
    rho: np.ndarray


def _check_open_simplex(v: np.ndarray, name: str) -> None:
    if v.ndim != 1 or v.size == 0:
        raise DomainError(f"{name} must be a nonempty 1-d vector")
    upper_ok = v.size == 1 or np.all(v < 1)
    if not np.all(np.isfinite(v)) or np.any(v <= 0) or not upper_ok:
        raise DegenerateParameterError(f"{name} must lie in the open simplex")
    if abs(v.sum() - 1.0) > SIMPLEX_TOL:
        raise DomainError(f"{name} must sum to 1 (got {v.sum()!r})")


def as_counts(x) -> np.ndarray:
    """Validate a table of counts and return it flattened (row-major)."""
    arr = np.asarray(x)
    if arr.size == 0:
        raise DomainError("count vector is empty")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise DomainError("counts must be integers")
    elif arr.dtype.kind not in "iu":
        raise DomainError("counts must be integers")
    arr = arr.astype(np.int64).ravel()
    if np.any(arr < 0):
        raise DomainError("counts must be nonnegative")
    return arr


def as_alpha(alpha) -> np.ndarray:
    a = np.array(alpha, dtype=float).ravel()
    if a.size == 0 or not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise DomainError("Dirichlet concentrations must be finite and > 0")
    a.flags.writeable = False
    return a


def as_contrast(c) -> np.ndarray:
    """Return ``c`` as a float r x d matrix; a 1-d vector becomes one column."""
    arr = np.asarray(c, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] < 1 or arr.shape[0] < 1:
        raise DomainError("contrast must be an r x d matrix with d >= 1")
    if not np.all(np.isfinite(arr)):
        raise DomainError("contrast entries must be finite")
    return arr


def as_theta(theta) -> np.ndarray:
    """Validate strictly positive probability vector(s) along the last axis."""
    th = np.asarray(theta, dtype=float)
    if th.ndim == 0 or th.shape[-1] == 0:
        raise DomainError("theta must have at least one cell")
    if not np.all(np.isfinite(th)) or np.any(th <= 0):
        raise DomainError("theta must be strictly positive")
    if np.any(np.abs(th.sum(axis=-1) - 1.0) > SIMPLEX_TOL):
        raise DomainError("theta must sum to 1")
    return th


def partition_sums(x, p: Partition) -> np.ndarray:
    """Totals of ``x`` within each block of ``p``.

    Works for counts and for real vectors; the last axis indexes cells.
    """
    arr = np.asarray(x)
    if arr.ndim == 0:
        raise PartitionError("expected a vector")
    p.check_size(arr.shape[-1])
    return np.stack([arr[..., list(b)].sum(axis=-1) for b in p.blocks], axis=-1)


def reparametrize(theta, p: Partition) -> Reparam:
    """Map cell probabilities to (block probabilities, conditionals)."""
    th = np.asarray(theta, dtype=float)
    if th.ndim != 1:
        raise DomainError("theta must be a single probability vector")
    p.check_size(th.size)
    sums = partition_sums(th, p)
    if np.any(sums <= 0):
        raise DegenerateParameterError("a block has zero probability")
    th = as_theta(th)
    nu = tuple(th[list(b)] / s for b, s in zip(p.blocks, sums))
    return Reparam(sums, nu)


def reconstruct(rep: Reparam, p: Partition) -> np.ndarray:
    """Inverse of :func:`reparametrize`."""
    if len(rep.nu) != p.k:
        raise PartitionError("reparametrization and partition disagree on k")
    theta = np.empty(p.r)
    for b, tm, v in zip(p.blocks, rep.theta_marg, rep.nu):
        if v.size != len(b):
            raise PartitionError("conditional vector does not match block size")
        theta[list(b)] = tm * v
    return theta


def log_godds(theta, c) -> np.ndarray:
    """``log psi`` for every column of ``c``; ``theta`` may be batched (..., r)."""
    th = as_theta(theta)
    cm = as_contrast(c)
    if cm.shape[0] != th.shape[-1]:
        raise DomainError("contrast has the wrong number of rows")
    return np.log(th) @ cm


def godds(theta, c) -> np.ndarray:
    """Generalized odds ratios ``prod_i theta_i ** c[i, j]``."""
    return np.exp(log_godds(theta, c))


def block_contrast(c, p: Partition) -> np.ndarray:
    """k x d matrix of within-block coefficient sums."""
    cm = as_contrast(c)
    p.check_size(cm.shape[0])
    return p.indicator().T @ cm


def decompose_log_odds(rep: Reparam, c, p: Partition) -> DecomposedLogOdds:
    """Split ``log psi`` into its block part ``tau`` and conditional part ``rho``."""
    cm = as_contrast(c)
    p.check_size(cm.shape[0])
    tau = np.log(rep.theta_marg) @ block_contrast(cm, p)
    rho = np.zeros(cm.shape[1])
    for b, v in zip(p.blocks, rep.nu):
        rho += np.log(v) @ cm[list(b)]
    return DecomposedLogOdds(tau, rho)


def split_log_odds(theta, c, p: Partition, log: bool = False) -> DecomposedLogOdds:
    """Batched ``(tau, rho)`` for draws ``theta`` of shape (N, r).

    With ``log=True`` the input is ``log(theta)``, which avoids underflow for
    draws with tiny cell probabilities.  Returns two (N, d) arrays.
    """
    if log:
        log_theta = np.asarray(theta, dtype=float)
        if not np.all(np.isfinite(log_theta)):
            raise DomainError("log theta must be finite")
    else:
        log_theta = np.log(as_theta(theta))
    cm = as_contrast(c)
    p.check_size(log_theta.shape[-1])
    log_marg = np.stack(
        [_logsumexp(log_theta[..., list(b)]) for b in p.blocks], axis=-1
    )
    tau = log_marg @ block_contrast(cm, p)
    rho = (log_theta - log_marg[..., p.labels()]) @ cm
    return DecomposedLogOdds(tau, rho)


def _logsumexp(a: np.ndarray) -> np.ndarray:
    m = a.max(axis=-1, keepdims=True)
    return (m + np.log(np.exp(a - m).sum(axis=-1, keepdims=True)))[..., 0]


def _is_exact(c) -> bool:
    arr = np.asarray(c)
    if arr.dtype.kind in "iub":
        return True
    if arr.dtype == object:
        return all(isinstance(v, (int, Fraction)) for v in arr.ravel())
    return False


def _block_sums_exact(c, p: Partition) -> list[list[Fraction]]:
    arr = np.asarray(c, dtype=object)
    if arr.ndim == 1:
        arr = arr[:, None]
    p.check_size(arr.shape[0])
    return [
        [sum((Fraction(arr[i, j]) for i in b), Fraction(0)) for j in range(arr.shape[1])]
        for b in p.blocks
    ]


def _block_sign(c, p: Partition) -> np.ndarray:
    """Sign (-1, 0, +1) of each block sum, k x d, with the zero tolerance rule."""
    if _is_exact(c):
        sums = _block_sums_exact(c, p)
        return np.array([[(s > 0) - (s < 0) for s in row] for row in sums], dtype=int)
    sums = block_contrast(c, p)
    sign = np.sign(sums).astype(int)
    sign[np.abs(sums) <= FLOAT_ZERO_TOL] = 0
    return sign


def margin_free(c, p: Partition) -> bool:
    """True iff every column of ``c`` sums to zero inside every block of ``p``.

    Integer and :class:`fractions.Fraction` inputs are tested exactly; float
    inputs with an absolute tolerance of 1e-12.
    """
    return bool(np.all(_block_sign(c, p) == 0))


def assumption2c_check(c, p: Partition, j: int, n: int) -> bool:
    """Sample-size condition under which a non margin-free column is detectable.

    With ``K+`` (``K-``) the blocks on which column ``j`` has a positive
    (negative) sum, the condition holds when ``0 < |K+| <= n`` or
    ``0 < |K-| <= n``.
    """
    sign = _block_sign(c, p)
    if not 0 <= j < sign.shape[1]:
        raise DomainError(f"column index {j} out of range")
    k_plus = int(np.sum(sign[:, j] > 0))
    k_minus = int(np.sum(sign[:, j] < 0))
    return (0 < k_plus <= n) or (0 < k_minus <= n)


# -- contrast builders -------------------------------------------------------


def odds_ratio_2x2() -> np.ndarray:
    """Contrast of the usual odds ratio of a 2 x 2 table, as a 4 x 1 matrix."""
    return np.array([[1], [-1], [-1], [1]])


def local_odds_ratio(i: int, j: int, n_rows: int, n_cols: int) -> np.ndarray:
    """Contrast of the local odds ratio at cell (i, j) of an n_rows x n_cols table."""
    if n_rows < 2 or n_cols < 2:
        raise DomainError("local odds ratios need at least a 2 x 2 table")
    if not (0 <= i < n_rows - 1 and 0 <= j < n_cols - 1):
        raise DomainError(f"cell ({i}, {j}) has no local odds ratio")
    c = np.zeros((n_rows, n_cols), dtype=int)
    c[i, j] = c[i + 1, j + 1] = 1
    c[i + 1, j] = c[i, j + 1] = -1
    return c.reshape(-1, 1)


def higher_order_odds_ratio(k: int) -> np.ndarray:
    """Contrast of the (k-1)-th order odds ratio of a 2**k table.

    Cell ``(j_1, ..., j_k)`` gets ``+1`` when ``sum(j)`` is even and ``-1``
    otherwise.
    """
    if k < 2:
        raise DomainError("higher-order odds ratios need k >= 2")
    cells = itertools.product((0, 1), repeat=k)
    return np.array([[1 if sum(j) % 2 == 0 else -1] for j in cells])


CONTRAST_BUILDERS = {
    "or2x2": odds_ratio_2x2,
    "local": local_odds_ratio,
    "higher_order": higher_order_odds_ratio,
}


# -- multinomial factorization ------------------------------------------------


def multinomial_pmf(x, theta) -> float:
    """Multinomial(n, theta) probability of the count vector ``x``."""
    x = as_counts(x)
    th = np.asarray(theta, dtype=float)
    n = int(x.sum())
    coef = math.factorial(n)
    for xi in x:
        coef //= math.factorial(int(xi))
    return float(coef * np.prod(th ** x))


def factorized_multinomial_pmf(x, theta, p: Partition) -> float:
    """Same probability written as block totals times within-block multinomials."""
    x = as_counts(x)
    p.check_size(x.size)
    rep = reparametrize(theta, p)
    xp = partition_sums(x, p)
    marginal = multinomial_pmf(xp, rep.theta_marg)
    within = 1.0
    for b, v in zip(p.blocks, rep.nu):
        within *= multinomial_pmf(x[list(b)], v)
    return marginal * within


def enumerate_tables(r: int, n: int):
    """All count vectors of length ``r`` summing to ``n``."""
    for bars in itertools.combinations(range(n + r - 1), r - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + r - 2 - prev)
        yield np.array(out, dtype=np.int64)
