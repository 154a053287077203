"""Experiment configuration files (JSON).

Example::

    {
      "table": [[7, 1], [1, 1]],
      "partition": "rows",
      "contrast": {"builder": "or2x2"},
      "alpha": 1.0,
      "schemes": ["unconstrained", "constrained"],
      "samples": 100000,
      "seed": 0,
      "t_grid": {"tmin": -10, "tmax": 10, "tpoints": 401},
      "out": "out"
    }

``table`` is a nested list (row-major) or a flat list with ``shape``.
``partition`` is ``"rows"``, ``"columns"`` or explicit 0-based blocks.
``contrast`` names a builder (``or2x2``, ``local`` with ``i``/``j``,
``higher_order`` with ``k``) or gives ``{"matrix": ...}`` as an r x d nested
list (a flat list is one column).  ``alpha`` is a scalar or one value per
cell.  ``prior`` is ``"dirichlet"`` (default) or ``"dependent"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigError, MarginOddsError
from .io import write_atomic
from .model import (
    CONTRAST_BUILDERS,
    Partition,
    as_alpha,
    as_contrast,
    as_counts,
)
from .special import default_t_grid

SCHEME_NAMES = ("unconstrained", "constrained", "double", "dependent")
PRIORS = ("dirichlet", "dependent")


@dataclass
class ExperimentConfig:
    table: list
    shape: tuple[int, ...]
    partition: Any = "rows"
    contrast: dict = field(default_factory=lambda: {"builder": "or2x2"})
    alpha: Any = 1.0
    prior: str = "dirichlet"
    schemes: list[str] = field(default_factory=lambda: ["unconstrained", "constrained"])
    samples: int = 100_000
    seed: int = 0
    t_grid: dict = field(
        default_factory=lambda: {"tmin": -10.0, "tmax": 10.0, "tpoints": 401}
    )
    out: str = "out"
    column: int = 0
    theta0: list | None = None
    n_list: list[int] = field(default_factory=lambda: [100, 1000, 10000])

    def __post_init__(self):
        try:
            self.validate()
        except MarginOddsError as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError(str(err)) from err

    # -- derived objects --

    @property
    def counts(self) -> np.ndarray:
        return as_counts(self.table)

    @property
    def r(self) -> int:
        return int(np.prod(self.shape))

    def build_partition(self) -> Partition:
        part = self.partition
        if part in ("rows", "columns"):
            if len(self.shape) < 2:
                raise ConfigError(f"partition {part!r} needs a table with 2+ axes")
            return Partition.from_axis(self.shape, 0 if part == "rows" else 1)
        if isinstance(part, dict) and "axis" in part:
            return Partition.from_axis(self.shape, int(part["axis"]))
        if isinstance(part, list):
            return Partition(part, self.r)
        raise ConfigError(f"cannot read partition {part!r}")

    def build_contrast(self) -> np.ndarray:
        opts = dict(self.contrast)
        if "matrix" in opts:
            return np.asarray(opts["matrix"])
        name = opts.pop("builder", None)
        if name not in CONTRAST_BUILDERS:
            raise ConfigError(
                f"unknown contrast builder {name!r}; use one of {sorted(CONTRAST_BUILDERS)}"
            )
        if name == "local":
            opts.setdefault("n_rows", self.shape[0])
            opts.setdefault("n_cols", self.shape[1] if len(self.shape) > 1 else 1)
        try:
            return CONTRAST_BUILDERS[name](**opts)
        except TypeError as err:
            raise ConfigError(f"bad parameters for builder {name!r}: {err}") from err

    def build_alpha(self) -> np.ndarray:
        a = np.asarray(self.alpha, dtype=float)
        if a.ndim == 0:
            a = np.full(self.r, float(a))
        return as_alpha(a)

    def t_values(self) -> np.ndarray:
        g = self.t_grid
        return default_t_grid(float(g["tmin"]), float(g["tmax"]), int(g["tpoints"]))

    def is_2x2(self) -> bool:
        return tuple(self.shape) == (2, 2)

    # -- validation / round trip --

    def validate(self) -> None:
        x = self.counts
        if x.size != self.r:
            raise ConfigError(f"table has {x.size} cells but shape {self.shape}")
        self.build_partition()
        c = as_contrast(self.build_contrast())
        if c.shape[0] != self.r:
            raise ConfigError(f"contrast has {c.shape[0]} rows, table has {self.r} cells")
        if not 0 <= self.column < c.shape[1]:
            raise ConfigError(f"column {self.column} out of range")
        if self.build_alpha().size != self.r:
            raise ConfigError("alpha must be a scalar or have one entry per cell")
        if self.prior not in PRIORS:
            raise ConfigError(f"prior must be one of {PRIORS}")
        bad = [s for s in self.schemes if s not in SCHEME_NAMES]
        if bad or not self.schemes:
            raise ConfigError(f"schemes must be drawn from {SCHEME_NAMES}")
        if ("double" in self.schemes or "dependent" in self.schemes
                or self.prior == "dependent") and not self.is_2x2():
            raise ConfigError("double and dependent schemes need a 2 x 2 table")
        if int(self.samples) < 1:
            raise ConfigError("samples must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        self.t_values()
        if self.theta0 is not None and len(self.theta0) != self.r:
            raise ConfigError("theta0 must have one entry per cell")
        if any(int(n) < 1 for n in self.n_list):
            raise ConfigError("n_list entries must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "table" not in d:
            raise ConfigError("config needs a 'table'")
        table = np.asarray(d.pop("table"))
        shape = tuple(d.pop("shape", table.shape))
        known = set(cls.__dataclass_fields__) - {"table", "shape"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(table=table.ravel().tolist(), shape=tuple(int(s) for s in shape), **d)

    def to_dict(self) -> dict:
        return {
            "table": list(self.table),
            "shape": list(self.shape),
            "partition": self.partition,
            "contrast": dict(self.contrast),
            "alpha": self.alpha,
            "prior": self.prior,
            "schemes": list(self.schemes),
            "samples": int(self.samples),
            "seed": int(self.seed),
            "t_grid": dict(self.t_grid),
            "out": self.out,
            "column": int(self.column),
            "theta0": self.theta0,
            "n_list": [int(n) for n in self.n_list],
        }

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def dump(self, path) -> Path:
        return write_atomic(path, json.dumps(self.to_dict(), indent=2) + "\n")
