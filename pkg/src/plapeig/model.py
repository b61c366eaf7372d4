"""Data types shared by the solvers: parameters, grid functions, results."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidExponent, InvalidParameter

__all__ = ["ProblemParams", "GridFunction", "EigenResult"]


@dataclass(frozen=True)
class ProblemParams:
    """Eigen-parameters (p, k, lambda, w) of one problem instance."""

    p: float
    k: float = 0.0
    lam: float = 0.0
    w: float = 0.0

    def __post_init__(self):
        if not self.p > 1:
            raise InvalidExponent(f"exponent p must exceed 1, got {self.p}")

    def with_(self, **changes) -> "ProblemParams":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nodal values on x_j = j / n_cells, boundary values fixed at zero.

    ``values`` holds the ``n_cells - 1`` interior nodes.
    """

    n_cells: int
    values: np.ndarray

    def __post_init__(self):
        if self.n_cells < 2:
            raise InvalidParameter(f"n_cells must be >= 2, got {self.n_cells}")
        v = np.array(self.values, dtype=float)
        if v.shape != (self.n_cells - 1,):
            raise InvalidParameter(
                f"expected {self.n_cells - 1} interior values, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidParameter("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, f, n_cells: int) -> "GridFunction":
        x = np.arange(1, n_cells) / n_cells
        return cls(n_cells, np.asarray(f(x), dtype=float))

    @classmethod
    def from_full(cls, full: np.ndarray) -> "GridFunction":
        """Build from values on all nodes including both (zero) endpoints."""
        full = np.asarray(full, dtype=float)
        return cls(full.size - 1, full[1:-1])

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_cells + 1)

    @property
    def full(self) -> np.ndarray:
        return np.concatenate(([0.0], self.values, [0.0]))

    def __mul__(self, t: float) -> "GridFunction":
        return GridFunction(self.n_cells, t * self.values)

    __rmul__ = __mul__

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.n_cells, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.n_cells, self.values - other.values)

    def __abs__(self) -> "GridFunction":
        return GridFunction(self.n_cells, np.abs(self.values))

    def __call__(self, x):
        """Piecewise-linear interpolant."""
        return np.interp(x, self.x, self.full)


@dataclass(frozen=True)
class EigenResult:
    params: ProblemParams
    u: GridFunction
    node_index: int
    weak_residual: float
    positive: bool
    diagnostics: dict = field(default_factory=dict)
