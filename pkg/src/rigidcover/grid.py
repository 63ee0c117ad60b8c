"""Midpoint-rule discretization of a single continuous variable."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidCountError, InvalidIntervalError, LengthMismatchError


@dataclass(frozen=True, eq=False)
class ModeGrid:
    """One continuous mode on ``(lower, upper)`` with ``count`` midpoint cells.

    ``points`` and ``weights`` are derived; the arrays are read-only.
    """

    lower: float
    upper: float
    count: int
    points: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lower, upper = float(self.lower), float(self.upper)
        if not (np.isfinite(lower) and np.isfinite(upper)) or lower >= upper:
            raise InvalidIntervalError(f"need lower < upper, got ({lower}, {upper})")
        if int(self.count) != self.count or self.count < 2:
            raise InvalidCountError(f"need count >= 2, got {self.count}")
        count = int(self.count)
        h = (upper - lower) / count
        points = lower + (np.arange(count) + 0.5) * h
        weights = np.full(count, h)
        points.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "count", count)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def spacing(self) -> float:
        return (self.upper - self.lower) / self.count

    def cell_edges(self) -> np.ndarray:
        return self.lower + np.arange(self.count + 1) * self.spacing

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "count": self.count}

    def __eq__(self, other):
        if not isinstance(other, ModeGrid):
            return NotImplemented
        return (self.lower, self.upper, self.count) == (other.lower, other.upper, other.count)

    def __hash__(self):
        return hash((self.lower, self.upper, self.count))


def make_uniform_grid(lower: float, upper: float, count: int) -> ModeGrid:
    """Midpoint grid: nodes at cell centres, every weight equal to the cell width.

    >>> make_uniform_grid(0, 1, 2).points
    array([0.25, 0.75])
    """
    return ModeGrid(lower, upper, count)


def weighted_inner_product_1d(f, g, grid: ModeGrid) -> complex:
    """Return ``sum_k w_k f_k conj(g_k)``."""
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape != (grid.count,) or g.shape != (grid.count,):
        raise LengthMismatchError(
            f"expected vectors of length {grid.count}, got {f.shape} and {g.shape}"
        )
    return complex(np.sum(grid.weights * f * np.conj(g)))


def product_weights(grids) -> np.ndarray:
    """Tensor of products of per-mode weights, shaped like the product grid."""
    out = np.ones(())
    for grid in grids:
        out = np.multiply.outer(out, grid.weights)
    return out
