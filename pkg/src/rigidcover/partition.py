"""Bipartitions of the mode index set and the matching tensor reshapes."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import PartitionError, ShapeMismatchError
from .state import PureState


@dataclass(frozen=True)
class Bipartition:
    """Split ``r | s`` of the 1-based mode indices ``1..n_total``."""

    r: tuple
    s: tuple
    n_total: int

    def __post_init__(self):
        r = tuple(int(i) for i in self.r)
        s = tuple(int(i) for i in self.s)
        n = int(self.n_total)
        if n < 2:
            raise PartitionError(f"need at least 2 modes, got {n}")
        if not r or not s:
            raise PartitionError("both sides of a bipartition must be non-empty")
        for side in (r, s):
            if any(b <= a for a, b in zip(side, side[1:])):
                raise PartitionError(f"side {side} is not strictly increasing")
        if set(r) & set(s):
            raise PartitionError(f"sides overlap: {sorted(set(r) & set(s))}")
        if set(r) | set(s) != set(range(1, n + 1)):
            raise PartitionError(f"sides {r} | {s} do not cover 1..{n}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "n_total", n)

    @property
    def r0(self) -> tuple:
        """0-based r indices."""
        return tuple(i - 1 for i in self.r)

    @property
    def s0(self) -> tuple:
        return tuple(i - 1 for i in self.s)

    def swapped(self) -> "Bipartition":
        return Bipartition(self.s, self.r, self.n_total)

    def label(self) -> str:
        return ",".join(map(str, self.r)) + "|" + ",".join(map(str, self.s))

    def __str__(self):
        return self.label()


def parse_bipartition(text: str, n_total: int) -> Bipartition:
    """Parse ``"1,3|2"`` into a :class:`Bipartition` checked against ``n_total``."""
    if text.count("|") != 1:
        raise PartitionError(f"expected exactly one '|' in {text!r}")
    left, right = text.split("|")
    try:
        r = sorted(int(tok) for tok in left.split(",") if tok.strip())
        s = sorted(int(tok) for tok in right.split(",") if tok.strip())
    except ValueError as exc:
        raise PartitionError(f"bad mode index in {text!r}") from exc
    if len(set(r)) != len(r) or len(set(s)) != len(s):
        raise PartitionError(f"repeated index in {text!r}")
    return Bipartition(tuple(r), tuple(s), n_total)


def enumerate_bipartitions(n: int) -> list:
    """All ``2**(n-1) - 1`` unordered bipartitions; mode 1 is always on the r side."""
    if n < 2:
        raise PartitionError(f"need n >= 2, got {n}")
    rest = range(2, n + 1)
    out = []
    for k in range(0, n - 1):
        for extra in combinations(rest, k):
            r = (1,) + extra
            s = tuple(i for i in range(1, n + 1) if i not in r)
            out.append(Bipartition(r, s, n))
    out.sort(key=lambda p: p.r)
    return out


def _check(state: PureState, part: Bipartition):
    if part.n_total != state.n_modes:
        raise ShapeMismatchError(
            f"partition is for {part.n_total} modes, state has {state.n_modes}"
        )


def matricize(state: PureState, part: Bipartition) -> np.ndarray:
    """Rows indexed by the r-modes, columns by the s-modes (row-major in each)."""
    _check(state, part)
    return matricize_array(state.coeffs, part)


def matricize_array(tensor: np.ndarray, part: Bipartition) -> np.ndarray:
    perm = part.r0 + part.s0
    moved = np.transpose(tensor, perm)
    rows = int(np.prod([tensor.shape[i] for i in part.r0]))
    return moved.reshape(rows, -1)


def dematricize(matrix: np.ndarray, part: Bipartition, shape) -> np.ndarray:
    """Inverse of :func:`matricize_array` for a tensor of ``shape``."""
    perm = part.r0 + part.s0
    moved_shape = tuple(shape[i] for i in perm)
    moved = np.asarray(matrix).reshape(moved_shape)
    return np.transpose(moved, np.argsort(perm))
