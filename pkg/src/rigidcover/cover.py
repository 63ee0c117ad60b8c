"""Convex rigid covers: conditional pure-state families and their weights.

For a bipartition ``r | s`` the state is sliced at every node of one side
(the *conditioning* side). Each slice, divided by its norm, is a pure state
over the other side; the squared norms form the weight density ``lam``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import AllInactiveError, CoverError, NotNormalizedError, UndefinedConditionalError
from .grid import product_weights
from .partition import Bipartition, matricize
from .state import PureState

WEIGHT_FLOOR = 1e-12
MAX_DENSE_NODES = 4096


class Side(enum.Enum):
    """Which side of the bipartition supplies the conditioning parameters."""

    R = "r"
    S = "s"

    @property
    def other(self) -> "Side":
        return Side.S if self is Side.R else Side.R


@dataclass(frozen=True, eq=False)
class ConvexRigidCover:
    """One cover of a pair.

    ``lam`` and ``active_mask`` are shaped like the conditioning grid;
    ``rows`` holds one normalized conditional vector per conditioning node
    (row-major node order, zero rows where inactive), each over the row-major
    multi-index of the opposite side.
    """

    partition: Bipartition
    conditioning_side: Side
    conditioning_grids: tuple
    row_grids: tuple
    lam: np.ndarray
    rows: np.ndarray
    active_mask: np.ndarray
    weight_floor: float

    @property
    def weights(self) -> np.ndarray:
        return self.lam

    @property
    def conditional_coeffs(self) -> np.ndarray:
        return self.rows

    @property
    def node_weights(self) -> np.ndarray:
        """Quadrature weight of each conditioning node, flattened."""
        return product_weights(self.conditioning_grids).ravel()

    @property
    def row_weights(self) -> np.ndarray:
        return product_weights(self.row_grids).ravel()

    @property
    def active_indices(self) -> np.ndarray:
        return np.flatnonzero(self.active_mask.ravel())

    @property
    def n_nodes(self) -> int:
        return self.lam.size

    def total_weight(self) -> float:
        return float(np.sum(self.node_weights * self.lam.ravel()))

    def distance(self, a: int, b: int) -> float:
        """Distance between two active rows given by flat node index."""
        active = self.active_mask.ravel()
        if not (active[a] and active[b]):
            raise UndefinedConditionalError(f"node {a} or {b} is inactive")
        return float(pure_distances(self.rows[a], self.rows[b][None, :], self.row_weights)[0])


@dataclass(frozen=True, eq=False)
class CrcPair:
    """Both covers of a bipartition.

    ``cover_r_conditioned`` has rows over the r-modes and is parameterized
    by the s-mode values; ``cover_s_conditioned`` is the mirror image.
    """

    cover_r_conditioned: ConvexRigidCover
    cover_s_conditioned: ConvexRigidCover

    @property
    def partition(self) -> Bipartition:
        return self.cover_r_conditioned.partition

    def __iter__(self):
        yield self.cover_r_conditioned
        yield self.cover_s_conditioned


def _sides(state: PureState, part: Bipartition, side: Side):
    """Return (conditioning grids, row grids, matrix with conditioning nodes as rows)."""
    mat = matricize(state, part)
    r_grids = tuple(state.modes[i] for i in part.r0)
    s_grids = tuple(state.modes[i] for i in part.s0)
    if side is Side.R:
        return r_grids, s_grids, mat
    return s_grids, r_grids, mat.T


def marginal_weight(state: PureState, part: Bipartition, side: Side) -> np.ndarray:
    """Weight density ``lam`` at each conditioning node (shaped like that grid).

    ``lam(node) = sum over the opposite nodes of (prod w) |c|^2``.
    """
    cond, other, mat = _sides(state, part, side)
    lam = np.abs(mat) ** 2 @ product_weights(other).ravel()
    return lam.reshape(tuple(g.count for g in cond))


def conditional_state(
    state: PureState,
    part: Bipartition,
    side: Side,
    node,
    weight_floor: float = WEIGHT_FLOOR,
) -> np.ndarray:
    """Normalized slice of the state at conditioning ``node`` (0-based multi-index)."""
    cond, other, mat = _sides(state, part, side)
    shape = tuple(g.count for g in cond)
    node = tuple(np.atleast_1d(node))
    flat = np.ravel_multi_index(node, shape)
    row = mat[flat]
    lam = float(np.sum(product_weights(other).ravel() * np.abs(row) ** 2))
    if lam < weight_floor:
        raise UndefinedConditionalError(
            f"weight {lam:.3g} at node {node} is below the floor {weight_floor:g}"
        )
    return row / np.sqrt(lam)


def build_cover(
    state: PureState, part: Bipartition, side: Side, weight_floor: float = WEIGHT_FLOOR
) -> ConvexRigidCover:
    cond, other, mat = _sides(state, part, side)
    lam = np.abs(mat) ** 2 @ product_weights(other).ravel()
    active = lam >= weight_floor
    rows = np.zeros_like(mat)
    rows[active] = mat[active] / np.sqrt(lam[active])[:, None]
    shape = tuple(g.count for g in cond)
    lam = lam.reshape(shape)
    active = active.reshape(shape)
    rows.flags.writeable = False
    lam.flags.writeable = False
    active.flags.writeable = False
    return ConvexRigidCover(part, side, cond, other, lam, rows, active, float(weight_floor))


def build_crc_pair(
    state: PureState, part: Bipartition, weight_floor: float = WEIGHT_FLOOR
) -> CrcPair:
    """Build both covers of ``part``.

    Raises:
        AllInactiveError: if every conditioning node of either cover has
            weight below ``weight_floor``.
    """
    pair = CrcPair(
        build_cover(state, part, Side.S, weight_floor),
        build_cover(state, part, Side.R, weight_floor),
    )
    for cover in pair:
        if not cover.active_mask.any():
            raise AllInactiveError(
                f"no conditioning node of {part} ({cover.conditioning_side.value}) "
                f"carries weight above {weight_floor:g}"
            )
    return pair


def pure_distances(v: np.ndarray, others: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """H-S distances between ``|v><v|`` and each ``|w><w|`` in ``others``.

    Evaluates ``sqrt(2 - 2|<v,w>|^2)`` in the cancellation-free form
    ``(1 + |<v,w>|) * min_theta ||v - e^{i theta} w||^2`` so that coincident
    states give distances at rounding level rather than ``~1e-8``.
    """
    others = np.atleast_2d(others)
    ov = others.conj() @ (weights * v)
    mag = np.abs(ov)
    phase = np.where(mag > 0, ov / np.where(mag > 0, mag, 1.0), 1.0)
    diff = v[None, :] - phase[:, None] * others
    gap = np.abs(diff) ** 2 @ weights
    return np.sqrt(np.maximum((1.0 + np.minimum(mag, 1.0)) * gap, 0.0))


def hs_distance(v, w, grids) -> float:
    """H-S distance between the pure kernels ``|v><v|`` and ``|w><w|``.

    ``v`` and ``w`` are coefficient vectors over the product of ``grids``
    (row-major). Both must have unit weighted norm to within ``1e-6``.
    """
    weights = product_weights(tuple(grids)).ravel()
    v = np.asarray(v, dtype=np.complex128).ravel()
    w = np.asarray(w, dtype=np.complex128).ravel()
    if v.shape != weights.shape or w.shape != weights.shape:
        raise CoverError(f"vectors must have length {weights.size}")
    for name, x in (("v", v), ("w", w)):
        norm = float(np.sum(weights * np.abs(x) ** 2))
        if abs(norm - 1.0) > 1e-6:
            raise NotNormalizedError(f"{name} has weighted norm^2 {norm:.9g}")
    return float(pure_distances(v, w[None, :], weights)[0])


def hs_distance_direct(v, w, weights) -> float:
    """Weighted Frobenius norm of ``|v><v| - |w><w|``, built explicitly."""
    v = np.asarray(v, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    diff = np.outer(v, v.conj()) - np.outer(w, w.conj())
    return float(np.sqrt(np.sum(np.outer(weights, weights) * np.abs(diff) ** 2)))


def distance_matrix(cover: ConvexRigidCover, force: bool = False) -> np.ndarray:
    """Pairwise distances between all conditioning nodes; NaN marks inactive nodes."""
    m = cover.n_nodes
    if m > MAX_DENSE_NODES and not force:
        raise CoverError(
            f"{m} conditioning nodes exceed {MAX_DENSE_NODES}; use ConvexRigidCover.distance"
        )
    idx = cover.active_indices
    rows = cover.rows[idx]
    wts = cover.row_weights
    sub = np.zeros((idx.size, idx.size))
    for a in range(idx.size - 1):
        d = pure_distances(rows[a], rows[a + 1 :], wts)
        sub[a, a + 1 :] = d
        sub[a + 1 :, a] = d
    out = np.full((m, m), np.nan)
    out[np.ix_(idx, idx)] = sub
    return out


def cover_centroid(state: PureState, cover: ConvexRigidCover) -> np.ndarray:
    """Weight-averaged kernel ``sum_nodes w lam |phi><phi|`` over the row side.

    Inactive nodes are left out; their total contribution is bounded by the
    weight floor.
    """
    expected = tuple(g.count for g in cover.conditioning_grids + cover.row_grids)
    got = tuple(sorted(expected)) == tuple(sorted(state.shape))
    if not got or state.n_modes != cover.partition.n_total:
        raise CoverError("cover was not built from a state of this shape")
    idx = cover.active_indices
    t = cover.node_weights[idx] * cover.lam.ravel()[idx]
    rows = cover.rows[idx]
    rho = rows.T @ (t[:, None] * rows.conj())
    return 0.5 * (rho + rho.conj().T)


def operator_spectrum(kernel: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Eigenvalues (descending) of the integral operator with nodal ``kernel``."""
    root = np.sqrt(weights)
    mat = root[:, None] * kernel * root[None, :]
    return np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[::-1]
