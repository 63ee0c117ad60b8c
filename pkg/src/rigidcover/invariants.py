"""Area pair of the two cover surfaces over a box region.

The surface traced by the conditional kernels ``rho(mu)`` has tangent
vectors ``d rho / d mu_i``; its measure is ``sqrt(det G)`` with the Gram
matrix ``G_ij = <d_i rho, d_j rho>``. Tangents come from finite differences
on the conditioning grid. Because a derivative stencil has coefficients
summing to zero,

    <sum_a alpha_a rho_a, sum_b beta_b rho_b> = -1/2 sum_ab alpha_a beta_b d(rho_a, rho_b)^2

so the Gram matrix needs only pairwise distances, never the kernels.
For one conditioning mode the measure is the arc length ``int ||d rho||``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cover import WEIGHT_FLOOR, Side, build_cover
from .errors import DegenerateGridError, NumericalHealthWarning, RegionError
from .grid import ModeGrid
from .partition import Bipartition
from .state import PureState

_CENTRAL = (np.array([-1, 0, 1]), np.array([-0.5, 0.0, 0.5]))
_FORWARD = (np.array([0, 1, 2]), np.array([-1.5, 2.0, -0.5]))
_BACKWARD = (np.array([0, -1, -2]), np.array([1.5, -2.0, 0.5]))


@dataclass(frozen=True)
class AreaResult:
    area: float
    excluded_measure: float
    one_sided: bool
    min_gram_eigenvalue: float
    resolution: tuple


@dataclass(frozen=True)
class AreaPair:
    partition: Bipartition
    area_r_surface: float
    area_s_surface: float
    region: tuple
    details: tuple = field(default=(), compare=False)

    def to_dict(self) -> dict:
        r, s = self.details if self.details else (None, None)
        out = {
            "partition": self.partition.label(),
            "area_r_surface": self.area_r_surface,
            "area_s_surface": self.area_s_surface,
            "region": [list(iv) for iv in self.region],
        }
        if r is not None:
            out["excluded_measure"] = [r.excluded_measure, s.excluded_measure]
            out["one_sided_boundary"] = [r.one_sided, s.one_sided]
            out["resolution"] = [list(r.resolution), list(s.resolution)]
        return out


def full_region(state: PureState) -> tuple:
    return tuple((g.lower, g.upper) for g in state.modes)


def check_region(state: PureState, region) -> tuple:
    """Validate one ``(a, b)`` interval per mode; ``None`` means the full grid."""
    if region is None:
        return full_region(state)
    region = tuple((float(a), float(b)) for a, b in region)
    if len(region) != state.n_modes:
        raise RegionError(f"region has {len(region)} intervals for {state.n_modes} modes")
    for i, ((a, b), g) in enumerate(zip(region, state.modes)):
        slack = 1e-12 * (g.upper - g.lower)
        if not a < b:
            raise RegionError(f"mode {i + 1}: empty interval ({a}, {b})")
        if a < g.lower - slack or b > g.upper + slack:
            raise RegionError(
                f"mode {i + 1}: interval ({a}, {b}) leaves the grid ({g.lower}, {g.upper})"
            )
    return region


def _cell_overlap(grid: ModeGrid, a: float, b: float) -> np.ndarray:
    edges = grid.cell_edges()
    return np.clip(np.minimum(edges[1:], b) - np.maximum(edges[:-1], a), 0.0, None)


def _paired_sq_distances(x: np.ndarray, y: np.ndarray, weights: np.ndarray) -> np.ndarray:
    ov = np.sum(weights * x * y.conj(), axis=1)
    mag = np.abs(ov)
    phase = np.where(mag > 0, ov / np.where(mag > 0, mag, 1.0), 1.0)
    gap = np.abs(x - phase[:, None] * y) ** 2 @ weights
    return np.maximum((1.0 + np.minimum(mag, 1.0)) * gap, 0.0)


def _stencils(nodes: np.ndarray, count: int, h: float):
    """Per-node stencil indices and coefficients along one axis."""
    idx = np.empty((nodes.size, 3), dtype=int)
    coef = np.empty((nodes.size, 3))
    for n, k in enumerate(nodes):
        offsets, c = _FORWARD if k == 0 else _BACKWARD if k == count - 1 else _CENTRAL
        idx[n] = k + offsets
        coef[n] = c / h
    return idx, coef


def cover_area_details(
    state: PureState,
    part: Bipartition,
    side: Side,
    region=None,
    weight_floor: float = WEIGHT_FLOOR,
) -> AreaResult:
    """Surface measure of the cover parameterized by ``side`` over ``region``."""
    region = check_region(state, region)
    cover = build_cover(state, part, side, weight_floor)
    modes = part.r0 if side is Side.R else part.s0
    grids = cover.conditioning_grids
    shape = tuple(g.count for g in grids)
    for m, g in zip(modes, grids):
        if g.count < 3:
            raise DegenerateGridError(f"mode {m + 1} has {g.count} nodes; need >= 3")
    axis_w = [_cell_overlap(g, *region[m]) for m, g in zip(modes, grids)]
    node_w = axis_w[0]
    for w in axis_w[1:]:
        node_w = np.multiply.outer(node_w, w)
    node_w = node_w.ravel()
    nodes = np.flatnonzero(node_w > 0)
    multi = np.array(np.unravel_index(nodes, shape))
    one_sided = bool(np.any((multi == 0) | (multi == np.array(shape)[:, None] - 1)))

    active = cover.active_mask.ravel()
    flat_idx, coefs = [], []
    ok = active[nodes].copy()
    for axis, g in enumerate(grids):
        idx, coef = _stencils(multi[axis], g.count, g.spacing)
        full = np.repeat(multi[:, :, None], 3, axis=2)
        full[axis] = idx
        flat = np.ravel_multi_index(tuple(full), shape)
        used = coef != 0
        ok &= np.all(active[flat] | ~used, axis=1)
        flat_idx.append(flat)
        coefs.append(coef)

    rows, wts = cover.rows, cover.row_weights
    sel = np.flatnonzero(ok)
    p = len(grids)
    gram = np.zeros((sel.size, p, p))
    for i in range(p):
        for j in range(i, p):
            acc = np.zeros(sel.size)
            for a in range(3):
                for b in range(3):
                    ca = coefs[i][sel, a] * coefs[j][sel, b]
                    live = ca != 0
                    if not live.any():
                        continue
                    d2 = _paired_sq_distances(
                        rows[flat_idx[i][sel[live], a]], rows[flat_idx[j][sel[live], b]], wts
                    )
                    acc[live] += ca[live] * d2
            gram[:, i, j] = gram[:, j, i] = -0.5 * acc
    if sel.size:
        det = np.linalg.det(gram)
        min_eig = float(np.linalg.eigvalsh(gram).min())
    else:
        det = np.zeros(0)
        min_eig = 0.0
    if det.size and det.min() < -1e-8:
        warnings.warn(
            f"Gram determinant {det.min():.3g} is negative beyond rounding",
            NumericalHealthWarning,
            stacklevel=2,
        )
    integrand = np.sqrt(np.maximum(det, 0.0))
    area = math.fsum(node_w[nodes[sel]] * integrand)
    excluded = math.fsum(node_w[nodes[~ok]])
    return AreaResult(area, excluded, one_sided, min_eig, shape)


def cover_area(state: PureState, part: Bipartition, side: Side, region=None) -> float:
    """Area of the cover surface parameterized by the ``side`` modes."""
    return cover_area_details(state, part, side, region).area


def area_pair(state: PureState, part: Bipartition, region=None) -> AreaPair:
    """Both cover areas, r-parameterized first. The pair is never symmetrized."""
    region = check_region(state, region)
    r = cover_area_details(state, part, Side.R, region)
    s = cover_area_details(state, part, Side.S, region)
    return AreaPair(part, r.area, s.area, region, (r, s))
