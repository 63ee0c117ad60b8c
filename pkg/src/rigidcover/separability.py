"""Partial and full separability from the shrink-to-point test.

Every verdict is cross-checked against the Schmidt spectrum of the
weight-absorbed matricization, which decides the same question by an
unrelated route.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cover import (
    WEIGHT_FLOOR,
    ConvexRigidCover,
    build_crc_pair,
    distance_matrix,
    pure_distances,
)
from .errors import AllInactiveError, BorderlineWarning, CorollaryWarning, NotSeparableError
from .grid import product_weights
from .partition import Bipartition, dematricize, enumerate_bipartitions, matricize
from .state import PureState

SHRINK_TOL = 1e-6
ORACLE_SEPARABLE = 1e-6
ORACLE_ENTANGLED = 1e-3


@dataclass(frozen=True)
class SeparabilityVerdict:
    partition: Bipartition
    separable: bool
    max_pair_distance: float
    oracle_sigma_ratio: float
    agreement: bool
    cover_verdicts: tuple = field(default=(), compare=False)
    cover_distances: tuple = field(default=(), compare=False)
    oracle_verdict: str = field(default="", compare=False)

    @property
    def corollary_consistent(self) -> bool:
        return len(set(self.cover_verdicts)) <= 1

    def to_dict(self) -> dict:
        return {
            "partition": self.partition.label(),
            "separable": bool(self.separable),
            "max_pair_distance": float(self.max_pair_distance),
            "oracle_sigma_ratio": float(self.oracle_sigma_ratio),
            "agreement": bool(self.agreement),
        }


def _pairwise_max(rows: np.ndarray, weights: np.ndarray) -> float:
    best = 0.0
    for a in range(len(rows) - 1):
        best = max(best, float(pure_distances(rows[a], rows[a + 1 :], weights).max()))
    return best


def shrink_to_point(
    cover: ConvexRigidCover, shrink_tol: float = SHRINK_TOL, all_pairs: bool = False
) -> tuple:
    """Decide whether ``cover`` collapses to a single pure state.

    Distances are measured from the heaviest active row. If none exceeds
    ``shrink_tol / 2`` the triangle inequality bounds every pairwise
    distance by ``shrink_tol``. Otherwise the reported distance is the
    exact pairwise maximum over the reference and the offending rows.

    Returns:
        ``(shrinks, max_distance)``.
    """
    idx = cover.active_indices
    if idx.size == 0:
        raise AllInactiveError("cover has no active rows")
    rows = cover.rows[idx]
    wts = cover.row_weights
    if all_pairs:
        maxd = float(np.nanmax(distance_matrix(cover, force=True))) if idx.size > 1 else 0.0
        return maxd <= shrink_tol, maxd
    ref = int(np.argmax(cover.lam.ravel()[idx]))
    d_ref = pure_distances(rows[ref], rows, wts)
    maxd = float(d_ref.max())
    if maxd <= shrink_tol / 2:
        return True, maxd
    offending = np.flatnonzero(d_ref > shrink_tol / 2)
    subset = np.concatenate(([ref], offending))
    maxd = max(maxd, _pairwise_max(rows[subset], wts))
    if maxd <= shrink_tol:
        # borderline: pairs involving non-offending rows may still exceed the bound
        maxd = _pairwise_max(rows, wts)
    return maxd <= shrink_tol, maxd


def schmidt_oracle(state: PureState, part: Bipartition) -> np.ndarray:
    """Descending Schmidt coefficients of ``state`` across ``part``."""
    mat = matricize(state, part)
    wr = product_weights([state.modes[i] for i in part.r0]).ravel()
    ws = product_weights([state.modes[i] for i in part.s0]).ravel()
    scaled = np.sqrt(wr)[:, None] * mat * np.sqrt(ws)[None, :]
    return np.linalg.svd(scaled, compute_uv=False)


def sigma_ratio(sigma: np.ndarray) -> float:
    if sigma.size < 2 or sigma[0] == 0:
        return 0.0
    return float(min(sigma[1] / sigma[0], 1.0))


def oracle_verdict(ratio: float) -> str:
    if ratio <= ORACLE_SEPARABLE:
        return "separable"
    if ratio > ORACLE_ENTANGLED:
        return "entangled"
    return "borderline"


def is_partially_separable(
    state: PureState,
    part: Bipartition,
    shrink_tol: float = SHRINK_TOL,
    weight_floor: float = WEIGHT_FLOOR,
) -> SeparabilityVerdict:
    """Shrink test on both covers of ``part``, cross-checked by the Schmidt oracle.

    A disagreement between the two covers is reported with
    :class:`CorollaryWarning` and the state is then called inseparable.
    """
    pair = build_crc_pair(state, part, weight_floor)
    results = [shrink_to_point(cover, shrink_tol) for cover in pair]
    verdicts = tuple(ok for ok, _ in results)
    dists = tuple(d for _, d in results)
    if verdicts[0] != verdicts[1]:
        warnings.warn(
            f"covers of {part} disagree (distances {dists[0]:.3g}, {dists[1]:.3g}); "
            f"shrink_tol={shrink_tol:g} is likely miscalibrated for this state",
            CorollaryWarning,
            stacklevel=2,
        )
    ratio = sigma_ratio(schmidt_oracle(state, part))
    verdict = oracle_verdict(ratio)
    if verdict == "borderline":
        warnings.warn(
            f"Schmidt ratio {ratio:.3g} for {part} lies between "
            f"{ORACLE_SEPARABLE:g} and {ORACLE_ENTANGLED:g}",
            BorderlineWarning,
            stacklevel=2,
        )
    separable = all(verdicts)
    return SeparabilityVerdict(
        partition=part,
        separable=separable,
        max_pair_distance=max(dists),
        oracle_sigma_ratio=ratio,
        agreement=(verdict == "separable") == separable and verdict != "borderline",
        cover_verdicts=verdicts,
        cover_distances=dists,
        oracle_verdict=verdict,
    )


def is_fully_separable(
    state: PureState, shrink_tol: float = SHRINK_TOL, threads: int | None = None
) -> tuple:
    """Full separability: every bipartition must be separable.

    Returns:
        ``(separable, verdicts)`` with one verdict per bipartition in
        enumeration order.
    """
    parts = enumerate_bipartitions(state.n_modes)

    def run(part):
        return is_partially_separable(state, part, shrink_tol)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            verdicts = list(pool.map(run, parts))
    else:
        verdicts = [run(p) for p in parts]
    return all(v.separable for v in verdicts), verdicts


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    out = vec * (np.abs(vec[k]) / vec[k])
    out[k] = abs(vec[k])
    return out


def _reference_row(cover: ConvexRigidCover) -> np.ndarray:
    idx = cover.active_indices
    return cover.rows[idx[int(np.argmax(cover.lam.ravel()[idx]))]]


def factor_state(state: PureState, part: Bipartition, shrink_tol: float = SHRINK_TOL) -> tuple:
    """Split a separable state into its r-mode and s-mode factors.

    Each factor is the heaviest conditional state of the cover living on
    its modes, with the largest-magnitude coefficient made real positive.

    Raises:
        NotSeparableError: if the shrink test fails, or the factors do not
            reproduce the state to within ``10 * shrink_tol``.
    """
    verdict = is_partially_separable(state, part, shrink_tol)
    if not verdict.separable:
        raise NotSeparableError(
            f"state is not separable across {part} "
            f"(max distance {verdict.max_pair_distance:.3g})"
        )
    pair = build_crc_pair(state, part)
    r_grids = tuple(state.modes[i] for i in part.r0)
    s_grids = tuple(state.modes[i] for i in part.s0)
    e = _fix_phase(_reference_row(pair.cover_r_conditioned))
    f = _fix_phase(_reference_row(pair.cover_s_conditioned))
    fr = PureState(r_grids, e.reshape([g.count for g in r_grids]))
    fs = PureState(s_grids, f.reshape([g.count for g in s_grids]))
    residual = reconstruction_residual(state, part, fr, fs)
    if residual > 10 * shrink_tol:
        raise NotSeparableError(f"factors reproduce the state only to {residual:.3g}")
    return fr, fs


def tensor_product(part: Bipartition, factor_r: PureState, factor_s: PureState) -> np.ndarray:
    """Coefficient tensor of ``factor_r (x) factor_s`` in natural mode order."""
    mat = np.outer(factor_r.coeffs.ravel(), factor_s.coeffs.ravel())
    shape = [0] * part.n_total
    for i, g in zip(part.r0, factor_r.modes):
        shape[i] = g.count
    for i, g in zip(part.s0, factor_s.modes):
        shape[i] = g.count
    return dematricize(mat, part, shape)


def reconstruction_residual(
    state: PureState, part: Bipartition, factor_r: PureState, factor_s: PureState
) -> float:
    """Max-norm gap between ``state`` and the factor product after global phase alignment."""
    recon = tensor_product(part, factor_r, factor_s)
    inner = np.sum(state.weights * state.coeffs * np.conj(recon))
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.max(np.abs(state.coeffs - phase * recon)))
