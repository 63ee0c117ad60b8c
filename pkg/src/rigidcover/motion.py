"""Local unitaries on mode grids, cover identity and motion equivalence.

Kernels act on nodal coefficient values as plain matrices. A kernel ``K``
is unitary for the quadrature inner product when ``K^H W K = W`` with
``W = diag(weights)``; conjugating a standard unitary by ``W^(1/2)`` gives
such a kernel for any weight profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cover import WEIGHT_FLOOR, ConvexRigidCover, build_crc_pair, distance_matrix
from .errors import GridMismatchError, LengthMismatchError, ShapeMismatchError
from .grid import ModeGrid
from .partition import enumerate_bipartitions
from .state import PureState

MOTION_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LocalUnitary:
    """One square kernel per mode."""

    kernels: tuple

    def __post_init__(self):
        kernels = tuple(np.array(k, dtype=np.complex128) for k in self.kernels)
        for i, k in enumerate(kernels):
            if k.ndim != 2 or k.shape[0] != k.shape[1]:
                raise ShapeMismatchError(f"kernel {i} is not square: {k.shape}")
            k.flags.writeable = False
        object.__setattr__(self, "kernels", kernels)

    def __len__(self):
        return len(self.kernels)


def unitarity_residual(kernel: np.ndarray, grid: ModeGrid) -> float:
    """``max |K^H W K - W|`` for the weights of ``grid``."""
    w = np.diag(grid.weights)
    return float(np.max(np.abs(kernel.conj().T @ w @ kernel - w)))


def make_phase_unitary(grid: ModeGrid, phase) -> np.ndarray:
    phase = np.asarray(phase, dtype=float)
    if phase.shape != (grid.count,):
        raise LengthMismatchError(f"need {grid.count} phases, got shape {phase.shape}")
    return np.diag(np.exp(1j * phase))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))[None, :]


def make_random_unitary(grid: ModeGrid, seed: int) -> np.ndarray:
    """Haar unitary conjugated into the weighted inner product, deterministic per seed."""
    q = haar_unitary(grid.count, np.random.default_rng(seed))
    root = np.sqrt(grid.weights)
    return (q / root[:, None]) * root[None, :]


def identity_lu(grids) -> LocalUnitary:
    return LocalUnitary(tuple(np.eye(g.count) for g in grids))


def random_lu(grids, seed: int) -> LocalUnitary:
    """Independent Haar kernels on every mode, seeded from one integer."""
    seeds = np.random.SeedSequence(seed).generate_state(len(grids))
    return LocalUnitary(tuple(make_random_unitary(g, int(s)) for g, s in zip(grids, seeds)))


def random_phase_lu(grids, seed: int) -> LocalUnitary:
    rng = np.random.default_rng(seed)
    return LocalUnitary(
        tuple(make_phase_unitary(g, rng.uniform(0, 2 * np.pi, g.count)) for g in grids)
    )


def inverse_lu(lu: LocalUnitary, grids) -> LocalUnitary:
    """Weighted adjoints ``W^-1 K^H W`` of every kernel."""
    return LocalUnitary(
        tuple((k.conj().T / g.weights[:, None]) * g.weights[None, :] for k, g in zip(lu.kernels, grids))
    )


def apply_lu(state: PureState, lu: LocalUnitary) -> PureState:
    """Contract kernel ``i`` against tensor axis ``i`` for every mode."""
    if len(lu) != state.n_modes:
        raise ShapeMismatchError(f"{len(lu)} kernels for {state.n_modes} modes")
    c = state.coeffs
    for axis, (k, g) in enumerate(zip(lu.kernels, state.modes)):
        if k.shape[0] != g.count:
            raise ShapeMismatchError(f"kernel {axis} has size {k.shape[0]}, grid has {g.count}")
        c = np.moveaxis(np.tensordot(k, c, axes=([1], [axis])), 0, axis)
    return PureState(state.modes, c)


def cover_deviation(a: ConvexRigidCover, b: ConvexRigidCover) -> tuple:
    """``(max |lam_a - lam_b|, max |D_a - D_b| over shared active pairs, masks_equal)``."""
    if a.lam.shape != b.lam.shape or a.rows.shape != b.rows.shape:
        raise ShapeMismatchError(f"cover shapes differ: {a.lam.shape} vs {b.lam.shape}")
    lam_dev = float(np.max(np.abs(a.lam - b.lam)))
    masks_equal = bool(np.array_equal(a.active_mask, b.active_mask))
    da = distance_matrix(a, force=True)
    db = distance_matrix(b, force=True)
    both = ~(np.isnan(da) | np.isnan(db))
    dist_dev = float(np.max(np.abs(da - db)[both], initial=0.0))
    return lam_dev, dist_dev, masks_equal


def crc_identical(a: ConvexRigidCover, b: ConvexRigidCover, tol: float = MOTION_TOL) -> bool:
    """Node-by-node identity of weights and pairwise distances."""
    lam_dev, dist_dev, masks_equal = cover_deviation(a, b)
    return masks_equal and lam_dev <= tol and dist_dev <= tol


def motion_equivalent(
    a: PureState, b: PureState, tol: float = MOTION_TOL, weight_floor: float = WEIGHT_FLOOR
) -> tuple:
    """Compare both covers of every bipartition.

    Returns:
        ``(equivalent, report)`` where the report has one entry per
        bipartition plus the first failing partition and its deviation.
    """
    if a.modes != b.modes:
        raise GridMismatchError("states live on different grids")
    entries = []
    first = None
    for part in enumerate_bipartitions(a.n_modes):
        pa = build_crc_pair(a, part, weight_floor)
        pb = build_crc_pair(b, part, weight_floor)
        entry = {"partition": part.label(), "identical": True, "max_deviation": 0.0}
        for name, ca, cb in (
            ("r_conditioned", pa.cover_r_conditioned, pb.cover_r_conditioned),
            ("s_conditioned", pa.cover_s_conditioned, pb.cover_s_conditioned),
        ):
            lam_dev, dist_dev, masks_equal = cover_deviation(ca, cb)
            ok = masks_equal and lam_dev <= tol and dist_dev <= tol
            entry[name] = {
                "lambda_deviation": lam_dev,
                "distance_deviation": dist_dev,
                "masks_equal": masks_equal,
                "identical": ok,
            }
            entry["identical"] = entry["identical"] and ok
            entry["max_deviation"] = max(entry["max_deviation"], lam_dev, dist_dev)
        if not entry["identical"] and first is None:
            first = entry
        entries.append(entry)
    report = {
        "equivalent": first is None,
        "first_failing_partition": None if first is None else first["partition"],
        "first_failing_deviation": None if first is None else first["max_deviation"],
        "partitions": entries,
    }
    return first is None, report
