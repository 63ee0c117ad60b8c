"""Pure states as complex coefficient tensors over a product of mode grids."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GridMismatchError,
    NotNormalizedError,
    NotPositiveDefiniteError,
    ShapeMismatchError,
    TruncationWarning,
    ZeroTensorError,
)
from .grid import ModeGrid, product_weights

NORM_TOL = 1e-10
EDGE_DECAY = 1e-8


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm coefficient tensor ``c`` over ``modes``.

    Coefficients are nodal values of the wavefunction; quadrature weights are
    applied explicitly by every inner product. Use :func:`build_from_tensor`
    to normalize arbitrary data.
    """

    modes: tuple
    coeffs: np.ndarray

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes or not all(isinstance(m, ModeGrid) for m in modes):
            raise ShapeMismatchError("modes must be a non-empty sequence of ModeGrid")
        coeffs = np.array(self.coeffs, dtype=np.complex128)
        shape = tuple(m.count for m in modes)
        if coeffs.shape != shape:
            raise ShapeMismatchError(f"coefficient shape {coeffs.shape} != grid shape {shape}")
        norm = _discrete_norm_sq(coeffs, modes)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalizedError(f"discrete norm^2 is {norm!r}, expected 1")
        coeffs.flags.writeable = False
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape

    @property
    def weights(self) -> np.ndarray:
        return product_weights(self.modes)

    def norm_sq(self) -> float:
        return _discrete_norm_sq(self.coeffs, self.modes)


@dataclass(frozen=True)
class GaussianSpec:
    """Generator ``c(mu) ~ exp(-1/2 mu^T A mu + b^T mu)``."""

    quadratic: np.ndarray
    linear: np.ndarray = field(default=None)

    def __post_init__(self):
        a = np.array(self.quadratic, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeMismatchError(f"quadratic form must be square, got shape {a.shape}")
        n = a.shape[0]
        b = np.zeros(n, dtype=np.complex128) if self.linear is None else np.array(
            self.linear, dtype=np.complex128
        )
        if b.shape != (n,):
            raise ShapeMismatchError(f"linear term must have length {n}, got shape {b.shape}")
        if np.max(np.abs(a - a.T), initial=0.0) > 1e-12:
            raise NotPositiveDefiniteError("quadratic form is not symmetric")
        eig = np.linalg.eigvalsh(a.real)
        if eig[0] <= 0:
            raise NotPositiveDefiniteError(
                f"real part of quadratic form has non-positive eigenvalue {eig[0]:.6g}"
            )
        object.__setattr__(self, "quadratic", a)
        object.__setattr__(self, "linear", b)

    @property
    def n_modes(self) -> int:
        return self.quadratic.shape[0]


def _discrete_norm_sq(coeffs, modes) -> float:
    return float(np.sum(product_weights(modes) * np.abs(coeffs) ** 2))


def _normalized(grids, raw) -> np.ndarray:
    norm = _discrete_norm_sq(raw, grids)
    if not norm >= 1e-14:
        raise ZeroTensorError(f"tensor norm^2 {norm:.3g} is too small to normalize")
    out = raw / np.sqrt(norm)
    # a second pass takes the residual from ~1e-16 relative down to rounding
    return out / np.sqrt(_discrete_norm_sq(out, grids))


def build_from_tensor(grids, raw) -> PureState:
    """Normalize ``raw`` to unit discrete norm on the product of ``grids``."""
    grids = tuple(grids)
    raw = np.asarray(raw, dtype=np.complex128)
    shape = tuple(g.count for g in grids)
    if raw.shape != shape:
        raise ShapeMismatchError(f"tensor shape {raw.shape} != grid shape {shape}")
    return PureState(grids, _normalized(grids, raw))


def edge_ratio(coeffs) -> float:
    """Largest boundary-face magnitude relative to the overall peak."""
    mag = np.abs(coeffs)
    peak = mag.max()
    if peak == 0:
        return 0.0
    edge = 0.0
    for axis in range(mag.ndim):
        edge = max(edge, np.take(mag, 0, axis=axis).max(), np.take(mag, -1, axis=axis).max())
    return float(edge / peak)


def build_gaussian(spec: GaussianSpec, grids) -> PureState:
    """Sample a Gaussian generator at every node and normalize.

    Emits :class:`TruncationWarning` when the samples on the grid boundary
    exceed ``1e-8`` of the peak magnitude.
    """
    grids = tuple(grids)
    if len(grids) != spec.n_modes:
        raise ShapeMismatchError(f"spec has {spec.n_modes} modes but {len(grids)} grids given")
    axes = np.meshgrid(*[g.points for g in grids], indexing="ij")
    mu = np.stack(axes, axis=-1)
    exponent = -0.5 * np.einsum("...i,ij,...j->...", mu, spec.quadratic, mu) + mu @ spec.linear
    exponent = exponent - exponent.real.max()
    raw = np.exp(exponent)
    ratio = edge_ratio(raw)
    if ratio > EDGE_DECAY:
        warnings.warn(
            f"state has not decayed at the grid edges (edge/peak = {ratio:.3g})",
            TruncationWarning,
            stacklevel=2,
        )
    return build_from_tensor(grids, raw)


def product_state(factors, grids) -> PureState:
    """Normalized outer product of per-mode (or per-block) coefficient arrays."""
    raw = np.ones((), dtype=np.complex128)
    for f in factors:
        raw = np.multiply.outer(raw, np.asarray(f, dtype=np.complex128))
    return build_from_tensor(grids, raw)


def _check_same_grids(a: PureState, b: PureState):
    if a.modes != b.modes:
        raise GridMismatchError("states live on different grids")


def overlap(a: PureState, b: PureState) -> complex:
    """Weighted inner product ``sum (prod w) a conj(b)``."""
    _check_same_grids(a, b)
    return complex(np.sum(a.weights * a.coeffs * np.conj(b.coeffs)))


def partial_trace(state: PureState, keep) -> np.ndarray:
    """Reduced density kernel over the 0-based modes ``keep`` by direct contraction.

    Entry ``[a, a']`` is ``sum_b w_b c[a, b] conj(c[a', b])`` with the traced
    indices ``b`` weighted, returned as a matrix over the row-major multi-index
    of ``keep``. This is deliberately written without reference to covers.
    """
    keep = list(keep)
    n = state.n_modes
    traced = [i for i in range(n) if i not in keep]
    letters = "abcdefghijklmnopqrstuvwxyz"
    left = [letters[i] for i in range(n)]
    right = [letters[i].upper() if i in keep else letters[i] for i in range(n)]
    out = "".join(letters[i] for i in keep) + "".join(letters[i].upper() for i in keep)
    tw = product_weights([state.modes[i] for i in traced])
    tw_sub = "".join(letters[i] for i in traced)
    expr = f"{''.join(left)},{''.join(right)},{tw_sub}->{out}"
    rho = np.einsum(expr, state.coeffs, np.conj(state.coeffs), tw)
    dim = int(np.prod([state.modes[i].count for i in keep]))
    return rho.reshape(dim, dim)
