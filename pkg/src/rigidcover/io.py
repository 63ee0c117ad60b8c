"""JSON state files, generator specs, LU specs and region strings."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import CoverError, RegionError, ShapeMismatchError
from .grid import ModeGrid
from .motion import LocalUnitary, make_phase_unitary, make_random_unitary
from .state import GaussianSpec, PureState, build_from_tensor, build_gaussian

FORMAT_VERSION = 1


def _complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise CoverError(f"complex entries are [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


def _complex_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise CoverError("quadratic form must be a list of rows")
    return np.array([[_complex(v) for v in row] for row in rows], dtype=np.complex128)


def _pairs(arr: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(arr).ravel()]


def parse_modes(entries) -> tuple:
    if not isinstance(entries, list) or not entries:
        raise CoverError("'modes' must be a non-empty list")
    return tuple(ModeGrid(m["lower"], m["upper"], m["count"]) for m in entries)


def gaussian_from_dict(data: dict) -> GaussianSpec:
    if data.get("type", "gaussian") != "gaussian":
        raise CoverError(f"unknown generator type {data.get('type')!r}")
    linear = data.get("linear")
    return GaussianSpec(
        _complex_matrix(data["quadratic"]),
        None if linear is None else np.array([_complex(v) for v in linear]),
    )


def gaussian_to_dict(spec: GaussianSpec) -> dict:
    n = spec.n_modes
    return {
        "type": "gaussian",
        "quadratic": [[[float(z.real), float(z.imag)] for z in row] for row in spec.quadratic],
        "linear": _pairs(spec.linear) if n else [],
    }


def _read_raw(header: dict, base: Path, grids) -> np.ndarray:
    shape = tuple(g.count for g in grids)
    expected = int(np.prod(shape))
    if "coefficients" in header:
        flat = [_complex(v) for v in header["coefficients"]]
        if len(flat) != expected:
            raise ShapeMismatchError(f"{len(flat)} coefficients given, grid needs {expected}")
        return np.array(flat, dtype=np.complex128).reshape(shape)
    if "data_file" in header:
        count = int(header.get("element_count", -1))
        if count != expected:
            raise ShapeMismatchError(f"element_count {count} != grid size {expected}")
        raw = np.fromfile(base / header["data_file"], dtype="<f8")
        if raw.size != 2 * expected:
            raise ShapeMismatchError(
                f"sidecar holds {raw.size // 2} complex values, expected {expected}"
            )
        return (raw[0::2] + 1j * raw[1::2]).reshape(shape)
    raise CoverError("state needs 'coefficients', 'data_file' or 'generator'")


def load_json(path, allow_list: bool = False):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not (isinstance(data, dict) or (allow_list and isinstance(data, list))):
        raise CoverError(f"{path}: top level must be a JSON object")
    return data


def state_from_spec(path) -> tuple:
    """Build a state from a generator spec or raw tensor file.

    Returns ``(state, generator_or_None)``.
    """
    data = load_json(path)
    grids = parse_modes(data.get("modes"))
    if "generator" in data:
        spec = gaussian_from_dict(data["generator"])
        return build_gaussian(spec, grids), spec
    raw = _read_raw(data, Path(path).parent, grids)
    return build_from_tensor(grids, raw), None


def read_state(path) -> PureState:
    """Load a state file. The stored coefficients are renormalized on load."""
    data = load_json(path)
    grids = parse_modes(data.get("modes"))
    if "coefficients" not in data and "data_file" not in data and "generator" in data:
        return build_gaussian(gaussian_from_dict(data["generator"]), grids)
    return build_from_tensor(grids, _read_raw(data, Path(path).parent, grids))


def write_state(path, state: PureState, generator: GaussianSpec | None = None, binary=False):
    path = Path(path)
    header = {"version": FORMAT_VERSION, "modes": [g.to_dict() for g in state.modes]}
    if generator is not None:
        header["generator"] = gaussian_to_dict(generator)
    if binary:
        side = path.with_suffix(".bin")
        inter = np.empty(2 * state.coeffs.size, dtype="<f8")
        inter[0::2] = state.coeffs.real.ravel()
        inter[1::2] = state.coeffs.imag.ravel()
        inter.tofile(side)
        header["data_file"] = side.name
        header["element_count"] = int(state.coeffs.size)
    else:
        header["coefficients"] = _pairs(state.coeffs)
    path.write_text(json.dumps(header, indent=1) + "\n", encoding="utf-8")


def lu_from_spec(data, grids, default_seed: int = 0) -> LocalUnitary:
    """Kernels from ``[{"type": "phase"|"random"|"identity", ...}, ...]``."""
    entries = data["modes"] if isinstance(data, dict) else data
    if not isinstance(entries, list) or len(entries) != len(grids):
        raise CoverError(f"LU spec must list one entry per mode ({len(grids)})")
    kernels = []
    for i, (entry, grid) in enumerate(zip(entries, grids)):
        kind = entry.get("type")
        if kind == "identity":
            kernels.append(np.eye(grid.count))
        elif kind == "phase":
            kernels.append(make_phase_unitary(grid, entry["values"]))
        elif kind == "random":
            kernels.append(make_random_unitary(grid, int(entry.get("seed", default_seed + i))))
        else:
            raise CoverError(f"mode {i + 1}: unknown LU type {kind!r}")
    return LocalUnitary(tuple(kernels))


def parse_region(tokens, grids) -> tuple | None:
    """``["full"]`` or one ``"a:b"``/``"full"`` token per mode."""
    if not tokens or list(tokens) == ["full"]:
        return None
    if len(tokens) != len(grids):
        raise RegionError(f"{len(tokens)} region tokens for {len(grids)} modes")
    out = []
    for tok, g in zip(tokens, grids):
        if tok == "full":
            out.append((g.lower, g.upper))
            continue
        try:
            a, b = (float(x) for x in tok.split(":"))
        except ValueError as exc:
            raise RegionError(f"bad interval {tok!r}; expected a:b") from exc
        out.append((a, b))
    return tuple(out)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
