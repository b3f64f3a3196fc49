"""Field snapshot files (QSF1 format).

Layout (little endian):
    bytes 0..3   magic "QSF1"
    int32        nx
    int32        ny
    float64      lx
    float64      ly
    int32        ncomp
    float64      time
    float64[ncomp*nx*ny]   row-major samples, component index outermost

A plain-text sidecar ``<path>.meta`` repeats the header as ``key = value``
lines plus free-form entries (e.g. kind = qs-state).  Round trips are
bit-exact.

States are packed with symmetric tensors reduced to their six independent
components (order 00, 01, 02, 11, 12, 22): a tensor-model state is
6 (Q) + 6 (Qdot) + 3 (v) = 15 components; a director state 3+3+3 = 9.
"""

import struct
from pathlib import Path

import numpy as np

from .errors import SnapshotFormatError
from .grid import PeriodicGrid

MAGIC = b"QSF1"
_HEADER = struct.Struct("<4sii d d i d")

_TRIU = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


def write_snapshot(path, grid: PeriodicGrid, time: float, data, meta=None):
    """Write components (ncomp, nx, ny) plus the text sidecar."""
    data = np.ascontiguousarray(data, dtype="<f8")
    if data.ndim != 3 or data.shape[1:] != grid.shape:
        raise SnapshotFormatError(
            f"data shape {data.shape} does not match grid {grid.shape}")
    ncomp = data.shape[0]
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, grid.nx, grid.ny, grid.lx, grid.ly,
                              ncomp, time))
        fh.write(data.tobytes())
    lines = [f"magic = QSF1", f"nx = {grid.nx}", f"ny = {grid.ny}",
             f"lx = {grid.lx!r}", f"ly = {grid.ly!r}",
             f"ncomp = {ncomp}", f"time = {time!r}"]
    for key, value in (meta or {}).items():
        lines.append(f"{key} = {value}")
    Path(str(path) + ".meta").write_text("\n".join(lines) + "\n")
    return path


def read_snapshot(path):
    """Read a snapshot; returns (grid, time, data, meta)."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError(f"{path} too short for a QSF1 header")
    magic, nx, ny, lx, ly, ncomp, time = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotFormatError(f"{path} has magic {magic!r}, expected QSF1")
    expected = _HEADER.size + 8 * ncomp * nx * ny
    if len(raw) != expected:
        raise SnapshotFormatError(
            f"{path} has {len(raw)} bytes, expected {expected}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(
        ncomp, nx, ny).copy()
    meta = {}
    sidecar = Path(str(path) + ".meta")
    if sidecar.exists():
        for line in sidecar.read_text().splitlines():
            if "=" in line:
                key, _, value = line.partition("=")
                meta[key.strip()] = value.strip()
    return PeriodicGrid(nx, ny, lx, ly), time, data, meta


def pack_tensor(q):
    """Six independent components of a symmetric tensor field."""
    return np.stack([q[i, j] for i, j in _TRIU])


def unpack_tensor(comps):
    """Rebuild the symmetric tensor field from pack_tensor output."""
    q = np.empty((3, 3) + comps.shape[1:], dtype=comps.dtype)
    for idx, (i, j) in enumerate(_TRIU):
        q[i, j] = comps[idx]
        q[j, i] = comps[idx]
    return q


def save_qs_state(path, grid, state, extra_meta=None):
    from .qs_solver import QsState
    assert isinstance(state, QsState)
    data = np.concatenate([pack_tensor(state.q), pack_tensor(state.qdot),
                           state.v])
    meta = {"kind": "qs-state"}
    meta.update(extra_meta or {})
    return write_snapshot(path, grid, state.t, data, meta)


def load_qs_state(path):
    from .qs_solver import QsState
    grid, time, data, meta = read_snapshot(path)
    if meta.get("kind", "qs-state") != "qs-state" or data.shape[0] != 15:
        raise SnapshotFormatError(f"{path} is not a tensor-model state")
    q = unpack_tensor(data[0:6])
    qdot = unpack_tensor(data[6:12])
    v = data[12:15]
    return grid, QsState(q, qdot, v, time), meta


def save_el_state(path, grid, state, extra_meta=None):
    from .el_solver import ElState
    assert isinstance(state, ElState)
    data = np.concatenate([state.n, state.ndot, state.v])
    meta = {"kind": "el-state"}
    meta.update(extra_meta or {})
    return write_snapshot(path, grid, state.t, data, meta)


def load_el_state(path):
    from .el_solver import ElState
    grid, time, data, meta = read_snapshot(path)
    if meta.get("kind", "el-state") != "el-state" or data.shape[0] != 9:
        raise SnapshotFormatError(f"{path} is not a director-model state")
    return grid, ElState(data[0:3], data[3:6], data[6:9], time), meta
