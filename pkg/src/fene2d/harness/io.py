"""CSV series, binary checkpoints and run manifests.

Checkpoint layout (all little-endian):

    8 bytes   magic b"FENE2D\\0\\0"
    u32       format version (1)
    u32       n = byte length of the config text
    n bytes   canonical RunConfig text, UTF-8
    f64       t
    complex128[2, nx, ny]                 u_hat, row-major
    complex128[2*m_max+1, n_r, nx, ny]    c_{m,n}(x) for m = -m_max..m_max,
                                          (m, n)-major then x row-major
"""
from __future__ import annotations

import csv
import json
import os
import platform
import struct
from dataclasses import dataclass

import numpy as np

from .. import __version__
from ..analysis.diagnostics import DiagnosticsRow
from ..fokker_planck import full_to_half, half_to_full
from .config import RunConfig, parse_config

MAGIC = b"FENE2D\0\0"
VERSION = 1


class CheckpointError(ValueError):
    pass


def write_series(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(DiagnosticsRow.header())
        for r in rows:
            w.writerow([repr(float(v)) for v in r.values()])


def read_series(path) -> dict:
    """Column name -> float array."""
    with open(path, newline="", encoding="utf-8") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        data = [[float(x) for x in row] for row in rd if row]
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return {name: arr[:, i] for i, name in enumerate(header)}


@dataclass(frozen=True, eq=False)
class Checkpoint:
    config: RunConfig
    t: float
    uh: np.ndarray
    cfg: np.ndarray  # half storage


def encode_checkpoint(ck: Checkpoint) -> bytes:
    c = ck.config
    text = c.to_text().encode("utf-8")
    uh = np.ascontiguousarray(ck.uh, dtype="<c16")
    full = np.ascontiguousarray(half_to_full(ck.cfg), dtype="<c16")
    if uh.shape != (2, c.nx, c.ny):
        raise CheckpointError(f"velocity shape {uh.shape} does not match the config grid")
    if full.shape != (2 * c.m_max + 1, c.n_r, c.nx, c.ny):
        raise CheckpointError(f"configuration shape {full.shape} does not match the config")
    head = MAGIC + struct.pack("<II", VERSION, len(text)) + text + struct.pack("<d", ck.t)
    return head + uh.tobytes() + full.tobytes()


def decode_checkpoint(blob: bytes) -> Checkpoint:
    if blob[:8] != MAGIC:
        raise CheckpointError("not a checkpoint (bad magic)")
    version, n = struct.unpack_from("<II", blob, 8)
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version} (expected {VERSION})")
    pos = 16
    config = parse_config(blob[pos:pos + n].decode("utf-8"))
    pos += n
    (t,) = struct.unpack_from("<d", blob, pos)
    pos += 8
    nu = 2 * config.nx * config.ny
    nc = (2 * config.m_max + 1) * config.n_r * config.nx * config.ny
    if len(blob) != pos + 16 * (nu + nc):
        raise CheckpointError("truncated or oversized checkpoint payload")
    uh = np.frombuffer(blob, dtype="<c16", count=nu, offset=pos).reshape(2, config.nx, config.ny)
    pos += 16 * nu
    full = np.frombuffer(blob, dtype="<c16", count=nc, offset=pos)
    full = full.reshape(2 * config.m_max + 1, config.n_r, config.nx, config.ny)
    return Checkpoint(config=config, t=t, uh=uh.astype(complex), cfg=full_to_half(full.astype(complex)))


def save_checkpoint(path, ck: Checkpoint):
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(encode_checkpoint(ck))
    os.replace(tmp, path)


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        return decode_checkpoint(fh.read())


def write_manifest(path, config: RunConfig, extra: dict | None = None):
    data = {
        "package": "fene2d",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": config.to_text(),
    }
    if extra:
        data.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
