"""Run artifacts: energy-ledger CSV and raw float64 field snapshots.

Both formats are deliberately plain so any plotting stack can read them:
the ledger is CSV with 17-significant-digit floats, and a snapshot is a
flat little-endian float64 payload (row-major) next to a JSON sidecar
carrying grid metadata, the time stamp, and a SHA-256 checksum of the
payload bytes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import SnapshotFormatError
from .solver import EnergyLedgerRow

LEDGER_HEADER = "t,dt,E,E_modified,R,picard_iters,newton_iters,clamp_active,mass"


def format_ledger_row(row):
    """One CSV line; floats carry 17 significant digits, flags are 0/1."""
    return (
        f"{row.t:.17g},{row.dt:.17g},{row.E:.17g},{row.E_modified:.17g},"
        f"{row.R:.17g},{row.picard_iters:d},{row.newton_iters:d},"
        f"{int(row.clamp_active):d},{row.mass:.17g}"
    )


def write_energy_ledger(path, rows):
    path = Path(path)
    lines = [LEDGER_HEADER]
    lines.extend(format_ledger_row(row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_energy_ledger(path):
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != LEDGER_HEADER:
        raise SnapshotFormatError(f"unrecognized ledger header in {path}")
    rows = []
    for line in lines[1:]:
        t, dt, E, E_mod, R, picard, newton, clamp, mass = line.split(",")
        rows.append(
            EnergyLedgerRow(
                t=float(t),
                dt=float(dt),
                E=float(E),
                E_modified=float(E_mod),
                R=float(R),
                picard_iters=int(picard),
                newton_iters=int(newton),
                clamp_active=bool(int(clamp)),
                mass=float(mass),
            )
        )
    return rows


class LedgerWriter:
    """Streaming ledger writer; one flushed line per accepted step."""

    def __init__(self, path):
        self.path = Path(path)
        self._handle = open(self.path, "w")
        self._handle.write(LEDGER_HEADER + "\n")

    def write(self, row):
        self._handle.write(format_ledger_row(row) + "\n")
        self._handle.flush()

    def close(self):
        self._handle.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def _sidecar_path(path):
    return Path(str(path) + ".json")


def write_snapshot(path, field, *, time, model="", extra=None):
    """Raw float64 payload plus JSON sidecar with checksum."""
    path = Path(path)
    field = np.asarray(field, dtype="<f8")
    payload = field.tobytes(order="C")
    meta = {
        "layout": "row-major",
        "dtype": "float64",
        "endianness": "little",
        "shape": list(field.shape),
        "time": float(time),
        "model": model,
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    if extra:
        meta.update(extra)
    path.write_bytes(payload)
    _sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def read_snapshot(path):
    """Load and verify a snapshot; returns ``(field, meta)``."""
    path = Path(path)
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        raise SnapshotFormatError(f"missing sidecar {sidecar}")
    meta = json.loads(sidecar.read_text())
    payload = path.read_bytes()
    shape = tuple(int(n) for n in meta.get("shape", ()))
    expected = int(np.prod(shape)) * 8 if shape else -1
    if len(payload) != expected:
        raise SnapshotFormatError(
            f"payload is {len(payload)} bytes but shape {shape} needs {expected}"
        )
    digest = hashlib.sha256(payload).hexdigest()
    if digest != meta.get("sha256"):
        raise SnapshotFormatError(f"checksum mismatch for {path}")
    return np.frombuffer(payload, dtype="<f8").reshape(shape).copy(), meta


def snapshot_name(time):
    """Stable, sortable snapshot file name for a time stamp."""
    return f"snapshot_t{time:012.6f}.f64"
