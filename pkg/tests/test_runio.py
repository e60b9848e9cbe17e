"""Ledger CSV and snapshot round trips, plus corruption detection."""

import json

import numpy as np
import pytest

from etdflow.errors import SnapshotFormatError
from etdflow.runio import (
    LEDGER_HEADER,
    LedgerWriter,
    format_ledger_row,
    read_energy_ledger,
    read_snapshot,
    snapshot_name,
    write_energy_ledger,
    write_snapshot,
)
from etdflow.solver import EnergyLedgerRow


def sample_rows():
    return [
        EnergyLedgerRow(t=0.0, dt=0.0, E=1.0 / 3.0, E_modified=1.0 / 3.0, R=1.0,
                        picard_iters=0, newton_iters=0, clamp_active=False,
                        mass=-2.5e-17),
        EnergyLedgerRow(t=0.125, dt=0.125, E=0.301, E_modified=0.2995,
                        R=0.9999999123, picard_iters=4, newton_iters=9,
                        clamp_active=True, mass=-2.5e-17),
    ]


# ----------------------------------------------------------------- ledger


def test_row_format_fields_and_flags():
    line = format_ledger_row(sample_rows()[1])
    parts = line.split(",")
    assert len(parts) == 9
    assert parts[0] == "0.125"
    assert parts[5] == "4" and parts[6] == "9" and parts[7] == "1"


def test_row_format_keeps_17_digits():
    row = sample_rows()[0]
    line = format_ledger_row(row)
    # 1/3 must survive the text round trip bit-exactly.
    assert float(line.split(",")[2]) == row.E


def test_ledger_round_trip_equality(tmp_path):
    path = tmp_path / "ledger.csv"
    rows = sample_rows()
    write_energy_ledger(path, rows)
    assert read_energy_ledger(path) == rows


def test_empty_ledger_is_header_only(tmp_path):
    path = write_energy_ledger(tmp_path / "empty.csv", [])
    assert path.read_text() == LEDGER_HEADER + "\n"
    assert read_energy_ledger(path) == []


def test_ledger_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,energy\n0,1\n")
    with pytest.raises(SnapshotFormatError, match="header"):
        read_energy_ledger(path)


def test_streaming_writer_matches_batch_output(tmp_path):
    rows = sample_rows()
    batch = tmp_path / "batch.csv"
    streamed = tmp_path / "streamed.csv"
    write_energy_ledger(batch, rows)
    with LedgerWriter(streamed) as writer:
        for row in rows:
            writer.write(row)
    assert streamed.read_bytes() == batch.read_bytes()


# -------------------------------------------------------------- snapshots


def test_snapshot_round_trip_bitwise(tmp_path):
    rng = np.random.default_rng(5)
    field = rng.normal(size=(17, 17))
    path = tmp_path / "snap.f64"
    write_snapshot(path, field, time=0.25, model="ac", extra={"note": "x"})
    back, meta = read_snapshot(path)
    assert back.tobytes() == field.tobytes()
    assert meta["time"] == 0.25
    assert meta["model"] == "ac"
    assert meta["shape"] == [17, 17]
    assert meta["note"] == "x"
    assert meta["layout"] == "row-major"
    assert meta["endianness"] == "little"


def test_snapshot_payload_is_plain_little_endian(tmp_path):
    field = np.arange(6.0).reshape(2, 3)
    path = tmp_path / "snap.f64"
    write_snapshot(path, field, time=0.0)
    raw = np.frombuffer(path.read_bytes(), dtype="<f8")
    np.testing.assert_array_equal(raw, np.arange(6.0))


def test_snapshot_corrupted_byte_detected(tmp_path):
    path = tmp_path / "snap.f64"
    write_snapshot(path, np.ones((4, 4)), time=1.0)
    payload = bytearray(path.read_bytes())
    payload[5] ^= 0xFF
    path.write_bytes(bytes(payload))
    with pytest.raises(SnapshotFormatError, match="checksum"):
        read_snapshot(path)


def test_snapshot_truncation_detected(tmp_path):
    path = tmp_path / "snap.f64"
    write_snapshot(path, np.ones((4, 4)), time=1.0)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(SnapshotFormatError, match="bytes"):
        read_snapshot(path)


def test_snapshot_missing_sidecar(tmp_path):
    path = tmp_path / "snap.f64"
    write_snapshot(path, np.ones((2, 2)), time=0.0)
    (tmp_path / "snap.f64.json").unlink()
    with pytest.raises(SnapshotFormatError, match="sidecar"):
        read_snapshot(path)


def test_snapshot_sidecar_shape_mismatch(tmp_path):
    path = tmp_path / "snap.f64"
    write_snapshot(path, np.ones((4, 4)), time=0.0)
    sidecar = tmp_path / "snap.f64.json"
    meta = json.loads(sidecar.read_text())
    meta["shape"] = [4, 5]
    sidecar.write_text(json.dumps(meta))
    with pytest.raises(SnapshotFormatError, match="shape"):
        read_snapshot(path)


def test_snapshot_names_sort_with_time():
    times = [0.0, 0.5, 2.0, 10.0, 100.0, 2000.0]
    names = [snapshot_name(t) for t in times]
    assert names == sorted(names)
    assert names[1] == "snapshot_t00000.500000.f64"
