import json
from datetime import datetime, timezone

import pytest

from qguard import (
    CalibrationError,
    CalibrationSnapshot,
    DocumentError,
    GateCalibration,
    NoiseModel,
    QubitCalibration,
    calibration_to_dict,
    parse_calibration,
    synthetic_calibration_for,
)

NOW = datetime(2026, 8, 21, 12, 0, 0, tzinfo=timezone.utc)


def sample_doc():
    return {
        "taken_at": "2026-08-21T12:00:00Z",
        "num_qubits": 2,
        "qubits": [
            {"t1_us": 100.0, "t2_us": 80.0, "readout_error": 0.01},
            {"t1_us": 120.0, "t2_us": 100.0, "readout_error": 0.02},
        ],
        "gates": [
            {"name": "u", "qubits": [0], "error": 0.001},
            {"name": "cnot", "qubits": [0, 1], "error": 0.01},
        ],
        "coupling_map": [[0, 1], [1, 0]],
    }


def test_parse_sample():
    snapshot = parse_calibration(json.dumps(sample_doc()))
    assert snapshot.num_qubits == 2
    assert snapshot.qubits[0].t1_us == 100.0
    assert snapshot.qubits[1].readout_error == 0.02
    assert snapshot.gates[1].qubits == (0, 1)
    assert snapshot.coupling_map == ((0, 1), (1, 0))
    assert snapshot.taken_at == NOW


def test_round_trip():
    snapshot = parse_calibration(json.dumps(sample_doc()))
    assert parse_calibration(calibration_to_dict(snapshot)) == snapshot


def test_rejects_t2_above_physical_bound():
    doc = sample_doc()
    doc["qubits"][0]["t2_us"] = 250.0
    with pytest.raises(CalibrationError, match="2\\*t1"):
        parse_calibration(doc)


def test_rejects_out_of_range_readout_error():
    doc = sample_doc()
    doc["qubits"][1]["readout_error"] = 1.5
    with pytest.raises(CalibrationError, match="readout_error"):
        parse_calibration(doc)


def test_rejects_missing_coupling_map():
    doc = sample_doc()
    del doc["coupling_map"]
    with pytest.raises(DocumentError, match="coupling_map"):
        parse_calibration(doc)


def test_rejects_bad_timestamp():
    doc = sample_doc()
    doc["taken_at"] = "yesterday"
    with pytest.raises(DocumentError, match="taken_at"):
        parse_calibration(doc)


def test_rejects_naive_timestamp():
    doc = sample_doc()
    doc["taken_at"] = "2026-08-21T12:00:00"
    with pytest.raises(DocumentError, match="offset"):
        parse_calibration(doc)


def test_rejects_qubit_record_count_mismatch():
    doc = sample_doc()
    doc["num_qubits"] = 3
    with pytest.raises(CalibrationError, match="num_qubits"):
        parse_calibration(doc)


def test_rejects_gate_on_unknown_qubit():
    doc = sample_doc()
    doc["gates"][0]["qubits"] = [5]
    with pytest.raises(CalibrationError, match="outside"):
        parse_calibration(doc)


def test_rejects_coupling_outside_device():
    doc = sample_doc()
    doc["coupling_map"].append([0, 9])
    with pytest.raises(CalibrationError, match="coupling"):
        parse_calibration(doc)


def test_error_paths_name_the_field():
    doc = sample_doc()
    doc["qubits"][1]["t1_us"] = "fast"
    with pytest.raises(DocumentError, match=r"qubits\[1\].t1_us"):
        parse_calibration(doc)


def test_rejects_nonpositive_times():
    with pytest.raises(CalibrationError):
        QubitCalibration(t1_us=0.0, t2_us=0.0, readout_error=0.0)


def test_gate_record_validation():
    with pytest.raises(CalibrationError):
        GateCalibration(name="u", qubits=(), error=0.1)
    with pytest.raises(CalibrationError):
        GateCalibration(name="u", qubits=(0,), error=1.2)


def test_with_taken_at():
    snapshot = parse_calibration(sample_doc())
    later = datetime(2027, 1, 1, tzinfo=timezone.utc)
    moved = snapshot.with_taken_at(later)
    assert moved.taken_at == later
    assert moved.qubits == snapshot.qubits


def test_snapshot_requires_aware_timestamp():
    with pytest.raises(CalibrationError, match="aware"):
        CalibrationSnapshot(
            taken_at=datetime(2026, 1, 1),
            num_qubits=1,
            qubits=(QubitCalibration(100.0, 80.0, 0.01),),
            gates=(),
            coupling_map=(),
        )


def test_synthetic_calibration_mirrors_noise():
    noise = NoiseModel(p1=0.004, p2=0.03, readout_flip=0.017, seed=0)
    snapshot = synthetic_calibration_for(noise, num_qubits=4, taken_at=NOW)
    assert snapshot.num_qubits == 4
    assert len(snapshot.qubits) == 4
    assert all(q.readout_error == 0.017 for q in snapshot.qubits)
    single = [g for g in snapshot.gates if len(g.qubits) == 1]
    double = [g for g in snapshot.gates if len(g.qubits) == 2]
    assert all(g.error == 0.004 for g in single)
    assert all(g.error == 0.03 for g in double)
    assert len(single) == 4
    assert len(double) == 3
    assert (0, 1) in snapshot.coupling_map and (1, 0) in snapshot.coupling_map
