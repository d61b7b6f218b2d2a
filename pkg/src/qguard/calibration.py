"""Calibration snapshots: device properties at a point in time.

Snapshots are pure data.  They carry their own ``taken_at`` timestamp, and
staleness judgment lives entirely in the constraints layer, so everything
here is testable with synthetic clocks and files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Any, Mapping

from .errors import CalibrationError, DocumentError
from .simulator import NoiseModel
from .timestamps import format_timestamp, parse_timestamp, utc_now


@dataclass(frozen=True)
class QubitCalibration:
    t1_us: float
    t2_us: float
    readout_error: float

    def __post_init__(self):
        if self.t1_us <= 0.0 or self.t2_us <= 0.0:
            raise CalibrationError(
                f"relaxation times must be positive, got t1={self.t1_us}, t2={self.t2_us}"
            )
        # physical bound: T2 can reach at most twice T1
        if self.t2_us > 2.0 * self.t1_us:
            raise CalibrationError(
                f"t2 ({self.t2_us}) exceeds the physical bound 2*t1 ({2.0 * self.t1_us})"
            )
        if not 0.0 <= self.readout_error <= 1.0:
            raise CalibrationError(
                f"readout_error must be in [0, 1], got {self.readout_error}"
            )


@dataclass(frozen=True)
class GateCalibration:
    name: str
    qubits: tuple[int, ...]
    error: float

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if not self.qubits:
            raise CalibrationError(f"gate {self.name!r} lists no qubits")
        if not 0.0 <= self.error <= 1.0:
            raise CalibrationError(
                f"gate {self.name!r} error must be in [0, 1], got {self.error}"
            )


@dataclass(frozen=True)
class CalibrationSnapshot:
    taken_at: datetime
    num_qubits: int
    qubits: tuple[QubitCalibration, ...]
    gates: tuple[GateCalibration, ...]
    coupling_map: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(
            self, "coupling_map", tuple((int(a), int(b)) for a, b in self.coupling_map)
        )
        if self.taken_at.tzinfo is None:
            raise CalibrationError("taken_at must be timezone-aware")
        if self.num_qubits < 1:
            raise CalibrationError(f"num_qubits must be positive, got {self.num_qubits}")
        if len(self.qubits) != self.num_qubits:
            raise CalibrationError(
                f"{len(self.qubits)} qubit records for num_qubits={self.num_qubits}"
            )
        for gate in self.gates:
            for q in gate.qubits:
                if not 0 <= q < self.num_qubits:
                    raise CalibrationError(
                        f"gate {gate.name!r} references qubit {q} outside 0..{self.num_qubits - 1}"
                    )
        for a, b in self.coupling_map:
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise CalibrationError(
                    f"coupling pair ({a}, {b}) outside 0..{self.num_qubits - 1}"
                )

    def with_taken_at(self, moment: datetime) -> "CalibrationSnapshot":
        return replace(self, taken_at=moment)


def synthetic_calibration_for(
    noise: NoiseModel, num_qubits: int = 8, taken_at: datetime | None = None
) -> CalibrationSnapshot:
    """A plausible snapshot whose error entries mirror a simulator noise model.

    Readout error equals ``readout_flip``, single-qubit gate errors ``p1``,
    CNOT errors ``p2``, so calibration-threshold constraints exercise the
    same numbers that drive the simulator.  T1/T2 are fixed mid-range values.
    """
    if taken_at is None:
        taken_at = utc_now()
    qubits = tuple(
        QubitCalibration(t1_us=120.0, t2_us=100.0, readout_error=noise.readout_flip)
        for _ in range(num_qubits)
    )
    gates = [
        GateCalibration(name="u", qubits=(q,), error=noise.p1) for q in range(num_qubits)
    ]
    coupling = []
    for q in range(num_qubits - 1):
        gates.append(GateCalibration(name="cnot", qubits=(q, q + 1), error=noise.p2))
        coupling.append((q, q + 1))
        coupling.append((q + 1, q))
    return CalibrationSnapshot(
        taken_at=taken_at,
        num_qubits=num_qubits,
        qubits=qubits,
        gates=tuple(gates),
        coupling_map=tuple(coupling),
    )


# --- document format -------------------------------------------------------


def calibration_to_dict(snapshot: CalibrationSnapshot) -> dict[str, Any]:
    return {
        "taken_at": format_timestamp(snapshot.taken_at),
        "num_qubits": snapshot.num_qubits,
        "qubits": [
            {"t1_us": q.t1_us, "t2_us": q.t2_us, "readout_error": q.readout_error}
            for q in snapshot.qubits
        ],
        "gates": [
            {"name": g.name, "qubits": list(g.qubits), "error": g.error}
            for g in snapshot.gates
        ],
        "coupling_map": [list(pair) for pair in snapshot.coupling_map],
    }


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(path, f"expected a number, got {value!r}")
    return float(value)


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(path, f"expected an integer, got {value!r}")
    return value


def _field(doc: Mapping[str, Any], key: str, path: str) -> Any:
    if not isinstance(doc, Mapping):
        raise DocumentError(path, f"expected an object, got {type(doc).__name__}")
    if key not in doc:
        raise DocumentError(f"{path}.{key}" if path else key, "required field missing")
    return doc[key]


def calibration_from_dict(doc: Mapping[str, Any], path: str = "") -> CalibrationSnapshot:
    if not isinstance(doc, Mapping):
        raise DocumentError(path, f"expected an object, got {type(doc).__name__}")
    prefix = f"{path}." if path else ""
    taken_at = parse_timestamp(_field(doc, "taken_at", path), f"{prefix}taken_at")
    num_qubits = _int(_field(doc, "num_qubits", path), f"{prefix}num_qubits")
    raw_qubits = _field(doc, "qubits", path)
    if not isinstance(raw_qubits, list):
        raise DocumentError(f"{prefix}qubits", "expected a list")
    qubits = []
    for i, raw in enumerate(raw_qubits):
        qpath = f"{prefix}qubits[{i}]"
        qubits.append(
            QubitCalibration(
                t1_us=_number(_field(raw, "t1_us", qpath), f"{qpath}.t1_us"),
                t2_us=_number(_field(raw, "t2_us", qpath), f"{qpath}.t2_us"),
                readout_error=_number(
                    _field(raw, "readout_error", qpath), f"{qpath}.readout_error"
                ),
            )
        )
    raw_gates = _field(doc, "gates", path)
    if not isinstance(raw_gates, list):
        raise DocumentError(f"{prefix}gates", "expected a list")
    gates = []
    for i, raw in enumerate(raw_gates):
        gpath = f"{prefix}gates[{i}]"
        name = _field(raw, "name", gpath)
        if not isinstance(name, str):
            raise DocumentError(f"{gpath}.name", f"expected a string, got {name!r}")
        raw_indices = _field(raw, "qubits", gpath)
        if not isinstance(raw_indices, list):
            raise DocumentError(f"{gpath}.qubits", "expected a list")
        indices = [_int(v, f"{gpath}.qubits[{j}]") for j, v in enumerate(raw_indices)]
        gates.append(
            GateCalibration(
                name=name,
                qubits=tuple(indices),
                error=_number(_field(raw, "error", gpath), f"{gpath}.error"),
            )
        )
    raw_coupling = _field(doc, "coupling_map", path)
    if not isinstance(raw_coupling, list):
        raise DocumentError(f"{prefix}coupling_map", "expected a list")
    coupling = []
    for i, raw in enumerate(raw_coupling):
        cpath = f"{prefix}coupling_map[{i}]"
        if not isinstance(raw, list) or len(raw) != 2:
            raise DocumentError(cpath, f"expected a pair of qubit indices, got {raw!r}")
        coupling.append((_int(raw[0], f"{cpath}[0]"), _int(raw[1], f"{cpath}[1]")))
    return CalibrationSnapshot(
        taken_at=taken_at,
        num_qubits=num_qubits,
        qubits=tuple(qubits),
        gates=tuple(gates),
        coupling_map=tuple(coupling),
    )


def parse_calibration(document: str | Mapping[str, Any]) -> CalibrationSnapshot:
    """Parse a calibration document (JSON text or an already-decoded mapping).

    Schema violations raise :class:`DocumentError` naming the field;
    physical-bound violations raise :class:`CalibrationError`.
    """
    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise DocumentError("", f"invalid JSON: {exc}") from None
    else:
        doc = document
    return calibration_from_dict(doc)
