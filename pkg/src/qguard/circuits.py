"""Circuit representation, canonical circuits, and the shared document format.

Bit-order convention used everywhere in this package: character ``i`` of a
result bitstring is the measured outcome of ``measured_qubits[i]``, and
position 0 is the leftmost character.  Measurement is terminal only; a
circuit is an ordered gate list followed by a single measurement of
``measured_qubits``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Mapping

from .errors import CircuitError, DocumentError


class BitstringCounts(Mapping):
    """An outcome histogram: bitstring -> non-negative count.

    Keys all share one length (the number of measured qubits).  Instances
    are immutable and compare equal to any mapping with the same entries.
    """

    __slots__ = ("_counts", "num_bits")

    def __init__(self, counts: Mapping[str, int] | Iterable[tuple[str, int]]):
        items: dict[str, int] = {}
        num_bits: int | None = None
        entries = counts.items() if isinstance(counts, Mapping) else counts
        for key, value in entries:
            if not isinstance(key, str) or not key or any(c not in "01" for c in key):
                raise CircuitError(f"invalid bitstring key {key!r}")
            if num_bits is None:
                num_bits = len(key)
            elif len(key) != num_bits:
                raise CircuitError(
                    f"mixed bitstring lengths: {key!r} vs expected length {num_bits}"
                )
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise CircuitError(f"count for {key!r} must be a non-negative integer")
            if key in items:
                raise CircuitError(f"duplicate bitstring key {key!r}")
            items[key] = value
        if num_bits is None:
            raise CircuitError("counts must be non-empty")
        self._counts = items
        self.num_bits = num_bits

    @property
    def total(self) -> int:
        return sum(self._counts.values())

    def __getitem__(self, key: str) -> int:
        return self._counts[key]

    def __iter__(self):
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __repr__(self) -> str:
        return f"BitstringCounts({self._counts!r})"

    def to_dict(self) -> dict[str, int]:
        return dict(self._counts)


class GateKind(Enum):
    H = "H"
    X = "X"
    Y = "Y"
    Z = "Z"
    S = "S"
    T = "T"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"


ROTATION_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})
TWO_QUBIT_KINDS = frozenset({GateKind.CNOT})


@dataclass(frozen=True)
class Gate:
    """One gate application: a kind, its target qubits, and (for rotations) an angle.

    ``targets`` holds one index for single-qubit kinds and ``(control, target)``
    for CNOT.  ``angle`` is in radians and present exactly for RX/RY/RZ.
    """

    kind: GateKind
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        arity = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.targets) != arity:
            raise CircuitError(
                f"{self.kind.value} takes {arity} target(s), got {len(self.targets)}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise CircuitError(f"{self.kind.value} targets must be distinct: {self.targets}")
        if any(t < 0 for t in self.targets):
            raise CircuitError(f"negative qubit index in {self.targets}")
        if self.kind in ROTATION_KINDS:
            if self.angle is None:
                raise CircuitError(f"{self.kind.value} gate requires an angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise CircuitError(f"{self.kind.value} gate takes no angle")

    @property
    def num_targets(self) -> int:
        return len(self.targets)

    @classmethod
    def h(cls, q: int) -> "Gate":
        return cls(GateKind.H, (q,))

    @classmethod
    def x(cls, q: int) -> "Gate":
        return cls(GateKind.X, (q,))

    @classmethod
    def y(cls, q: int) -> "Gate":
        return cls(GateKind.Y, (q,))

    @classmethod
    def z(cls, q: int) -> "Gate":
        return cls(GateKind.Z, (q,))

    @classmethod
    def s(cls, q: int) -> "Gate":
        return cls(GateKind.S, (q,))

    @classmethod
    def t(cls, q: int) -> "Gate":
        return cls(GateKind.T, (q,))

    @classmethod
    def rx(cls, q: int, angle: float) -> "Gate":
        return cls(GateKind.RX, (q,), angle)

    @classmethod
    def ry(cls, q: int, angle: float) -> "Gate":
        return cls(GateKind.RY, (q,), angle)

    @classmethod
    def rz(cls, q: int, angle: float) -> "Gate":
        return cls(GateKind.RZ, (q,), angle)

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls(GateKind.CNOT, (control, target))


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over ``num_qubits`` qubits with terminal measurement.

    Immutable after construction; safe to share between threads.
    """

    num_qubits: int
    gates: tuple[Gate, ...]
    measured_qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measured_qubits", tuple(int(q) for q in self.measured_qubits))
        if self.num_qubits < 1:
            raise CircuitError(f"num_qubits must be positive, got {self.num_qubits}")
        for i, gate in enumerate(self.gates):
            if not isinstance(gate, Gate):
                raise CircuitError(f"gates[{i}] is not a Gate")
            for t in gate.targets:
                if t >= self.num_qubits:
                    raise CircuitError(
                        f"gates[{i}]: target {t} out of range for {self.num_qubits} qubit(s)"
                    )
        if not self.measured_qubits:
            raise CircuitError("measured_qubits must be non-empty")
        if any(q < 0 or q >= self.num_qubits for q in self.measured_qubits):
            raise CircuitError(
                f"measured qubit out of range for {self.num_qubits} qubit(s): "
                f"{self.measured_qubits}"
            )
        if any(b <= a for a, b in zip(self.measured_qubits, self.measured_qubits[1:])):
            raise CircuitError(
                f"measured_qubits must be strictly increasing: {self.measured_qubits}"
            )

    @property
    def num_measured(self) -> int:
        return len(self.measured_qubits)


@dataclass(frozen=True)
class MeasurementSettings:
    """The four CHSH measurement angles, in radians.

    ``a0``/``a1`` are the first-qubit (Alice) settings, ``b0``/``b1`` the
    second-qubit (Bob) settings.  The defaults are the canonical angles for
    which a Bell pair reaches the quantum maximum ``S = 2*sqrt(2)``.
    """

    a0: float = 0.0
    a1: float = math.pi / 2
    b0: float = math.pi / 4
    b1: float = -math.pi / 4


def phi_plus() -> Circuit:
    """The Bell-pair circuit: H on qubit 0, CNOT 0->1, measure both qubits.

    Prepares (|00> + |11>)/sqrt(2), so a noiseless run yields only the
    outcomes "00" and "11".
    """
    return Circuit(
        num_qubits=2,
        gates=(Gate.h(0), Gate.cnot(0, 1)),
        measured_qubits=(0, 1),
    )


def packed_chsh_circuit(settings: MeasurementSettings = MeasurementSettings()) -> Circuit:
    """All four CHSH setting combinations packed into one 8-qubit circuit.

    Pair ``i`` lives on qubits ``(2i, 2i+1)`` and is prepared as a Bell pair;
    the measurement basis is then set by RY(-angle) on each qubit, with the
    pairs using the setting combinations (a0,b0), (a0,b1), (a1,b0), (a1,b1)
    in that order.  Pairs never interact, so one run estimates all four
    correlators at once: bits (0,1) give E00, (2,3) E01, (4,5) E10, (6,7) E11.

    Zero-angle rotations are emitted rather than elided so the circuit shape
    does not depend on the settings.
    """
    pair_settings = (
        (settings.a0, settings.b0),
        (settings.a0, settings.b1),
        (settings.a1, settings.b0),
        (settings.a1, settings.b1),
    )
    gates: list[Gate] = []
    for i in range(4):
        gates.append(Gate.h(2 * i))
        gates.append(Gate.cnot(2 * i, 2 * i + 1))
    for i, (alice, bob) in enumerate(pair_settings):
        gates.append(Gate.ry(2 * i, -alice))
        gates.append(Gate.ry(2 * i + 1, -bob))
    return Circuit(num_qubits=8, gates=tuple(gates), measured_qubits=tuple(range(8)))


def chsh_pair_circuit(alice_angle: float, bob_angle: float) -> Circuit:
    """One Bell pair measured at a single CHSH setting combination.

    The 2-qubit analogue of one pair of :func:`packed_chsh_circuit`; useful
    with the density-matrix oracle, which is capped at small qubit counts.
    """
    return Circuit(
        num_qubits=2,
        gates=(
            Gate.h(0),
            Gate.cnot(0, 1),
            Gate.ry(0, -alice_angle),
            Gate.ry(1, -bob_angle),
        ),
        measured_qubits=(0, 1),
    )


# --- document format -------------------------------------------------------
#
# { "num_qubits": int,
#   "gates": [{"kind": str, "targets": [int], "angle": float?}, ...],
#   "measure": [int] }


def circuit_to_dict(circuit: Circuit) -> dict[str, Any]:
    gates = []
    for gate in circuit.gates:
        entry: dict[str, Any] = {"kind": gate.kind.value, "targets": list(gate.targets)}
        if gate.angle is not None:
            entry["angle"] = gate.angle
        gates.append(entry)
    return {
        "num_qubits": circuit.num_qubits,
        "gates": gates,
        "measure": list(circuit.measured_qubits),
    }


def _require(doc: Mapping[str, Any], key: str, path: str) -> Any:
    if key not in doc:
        raise DocumentError(_join(path, key), "required field missing")
    return doc[key]


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _int_list(value: Any, path: str) -> list[int]:
    if not isinstance(value, list):
        raise DocumentError(path, f"expected a list, got {type(value).__name__}")
    out = []
    for i, item in enumerate(value):
        if not isinstance(item, int) or isinstance(item, bool):
            raise DocumentError(f"{path}[{i}]", f"expected an integer, got {item!r}")
        out.append(item)
    return out


def circuit_from_dict(doc: Mapping[str, Any], path: str = "") -> Circuit:
    """Build a :class:`Circuit` from its document form.

    Raises :class:`DocumentError` naming the offending field for malformed
    documents, unknown gate kinds, out-of-range indices, and missing or
    surplus angles.
    """
    if not isinstance(doc, Mapping):
        raise DocumentError(path, f"expected an object, got {type(doc).__name__}")
    num_qubits = _require(doc, "num_qubits", path)
    if not isinstance(num_qubits, int) or isinstance(num_qubits, bool) or num_qubits < 1:
        raise DocumentError(_join(path, "num_qubits"), f"expected a positive integer, got {num_qubits!r}")
    raw_gates = _require(doc, "gates", path)
    if not isinstance(raw_gates, list):
        raise DocumentError(_join(path, "gates"), "expected a list")
    gates = []
    for i, raw in enumerate(raw_gates):
        gate_path = f"{_join(path, 'gates')}[{i}]"
        if not isinstance(raw, Mapping):
            raise DocumentError(gate_path, "expected an object")
        kind_name = _require(raw, "kind", gate_path)
        try:
            kind = GateKind(kind_name)
        except ValueError:
            raise DocumentError(f"{gate_path}.kind", f"unknown gate kind {kind_name!r}") from None
        targets = _int_list(_require(raw, "targets", gate_path), f"{gate_path}.targets")
        angle = raw.get("angle")
        if angle is not None and (isinstance(angle, bool) or not isinstance(angle, (int, float))):
            raise DocumentError(f"{gate_path}.angle", f"expected a number, got {angle!r}")
        unknown = set(raw) - {"kind", "targets", "angle"}
        if unknown:
            raise DocumentError(gate_path, f"unknown field(s): {sorted(unknown)}")
        try:
            gate = Gate(kind, tuple(targets), angle)
        except CircuitError as exc:
            raise DocumentError(gate_path, str(exc)) from None
        for t in gate.targets:
            if t >= num_qubits:
                raise DocumentError(
                    f"{gate_path}.targets", f"index {t} out of range for {num_qubits} qubit(s)"
                )
        gates.append(gate)
    measure = _int_list(_require(doc, "measure", path), _join(path, "measure"))
    try:
        return Circuit(num_qubits, tuple(gates), tuple(measure))
    except CircuitError as exc:
        raise DocumentError(_join(path, "measure"), str(exc)) from None


def serialize_circuit(circuit: Circuit) -> str:
    """Render a circuit as its canonical JSON document."""
    return json.dumps(circuit_to_dict(circuit), indent=2)


def parse_circuit(text: str) -> Circuit:
    """Parse a JSON circuit document; inverse of :func:`serialize_circuit`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("", f"invalid JSON: {exc}") from None
    return circuit_from_dict(doc)
