"""Dense statevector simulator with stochastic Pauli noise and readout error.

Noise semantics: after every gate, with probability ``p1`` (single-qubit
gates) or ``p2`` (CNOT), one element of the full Pauli set on the involved
qubits is applied, drawn uniformly with identity included (4 options for one
qubit, 16 for two).  Averaged over shots this realizes the exact
depolarizing channel rho -> (1-p)*rho + p*(I/d (x) rest) on those qubits.

Determinism: every random draw for a run comes from one counter-based
stream keyed by ``noise.seed``.  Shot ``i`` owns row ``i`` of a pre-drawn
uniform matrix, so the mapping from (circuit, shots, noise) to counts is
fixed no matter how shots are batched or grouped internally.  Shots sharing
a noise trajectory are evolved once and sampled from the same distribution,
which is what makes zero-noise runs cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .circuits import BitstringCounts, Circuit, Gate, GateKind
from .errors import CircuitError, NormConservationError

_NORM_TOL = 1e-10
_INV_SQRT2 = 1.0 / math.sqrt(2.0)

_FIXED_1Q = {
    GateKind.H: np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]]).astype(np.complex128),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=np.complex128),
}

# Order fixed: index 0 is identity, so "no depolarizing event" and "event
# drew the identity" coincide and trajectories can be grouped on the code.
PAULIS = (
    np.eye(2, dtype=np.complex128),
    _FIXED_1Q[GateKind.X],
    _FIXED_1Q[GateKind.Y],
    _FIXED_1Q[GateKind.Z],
)


def gate_unitary(gate: Gate) -> np.ndarray:
    """The 2x2 matrix of a single-qubit gate.  CNOT has no dense form here;
    it is applied structurally as an index permutation."""
    if gate.kind in _FIXED_1Q:
        return _FIXED_1Q[gate.kind]
    half = 0.5 * float(gate.angle)
    c, s = math.cos(half), math.sin(half)
    if gate.kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if gate.kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if gate.kind is GateKind.RZ:
        return np.array(
            [[np.exp(-1j * half), 0], [0, np.exp(1j * half)]], dtype=np.complex128
        )
    raise CircuitError(f"{gate.kind.value} has no single-qubit unitary")


@dataclass(frozen=True)
class NoiseModel:
    """Stochastic noise parameters plus the seed that fixes all randomness.

    The default magnitudes are placeholders sized for tests, not calibrated
    to any particular device.  ``ideal()`` gives the zero-noise model.
    """

    p1: float = 0.001
    p2: float = 0.01
    readout_flip: float = 0.02
    seed: int = 0

    def __post_init__(self):
        for name in ("p1", "p2", "readout_flip"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability in [0, 1], got {value}")
            object.__setattr__(self, name, float(value))
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def ideal(cls, seed: int = 0) -> "NoiseModel":
        return cls(p1=0.0, p2=0.0, readout_flip=0.0, seed=seed)

    def with_seed(self, seed: int) -> "NoiseModel":
        return replace(self, seed=seed)


@dataclass
class StateVector:
    """An n-qubit pure state as a (2,)*n complex array; axis q indexes qubit q.

    In the flattened C-order view, qubit 0 is the most significant bit of
    the basis index, matching the bitstring convention.
    """

    amplitudes: np.ndarray
    num_qubits: int

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        if num_qubits < 1:
            raise CircuitError(f"num_qubits must be positive, got {num_qubits}")
        return cls(_zero_amplitudes(num_qubits), num_qubits)

    def norm(self) -> float:
        flat = self.amplitudes.reshape(-1)
        return float(math.sqrt(np.vdot(flat, flat).real))


def _zero_amplitudes(num_qubits: int) -> np.ndarray:
    amps = np.zeros((2,) * num_qubits, dtype=np.complex128)
    amps[(0,) * num_qubits] = 1.0
    return amps


def _apply_unitary(amps: np.ndarray, u: np.ndarray, qubit: int) -> np.ndarray:
    out = np.tensordot(u, amps, axes=([1], [qubit]))
    return np.moveaxis(out, 0, qubit)


def _apply_cnot(amps: np.ndarray, control: int, target: int) -> np.ndarray:
    out = amps.copy()
    index = [slice(None)] * amps.ndim
    index[control] = 1
    # In the control=1 slice the target axis shifts down if it sat above the
    # control axis.
    axis = target if target < control else target - 1
    out[tuple(index)] = np.flip(out[tuple(index)], axis=axis)
    return out


def _apply_gate_amplitudes(amps: np.ndarray, gate: Gate) -> np.ndarray:
    if gate.kind is GateKind.CNOT:
        return _apply_cnot(amps, gate.targets[0], gate.targets[1])
    return _apply_unitary(amps, gate_unitary(gate), gate.targets[0])


def _check_norm(amps: np.ndarray):
    flat = amps.reshape(-1)
    norm = math.sqrt(np.vdot(flat, flat).real)
    if abs(norm - 1.0) >= _NORM_TOL:
        raise NormConservationError(f"statevector norm drifted to {norm!r}")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate, returning a new state; the input is not modified.

    Raises :class:`CircuitError` for out-of-range targets and
    :class:`NormConservationError` if unit norm is not preserved to 1e-10.
    """
    for t in gate.targets:
        if t >= state.num_qubits:
            raise CircuitError(
                f"gate target {t} out of range for {state.num_qubits} qubit(s)"
            )
    amps = _apply_gate_amplitudes(state.amplitudes, gate)
    _check_norm(amps)
    return StateVector(amps, state.num_qubits)


def _apply_pauli_code(amps: np.ndarray, targets: tuple[int, ...], code: int) -> np.ndarray:
    """Apply the Pauli selected by ``code``: index into {I,X,Y,Z} for one
    qubit, or 4a+b for the pair (a on targets[0], b on targets[1])."""
    if len(targets) == 1:
        return _apply_unitary(amps, PAULIS[code], targets[0])
    first, second = divmod(code, 4)
    if first:
        amps = _apply_unitary(amps, PAULIS[first], targets[0])
    if second:
        amps = _apply_unitary(amps, PAULIS[second], targets[1])
    return amps


def _evolve_with_trajectory(circuit: Circuit, codes) -> np.ndarray:
    """Run the gate list with one Pauli-injection pattern (code 0 = none)."""
    amps = _zero_amplitudes(circuit.num_qubits)
    for gate, code in zip(circuit.gates, codes):
        amps = _apply_gate_amplitudes(amps, gate)
        if code:
            amps = _apply_pauli_code(amps, gate.targets, int(code))
        _check_norm(amps)
    return amps


def _measurement_distribution(amps: np.ndarray, circuit: Circuit) -> np.ndarray:
    """Born probabilities over measured qubits, flattened with
    measured_qubits[0] as the most significant bit."""
    probs = np.abs(amps) ** 2
    measured = set(circuit.measured_qubits)
    unmeasured = tuple(q for q in range(circuit.num_qubits) if q not in measured)
    if unmeasured:
        probs = probs.sum(axis=unmeasured)
    return probs.reshape(-1)


def run_shots(circuit: Circuit, shots: int, noise: NoiseModel) -> BitstringCounts:
    """Sample ``shots`` measurement outcomes under the given noise model.

    Per shot: evolve |0...0> through the gate list with per-gate depolarizing
    events, sample one outcome from the joint Born distribution over
    ``measured_qubits`` (measurement is terminal, so a single joint sample is
    exact), then flip each readout bit independently with probability
    ``readout_flip``.  Output depends only on (circuit, shots, noise).
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    num_gates = len(circuit.gates)
    k = circuit.num_measured

    # One uniform matrix drives everything; columns are, in order: per-gate
    # event draws, per-gate Pauli choices, the outcome draw, per-bit readout
    # draws.  Row i belongs to shot i.
    rng = np.random.Generator(np.random.Philox(key=noise.seed))
    uniforms = rng.random((shots, 2 * num_gates + 1 + k))
    outcome_u = uniforms[:, 2 * num_gates]

    if num_gates:
        event_u = uniforms[:, :num_gates]
        choice_u = uniforms[:, num_gates : 2 * num_gates]
        event_p = np.array(
            [noise.p2 if g.kind is GateKind.CNOT else noise.p1 for g in circuit.gates]
        )
        choices = np.array(
            [16 if g.kind is GateKind.CNOT else 4 for g in circuit.gates]
        )
        codes = np.where(event_u < event_p, (choice_u * choices).astype(np.int8), 0)
        codes = np.ascontiguousarray(codes)
        # Group shots sharing a trajectory; comparing rows as opaque byte
        # blobs is much faster than unique(axis=0).
        blobs = codes.view(np.dtype((np.void, num_gates))).reshape(-1)
        unique_blobs, inverse = np.unique(blobs, return_inverse=True)
        trajectories = unique_blobs.view(np.int8).reshape(len(unique_blobs), num_gates)
    else:
        trajectories = np.zeros((1, 0), dtype=np.int8)
        inverse = np.zeros(shots, dtype=np.intp)

    order = np.argsort(inverse, kind="stable")
    sorted_inverse = inverse[order]
    group_ids = np.arange(len(trajectories))
    starts = np.searchsorted(sorted_inverse, group_ids, side="left")
    ends = np.searchsorted(sorted_inverse, group_ids, side="right")

    outcomes = np.empty(shots, dtype=np.int64)
    for i in range(len(trajectories)):
        members = order[starts[i] : ends[i]]
        amps = _evolve_with_trajectory(circuit, trajectories[i])
        cdf = np.cumsum(_measurement_distribution(amps, circuit))
        cdf[-1] = 1.0
        outcomes[members] = np.searchsorted(cdf, outcome_u[members], side="right")

    if noise.readout_flip > 0.0:
        readout_u = uniforms[:, 2 * num_gates + 1 :]
        bit_values = (1 << np.arange(k - 1, -1, -1)).astype(np.int64)
        flip_masks = (readout_u < noise.readout_flip) @ bit_values
        outcomes ^= flip_masks.astype(np.int64)

    values, tallies = np.unique(outcomes, return_counts=True)
    return BitstringCounts(
        {format(int(v), f"0{k}b"): int(t) for v, t in zip(values, tallies)}
    )
