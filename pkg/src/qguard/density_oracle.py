"""Exact density-matrix reference for small circuits.

This is a test oracle, not a backend: cost grows as 16^n, so it is capped
at 3 qubits.  Gates act as rho -> U rho U^dag, each depolarizing step is
the explicit Pauli-set average (which equals (1-p)*rho + p*(I/d (x) rest)),
and readout error is an exact per-bit convolution of the outcome
distribution.
"""

from __future__ import annotations

import numpy as np

from .circuits import Circuit, Gate, GateKind
from .errors import OracleLimitError
from .simulator import NoiseModel, PAULIS, gate_unitary

ORACLE_MAX_QUBITS = 3


def _embed_single(u: np.ndarray, qubit: int, num_qubits: int) -> np.ndarray:
    full = np.eye(1, dtype=np.complex128)
    for q in range(num_qubits):
        full = np.kron(full, u if q == qubit else np.eye(2))
    return full


def _cnot_matrix(control: int, target: int, num_qubits: int) -> np.ndarray:
    dim = 1 << num_qubits
    full = np.zeros((dim, dim), dtype=np.complex128)
    control_bit = 1 << (num_qubits - 1 - control)
    target_bit = 1 << (num_qubits - 1 - target)
    for j in range(dim):
        image = j ^ target_bit if j & control_bit else j
        full[image, j] = 1.0
    return full


def _gate_matrix(gate: Gate, num_qubits: int) -> np.ndarray:
    if gate.kind is GateKind.CNOT:
        return _cnot_matrix(gate.targets[0], gate.targets[1], num_qubits)
    return _embed_single(gate_unitary(gate), gate.targets[0], num_qubits)


def _depolarize(rho: np.ndarray, targets: tuple[int, ...], p: float, num_qubits: int) -> np.ndarray:
    if len(targets) == 1:
        paulis = [_embed_single(sigma, targets[0], num_qubits) for sigma in PAULIS]
    else:
        paulis = [
            _embed_single(a, targets[0], num_qubits) @ _embed_single(b, targets[1], num_qubits)
            for a in PAULIS
            for b in PAULIS
        ]
    twirled = sum(sigma @ rho @ sigma.conj().T for sigma in paulis) / len(paulis)
    return (1.0 - p) * rho + p * twirled


def density_matrix_oracle(circuit: Circuit, noise: NoiseModel) -> dict[str, float]:
    """Exact outcome probability for every measured bitstring.

    Returns all 2^k bitstrings over the measured qubits, including those
    with probability zero.  The seed is irrelevant here; only the channel
    parameters matter.
    """
    if circuit.num_qubits > ORACLE_MAX_QUBITS:
        raise OracleLimitError(
            f"oracle supports at most {ORACLE_MAX_QUBITS} qubits, "
            f"got {circuit.num_qubits}"
        )
    n = circuit.num_qubits
    dim = 1 << n
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[0, 0] = 1.0
    for gate in circuit.gates:
        u = _gate_matrix(gate, n)
        rho = u @ rho @ u.conj().T
        p = noise.p2 if gate.kind is GateKind.CNOT else noise.p1
        if p > 0.0:
            rho = _depolarize(rho, gate.targets, p, n)

    probs = np.real(np.diag(rho)).reshape((2,) * n)
    measured = set(circuit.measured_qubits)
    unmeasured = tuple(q for q in range(n) if q not in measured)
    if unmeasured:
        probs = probs.sum(axis=unmeasured)

    k = circuit.num_measured
    if noise.readout_flip > 0.0:
        f = noise.readout_flip
        for axis in range(k):
            probs = (1.0 - f) * probs + f * np.flip(probs, axis=axis)

    flat = np.clip(probs.reshape(-1), 0.0, None)
    return {format(j, f"0{k}b"): float(flat[j]) for j in range(1 << k)}
