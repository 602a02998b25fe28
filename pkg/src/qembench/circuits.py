"""Circuit representation, the layered random-circuit generator and exact simulation.

The gate set is the trapped-ion native set: R_Z(a) = exp(-i a/2 Z),
R_Y(b) = exp(-i b/2 Y) and the Molmer-Sorensen XX(d) = exp(-i d XX).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .density import MAX_QUBITS, DensityMatrix, Observable, apply_unitary, expectation


class GateKind(str, Enum):
    RZ = "RZ"
    RY = "RY"
    XX = "XX"


_ARITY = {GateKind.RZ: 1, GateKind.RY: 1, GateKind.XX: 2}

# Angle grid on which a gate of each kind is Clifford: pi/2 steps for the
# single-qubit rotations (RZ(pi/2) is the phase gate), pi/4 steps for XX
# (XX(pi/4) is the maximally entangling MS gate).
CLIFFORD_STEP = {
    GateKind.RZ: math.pi / 2,
    GateKind.RY: math.pi / 2,
    GateKind.XX: math.pi / 4,
}

_CLIFFORD_ATOL = 1e-12


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    angle: float
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        arity = _ARITY[self.kind]
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind.value} acts on {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit indices {self.qubits}")

    @property
    def is_clifford(self) -> bool:
        step = CLIFFORD_STEP[self.kind]
        frac = math.remainder(self.angle, step)
        return abs(frac) <= _CLIFFORD_ATOL


def gate_matrix(gate: Gate) -> np.ndarray:
    a = gate.angle
    if gate.kind is GateKind.RZ:
        return np.array(
            [[np.exp(-0.5j * a), 0], [0, np.exp(0.5j * a)]], dtype=np.complex128
        )
    if gate.kind is GateKind.RY:
        c, s = math.cos(a / 2), math.sin(a / 2)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    # XX(a) = cos(a) I - i sin(a) X(x)X
    c, s = math.cos(a), math.sin(a)
    m = np.diag([c, c, c, c]).astype(np.complex128)
    anti = -1j * s
    m[0, 3] = m[1, 2] = m[2, 1] = m[3, 0] = anti
    return m


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    layers: int = 0
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q >= self.num_qubits for q in g.qubits):
                raise ValueError(f"gate {g} out of range for Q={self.num_qubits}")

    def __len__(self) -> int:
        return len(self.gates)

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "layers": self.layers,
            "seed": self.seed,
            "gates": [
                {"kind": g.kind.value, "angle": g.angle, "qubits": list(g.qubits)}
                for g in self.gates
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "Circuit":
        gates = tuple(
            Gate(GateKind(g["kind"]), float(g["angle"]), tuple(g["qubits"]))
            for g in d["gates"]
        )
        return Circuit(int(d["num_qubits"]), gates, int(d.get("layers", 0)), d.get("seed"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_json(text: str) -> "Circuit":
        return Circuit.from_dict(json.loads(text))


def build_random_circuit(num_qubits: int, layers: int, seed: int) -> Circuit:
    """Layered random circuit of alternating nearest-neighbor XX gates.

    Each layer applies XX on pairs (0,1),(2,3),... then (1,2),(3,4),...
    (open boundary). Every qubit touched by an XX first receives a general
    single-qubit decoration v = RZ RY RZ. All angles uniform in [0, 2pi).
    """
    if num_qubits < 2:
        raise ValueError("need at least 2 qubits")
    if layers < 1:
        raise ValueError("need at least 1 layer")
    rng = np.random.default_rng(seed)
    gates: list[Gate] = []
    for _ in range(layers):
        for offset in (0, 1):
            for a in range(offset, num_qubits - 1, 2):
                b = a + 1
                for q in (a, b):
                    inner, mid, outer = rng.uniform(0.0, 2.0 * math.pi, size=3)
                    gates.append(Gate(GateKind.RZ, inner, (q,)))
                    gates.append(Gate(GateKind.RY, mid, (q,)))
                    gates.append(Gate(GateKind.RZ, outer, (q,)))
                delta = rng.uniform(0.0, 2.0 * math.pi)
                gates.append(Gate(GateKind.XX, delta, (a, b)))
    return Circuit(num_qubits, tuple(gates), layers=layers, seed=seed)


def _check_cap(circuit: Circuit) -> None:
    if circuit.num_qubits > MAX_QUBITS:
        raise ValueError(f"Q={circuit.num_qubits} exceeds cap {MAX_QUBITS}")


def exact_state(circuit: Circuit) -> DensityMatrix:
    """Noiseless output state of the circuit applied to |0...0>."""
    _check_cap(circuit)
    state = DensityMatrix.zero_state(circuit.num_qubits)
    for gate in circuit.gates:
        state = apply_unitary(state, gate_matrix(gate), gate.qubits)
    return state


def exact_statevector(circuit: Circuit) -> np.ndarray:
    """Noiseless output statevector (pure-state fast path)."""
    _check_cap(circuit)
    nq = circuit.num_qubits
    psi = np.zeros((2,) * nq, dtype=np.complex128)
    psi[(0,) * nq] = 1.0
    for gate in circuit.gates:
        k = len(gate.qubits)
        u = gate_matrix(gate).reshape((2,) * (2 * k))
        psi = np.tensordot(u, psi, axes=(tuple(range(k, 2 * k)), gate.qubits))
        psi = np.moveaxis(psi, range(k), gate.qubits)
    return psi.ravel()


def simulate_exact(circuit: Circuit, obs: Observable) -> float:
    """Noiseless expectation value of the observable."""
    return expectation(exact_state(circuit), obs)
