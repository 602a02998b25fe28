"""Trapped-ion style noise model and the noise-level scaling transforms.

Per-gate channels: coherent angle imprecision, local depolarizing and
local dephasing on the acted qubits. A global-depolarizing mode replaces
all of that with a single global channel after each gate, which is the
configuration with a closed-form mitigation oracle.

Noise levels c>1 are realized on the circuit itself: c=2 splits every
gate G(theta) into G(alpha)G(theta-alpha), c=3 appends an identity
insertion G(alpha)G(-alpha) after every gate. Both leave the encoded
unitary unchanged while scaling the gate count by exactly c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, Gate, gate_matrix
from .density import (
    DensityMatrix,
    Observable,
    apply_depolarizing,
    apply_dephasing,
    apply_unitary,
    expectation,
)

SUPPORTED_NOISE_LEVELS = (1, 2, 3)

# 3-point Gauss-Hermite rule for averaging over a Gaussian angle error:
# offsets in units of sigma, with matching mixture weights.
_GH3_OFFSETS = (-math.sqrt(3.0), 0.0, math.sqrt(3.0))
_GH3_WEIGHTS = (1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0)

LOCAL = "local"
GLOBAL_DEPOLARIZING = "global"


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate noise strengths. Defaults are of realistic trapped-ion
    magnitude but are configuration, not ground truth."""

    p1_depol: float = 6.5e-4
    p2_depol: float = 6.5e-3
    p_dephase: float = 1.3e-3
    angle_sigma: float = 6.5e-3
    mode: str = LOCAL
    global_p: float = 0.0
    # "quadrature": deterministic 3-point average over the Gaussian angle
    # error. "random": one sampled offset per gate (stress testing only).
    angle_sampling: str = "quadrature"

    def __post_init__(self):
        for name in ("p1_depol", "p2_depol", "p_dephase", "global_p"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.angle_sigma < 0.0:
            raise ValueError("angle_sigma must be >= 0")
        if self.mode not in (LOCAL, GLOBAL_DEPOLARIZING):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.angle_sampling not in ("quadrature", "random"):
            raise ValueError(f"unknown angle_sampling {self.angle_sampling!r}")

    @staticmethod
    def noiseless() -> "NoiseModel":
        return NoiseModel(0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def global_depolarizing(p: float) -> "NoiseModel":
        return NoiseModel(0.0, 0.0, 0.0, 0.0, mode=GLOBAL_DEPOLARIZING, global_p=p)

    def to_dict(self) -> dict:
        return {
            "p1_depol": self.p1_depol,
            "p2_depol": self.p2_depol,
            "p_dephase": self.p_dephase,
            "angle_sigma": self.angle_sigma,
            "mode": self.mode,
            "global_p": self.global_p,
            "angle_sampling": self.angle_sampling,
        }

    @staticmethod
    def from_dict(d: dict) -> "NoiseModel":
        return NoiseModel(**d)


@dataclass(frozen=True)
class GateChannel:
    """A gate applied as a weighted mixture over angle offsets."""

    gate: Gate
    terms: tuple[tuple[float, float], ...]  # (weight, angle)

    def apply(self, state: DensityMatrix) -> DensityMatrix:
        if len(self.terms) == 1:
            _, angle = self.terms[0]
            u = gate_matrix(Gate(self.gate.kind, angle, self.gate.qubits))
            return apply_unitary(state, u, self.gate.qubits)
        acc = None
        for weight, angle in self.terms:
            u = gate_matrix(Gate(self.gate.kind, angle, self.gate.qubits))
            term = apply_unitary(state, u, self.gate.qubits).data
            acc = weight * term if acc is None else acc + weight * term
        return DensityMatrix(state.num_qubits, acc)


@dataclass(frozen=True)
class DepolarizingChannel:
    p: float
    qubit: int

    def apply(self, state: DensityMatrix) -> DensityMatrix:
        return apply_depolarizing(state, self.p, self.qubit)


@dataclass(frozen=True)
class DephasingChannel:
    p: float
    qubit: int

    def apply(self, state: DensityMatrix) -> DensityMatrix:
        return apply_dephasing(state, self.p, self.qubit)


@dataclass(frozen=True)
class GlobalDepolarizingChannel:
    p: float

    def apply(self, state: DensityMatrix) -> DensityMatrix:
        return apply_depolarizing(state, self.p, global_channel=True)


def attach_noise(gate: Gate, noise: NoiseModel, rng: np.random.Generator | None = None):
    """Channel sequence realizing the noisy execution of one gate."""
    if noise.mode == GLOBAL_DEPOLARIZING:
        channels = [GateChannel(gate, ((1.0, gate.angle),))]
        if noise.global_p > 0.0:
            channels.append(GlobalDepolarizingChannel(noise.global_p))
        return channels

    if noise.angle_sigma == 0.0:
        terms = ((1.0, gate.angle),)
    elif noise.angle_sampling == "random":
        if rng is None:
            raise ValueError("sampled angle imprecision needs an rng")
        terms = ((1.0, gate.angle + rng.normal(0.0, noise.angle_sigma)),)
    else:
        terms = tuple(
            (w, gate.angle + x * noise.angle_sigma)
            for w, x in zip(_GH3_WEIGHTS, _GH3_OFFSETS)
        )
    channels = [GateChannel(gate, terms)]
    p_depol = noise.p1_depol if len(gate.qubits) == 1 else noise.p2_depol
    for q in gate.qubits:
        if p_depol > 0.0:
            channels.append(DepolarizingChannel(p_depol, q))
    for q in gate.qubits:
        if noise.p_dephase > 0.0:
            channels.append(DephasingChannel(noise.p_dephase, q))
    return channels


def simulate_noisy_state(
    circuit: Circuit, noise: NoiseModel, rng: np.random.Generator | None = None
) -> DensityMatrix:
    """Mixed output state of the circuit under the noise model."""
    state = DensityMatrix.zero_state(circuit.num_qubits)
    for gate in circuit.gates:
        for channel in attach_noise(gate, noise, rng):
            state = channel.apply(state)
    return state


def simulate_noisy(
    circuit: Circuit,
    noise: NoiseModel,
    obs: Observable,
    rng: np.random.Generator | None = None,
) -> float:
    """Exact expectation of the noisy mixed state (no shot noise)."""
    return expectation(simulate_noisy_state(circuit, noise, rng), obs)


def scale_circuit(circuit: Circuit, c: int, seed: int) -> Circuit:
    """Scale the effective noise level by growing the gate count c-fold.

    The returned circuit encodes the same unitary: gate splitting for c=2,
    identity insertion for c=3. c=1 returns the input unchanged.
    """
    if c not in SUPPORTED_NOISE_LEVELS:
        raise ValueError(f"unsupported noise level {c}; supported: {SUPPORTED_NOISE_LEVELS}")
    if c == 1:
        return circuit
    rng = np.random.default_rng(seed)
    gates: list[Gate] = []
    for g in circuit.gates:
        if c == 2:
            alpha = rng.uniform(0.0, 1.0) * g.angle
            gates.append(Gate(g.kind, alpha, g.qubits))
            gates.append(Gate(g.kind, g.angle - alpha, g.qubits))
        else:
            alpha = rng.uniform(0.0, 2.0 * math.pi)
            gates.append(g)
            gates.append(Gate(g.kind, alpha, g.qubits))
            gates.append(Gate(g.kind, -alpha, g.qubits))
    return Circuit(circuit.num_qubits, tuple(gates), layers=circuit.layers, seed=circuit.seed)
