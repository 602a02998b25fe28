"""Tests for the noise model, per-gate channels and noise-level scaling."""

import math

import numpy as np
import pytest

from qembench.circuits import Circuit, Gate, GateKind, build_random_circuit, simulate_exact
from qembench.density import DensityMatrix, Observable, check_physical, expectation
from qembench.noise import (
    GLOBAL_DEPOLARIZING,
    SUPPORTED_NOISE_LEVELS,
    DephasingChannel,
    DepolarizingChannel,
    GateChannel,
    GlobalDepolarizingChannel,
    NoiseModel,
    attach_noise,
    scale_circuit,
    simulate_noisy,
    simulate_noisy_state,
)


class TestNoiseModel:
    def test_defaults_are_valid(self):
        noise = NoiseModel()
        assert 0 < noise.p2_depol < 0.1
        assert noise.p1_depol < noise.p2_depol

    def test_noiseless(self):
        noise = NoiseModel.noiseless()
        assert noise.p1_depol == noise.p2_depol == noise.p_dephase == 0.0
        assert noise.angle_sigma == 0.0

    def test_global_constructor(self):
        noise = NoiseModel.global_depolarizing(0.05)
        assert noise.mode == GLOBAL_DEPOLARIZING
        assert noise.global_p == 0.05

    def test_dict_roundtrip(self):
        noise = NoiseModel(p2_depol=0.01, angle_sampling="random")
        assert NoiseModel.from_dict(noise.to_dict()) == noise

    def test_validation(self):
        with pytest.raises(ValueError):
            NoiseModel(p1_depol=1.5)
        with pytest.raises(ValueError):
            NoiseModel(angle_sigma=-0.1)
        with pytest.raises(ValueError):
            NoiseModel(mode="bogus")
        with pytest.raises(ValueError):
            NoiseModel(angle_sampling="bogus")


class TestAttachNoise:
    def test_local_channel_layout(self):
        noise = NoiseModel()
        channels = attach_noise(Gate(GateKind.XX, 0.3, (0, 1)), noise)
        assert isinstance(channels[0], GateChannel)
        depol = [c for c in channels if isinstance(c, DepolarizingChannel)]
        dephase = [c for c in channels if isinstance(c, DephasingChannel)]
        assert [c.qubit for c in depol] == [0, 1]
        assert [c.qubit for c in dephase] == [0, 1]
        assert all(c.p == noise.p2_depol for c in depol)

    def test_single_qubit_rate(self):
        noise = NoiseModel()
        channels = attach_noise(Gate(GateKind.RZ, 0.3, (0,)), noise)
        depol = [c for c in channels if isinstance(c, DepolarizingChannel)]
        assert [c.p for c in depol] == [noise.p1_depol]

    def test_quadrature_mixture(self):
        noise = NoiseModel(angle_sigma=0.1)
        (gate_channel, *_) = attach_noise(Gate(GateKind.RY, 1.0, (0,)), noise)
        weights = [w for w, _ in gate_channel.terms]
        angles = [a for _, a in gate_channel.terms]
        assert weights == pytest.approx([1 / 6, 2 / 3, 1 / 6])
        assert sorted(angles) == pytest.approx(
            [1.0 - 0.1 * math.sqrt(3), 1.0, 1.0 + 0.1 * math.sqrt(3)]
        )

    def test_zero_sigma_single_term(self):
        noise = NoiseModel(angle_sigma=0.0)
        (gate_channel, *_) = attach_noise(Gate(GateKind.RY, 1.0, (0,)), noise)
        assert gate_channel.terms == ((1.0, 1.0),)

    def test_random_mode_needs_rng(self):
        noise = NoiseModel(angle_sampling="random")
        with pytest.raises(ValueError):
            attach_noise(Gate(GateKind.RY, 1.0, (0,)), noise)
        channels = attach_noise(
            Gate(GateKind.RY, 1.0, (0,)), noise, np.random.default_rng(0)
        )
        assert len(channels[0].terms) == 1

    def test_global_mode(self):
        noise = NoiseModel.global_depolarizing(0.02)
        channels = attach_noise(Gate(GateKind.XX, 0.3, (0, 1)), noise)
        assert len(channels) == 2
        assert isinstance(channels[1], GlobalDepolarizingChannel)
        assert channels[1].p == 0.02


class TestSimulateNoisy:
    def test_noiseless_matches_exact(self):
        circuit = build_random_circuit(3, 2, seed=1)
        obs = Observable("ZII")
        noisy = simulate_noisy(circuit, NoiseModel.noiseless(), obs)
        assert noisy == pytest.approx(simulate_exact(circuit, obs), abs=1e-12)

    def test_output_is_physical(self):
        circuit = build_random_circuit(3, 2, seed=2)
        state = simulate_noisy_state(circuit, NoiseModel())
        check_physical(state)

    def test_noise_reduces_purity(self):
        circuit = build_random_circuit(3, 2, seed=3)
        state = simulate_noisy_state(circuit, NoiseModel())
        purity = float(np.real(np.trace(state.data @ state.data)))
        assert purity < 1.0 - 1e-4

    def test_generic_circuits_are_biased(self):
        # default noise visibly shifts the expectation on random circuits
        noise = NoiseModel()
        deviations = []
        for seed in range(30):
            circuit = build_random_circuit(4, 4, seed=seed)
            obs = Observable("ZIII")
            deviations.append(
                abs(simulate_noisy(circuit, noise, obs) - simulate_exact(circuit, obs))
            )
        assert max(deviations) > 0.0
        assert sum(d > 1e-6 for d in deviations) >= 29

    def test_global_mode_damps_uniformly(self):
        # K gates of global depolarizing strength p scale any traceless
        # expectation by exactly (1-p)^K
        p = 0.05
        circuit = build_random_circuit(2, 1, seed=4)
        obs = Observable("ZI")
        exact = simulate_exact(circuit, obs)
        noisy = simulate_noisy(circuit, NoiseModel.global_depolarizing(p), obs)
        assert noisy == pytest.approx(exact * (1 - p) ** len(circuit), abs=1e-12)

    def test_deterministic(self):
        circuit = build_random_circuit(3, 1, seed=5)
        noise = NoiseModel()
        obs = Observable("ZII")
        assert simulate_noisy(circuit, noise, obs) == simulate_noisy(circuit, noise, obs)


class TestScaleCircuit:
    def test_supported_levels(self):
        assert SUPPORTED_NOISE_LEVELS == (1, 2, 3)
        with pytest.raises(ValueError):
            scale_circuit(build_random_circuit(2, 1, seed=0), 4, seed=0)

    def test_level_one_is_identity(self):
        circuit = build_random_circuit(2, 1, seed=0)
        assert scale_circuit(circuit, 1, seed=0) is circuit

    @pytest.mark.parametrize("c", [2, 3])
    def test_gate_count_scales_exactly(self, c):
        circuit = build_random_circuit(4, 2, seed=6)
        scaled = scale_circuit(circuit, c, seed=7)
        assert len(scaled) == c * len(circuit)

    @pytest.mark.parametrize("c", [2, 3])
    def test_unitary_invariance_30_circuits(self, c):
        obs = Observable("ZIII")
        for seed in range(30):
            circuit = build_random_circuit(4, 4, seed=seed)
            scaled = scale_circuit(circuit, c, seed=1000 + seed)
            assert simulate_exact(scaled, obs) == pytest.approx(
                simulate_exact(circuit, obs), abs=1e-10
            )

    def test_split_preserves_gate_kinds(self):
        circuit = build_random_circuit(2, 1, seed=8)
        scaled = scale_circuit(circuit, 2, seed=9)
        assert [g.kind for g in scaled.gates[:2]] == [circuit.gates[0].kind] * 2
        a, b = scaled.gates[0].angle, scaled.gates[1].angle
        assert a + b == pytest.approx(circuit.gates[0].angle)

    def test_identity_insertion_structure(self):
        circuit = Circuit(2, (Gate(GateKind.RY, 0.5, (0,)),))
        scaled = scale_circuit(circuit, 3, seed=10)
        g0, g1, g2 = scaled.gates
        assert g0 == circuit.gates[0]
        assert g1.angle == pytest.approx(-g2.angle)

    def test_more_gates_more_noise(self):
        circuit = build_random_circuit(3, 2, seed=11)
        noise = NoiseModel()
        states = [
            simulate_noisy_state(scale_circuit(circuit, c, seed=12), noise)
            for c in (1, 2, 3)
        ]
        purities = [float(np.real(np.trace(s.data @ s.data))) for s in states]
        assert purities[0] > purities[1] > purities[2]
