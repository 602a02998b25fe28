"""Near-Clifford training circuits and training-set assembly.

Training circuits keep the wiring and gate count of the circuit of
interest; only angles are snapped to the Clifford grid. XX and RY gates
are always snapped, while a random subset of RZ gates stays intact so
that at most `keep` non-Clifford gates remain.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .circuits import CLIFFORD_STEP, Circuit, Gate, GateKind, simulate_exact
from .density import Observable, expectation, vd_expectation
from .noise import NoiseModel, scale_circuit, simulate_noisy_state
from .seeding import derive_seed
from .shots import Sampler

_TWO_PI = 2.0 * math.pi


class DegenerateTrainingSetError(RuntimeError):
    """All candidate circuits have (numerically) zero exact expectation."""


@dataclass(frozen=True)
class TrainingCircuit:
    circuit: Circuit
    exact_value: float
    non_clifford_count: int


# Feature truths: m=1 is a directly measured expectation, m>=2 a VD
# numerator/denominator pair measured through the derangement circuit.
@dataclass(frozen=True)
class FeatureTruth:
    direct: float | None = None
    numerator: float | None = None
    denominator: float | None = None

    @property
    def value(self) -> float:
        if self.direct is not None:
            return self.direct
        return self.numerator / self.denominator


@dataclass
class TrainingSet:
    """Feature rows (one per training circuit) paired with exact targets."""

    schema: tuple[tuple[int, int], ...]  # (noise level c, copy count m)
    features: np.ndarray  # shape (rows, len(schema))
    targets: np.ndarray  # shape (rows,)
    seeds: tuple[int, ...] = ()

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.targets = np.asarray(self.targets, dtype=float)
        if self.features.shape != (len(self.targets), len(self.schema)):
            raise ValueError(
                f"features shape {self.features.shape} inconsistent with "
                f"{len(self.targets)} rows x {len(self.schema)} schema entries"
            )

    def __len__(self) -> int:
        return len(self.targets)

    def restrict(self, levels=None, copies=None) -> "TrainingSet":
        """Sub-schema view keeping only the given noise levels / copy counts."""
        cols = [
            i
            for i, (c, m) in enumerate(self.schema)
            if (levels is None or c in levels) and (copies is None or m in copies)
        ]
        schema = tuple(self.schema[i] for i in cols)
        return TrainingSet(schema, self.features[:, cols], self.targets, self.seeds)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["seed", "exact"] + [f"c{c}_m{m}" for c, m in self.schema]
            writer.writerow(header)
            seeds = self.seeds or (None,) * len(self)
            for seed, target, row in zip(seeds, self.targets, self.features):
                writer.writerow([seed, repr(target)] + [repr(v) for v in row])


def snap_to_clifford(gate: Gate) -> Gate:
    """Snap the angle to the nearest Clifford grid point of the gate's kind.

    Distance is measured on the circle modulo 2pi; exact midpoints snap
    toward the smaller angle for deterministic builds.
    """
    step = CLIFFORD_STEP[gate.kind]
    a = gate.angle % _TWO_PI
    lo = math.floor(a / step)
    d_lo = a - lo * step
    d_hi = (lo + 1) * step - a
    k = lo if d_lo <= d_hi else lo + 1
    return Gate(gate.kind, (k * step) % _TWO_PI, gate.qubits)


def make_training_circuit(
    circuit: Circuit, obs: Observable, keep: int, seed: int
) -> TrainingCircuit:
    """Snap all XX/RY gates and all but `keep` randomly chosen RZ gates."""
    if keep < 0:
        raise ValueError("keep must be >= 0")
    rng = np.random.default_rng(seed)
    rz_positions = [i for i, g in enumerate(circuit.gates) if g.kind is GateKind.RZ]
    n_keep = min(keep, len(rz_positions))
    kept = set(rng.choice(rz_positions, size=n_keep, replace=False)) if n_keep else set()
    gates = tuple(
        g if i in kept else snap_to_clifford(g) for i, g in enumerate(circuit.gates)
    )
    trained = Circuit(circuit.num_qubits, gates, layers=circuit.layers, seed=seed)
    non_clifford = sum(not g.is_clifford for g in trained.gates)
    return TrainingCircuit(trained, simulate_exact(trained, obs), non_clifford)


def feature_truths(
    circuit: Circuit,
    noise: NoiseModel,
    obs: Observable,
    levels,
    copies,
    seed: int,
) -> dict[tuple[int, int], FeatureTruth]:
    """Exact channel expectations for every (noise level, copy count) feature.

    The noise-scaled variant of the circuit is built once per level with a
    seed derived from `seed` and reused for every copy count.
    """
    truths: dict[tuple[int, int], FeatureTruth] = {}
    for c in levels:
        scaled = scale_circuit(circuit, c, derive_seed(seed, "scale", c))
        state = simulate_noisy_state(scaled, noise)
        for m in copies:
            if m == 1:
                truths[(c, 1)] = FeatureTruth(direct=expectation(state, obs))
            else:
                num, den, _ = vd_expectation(state, obs, m)
                truths[(c, m)] = FeatureTruth(numerator=num, denominator=den)
    return truths


def sample_feature(
    truth: FeatureTruth, sampler: Sampler, key: tuple
) -> float:
    if truth.direct is not None:
        return sampler.direct(truth.direct, key)
    return sampler.vd_ratio(truth.numerator, truth.denominator, key)


def generate_training_circuits(
    circuit: Circuit,
    obs: Observable,
    *,
    candidates: int = 100,
    select: int = 50,
    keep: int = 10,
    seed: int = 0,
) -> list[TrainingCircuit]:
    """Candidate generation plus post-selection of the most informative circuits.

    Ranks the candidates by |exact value| (descending, ties kept in seed
    order) and returns the top `select`.
    """
    if select > candidates:
        raise ValueError("select must be <= candidates")
    pool = [
        make_training_circuit(circuit, obs, keep, derive_seed(seed, "train", i))
        for i in range(candidates)
    ]
    if max(abs(tc.exact_value) for tc in pool) < 1e-12:
        raise DegenerateTrainingSetError(
            "all candidate circuits have |exact value| < 1e-12"
        )
    order = sorted(range(candidates), key=lambda i: -abs(pool[i].exact_value))
    return [pool[i] for i in order[:select]]


def build_training_set(
    circuit: Circuit,
    obs: Observable,
    noise: NoiseModel,
    levels,
    copies,
    sampler: Sampler,
    *,
    candidates: int = 100,
    select: int = 50,
    keep: int = 10,
    seed: int = 0,
) -> TrainingSet:
    """Full training-set construction for the regression-based methods."""
    selected = generate_training_circuits(
        circuit, obs, candidates=candidates, select=select, keep=keep, seed=seed
    )
    schema = tuple((c, m) for c in levels for m in copies)
    rows = []
    for i, tc in enumerate(selected):
        truths = feature_truths(tc.circuit, noise, obs, levels, copies, tc.circuit.seed)
        rows.append(
            [sample_feature(truths[(c, m)], sampler, (i, c, m)) for c, m in schema]
        )
    return TrainingSet(
        schema,
        np.array(rows, dtype=float),
        np.array([tc.exact_value for tc in selected]),
        seeds=tuple(tc.circuit.seed for tc in selected),
    )
