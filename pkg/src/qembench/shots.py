"""Finite-shot statistics and per-method shot-budget allocation.

Every measured expectation is modeled as the mean of a +/-1-valued
observable, so a single binomial draw reproduces the exact shot-noise
distribution at any budget (no per-shot looping).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .seeding import rng_for

ZNE = "zne"
VD = "vd"
CDR = "cdr"
VNCDR = "vncdr"
CGVD = "cgvd"
UNITED = "united"

METHODS = (ZNE, VD, CDR, VNCDR, CGVD, UNITED)


class BudgetTooSmallError(ValueError):
    """Total budget leaves zero shots per circuit evaluation."""


class InsufficientShotsError(RuntimeError):
    """Sampled VD denominator too close to zero for the purity level."""


class EstimateKind(str, Enum):
    DIRECT = "direct"
    VD_NUMERATOR = "vd_numerator"
    VD_DENOMINATOR = "vd_denominator"
    VD_RATIO = "vd_ratio"


@dataclass(frozen=True)
class EstimateRecord:
    true_value: float
    shots: int
    estimate: float
    kind: EstimateKind


@dataclass(frozen=True)
class ShotBudget:
    total: int
    per_circuit: int
    circuit_count: int


def _check_bounded(value: float, name: str) -> float:
    value = float(value)
    if abs(value) > 1.0 + 1e-9:
        raise ValueError(f"{name}={value} outside [-1, 1]")
    return min(1.0, max(-1.0, value))


def sample_expectation(true_value: float, shots: int, rng: np.random.Generator) -> float:
    """Binomial estimate of the mean of a +/-1 observable.

    Unbiased, with variance (1 - mu^2)/shots.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    mu = _check_bounded(true_value, "true_value")
    k = rng.binomial(shots, (1.0 + mu) / 2.0)
    return 2.0 * k / shots - 1.0


def sample_vd_estimate(
    numerator_true: float,
    denominator_true: float,
    shots_each: int,
    rng: np.random.Generator,
) -> float:
    """Shot-noisy VD ratio from independent numerator/denominator estimates.

    Each side is the mean of a +/-1 Hadamard-test observable. The ratio is
    clamped to [-1, 1]; a sampled denominator at or below 1e-6 signals
    that the budget is too small for the state's purity.
    """
    if not 0.0 < denominator_true <= 1.0 + 1e-9:
        raise ValueError(f"denominator_true={denominator_true} outside (0, 1]")
    num_hat = sample_expectation(numerator_true, shots_each, rng)
    den_hat = sample_expectation(min(denominator_true, 1.0), shots_each, rng)
    if den_hat < 1e-6:
        raise InsufficientShotsError(
            f"sampled denominator {den_hat:.3e} with {shots_each} shots"
        )
    return min(1.0, max(-1.0, num_hat / den_hat))


def circuit_count(method: str, n_levels: int = 1, n_training: int = 0, m_max: int = 1) -> int:
    """Number of circuit evaluations a method needs for one mitigated value."""
    if method == ZNE:
        return n_levels
    if method == VD:
        return 2
    if method == CDR:
        return n_training + 1
    if method == VNCDR:
        return n_levels * (n_training + 1)
    if method == CGVD:
        # One direct evaluation plus a numerator/denominator pair per
        # extra copy, for each training circuit and the circuit of interest.
        return (n_training + 1) * (2 * m_max - 1)
    if method == UNITED:
        return n_levels * (n_training + 1) * (2 * m_max - 1)
    raise ValueError(f"unknown method {method!r}")


def allocate_budget(
    method: str,
    n_tot: int,
    *,
    n_levels: int = 1,
    n_training: int = 0,
    m_max: int = 1,
) -> ShotBudget:
    """Split the total shot budget evenly across circuit evaluations."""
    if n_tot < 1:
        raise ValueError("total budget must be >= 1")
    count = circuit_count(method, n_levels, n_training, m_max)
    per_circuit = n_tot // count
    if per_circuit < 1:
        raise BudgetTooSmallError(
            f"{method}: budget {n_tot} < {count} circuit evaluations"
        )
    return ShotBudget(total=n_tot, per_circuit=per_circuit, circuit_count=count)


class Sampler:
    """Turns true expectation values into shot-noisy estimates.

    Streams are derived from (root seed, key), so every estimate is
    reproducible independent of evaluation order. Tracks consumed shots.
    """

    def __init__(self, shots_per_estimate: int, root_seed: int, stream: tuple = ()):
        if shots_per_estimate < 1:
            raise ValueError("shots_per_estimate must be >= 1")
        self.shots_per_estimate = shots_per_estimate
        self.root_seed = root_seed
        self.stream = tuple(stream)
        self.consumed = 0

    @property
    def infinite(self) -> bool:
        return False

    def _rng(self, key: tuple) -> np.random.Generator:
        return rng_for(self.root_seed, *self.stream, *key)

    def direct(self, true_value: float, key: tuple) -> float:
        self.consumed += self.shots_per_estimate
        return sample_expectation(true_value, self.shots_per_estimate, self._rng(key))

    def vd_ratio(self, numerator_true: float, denominator_true: float, key: tuple) -> float:
        self.consumed += 2 * self.shots_per_estimate
        return sample_vd_estimate(
            numerator_true, denominator_true, self.shots_per_estimate, self._rng(key)
        )


class ExactSampler(Sampler):
    """Infinite-shot mode: estimates equal the true channel expectations."""

    def __init__(self):
        self.shots_per_estimate = 0
        self.consumed = 0

    @property
    def infinite(self) -> bool:
        return True

    def direct(self, true_value: float, key: tuple) -> float:
        return float(true_value)

    def vd_ratio(self, numerator_true: float, denominator_true: float, key: tuple) -> float:
        return float(numerator_true) / float(denominator_true)
