"""Mitigation estimators: extrapolation, regression and analytic oracles.

Richardson weights are the Lagrange basis evaluated at zero noise. The
regression-based estimators (CDR, vnCDR, CGVD, UNITED) share one
ordinary-least-squares fit; only the feature schema differs. Only CDR
carries an intercept.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .training import TrainingSet

_RANK_TOL = 1e-10


class FitKind(str, Enum):
    RICHARDSON = "richardson"
    LINEAR = "linear"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class ExtrapolationSpec:
    levels: tuple[float, ...]
    fit: FitKind = FitKind.RICHARDSON

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(float(c) for c in self.levels))
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("levels must be strictly increasing")


def richardson_coefficients(levels) -> np.ndarray:
    """Weights gamma with sum(gamma) = 1 and sum(gamma c^k) = 0 for k=1..n.

    Computed as Lagrange basis polynomials evaluated at c=0:
    gamma_j = prod_{i != j} c_i / (c_i - c_j).
    """
    c = np.asarray(levels, dtype=float)
    if len(np.unique(c)) != len(c):
        raise ValueError("levels must be distinct")
    gamma = np.empty(len(c))
    for j in range(len(c)):
        others = np.delete(c, j)
        gamma[j] = np.prod(others / (others - c[j]))
    return gamma


def copy_richardson_coefficients(m_max: int) -> np.ndarray:
    """Extrapolation weights over copy counts 1..M_max (copy count taken as
    the noise-level coordinate). Diagnostics only; production CGVD fits."""
    return richardson_coefficients(range(1, m_max + 1))


def _linear_at_zero(levels: np.ndarray, values: np.ndarray) -> float:
    slope, intercept = np.polyfit(levels, values, 1)
    return float(intercept)


def zne(values, spec: ExtrapolationSpec) -> float:
    """Zero-noise extrapolated estimate from per-level expectation values."""
    values = np.asarray(values, dtype=float)
    levels = np.asarray(spec.levels, dtype=float)
    if values.shape != levels.shape:
        raise ValueError(f"{len(values)} values for {len(levels)} levels")
    if spec.fit is FitKind.RICHARDSON:
        return float(richardson_coefficients(levels) @ values)
    if len(values) < 2:
        raise ValueError(f"{spec.fit.value} extrapolation needs >= 2 points")
    if spec.fit is FitKind.LINEAR:
        return _linear_at_zero(levels, values)
    # Exponential a exp(-b c) via a log-linear fit on |values|; falls back
    # to linear when the values change sign or the fit degenerates.
    if np.any(values == 0.0) or len(set(np.sign(values))) != 1:
        return _linear_at_zero(levels, values)
    sign = np.sign(values[0])
    _, log_a = np.polyfit(levels, np.log(np.abs(values)), 1)
    result = sign * np.exp(log_a)
    if not np.isfinite(result):
        return _linear_at_zero(levels, values)
    return float(result)


@dataclass(frozen=True)
class RegressionModel:
    """Fitted linear map from noisy feature vectors to exact values."""

    coefficients: np.ndarray
    intercept: float | None
    schema: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", np.asarray(self.coefficients, dtype=float)
        )
        if len(self.coefficients) != len(self.schema):
            raise ValueError("coefficient count must match schema length")

    def predict(self, features) -> float:
        features = np.asarray(features, dtype=float)
        if features.shape != (len(self.schema),):
            raise ValueError(
                f"feature vector length {features.shape} does not match schema "
                f"({len(self.schema)} entries)"
            )
        out = float(self.coefficients @ features)
        if self.intercept is not None:
            out += self.intercept
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": [list(entry) for entry in self.schema],
                "coefficients": list(self.coefficients),
                "intercept": self.intercept,
            }
        )

    @staticmethod
    def from_json(text: str) -> "RegressionModel":
        d = json.loads(text)
        return RegressionModel(
            np.asarray(d["coefficients"], dtype=float),
            d["intercept"],
            tuple(tuple(entry) for entry in d["schema"]),
        )


def fit_regression(
    training: TrainingSet, include_intercept: bool, ridge: float = 0.0
) -> RegressionModel:
    """Least-squares fit of the training set; minimum-norm under rank deficiency."""
    if len(training) == 0:
        raise ValueError("empty training set")
    a = training.features
    if include_intercept:
        a = np.hstack([a, np.ones((len(training), 1))])
    if len(training) < a.shape[1]:
        raise ValueError(
            f"{len(training)} rows cannot determine {a.shape[1]} parameters"
        )
    if ridge > 0.0:
        gram = a.T @ a + ridge * np.eye(a.shape[1])
        solution = np.linalg.solve(gram, a.T @ training.targets)
    else:
        solution, *_ = np.linalg.lstsq(a, training.targets, rcond=_RANK_TOL)
    if include_intercept:
        coeffs, intercept = solution[:-1], float(solution[-1])
    else:
        coeffs, intercept = solution, None
    return RegressionModel(coeffs, intercept, training.schema)


def _require_schema(model: RegressionModel, *, copies=None, length=None, intercept=None):
    if length is not None and len(model.schema) != length:
        raise ValueError(f"expected {length} feature(s), schema has {len(model.schema)}")
    if copies is not None and any(m not in copies for _, m in model.schema):
        raise ValueError(f"schema copy counts {model.schema} not all in {copies}")
    if intercept is True and model.intercept is None:
        raise ValueError("model is missing the required intercept")
    if intercept is False and model.intercept is not None:
        raise ValueError("model must not carry an intercept")


def mitigate_cdr(model: RegressionModel, noisy: float) -> float:
    """a1 * noisy + a2 with the single-feature CDR model."""
    _require_schema(model, length=1, copies=(1,), intercept=True)
    return model.predict([noisy])


def mitigate_vncdr(model: RegressionModel, noisy_vector) -> float:
    """Learned extrapolation over noise levels (single-copy features)."""
    _require_schema(model, copies=(1,), intercept=False)
    return model.predict(noisy_vector)


def mitigate_vd(ratio_estimate: float) -> float:
    """The VD ratio is itself the mitigated value; kept for a uniform API."""
    return float(ratio_estimate)


def mitigate_united(model: RegressionModel, feature_vector) -> float:
    """Regression over the full (noise level x copy count) feature grid.

    The single-level column subset is CGVD; the single-copy row subset
    is vnCDR.
    """
    _require_schema(model, intercept=False)
    return model.predict(feature_vector)


def global_depolarizing_f(m: int, j: int, p: float, d: int) -> float:
    """Closed-form VD attenuation factor under global depolarizing noise.

    f_{m,j} = 1 - d p^{mj} / ((d-1) p^{mj} + (d - p^j (d-1))^m), the
    multiplier of the ideal expectation when the channel of strength p acts
    j times and VD uses m copies. j=1, m=1 reduces to 1-p.
    """
    if m < 1 or j < 1:
        raise ValueError("m and j must be >= 1")
    if not 0.0 <= p < 1.0:
        raise ValueError("p must be in [0, 1)")
    if d < 2:
        raise ValueError("d must be >= 2")
    pmj = p ** (m * j)
    return 1.0 - d * pmj / ((d - 1) * pmj + (d - p**j * (d - 1)) ** m)
