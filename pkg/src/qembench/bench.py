"""End-to-end benchmark harness: instance sweeps, metrics and persistence.

For each (Q, g, instance) the exact channel expectations of every needed
(noise level, copy count) feature are computed once; individual shot
budgets and methods then only re-sample from those truths, so budgets of
10^10 shots cost the same as 10^2.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuits import build_random_circuit, simulate_exact
from .density import Observable
from .mitigation import (
    ExtrapolationSpec,
    FitKind,
    fit_regression,
    mitigate_cdr,
    mitigate_united,
    mitigate_vd,
    mitigate_vncdr,
    zne,
)
from .noise import NoiseModel
from .seeding import derive_seed
from .shots import (
    CDR,
    CGVD,
    UNITED,
    VD,
    VNCDR,
    ZNE,
    BudgetTooSmallError,
    ExactSampler,
    InsufficientShotsError,
    Sampler,
    allocate_budget,
)
from .training import (
    DegenerateTrainingSetError,
    TrainingSet,
    feature_truths,
    generate_training_circuits,
    sample_feature,
)

NOISY = "noisy"

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib


@dataclass(frozen=True)
class MethodGrid:
    """Per-method noise-level / copy-count grids and training-set sizing."""

    zne_levels: tuple[int, ...] = (1, 2)
    zne_fit: str = "linear"
    regression_levels: tuple[int, ...] = (1, 2, 3)
    copies: tuple[int, ...] = (1, 2, 3)
    vd_copies: int = 2
    candidates: int = 100
    select: int = 50
    keep_non_clifford: int = 10

    def to_dict(self) -> dict:
        return {
            "zne_levels": list(self.zne_levels),
            "zne_fit": self.zne_fit,
            "regression_levels": list(self.regression_levels),
            "copies": list(self.copies),
            "vd_copies": self.vd_copies,
            "candidates": self.candidates,
            "select": self.select,
            "keep_non_clifford": self.keep_non_clifford,
        }

    @staticmethod
    def from_dict(d: dict) -> "MethodGrid":
        d = dict(d)
        for key in ("zne_levels", "regression_levels", "copies"):
            if key in d:
                d[key] = tuple(d[key])
        return MethodGrid(**d)


DEFAULT_METHODS = (NOISY, ZNE, VD, CDR, VNCDR, UNITED)


@dataclass(frozen=True)
class ExperimentConfig:
    qubits: tuple[int, ...] = (4,)
    depth_factors: tuple[int, ...] = (1,)
    instances: int = 30
    budgets: tuple[int, ...] = (10**5, 10**6, 10**8, 10**10)
    methods: tuple[str, ...] = DEFAULT_METHODS
    observable: str = "Z"  # padded with identities to the qubit count
    base_seed: int = 2026
    noise: NoiseModel = field(default_factory=NoiseModel)
    grid: MethodGrid = field(default_factory=MethodGrid)
    infinite_shots: bool = False

    def __post_init__(self):
        if self.instances < 1:
            raise ValueError("instances must be >= 1")
        if any(b < 1 for b in self.budgets):
            raise ValueError("budgets must be positive")
        unknown = set(self.methods) - {NOISY, ZNE, VD, CDR, VNCDR, CGVD, UNITED}
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")

    def observable_for(self, num_qubits: int) -> Observable:
        labels = self.observable.ljust(num_qubits, "I")
        return Observable(labels)

    def to_dict(self) -> dict:
        return {
            "qubits": list(self.qubits),
            "depth_factors": list(self.depth_factors),
            "instances": self.instances,
            "budgets": list(self.budgets),
            "methods": list(self.methods),
            "observable": self.observable,
            "base_seed": self.base_seed,
            "noise": self.noise.to_dict(),
            "grid": self.grid.to_dict(),
            "infinite_shots": self.infinite_shots,
        }

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        d = dict(d)
        for key in ("qubits", "depth_factors", "budgets", "methods"):
            if key in d:
                d[key] = tuple(d[key])
        if "noise" in d:
            d["noise"] = NoiseModel.from_dict(d["noise"])
        if "grid" in d:
            d["grid"] = MethodGrid.from_dict(d["grid"])
        return ExperimentConfig(**d)

    @staticmethod
    def from_file(path) -> "ExperimentConfig":
        path = Path(path)
        if path.suffix == ".toml":
            with open(path, "rb") as fh:
                return ExperimentConfig.from_dict(tomllib.load(fh))
        with open(path) as fh:
            return ExperimentConfig.from_dict(json.load(fh))


@dataclass(frozen=True)
class ResultRow:
    q: int
    g: int
    layers: int
    budget: int
    instance_seed: int
    method: str
    exact: float
    estimate: float
    abs_error: float
    shots_used: int
    status: str = "ok"


@dataclass(frozen=True)
class SummaryRow:
    q: int
    g: int
    budget: int
    method: str
    n: int
    mean_abs_error: float
    max_abs_error: float
    stderr: float


@dataclass
class MitigationReport:
    config: ExperimentConfig
    rows: list

    def aggregates(self) -> list:
        return aggregate(self.rows)


def aggregate(rows) -> list[SummaryRow]:
    """Mean/max absolute error per (Q, g, budget, method) across instances."""
    if not rows:
        raise ValueError("no rows to aggregate")
    groups: dict[tuple, list[float]] = {}
    for row in rows:
        if row.status != "ok":
            continue
        groups.setdefault((row.q, row.g, row.budget, row.method), []).append(
            row.abs_error
        )
    out = []
    for (q, g, budget, method), errors in sorted(groups.items()):
        n = len(errors)
        mean = sum(errors) / n
        var = sum((e - mean) ** 2 for e in errors) / (n - 1) if n > 1 else 0.0
        out.append(
            SummaryRow(q, g, budget, method, n, mean, max(errors), math.sqrt(var / n))
        )
    return out


class _Instance:
    """Per-instance cache: circuit, exact value, training circuits and the
    exact feature truths every method samples from."""

    def __init__(self, config: ExperimentConfig, q: int, g: int, index: int, attempt: int = 0):
        self.config = config
        self.q = q
        self.g = g
        self.layers = g * q
        if attempt == 0:
            self.seed = derive_seed(config.base_seed, "instance", q, g, index)
        else:
            self.seed = derive_seed(config.base_seed, "instance", q, g, index, "retry", attempt)
        self.obs = config.observable_for(q)
        self.circuit = build_random_circuit(q, self.layers, self.seed)
        self.exact = simulate_exact(self.circuit, self.obs)

        grid = config.grid
        self.levels = tuple(
            sorted({1, *grid.zne_levels, *grid.regression_levels})
        )
        self.copies = tuple(sorted({1, grid.vd_copies, *grid.copies}))
        self.interest_truths = feature_truths(
            self.circuit, config.noise, self.obs, self.levels, self.copies, self.seed
        )
        self._training = None
        self._training_truths = None

    @property
    def training(self) -> list:
        if self._training is None:
            grid = self.config.grid
            self._training = generate_training_circuits(
                self.circuit,
                self.obs,
                candidates=grid.candidates,
                select=grid.select,
                keep=grid.keep_non_clifford,
                seed=self.seed,
            )
        return self._training

    @property
    def training_truths(self) -> list:
        if self._training_truths is None:
            self._training_truths = [
                feature_truths(
                    tc.circuit, self.config.noise, self.obs,
                    self.levels, self.copies, tc.circuit.seed,
                )
                for tc in self.training
            ]
        return self._training_truths

    def _sampler(self, budget: int, method: str, alloc_kwargs: dict | None = None) -> Sampler:
        """Sampler with the method's per-evaluation shot allotment.

        In infinite-shot mode no allocation happens (and no budget floor
        applies); otherwise the budget is split per allocate_budget.
        """
        if self.config.infinite_shots:
            return ExactSampler()
        if alloc_kwargs is None:
            per_circuit = budget  # full budget on a single evaluation
        else:
            per_circuit = allocate_budget(method, budget, **alloc_kwargs).per_circuit
        return Sampler(per_circuit, self.seed, stream=("sample", budget, method))

    def _sampled_training_set(self, levels, copies, sampler: Sampler) -> TrainingSet:
        schema = tuple((c, m) for c in levels for m in copies)
        rows = [
            [sample_feature(truths[(c, m)], sampler, ("train", i, c, m)) for c, m in schema]
            for i, truths in enumerate(self.training_truths)
        ]
        return TrainingSet(
            schema,
            np.array(rows, dtype=float),
            np.array([tc.exact_value for tc in self.training], dtype=float),
            seeds=tuple(tc.circuit.seed for tc in self.training),
        )

    def _interest_vector(self, levels, copies, sampler: Sampler) -> list[float]:
        return [
            sample_feature(self.interest_truths[(c, m)], sampler, ("interest", c, m))
            for c in levels
            for m in copies
        ]

    def run_method(self, method: str, budget: int) -> tuple[float, int]:
        grid = self.config.grid
        if method == NOISY:
            sampler = self._sampler(budget, method)
            est = sampler.direct(self.interest_truths[(1, 1)].direct, ("interest",))
            return est, sampler.consumed
        if method == ZNE:
            levels = grid.zne_levels
            sampler = self._sampler(budget, method, {"n_levels": len(levels)})
            values = self._interest_vector(levels, (1,), sampler)
            spec = ExtrapolationSpec(levels, FitKind(grid.zne_fit))
            return zne(values, spec), sampler.consumed
        if method == VD:
            sampler = self._sampler(budget, method, {})
            truth = self.interest_truths[(1, grid.vd_copies)]
            ratio = sampler.vd_ratio(truth.numerator, truth.denominator, ("interest",))
            return mitigate_vd(ratio), sampler.consumed

        levels, copies, intercept = {
            CDR: ((1,), (1,), True),
            VNCDR: (grid.regression_levels, (1,), False),
            CGVD: ((1,), grid.copies, False),
            UNITED: (grid.regression_levels, grid.copies, False),
        }[method]
        sampler = self._sampler(
            budget,
            method,
            {
                "n_levels": len(levels),
                "n_training": len(self.training),
                "m_max": max(copies),
            },
        )
        training_set = self._sampled_training_set(levels, copies, sampler)
        model = fit_regression(training_set, include_intercept=intercept)
        features = self._interest_vector(levels, copies, sampler)
        if method == CDR:
            est = mitigate_cdr(model, features[0])
        elif method == VNCDR:
            est = mitigate_vncdr(model, features)
        else:
            est = mitigate_united(model, features)
        return est, sampler.consumed


_REGRESSION_METHODS = (CDR, VNCDR, CGVD, UNITED)


def _build_instance(config: ExperimentConfig, q: int, g: int, index: int) -> _Instance:
    """Instance constructor that redraws circuits whose near-Clifford
    variants all have exactly zero expectation (no usable training set)."""
    needs_training = any(m in _REGRESSION_METHODS for m in config.methods)
    last_error = None
    for attempt in range(10):
        inst = _Instance(config, q, g, index, attempt)
        if not needs_training:
            return inst
        try:
            inst.training
            return inst
        except DegenerateTrainingSetError as err:
            last_error = err
    raise DegenerateTrainingSetError(
        f"no usable circuit for (Q={q}, g={g}, instance {index})"
    ) from last_error


def run_experiment(config: ExperimentConfig) -> MitigationReport:
    """The full instance sweep over (Q, g, budget, method)."""
    rows = []
    for q in config.qubits:
        for g in config.depth_factors:
            for index in range(config.instances):
                inst = _build_instance(config, q, g, index)
                for budget in config.budgets:
                    for method in config.methods:
                        try:
                            est, shots = inst.run_method(method, budget)
                            rows.append(
                                ResultRow(
                                    q, g, inst.layers, budget, inst.seed, method,
                                    inst.exact, est, abs(est - inst.exact), shots,
                                )
                            )
                        except BudgetTooSmallError:
                            rows.append(
                                ResultRow(
                                    q, g, inst.layers, budget, inst.seed, method,
                                    inst.exact, math.nan, math.nan, 0, status="skipped",
                                )
                            )
                        except InsufficientShotsError:
                            # a sampled VD denominator hit zero: the budget
                            # cannot resolve the state's purity
                            rows.append(
                                ResultRow(
                                    q, g, inst.layers, budget, inst.seed, method,
                                    inst.exact, math.nan, math.nan, 0,
                                    status="insufficient_shots",
                                )
                            )
    return MitigationReport(config, rows)


def copy_sweep(config: ExperimentConfig, m_range=range(2, 7)) -> MitigationReport:
    """VD error versus copy number, with the M=1 noisy baseline included."""
    m_values = sorted(m_range)
    if any(m < 1 or m > 6 for m in m_values):
        raise ValueError("copy numbers must lie in 1..6")
    rows = []
    for q in config.qubits:
        for g in config.depth_factors:
            obs = config.observable_for(q)
            for index in range(config.instances):
                layers = g * q
                seed = derive_seed(config.base_seed, "instance", q, g, index)
                circuit = build_random_circuit(q, layers, seed)
                exact = simulate_exact(circuit, obs)
                truths = feature_truths(
                    circuit, config.noise, obs, (1,), (1, *m_values), seed
                )
                for budget in config.budgets:
                    for m in (1, *m_values):
                        method = f"vd_m{m}"
                        if config.infinite_shots:
                            sampler = ExactSampler()
                        else:
                            shots = budget if m == 1 else allocate_budget(VD, budget).per_circuit
                            sampler = Sampler(shots, seed, stream=("sample", budget, method))
                        if m == 1:
                            est = sampler.direct(truths[(1, 1)].direct, ("interest",))
                        else:
                            truth = truths[(1, m)]
                            est = sampler.vd_ratio(
                                truth.numerator, truth.denominator, ("interest",)
                            )
                        rows.append(
                            ResultRow(
                                q, g, layers, budget, seed, method,
                                exact, est, abs(est - exact), sampler.consumed,
                            )
                        )
    return MitigationReport(config, rows)


def run_oracle_suite(
    *, n_circuits: int = 10, p: float = 0.02, seed: int = 7
) -> list[dict]:
    """Analytic-oracle run: global depolarizing noise, infinite shots.

    Each regression-based method must mitigate every circuit to machine-
    level error; returns one record per (circuit, method).
    """
    noise = NoiseModel.global_depolarizing(p)
    grid = MethodGrid(candidates=40, select=20)
    records = []
    for i in range(n_circuits):
        q = (2, 3, 4)[i % 3]
        config = ExperimentConfig(
            qubits=(q,),
            depth_factors=(2,),
            instances=1,
            budgets=(1,),
            methods=(CDR, VNCDR, CGVD, UNITED),
            base_seed=derive_seed(seed, "oracle", i),
            noise=noise,
            grid=grid,
            infinite_shots=True,
        )
        report = run_experiment(config)
        for row in report.rows:
            records.append(
                {
                    "circuit": i,
                    "q": q,
                    "method": row.method,
                    "exact": row.exact,
                    "estimate": row.estimate,
                    "abs_error": row.abs_error,
                    "passed": row.abs_error < 1e-8,
                }
            )
    return records


_RESULT_FIELDS = (
    "q", "g", "layers", "budget", "instance_seed", "method",
    "exact", "estimate", "abs_error", "shots_used", "status",
)


def write_report(report: MitigationReport, outdir) -> None:
    """Persist results.csv, summary.json and plot-ready curves.csv."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "results.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_RESULT_FIELDS)
        for row in report.rows:
            writer.writerow([getattr(row, name) for name in _RESULT_FIELDS])
    summary = report.aggregates()
    with open(outdir / "summary.json", "w") as fh:
        json.dump(
            {
                "config": report.config.to_dict(),
                "aggregates": [vars(s) for s in summary],
            },
            fh,
            indent=2,
        )
    with open(outdir / "curves.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["q", "g", "budget", "method", "mean_abs_error", "max_abs_error", "stderr", "n"]
        )
        for s in summary:
            writer.writerow(
                [s.q, s.g, s.budget, s.method, s.mean_abs_error, s.max_abs_error, s.stderr, s.n]
            )


def load_rows(path) -> list[ResultRow]:
    """Read back a persisted results.csv."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                ResultRow(
                    int(rec["q"]), int(rec["g"]), int(rec["layers"]), int(rec["budget"]),
                    int(rec["instance_seed"]), rec["method"], float(rec["exact"]),
                    float(rec["estimate"]), float(rec["abs_error"]),
                    int(rec["shots_used"]), rec["status"],
                )
            )
    return rows
