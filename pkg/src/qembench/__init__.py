"""Noisy quantum-circuit simulator and error-mitigation workbench.

Implements zero-noise extrapolation, Clifford-data regression (plain and
variable-noise), virtual distillation, Clifford-guided virtual
distillation and the unified multi-feature regression over the full
(noise level x copy count) grid, plus a reproducible benchmark harness.
"""

from .bench import (
    ExperimentConfig,
    MethodGrid,
    MitigationReport,
    ResultRow,
    SummaryRow,
    aggregate,
    copy_sweep,
    run_experiment,
    run_oracle_suite,
    write_report,
)
from .circuits import (
    Circuit,
    Gate,
    GateKind,
    build_random_circuit,
    exact_state,
    exact_statevector,
    gate_matrix,
    simulate_exact,
)
from .density import (
    DensityMatrix,
    Observable,
    SpectralDiagnostics,
    apply_dephasing,
    apply_depolarizing,
    apply_unitary,
    expectation,
    spectral_diagnostics,
    vd_expectation,
)
from .mitigation import (
    ExtrapolationSpec,
    FitKind,
    RegressionModel,
    copy_richardson_coefficients,
    fit_regression,
    global_depolarizing_f,
    mitigate_cdr,
    mitigate_united,
    mitigate_vd,
    mitigate_vncdr,
    richardson_coefficients,
    zne,
)
from .noise import (
    NoiseModel,
    attach_noise,
    scale_circuit,
    simulate_noisy,
    simulate_noisy_state,
)
from .shots import (
    ExactSampler,
    Sampler,
    ShotBudget,
    allocate_budget,
    sample_expectation,
    sample_vd_estimate,
)
from .training import (
    TrainingCircuit,
    TrainingSet,
    build_training_set,
    feature_truths,
    generate_training_circuits,
    make_training_circuit,
    snap_to_clifford,
)

__version__ = "0.1.0"
