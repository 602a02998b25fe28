"""Dense density-matrix representation and linear-algebra primitives.

States are immutable: every operation returns a new DensityMatrix. Gate
application contracts the unitary against the target-qubit axes of the
state tensor instead of building the full 2^Q x 2^Q unitary, which keeps
Q=10 runs tractable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 12

PAULIS = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# When True, trace/Hermiticity/PSD are asserted after every channel.
STRICT_CHECKS = False

_TRACE_ATOL = 1e-10
_HERM_ATOL = 1e-10
_EIG_FLOOR = -1e-9
_IMAG_ATOL = 1e-8


class DegenerateStateError(RuntimeError):
    """Raised when a state is too degenerate for the requested operation."""


@dataclass(frozen=True)
class DensityMatrix:
    """2^Q x 2^Q complex Hermitian PSD matrix with unit trace."""

    num_qubits: int
    data: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}")
        d = 2**self.num_qubits
        if self.data.shape != (d, d):
            raise ValueError(f"data must be {d}x{d}, got {self.data.shape}")

    @property
    def dim(self) -> int:
        return 2**self.num_qubits

    @staticmethod
    def zero_state(num_qubits: int) -> "DensityMatrix":
        d = 2**num_qubits
        data = np.zeros((d, d), dtype=np.complex128)
        data[0, 0] = 1.0
        return DensityMatrix(num_qubits, data)

    @staticmethod
    def from_statevector(psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        q = int(np.log2(psi.size))
        if 2**q != psi.size:
            raise ValueError("statevector length must be a power of 2")
        psi = psi / np.linalg.norm(psi)
        return DensityMatrix(q, np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class Observable:
    """Tensor product of single-qubit Paulis, one label per qubit."""

    paulis: str

    def __post_init__(self):
        if not self.paulis or any(c not in PAULIS for c in self.paulis):
            raise ValueError(f"invalid pauli string {self.paulis!r}")

    @property
    def num_qubits(self) -> int:
        return len(self.paulis)

    @property
    def is_traceless(self) -> bool:
        return any(c != "I" for c in self.paulis)

    @staticmethod
    def single(pauli: str, qubit: int, num_qubits: int) -> "Observable":
        labels = ["I"] * num_qubits
        labels[qubit] = pauli
        return Observable("".join(labels))

    def matrix(self) -> np.ndarray:
        out = np.array([[1.0]], dtype=np.complex128)
        for c in self.paulis:
            out = np.kron(out, PAULIS[c])
        return out


def check_physical(state: DensityMatrix, *, check_psd: bool = True) -> None:
    """Assert trace 1, Hermiticity and (optionally) positivity."""
    rho = state.data
    tr = np.trace(rho)
    if abs(tr - 1.0) > _TRACE_ATOL:
        raise AssertionError(f"trace deviates from 1 by {abs(tr - 1.0):.3e}")
    if np.max(np.abs(rho - rho.conj().T)) > _HERM_ATOL:
        raise AssertionError("state is not Hermitian within tolerance")
    if check_psd:
        evals = np.linalg.eigvalsh(rho)
        if evals.min() < _EIG_FLOOR:
            raise AssertionError(f"negative eigenvalue {evals.min():.3e}")


def _checked(state: DensityMatrix) -> DensityMatrix:
    if STRICT_CHECKS:
        check_physical(state)
    return state


def _as_tensor(state: DensityMatrix) -> np.ndarray:
    return state.data.reshape((2,) * (2 * state.num_qubits))


def _validate_qubits(state: DensityMatrix, qubits) -> tuple:
    qubits = tuple(qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"qubit indices must be distinct: {qubits}")
    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise ValueError(f"qubit index {q} out of range for Q={state.num_qubits}")
    return qubits


def apply_unitary(state: DensityMatrix, u: np.ndarray, qubits) -> DensityMatrix:
    """Return U rho U^dag with U acting on the given qubits."""
    qubits = _validate_qubits(state, qubits)
    k = len(qubits)
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2**k, 2**k):
        raise ValueError(f"unitary shape {u.shape} does not match {k} qubit(s)")
    nq = state.num_qubits
    t = _as_tensor(state)
    ut = u.reshape((2,) * (2 * k))
    in_axes = tuple(range(k, 2 * k))
    # ket side: rho' = U rho
    t = np.tensordot(ut, t, axes=(in_axes, qubits))
    t = np.moveaxis(t, range(k), qubits)
    # bra side: rho'' = rho' U^dag
    bra = tuple(nq + q for q in qubits)
    t = np.tensordot(ut.conj(), t, axes=(in_axes, bra))
    t = np.moveaxis(t, range(k), bra)
    return _checked(DensityMatrix(nq, t.reshape(state.data.shape)))


def _validate_probability(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return p


def apply_depolarizing(
    state: DensityMatrix,
    p: float,
    qubit: int | None = None,
    *,
    global_channel: bool = False,
) -> DensityMatrix:
    """Local single-qubit depolarizing channel, or the global variant.

    Local: (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z) on the target.
    Global: (1-p) rho + p I/d over all qubits.
    """
    p = _validate_probability(p)
    if global_channel:
        d = state.dim
        data = (1.0 - p) * state.data + (p / d) * np.eye(d, dtype=np.complex128)
        return _checked(DensityMatrix(state.num_qubits, data))
    if qubit is None:
        raise ValueError("local depolarizing channel needs a target qubit")
    (qubit,) = _validate_qubits(state, (qubit,))
    if p == 0.0:
        return state
    nq = state.num_qubits
    t = _as_tensor(state)
    # X rho X + Y rho Y + Z rho Z = 2 tr_q(rho) (x) I_q - rho
    traced = np.trace(t, axis1=qubit, axis2=nq + qubit)
    embedded = np.moveaxis(
        np.multiply.outer(np.eye(2, dtype=np.complex128), traced),
        (0, 1),
        (qubit, nq + qubit),
    )
    out = (1.0 - 4.0 * p / 3.0) * t + (2.0 * p / 3.0) * embedded
    return _checked(DensityMatrix(nq, out.reshape(state.data.shape)))


def apply_dephasing(state: DensityMatrix, p: float, qubit: int) -> DensityMatrix:
    """(1-p) rho + p Z rho Z on the target qubit."""
    p = _validate_probability(p)
    if p == 0.0:
        _validate_qubits(state, (qubit,))
        return state
    flipped = apply_unitary(state, PAULIS["Z"], (qubit,))
    data = (1.0 - p) * state.data + p * flipped.data
    return _checked(DensityMatrix(state.num_qubits, data))


def _real_trace(value: complex, what: str) -> float:
    if abs(value.imag) > _IMAG_ATOL:
        raise ValueError(f"{what} has imaginary residue {value.imag:.3e}")
    return float(value.real)


def _trace_pauli_product(matrix: np.ndarray, obs: Observable, nq: int) -> complex:
    """tr(X A) for a Pauli-string X, by contracting Paulis qubit by qubit."""
    t = matrix.reshape((2,) * (2 * nq))
    for q, label in enumerate(obs.paulis):
        if label == "I":
            continue
        t = np.moveaxis(np.tensordot(PAULIS[label], t, axes=([1], [q])), 0, q)
    return complex(np.trace(t.reshape(matrix.shape)))


def expectation(state: DensityMatrix, obs: Observable) -> float:
    """tr(rho X); the imaginary residue is asserted small, then dropped."""
    if obs.num_qubits != state.num_qubits:
        raise ValueError(
            f"observable acts on {obs.num_qubits} qubits, state has {state.num_qubits}"
        )
    return _real_trace(_trace_pauli_product(state.data, obs, state.num_qubits), "tr(rho X)")


def vd_expectation(
    state: DensityMatrix, obs: Observable, copies: int
) -> tuple[float, float, float]:
    """Purified expectation tr(rho^M X) / tr(rho^M).

    Returns (numerator, denominator, ratio). M=1 reduces to expectation.
    """
    if copies < 1:
        raise ValueError("copies must be >= 1")
    if obs.num_qubits != state.num_qubits:
        raise ValueError("observable/state dimension mismatch")
    rho_m = np.linalg.matrix_power(state.data, copies)
    den = _real_trace(complex(np.trace(rho_m)), "tr(rho^M)")
    if den < 1e-14:
        raise DegenerateStateError(f"tr(rho^M) = {den:.3e} is numerically degenerate")
    num = _real_trace(_trace_pauli_product(rho_m, obs, state.num_qubits), "tr(rho^M X)")
    return num, den, num / den


@dataclass(frozen=True)
class SpectralDiagnostics:
    """Dominant-eigenvector diagnostics of a noisy state."""

    coherent_mismatch: float
    noise_floor: float
    bound: float  # 2 c ||X||_inf
    bound_holds: bool
    degenerate: bool


def spectral_diagnostics(
    state: DensityMatrix, exact_state: np.ndarray, obs: Observable
) -> SpectralDiagnostics:
    """Coherent mismatch c and noise floor of the dominant eigenvector.

    c = 1 - |<psi_exact|psi_0>|^2 and the floor is
    <psi_0|X|psi_0> - <psi_exact|X|psi_exact>. The reported bound is
    2 c ||X||_inf; it can be violated for strongly coherent perturbations,
    so violation is surfaced as a flag rather than an error.
    """
    psi_exact = np.asarray(exact_state, dtype=np.complex128).ravel()
    if psi_exact.size != state.dim:
        raise ValueError("exact state dimension mismatch")
    norm = np.linalg.norm(psi_exact)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"exact state not normalized (norm {norm})")
    evals, evecs = np.linalg.eigh(state.data)
    top = evals.max()
    candidates = np.flatnonzero(evals > top - 1e-12)
    degenerate = candidates.size > 1
    psi0 = evecs[:, candidates[0]]  # ties broken by lowest index

    mismatch = 1.0 - abs(np.vdot(psi_exact, psi0)) ** 2
    mismatch = max(mismatch, 0.0)
    x = obs.matrix()
    floor = float(np.real(psi0.conj() @ x @ psi0 - psi_exact.conj() @ x @ psi_exact))
    x_norm = float(np.max(np.abs(np.linalg.eigvalsh(x))))
    bound = 2.0 * mismatch * x_norm
    return SpectralDiagnostics(
        coherent_mismatch=mismatch,
        noise_floor=floor,
        bound=bound,
        bound_holds=abs(floor) <= bound + 1e-12,
        degenerate=degenerate,
    )
