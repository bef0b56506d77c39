"""Simulated prepare/measure pipeline and maximum-likelihood process tomography.

Channels are lists of Kraus operators on the qubit subspace. Propagators of
the three-level engine enter through their qubit block; any leaked population
is read out as a dark count. Process matrices chi live in the (I, X, Y, Z)
operator basis with Tr chi = 1 for a trace-preserving channel.

The MLE is the standard fixed-point ascent on the Choi matrix with a
trace-preservation projection each step, started from linear inversion
projected onto the positive cone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engine import NoiseModel
from .qcore import PAULIS, SX, SY, ket

PREP_LABELS = tuple(range(6))
BASES = ("x", "y", "z")


def rotation(axis: str, angle: float) -> np.ndarray:
    """R_k(angle) = exp(-i angle sigma_k / 2)."""
    sigma = {"x": SX, "y": SY}[axis]
    return np.cos(angle / 2.0) * np.eye(2) - 1j * np.sin(angle / 2.0) * sigma


_PREP_ROTATIONS = (
    np.eye(2, dtype=complex),          # |0>
    rotation("x", np.pi),              # |1>
    rotation("y", np.pi / 2.0),        # |+>
    rotation("y", -np.pi / 2.0),       # |->
    rotation("x", -np.pi / 2.0),       # |+i>
    rotation("x", np.pi / 2.0),        # |-i>
)

# pre-rotation mapping the measured axis onto z before bright/dark readout
_MEAS_PREROT = {
    "x": rotation("y", -np.pi / 2.0),
    "y": rotation("x", np.pi / 2.0),
    "z": np.eye(2, dtype=complex),
}


def prepare_input(label: int) -> np.ndarray:
    """The six tomography input states, built by rotating |0>."""
    if label not in PREP_LABELS:
        raise ValueError(f"prep label must be 0..5, got {label}")
    return _PREP_ROTATIONS[label] @ ket(2, 0)


def measurement_effect(basis: str) -> np.ndarray:
    """Bright-outcome POVM effect for the given measurement basis."""
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}, got {basis!r}")
    r = _MEAS_PREROT[basis]
    return r.conj().T @ np.outer(ket(2, 0), ket(2, 0).conj()) @ r


@dataclass(frozen=True)
class QubitChannel:
    """A (possibly trace-decreasing) qubit channel as Kraus operators."""
    kraus: tuple

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros((2, 2), dtype=complex)
        for k in self.kraus:
            out += k @ rho @ k.conj().T
        return out


def unitary_channel(u: np.ndarray) -> QubitChannel:
    return QubitChannel(kraus=(np.asarray(u, dtype=complex),))


def propagator_channel(u3: np.ndarray) -> QubitChannel:
    """Qubit block of a 3x3 propagator; leakage shows up as trace loss."""
    u3 = np.asarray(u3, dtype=complex)
    if u3.shape != (3, 3):
        raise ValueError("expected a 3x3 propagator")
    return QubitChannel(kraus=(u3[:2, :2],))


def depolarizing_channel(d: float) -> QubitChannel:
    """rho -> (1-d) rho + d I/2."""
    if not 0.0 <= d <= 1.0:
        raise ValueError("depolarizing parameter must lie in [0, 1]")
    return QubitChannel(kraus=(
        np.sqrt(1.0 - 0.75 * d) * PAULIS[0],
        np.sqrt(0.25 * d) * PAULIS[1],
        np.sqrt(0.25 * d) * PAULIS[2],
        np.sqrt(0.25 * d) * PAULIS[3]))


def compose(outer: QubitChannel, inner: QubitChannel) -> QubitChannel:
    """Channel applying `inner` first, then `outer`."""
    return QubitChannel(kraus=tuple(a @ b for a in outer.kraus for b in inner.kraus))


@dataclass(frozen=True)
class CountsRecord:
    prep: int
    basis: str
    shots: int
    bright: float    # integer counts, or a probability when shots == 1 (analytic)

    def __post_init__(self):
        if self.prep not in PREP_LABELS:
            raise ValueError(f"bad prep label {self.prep}")
        if self.basis not in BASES:
            raise ValueError(f"bad basis label {self.basis!r}")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if not 0.0 <= self.bright <= self.shots:
            raise ValueError("bright count outside [0, shots]")


def bright_probability(channel: QubitChannel, noise: NoiseModel,
                       prep: int, basis: str) -> float:
    """Born-rule bright probability including SPAM errors."""
    psi = prepare_input(prep)
    rho = np.outer(psi, psi.conj())
    if noise.prep_error > 0.0:
        rho = (1.0 - noise.prep_error) * rho + noise.prep_error * (SX @ rho @ SX)
    rho = channel.apply(rho)
    p = float(np.real(np.trace(measurement_effect(basis) @ rho)))
    p = min(max(p, 0.0), 1.0)
    return (p * (1.0 - noise.detection_error_bright)
            + (1.0 - p) * noise.detection_error_dark)


def exact_records(channel: QubitChannel, noise: NoiseModel = NoiseModel()) -> list:
    """Analytic mode: exact probabilities, no sampling (shots = 1)."""
    return [CountsRecord(prep=j, basis=b, shots=1,
                         bright=bright_probability(channel, noise, j, b))
            for j in PREP_LABELS for b in BASES]


def simulate_counts(channel: QubitChannel, noise: NoiseModel, shots: int,
                    seed: int = 0) -> list:
    """Binomially sampled counts for all 18 (prep, basis) settings."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    records = []
    for j in PREP_LABELS:
        for b in BASES:
            p = bright_probability(channel, noise, j, b)
            records.append(CountsRecord(prep=j, basis=b, shots=shots,
                                        bright=float(rng.binomial(shots, p))))
    return records


def records_to_csv(records: Sequence[CountsRecord]) -> str:
    lines = ["prep,basis,shots,bright"]
    for r in records:
        lines.append("%d,%s,%d,%.17g" % (r.prep, r.basis, r.shots, r.bright))
    return "\n".join(lines) + "\n"


def records_from_csv(text: str) -> list:
    records = []
    for line in text.strip().splitlines()[1:]:
        prep, basis, shots, bright = line.split(",")
        records.append(CountsRecord(prep=int(prep), basis=basis,
                                    shots=int(shots), bright=float(bright)))
    return records


# --- Choi / chi machinery -------------------------------------------------

def _pauli_vecs() -> np.ndarray:
    """Columns v_m with v_m[(i,k)] = E_m[k, i] (row-major kron of |i> x E|i>)."""
    v = np.zeros((4, 4), dtype=complex)
    for m, e in enumerate(PAULIS):
        for i in range(2):
            col = np.kron(ket(2, i), e @ ket(2, i))
            v[:, m] += col
    return v


_PAULI_V = _pauli_vecs()


def choi_of_channel(channel: QubitChannel) -> np.ndarray:
    """J = sum_ij |i><j| (x) Lambda(|i><j|), input factor first."""
    j = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[a, b] = 1.0
            j += np.kron(e, channel.apply(e))
    return j


def chi_from_choi(choi: np.ndarray) -> np.ndarray:
    return _PAULI_V.conj().T @ choi @ _PAULI_V / 4.0


def choi_from_chi(chi: np.ndarray) -> np.ndarray:
    return _PAULI_V @ chi @ _PAULI_V.conj().T


def chi_of_channel(channel: QubitChannel) -> np.ndarray:
    return chi_from_choi(choi_of_channel(channel))


def check_process_matrix(chi: np.ndarray, herm_tol: float = 1e-10,
                         trace_tol: float = 1e-8, psd_tol: float = 1e-8,
                         tp_tol: float = 1e-6) -> np.ndarray:
    """Validate Hermiticity, trace, positivity and trace preservation."""
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (4, 4):
        raise ValueError("chi must be 4x4")
    if np.max(np.abs(chi - chi.conj().T)) > herm_tol:
        raise ValueError("chi not Hermitian within tolerance")
    if abs(np.trace(chi) - 1.0) > trace_tol:
        raise ValueError(f"chi trace {np.trace(chi)} deviates from 1")
    if float(np.min(np.linalg.eigvalsh((chi + chi.conj().T) / 2))) < -psd_tol:
        raise ValueError("chi not positive semidefinite within tolerance")
    tp = np.zeros((2, 2), dtype=complex)
    for m in range(4):
        for n in range(4):
            tp += chi[m, n] * PAULIS[n].conj().T @ PAULIS[m]
    if np.max(np.abs(tp - np.eye(2))) > tp_tol:
        raise ValueError("chi violates trace preservation beyond tolerance")
    return chi


def process_fidelity(chi_a: np.ndarray, chi_b: np.ndarray) -> float:
    """|Tr(chi_a chi_b^dag)| with both arguments trace-normalized."""
    a = np.asarray(chi_a, dtype=complex)
    b = np.asarray(chi_b, dtype=complex)
    a = a / np.real(np.trace(a))
    b = b / np.real(np.trace(b))
    return float(abs(np.trace(a @ b.conj().T)))


# --- maximum-likelihood estimation ----------------------------------------

@dataclass
class MLEResult:
    chi: np.ndarray
    choi: np.ndarray
    iterations: int
    converged: bool
    log_likelihood: float


def _record_effects(records):
    """(operator, count) pairs for both outcomes of every record."""
    ops, counts = [], []
    for r in records:
        psi = prepare_input(r.prep)
        rho_t = np.outer(psi, psi.conj()).T
        e_bright = measurement_effect(r.basis)
        e_dark = np.eye(2) - e_bright
        ops.append(np.kron(rho_t, e_bright))
        counts.append(float(r.bright))
        ops.append(np.kron(rho_t, e_dark))
        counts.append(float(r.shots) - float(r.bright))
    return np.array(ops), np.array(counts)


def _project_tp(choi: np.ndarray) -> np.ndarray:
    """Sandwich with (Tr_out J)^(-1/2) on the input factor: restores Tr_out J = I."""
    lam = np.zeros((2, 2), dtype=complex)
    for k in range(2):
        sel = np.ix_([0 * 2 + k, 1 * 2 + k], [0 * 2 + k, 1 * 2 + k])
        lam += choi[sel]
    w, v = np.linalg.eigh((lam + lam.conj().T) / 2.0)
    w = np.maximum(w, 1e-14)
    inv_sqrt = v @ np.diag(w ** -0.5) @ v.conj().T
    a = np.kron(inv_sqrt, np.eye(2))
    return a @ choi @ a.conj().T


def _project_psd(m: np.ndarray) -> np.ndarray:
    m = (m + m.conj().T) / 2.0
    w, v = np.linalg.eigh(m)
    w = np.maximum(w, 0.0)
    return v @ np.diag(w) @ v.conj().T


def _linear_inversion(ops: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    a = ops.transpose(0, 2, 1).reshape(len(ops), -1)   # Tr(J Pi) = vec(Pi^T).vec(J)
    x, *_ = np.linalg.lstsq(a, freqs.astype(complex), rcond=None)
    j = x.reshape(4, 4)
    j = _project_psd(j)
    tr = np.real(np.trace(j))
    j = j * (2.0 / tr) if tr > 1e-12 else np.kron(np.eye(2), np.eye(2)) / 2.0
    return _project_tp(j)


def log_likelihood(choi: np.ndarray, records) -> float:
    ops, counts = _record_effects(records)
    p = np.maximum(np.real(np.einsum("kij,ji->k", ops, choi)), 1e-300)
    return float(np.sum(counts * np.log(p)))


def mle_process(records, tol: float = 1e-10, max_iter: int = 10000) -> MLEResult:
    """Iterative MLE of the process matrix from all 18 tomography settings."""
    seen = {(r.prep, r.basis) for r in records}
    expected = {(j, b) for j in PREP_LABELS for b in BASES}
    if seen != expected:
        raise ValueError(f"missing (prep, basis) settings: {sorted(expected - seen)}")
    ops, counts = _record_effects(records)
    total = np.sum(counts)
    shots = np.array([float(r.shots) for r in records for _ in (0, 1)])
    choi = _linear_inversion(ops, counts / shots)
    ll = -np.inf
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        p = np.maximum(np.real(np.einsum("kij,ji->k", ops, choi)), 1e-14)
        r_op = np.einsum("k,kij->ij", counts / (p * total), ops)
        choi = _project_tp(r_op @ choi @ r_op)
        ll_new = float(np.sum(counts * np.log(p)))
        if ll_new - ll < tol and iterations > 1:
            converged = True
            break
        ll = ll_new
    chi = chi_from_choi(choi)
    chi = (chi + chi.conj().T) / 2.0
    return MLEResult(chi=chi, choi=choi, iterations=iterations,
                     converged=converged, log_likelihood=log_likelihood(choi, records))
