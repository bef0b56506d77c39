"""Analytic gate targets, axis-angle decomposition, and the 24 Cliffords."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .paths import HOLONOMIC
from .pulses import GateSpec
from .qcore import PAULIS, SI, SX, SY, SZ, unitarity_defect


def target_unitary(spec: GateSpec) -> np.ndarray:
    """e^{i gamma/2} exp(-i (gamma/2) n.sigma): rotation by gamma about n."""
    n = np.array([np.sin(spec.theta) * np.cos(spec.phi),
                  np.sin(spec.theta) * np.sin(spec.phi),
                  np.cos(spec.theta)])
    half = spec.gamma / 2.0
    n_sigma = n[0] * SX + n[1] * SY + n[2] * SZ
    return np.exp(1j * half) * (np.cos(half) * SI - 1j * np.sin(half) * n_sigma)


def canonical_phase(u: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rescale a matrix so its first nonzero entry (row-major) is real positive."""
    u = np.asarray(u, dtype=complex)
    flat = u.reshape(-1)
    for entry in flat:
        if abs(entry) > tol:
            return u * (abs(entry) / entry)
    return u


def phase_equivalent(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """True when two 2x2 unitaries differ only by a global phase."""
    return abs(abs(np.trace(np.asarray(a).conj().T @ np.asarray(b))) - 2.0) < tol


def _wrap_phi(phi: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    phi = (phi + np.pi) % (2.0 * np.pi) - np.pi
    return float(phi)


def axis_angle(u: np.ndarray, eta: float = 0.0, scheme: str = HOLONOMIC,
               u_tol: float = 1e-9) -> GateSpec:
    """Decompose a 2x2 unitary into the canonical (theta, phi, gamma) spec.

    gamma is canonicalized to [0, pi] (flipping the axis when needed); at
    gamma = pi the remaining axis-sign ambiguity is broken by making the
    first nonzero axis component positive. The identity maps to (0, 0, 0).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"expected a 2x2 unitary, got shape {u.shape}")
    if unitarity_defect(u) >= u_tol:
        raise ValueError("axis_angle input is not unitary within tolerance")
    det = np.linalg.det(u)
    v = u / np.sqrt(det)      # SU(2) representative, sign branch arbitrary
    c = np.real(np.trace(v)) / 2.0
    if c < 0:
        v = -v
        c = -c
    c = min(c, 1.0)
    # v = c*I - i*s*(n.sigma)  =>  s*n_k = (i/2) Tr(v sigma_k)
    sn = np.array([np.real(0.5j * np.trace(v @ p)) for p in (SX, SY, SZ)])
    s = float(np.linalg.norm(sn))
    if s < 1e-12:
        return GateSpec(theta=0.0, phi=0.0, gamma=0.0, eta=eta, scheme=scheme)
    n = sn / s
    if c < 1e-12:
        # gamma = pi: both axis signs give the same rotation; pick a canon
        for comp in n:
            if abs(comp) > 1e-12:
                if comp < 0:
                    n = -n
                break
    gamma = 2.0 * np.arctan2(s, c)
    theta = float(np.arccos(np.clip(n[2], -1.0, 1.0)))
    phi = _wrap_phi(float(np.arctan2(n[1], n[0])))
    if abs(np.sin(theta)) < 1e-12:
        phi = 0.0
    return GateSpec(theta=theta, phi=phi, gamma=float(gamma), eta=eta, scheme=scheme)


@dataclass(frozen=True)
class CliffordElement:
    index: int
    spec: GateSpec
    matrix: np.ndarray


def _clifford_axis_angles():
    axes = []
    x, y, z = np.eye(3)
    # 6 quarter turns about +-x, +-y, +-z
    for ax in (x, -x, y, -y, z, -z):
        axes.append((ax, np.pi / 2.0))
    # 3 half turns about the coordinate axes
    for ax in (x, y, z):
        axes.append((ax, np.pi))
    # 6 half turns about the face diagonals
    for ax in ((1, 1, 0), (1, -1, 0), (0, 1, 1), (0, 1, -1), (1, 0, 1), (-1, 0, 1)):
        axes.append((np.array(ax) / np.sqrt(2.0), np.pi))
    # 8 third turns about the body diagonals
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                axes.append((np.array([sx, sy, sz]) / np.sqrt(3.0), 2.0 * np.pi / 3.0))
    return axes


@lru_cache(maxsize=None)
def clifford_table(eta: float = 0.0, scheme: str = HOLONOMIC) -> tuple:
    """The 24 single-qubit Cliffords with canonical specs and matrices."""
    elements = [CliffordElement(
        index=0,
        spec=GateSpec(theta=0.0, phi=0.0, gamma=0.0, eta=eta, scheme=scheme),
        matrix=np.eye(2, dtype=complex))]
    for k, (axis, gamma) in enumerate(_clifford_axis_angles(), start=1):
        theta = float(np.arccos(np.clip(axis[2], -1.0, 1.0)))
        phi = _wrap_phi(float(np.arctan2(axis[1], axis[0])))
        if abs(np.sin(theta)) < 1e-12:
            phi = 0.0
        spec = GateSpec(theta=theta, phi=phi, gamma=gamma, eta=eta, scheme=scheme)
        elements.append(CliffordElement(
            index=k, spec=spec, matrix=canonical_phase(target_unitary(spec))))
    return tuple(elements)
