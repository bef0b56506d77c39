import numpy as np
import pytest

from holopulse.engine import (NoiseModel, bright_state, dark_state,
                              dephasing_from_t2, hamiltonian_at,
                              open_superoperator, propagate_open,
                              propagate_unitary, survival_probability,
                              trace_defect)
from holopulse.gates import target_unitary
from holopulse.pulses import GateSpec, named_gate, synthesize
from holopulse.qcore import fidelity_qubit_subspace, leakage, unitarity_defect


def _sched(name="X", eta=0.0, n=256):
    return synthesize(named_gate(name, eta=eta), n_samples=n)


def test_hamiltonian_structure():
    sched = _sched()
    h = hamiltonian_at(sched, 0.25 * sched.duration)
    assert np.allclose(h, h.conj().T)
    assert h[0, 1] == 0.0 and h[1, 0] == 0.0    # no direct 0-1 coupling
    assert np.allclose(np.diag(h), 0.0)
    with pytest.raises(ValueError):
        hamiltonian_at(sched, -1.0)


def test_hamiltonian_amplitude_error_scales_linearly():
    sched = _sched()
    t = 0.25 * sched.duration
    h0 = hamiltonian_at(sched, t, 0.0)
    h1 = hamiltonian_at(sched, t, 0.1)
    assert np.allclose(h1, 1.1 * h0)


def test_unitarity_and_step_doubling():
    sched = _sched("H", eta=0.2)
    res = propagate_unitary(sched, steps=2048)
    assert unitarity_defect(res.unitary) < 1e-12
    assert res.converged
    assert res.truncation_error < 1e-9


def test_gate_fidelity_closed():
    for name, eta in (("X", 0.0), ("H", 1.0), ("T", 0.2), ("S", 0.0)):
        spec = named_gate(name, eta=eta)
        sched = synthesize(spec, n_samples=256)
        res = propagate_unitary(sched, steps=2048, check=False)
        assert fidelity_qubit_subspace(res.unitary, target_unitary(spec)) > 1.0 - 1e-9
        assert leakage(res.unitary) < 1e-10


def test_dark_state_invariance():
    spec = GateSpec(theta=0.8, phi=0.3, gamma=1.3, eta=0.5)
    sched = synthesize(spec, n_samples=256)
    u = propagate_unitary(sched, steps=2048, check=False).unitary
    d = dark_state(spec)
    assert abs(abs(np.vdot(d, u @ d)) - 1.0) < 1e-9


def test_bright_state_holonomy():
    # the bright state returns to itself up to the phase e^{i gamma}
    spec = GateSpec(theta=0.8, phi=0.3, gamma=1.3, eta=0.5)
    sched = synthesize(spec, n_samples=256)
    u = propagate_unitary(sched, steps=2048, check=False).unitary
    b = bright_state(spec)
    ov = np.vdot(b, u @ b)
    assert abs(ov - np.exp(1j * spec.gamma)) < 1e-8


def test_half_loop_reaches_auxiliary():
    spec = GateSpec(theta=0.8, phi=0.3, gamma=1.3, eta=0.0)
    sched = synthesize(spec, n_samples=256)
    res = propagate_unitary(sched, steps=1024, t1=sched.duration / 2.0, check=False)
    b = bright_state(spec)
    assert abs(res.unitary @ b)[2] == pytest.approx(1.0, abs=1e-9)


def test_survival_quadratic_small_epsilon():
    sched = _sched("X", eta=0.2)
    p = survival_probability(sched, 0.01, steps=1024)
    c = np.sin(0.2 * np.pi) ** 2 / 0.4 ** 2
    assert 1.0 - p == pytest.approx(c * 0.01 ** 2, rel=0.05)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(epsilon=0.7)
    with pytest.raises(ValueError):
        NoiseModel(gamma_1a=-1.0)
    with pytest.raises(ValueError):
        NoiseModel(prep_error=1.2)
    nm = dephasing_from_t2(20e-3, 200e-3)
    assert nm.gamma_1a == pytest.approx(100.0)
    assert nm.gamma_0a == pytest.approx(10.0)


def test_open_matches_closed_without_dissipation():
    sched = _sched("H")
    u = propagate_unitary(sched, steps=1024, check=False).unitary
    rho0 = np.zeros((3, 3), dtype=complex)
    rho0[0, 0] = 1.0
    res = propagate_open(sched, rho0, NoiseModel(), steps=1024)
    assert np.max(np.abs(res.density - u @ rho0 @ u.conj().T)) < 1e-9


def test_open_trace_preserved_with_dephasing():
    sched = _sched("X", n=256)
    noise = dephasing_from_t2()
    phi = open_superoperator(sched, noise, steps=1024)
    assert trace_defect(phi) < 1e-9
    rho0 = np.diag([0.6, 0.4, 0.0]).astype(complex)
    res = propagate_open(sched, rho0, noise, steps=1024)
    assert np.trace(res.density).real == pytest.approx(1.0, abs=1e-9)
    evals = np.linalg.eigvalsh(res.density)
    assert evals.min() > -1e-9


def test_dephasing_reduces_fidelity():
    spec = named_gate("X")
    sched = synthesize(spec, n_samples=256)
    rho0 = np.zeros((3, 3), dtype=complex)
    rho0[0, 0] = 1.0
    clean = propagate_open(sched, rho0, NoiseModel(), steps=1024).density
    noisy = propagate_open(sched, rho0, dephasing_from_t2(), steps=1024).density
    target = np.zeros(3, dtype=complex)
    target[:2] = target_unitary(spec) @ np.array([1.0, 0.0])
    f_clean = np.real(np.vdot(target, clean @ target))
    f_noisy = np.real(np.vdot(target, noisy @ target))
    assert f_clean > 1.0 - 1e-8
    assert f_noisy < f_clean
    assert f_noisy > 0.95   # dephasing over ~160 us is a small perturbation


def test_step_validation():
    sched = _sched(n=512)
    with pytest.raises(ValueError):
        propagate_unitary(sched, steps=256)    # below schedule resolution
    with pytest.raises(ValueError):
        propagate_unitary(sched, steps=1025)
