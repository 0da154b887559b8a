from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg as sl

from qosim import (
    DegenerateJumpError,
    DenseOperator,
    IncompatibleBasesError,
    IntegratorConfig,
    Ket,
    coherent_state,
    dagger,
    destroy,
    dm,
    expect,
    fock_basis,
    identity_op,
    is_hermitian,
    lazy_sum,
    master,
    master_dynamic,
    mcwf,
    mcwf_ensemble,
    number,
    schroedinger,
    schroedinger_dynamic,
    sigmam,
    spin_basis,
    spin_up,
    tensor_op,
    tensor_state,
    to_dense,
)
from qosim.models import JaynesCummings

TIGHT = IntegratorConfig(1e-10, 1e-12)


def liouvillian(H, J, rates):
    # row-major vectorization: vec(A rho B) = kron(A, B^T) vec(rho)
    h = H.to_array()
    n = h.shape[0]
    eye = np.eye(n)
    L = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for j, r in zip(J, rates):
        m = j.to_array()
        mdm = m.conj().T @ m
        L += r * (np.kron(m, m.conj()) - 0.5 * np.kron(mdm, eye) - 0.5 * np.kron(eye, mdm.T))
    return L


def small_jc():
    return JaynesCummings(cutoff=5, alpha=1.0)


# Schroedinger


def test_null_hamiltonian_keeps_state():
    m = small_jc()
    zero = 0 * m.H
    T = np.linspace(0, 5, 11)
    res = schroedinger(T, m.psi0, zero)
    for psi in res.states:
        np.testing.assert_array_equal(psi.data, m.psi0.data)


def test_schroedinger_matches_expm_all_representations():
    m = small_jc()
    T = np.linspace(0, 4, 9)
    h = m.H.to_array()
    ref = [sl.expm(-1j * h * t) @ m.psi0.data for t in T]
    for H in (m.H, to_dense(m.H), lazy_sum([m.H])):
        res = schroedinger(T, m.psi0, H, TIGHT)
        for psi, r in zip(res.states, ref):
            assert np.max(np.abs(psi.data - r)) < 1e-8


def test_result_unpacks_and_fout():
    m = small_jc()
    T = [0.0, 0.5, 1.0]
    tout, states = schroedinger(T, m.psi0, m.H)
    np.testing.assert_array_equal(tout, T)
    assert len(states) == 3
    res = schroedinger(T, m.psi0, m.H, fout=lambda t, psi: (t, psi.norm()))
    assert res.states[2][0] == 1.0
    assert len(res) == 3


def test_schroedinger_errors():
    m = small_jc()
    with pytest.raises(IncompatibleBasesError):
        schroedinger([0, 1], coherent_state(fock_basis(5), 1.0), m.H)
    with pytest.raises(ValueError):
        schroedinger([1, 0], m.psi0, m.H)


def test_schroedinger_dynamic_constant_matches_static():
    m = small_jc()
    T = np.linspace(0, 3, 13)
    a = schroedinger(T, m.psi0, m.H, TIGHT).states
    b = schroedinger_dynamic(T, m.psi0, lambda t, psi: m.H, TIGHT).states
    for x, y in zip(a, b):
        assert np.max(np.abs(x.data - y.data)) < 1e-10


def test_schroedinger_dynamic_checks_returned_basis():
    m = small_jc()
    with pytest.raises(IncompatibleBasesError):
        schroedinger_dynamic([0, 1], m.psi0, lambda t, psi: number(fock_basis(3)))


def test_time_dependent_drive_matches_piecewise_expm():
    # H(t) = cos(t) sigma_x on a qubit has the closed-form propagator exp(-i sin(t) sigma_x)
    b = spin_basis(0.5)
    sx = sigmam(b) + dagger(sigmam(b))
    psi0 = spin_up(b)
    T = np.linspace(0, 6, 25)
    res = schroedinger_dynamic(T, psi0, lambda t, psi: math.cos(t) * sx, TIGHT)
    for t, psi in zip(T, res.states):
        ref = sl.expm(-1j * math.sin(t) * sx.to_array()) @ psi0.data
        assert np.max(np.abs(psi.data - ref)) < 1e-8


# master equation


def test_master_matches_liouvillian_expm():
    m = small_jc()
    J, R = m.lossy(kappa=0.5, gamma=0.3, n_th=0.75)
    T = np.linspace(0, 2, 5)
    L = liouvillian(m.H, J, R)
    rho0 = dm(m.psi0).data.ravel()
    res = master(T, m.psi0, m.H, J, R, TIGHT)
    for t, rho in zip(T, res.states):
        assert np.max(np.abs(rho.data.ravel() - sl.expm(L * t) @ rho0)) < 1e-9


def test_master_lazy_hamiltonian_uses_general_form():
    m = small_jc()
    J, R = m.lossy(kappa=0.5, gamma=0.3, n_th=0.75)
    T = np.linspace(0, 2, 5)
    a = master(T, m.psi0, m.H, J, R, TIGHT).states
    b = master(T, m.psi0, lazy_sum([m.H]), J, R, TIGHT).states
    for x, y in zip(a, b):
        assert np.max(np.abs(x.data - y.data)) < 1e-9


def test_master_without_jumps_is_schroedinger():
    m = small_jc()
    T = np.linspace(0, 3, 7)
    rhos = master(T, m.psi0, m.H, config=TIGHT).states
    kets = schroedinger(T, m.psi0, m.H, TIGHT).states
    for rho, psi in zip(rhos, kets):
        assert np.max(np.abs(rho.data - dm(psi).data)) < 1e-8


def test_master_decay_law_small():
    b = fock_basis(10)
    a = destroy(b)
    T = np.linspace(0, 10, 11)
    n = master(T, coherent_state(b, 1.0), 0 * number(b), [a], [0.3], TIGHT,
               fout=lambda t, r: expect(number(b), r).real).states
    n0 = expect(number(b), coherent_state(b, 1.0)).real
    np.testing.assert_allclose(n, n0 * np.exp(-0.3 * T), atol=1e-8)


def test_master_argument_errors():
    m = small_jc()
    J, _ = m.lossy()
    with pytest.raises(ValueError):
        master([0, 1], m.psi0, m.H, J, [0.1, -0.1, 0.1])
    with pytest.raises(ValueError):
        master([0, 1], m.psi0, m.H, J, [0.1])
    with pytest.raises(IncompatibleBasesError):
        master([0, 1], m.psi0, m.H, [destroy(fock_basis(5))], [1.0])


def test_master_dynamic_constant_matches_master():
    m = small_jc()
    J, R = m.lossy(kappa=0.5, gamma=0.3, n_th=0.75)
    Jd = dagger(J)
    T = np.linspace(0, 2, 9)
    a = master(T, m.psi0, m.H, J, R, TIGHT).states
    b = master_dynamic(T, m.psi0, lambda t, rho: (m.H, J, Jd), R, TIGHT).states
    c = master_dynamic(T, m.psi0, lambda t, rho: (m.H, J, Jd, R), None, TIGHT).states
    for x, y, z in zip(a, b, c):
        assert np.max(np.abs(x.data - y.data)) < 1e-8
        assert np.max(np.abs(x.data - z.data)) < 1e-8


def test_rotating_frame_hamiltonian_hermitian():
    m = small_jc()
    J, _ = m.lossy()
    gen = m.rotating_frame(J)
    for t in np.linspace(0, 35, 36):
        assert is_hermitian(gen(t, None)[0], tol=1e-12)


def test_master_dynamic_checks_bases():
    m = small_jc()
    bad = destroy(fock_basis(2))
    with pytest.raises(IncompatibleBasesError):
        master_dynamic([0, 1], m.psi0, lambda t, rho: (bad, [], []))
    with pytest.raises(ValueError):
        master_dynamic([0, 1], m.psi0, lambda t, rho: (m.H, [m.a], []))


# quantum jumps


def qubit_decay():
    b = spin_basis(0.5)
    sm = sigmam(b)
    return b, sm, 0 * dagger(sm) * sm, spin_up(b)


def test_mcwf_without_rates_is_schroedinger():
    m = small_jc()
    J, _ = m.lossy()
    T = np.linspace(0, 3, 7)
    traj = mcwf(T, m.psi0, m.H, J, [0, 0, 0], seed=1, config=TIGHT)
    kets = schroedinger(T, m.psi0, m.H, TIGHT).states
    assert traj.jumps == []
    for x, y in zip(traj.states, kets):
        assert np.max(np.abs(x.data - y.data / y.norm())) < 1e-8


def test_mcwf_same_seed_bit_identical():
    m = small_jc()
    J, R = m.lossy(kappa=0.5, gamma=0.3, n_th=0.75)
    T = np.linspace(0, 5, 51)
    a = mcwf(T, m.psi0, m.H, J, R, seed=2, fout=lambda t, p: expect(m.excitation, p))
    b = mcwf(T, m.psi0, m.H, J, R, seed=2, fout=lambda t, p: expect(m.excitation, p))
    assert a.states == b.states
    assert a.jumps == b.jumps and len(a.jumps) > 0
    c = mcwf(T, m.psi0, m.H, J, R, seed=3, fout=lambda t, p: expect(m.excitation, p))
    assert c.states != a.states


def test_mcwf_outputs_normalized_kets():
    m = small_jc()
    J, R = m.lossy(kappa=0.5, gamma=0.3, n_th=0.75)
    res = mcwf(np.linspace(0, 5, 11), m.psi0, m.H, J, R, seed=0)
    for psi in res.states:
        assert psi.norm() == pytest.approx(1, abs=1e-12)


def test_first_jump_time_is_exponential():
    gamma = 0.7
    b, sm, H, psi0 = qubit_decay()
    T = [0.0, 20.0]
    times = [mcwf(T, psi0, H, [sm], [gamma], seed=s).jumps[0][0] for s in range(1500)]
    mean = np.mean(times)
    # exponential waiting time with rate gamma: mean 1/gamma, standard error (1/gamma)/sqrt(n)
    assert abs(mean - 1 / gamma) < 4 * (1 / gamma) / math.sqrt(len(times))


def test_jump_channel_selection_frequencies():
    # two decay channels out of the same level are picked in proportion to their rates
    b, sm, H, psi0 = qubit_decay()
    res = [mcwf([0.0, 30.0], psi0, H, [sm, sm], [0.2, 0.6], seed=s).jumps[0][1] for s in range(2000)]
    frac = np.mean(res)
    assert abs(frac - 0.75) < 4 * math.sqrt(0.75 * 0.25 / 2000)


def test_ensemble_mean_against_analytic_decay():
    gamma = 0.5
    b, sm, H, psi0 = qubit_decay()
    T = np.linspace(0, 4, 9)
    ens = mcwf_ensemble(T, psi0, H, [sm], [gamma], n_traj=2000, base_seed=0, e_ops=[dagger(sm) * sm])
    exact = np.exp(-gamma * T)
    se = np.sqrt(exact * (1 - exact) / 2000)
    assert np.all(np.abs(ens.mean[0].real - exact) <= 5 * se + 1e-12)
    assert ens.mean.shape == (1, 9) and ens.n_traj == 2000


def test_ensemble_single_equals_mcwf():
    m = small_jc()
    J, R = m.lossy(kappa=0.5, gamma=0.3, n_th=0.75)
    T = np.linspace(0, 2, 5)
    single = mcwf(T, m.psi0, m.H, J, R, seed=7)
    ens = mcwf_ensemble(T, m.psi0, m.H, J, R, n_traj=1, base_seed=7)
    assert [p.data.tolist() for p in ens[0].states] == [p.data.tolist() for p in single.states]


def test_ensemble_parallel_matches_serial():
    pytest.importorskip("joblib")
    m = small_jc()
    J, R = m.lossy(kappa=0.5, gamma=0.3, n_th=0.75)
    T = np.linspace(0, 2, 5)
    serial = mcwf_ensemble(T, m.psi0, m.H, J, R, n_traj=6, base_seed=3, e_ops=[m.excitation])
    parallel = mcwf_ensemble(T, m.psi0, m.H, J, R, n_traj=6, base_seed=3, e_ops=[m.excitation], n_jobs=2)
    np.testing.assert_array_equal(serial.mean, parallel.mean)
    np.testing.assert_array_equal(serial.stderr, parallel.stderr)


def test_degenerate_jump_raises():
    # norm loss from a non-Hermitian H with no jump channel able to absorb it
    b = fock_basis(1)
    H = DenseOperator(b, b, np.diag([-1j, -1j]))
    zero = 0 * destroy(b)
    with pytest.raises(DegenerateJumpError):
        mcwf([0.0, 50.0], Ket(b, [1.0, 0.0]), H, [zero], [1.0], seed=0)


def test_ensemble_rejects_bad_count():
    b, sm, H, psi0 = qubit_decay()
    with pytest.raises(ValueError):
        mcwf_ensemble([0, 1], psi0, H, [sm], [1.0], n_traj=0)


def test_tensor_model_dimensions():
    m = JaynesCummings()
    assert m.H.shape == (82, 82)
    assert m.psi0.basis == tensor_state([coherent_state(fock_basis(40), 4.0), spin_up(spin_basis(0.5))]).basis
    assert isinstance(tensor_op([identity_op(fock_basis(1)), sigmam(spin_basis(0.5))]), type(m.sm))
