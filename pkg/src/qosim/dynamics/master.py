"""Lindblad master equation.

    d rho/dt = -i [H, rho] + sum_k r_k (J_k rho J_k^+ - 1/2 {J_k^+ J_k, rho})

Density operators are kept dense throughout.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..operators import DensityOperator, Operator, is_hermitian
from .common import EvolutionResult, as_density, check_rates, check_square, nonhermitian_hamiltonian
from .integrator import IntegratorConfig, check_times, integrate_adaptive


def lindblad_rhs_naive(rho: np.ndarray, H: Operator, J, Jdagger, rates) -> np.ndarray:
    """Term-by-term Lindblad derivative; valid for any ``H`` and ``rho``."""
    out = -1j * (H.apply_array(rho) - H.rapply_array(rho))
    for j, jd, r in zip(J, Jdagger, rates):
        if r == 0:
            continue
        jdj_rho = jd.apply_array(j.apply_array(rho))
        rho_jdj = j.rapply_array(jd.rapply_array(rho))
        out += r * (jd.rapply_array(j.apply_array(rho)) - 0.5 * (jdj_rho + rho_jdj))
    return out


def lindblad_rhs(rho: np.ndarray, H: Operator, J, Jdagger, rates) -> np.ndarray:
    """Lindblad derivative for Hermitian ``H`` and ``rho``.

    Writes the generator as ``B + B^+`` with
    ``B = -i H rho + sum_k r_k (1/2 (J_k rho) J_k^+ - 1/2 J_k^+ (J_k rho))``,
    so every ``J_k rho`` is computed once and the result is Hermitian to the
    last bit. The latter matters: a slightly non-Hermitian ``rho`` would
    otherwise be amplified by this form of the generator.
    """
    b = -1j * H.apply_array(rho)
    for j, jd, r in zip(J, Jdagger, rates):
        if r == 0:
            continue
        j_rho = j.apply_array(rho)
        b += (0.5 * r) * (jd.rapply_array(j_rho) - jd.apply_array(j_rho))
    return b + b.conj().T


def _hnh_rhs(rho: np.ndarray, Hnh: Operator, J, Jdagger, rates) -> np.ndarray:
    b = -1j * Hnh.apply_array(rho)
    for j, jd, r in zip(J, Jdagger, rates):
        if r != 0:
            b += (0.5 * r) * jd.rapply_array(j.apply_array(rho))
    return b + b.conj().T


def _sampler(basis, n, fout):
    if fout is None:
        return lambda t, y: DensityOperator(basis, y.reshape(n, n))
    return lambda t, y: fout(t, DensityOperator(basis, y.reshape(n, n)))


def master(times, rho0, H: Operator, J=(), rates=None, config: IntegratorConfig | None = None,
           fout=None) -> EvolutionResult:
    """Integrate the master equation with a time-independent generator.

    Args:
        times: Strictly increasing output times.
        rho0: Initial density operator; a ket is promoted to ``|psi><psi|``.
        H: Hamiltonian.
        J: Jump operators.
        rates: One nonnegative rate per jump operator, all 1 if omitted.
        config: Integrator tolerances.
        fout: Optional ``fout(t, rho)`` replacing stored states.

    Raises:
        IncompatibleBasesError: If any operator lives on another basis.
        ValueError: For negative rates or a rate/jump count mismatch.
    """
    times = check_times(times)
    rho0 = as_density(rho0)
    basis, n = rho0.basis, rho0.shape[0]
    J = list(J)
    rates = check_rates(rates, len(J))
    check_square(H, basis, "master: Hamiltonian")
    for k, j in enumerate(J):
        check_square(j, basis, f"master: jump operator {k}")
    Jd = [j.dagger() for j in J]

    if not H.lazy and is_hermitian(H):
        rho0 = hermitian_part(rho0)
        Hnh = nonhermitian_hamiltonian(H, J, rates)

        def rhs(t, y):
            return _hnh_rhs(y.reshape(n, n), Hnh, J, Jd, rates).ravel()
    else:
        def rhs(t, y):
            return lindblad_rhs_naive(y.reshape(n, n), H, J, Jd, rates).ravel()

    states = integrate_adaptive(rhs, rho0.data, times, config, _sampler(basis, n, fout))
    return EvolutionResult(times, states)


def master_dynamic(times, rho0, f: Callable, rates=None, config: IntegratorConfig | None = None,
                   fout=None) -> EvolutionResult:
    """Master equation whose generator ``f(t, rho)`` is rebuilt at every derivative evaluation.

    ``f`` returns ``(H, J, Jdagger)`` or ``(H, J, Jdagger, rates)``; rates
    returned by ``f`` take precedence over the ``rates`` argument. ``H`` must
    be Hermitian.
    """
    times = check_times(times)
    rho0 = hermitian_part(as_density(rho0))
    basis, n = rho0.basis, rho0.shape[0]

    def rhs(t, y):
        rho = DensityOperator(basis, y.reshape(n, n))
        H, J, Jd, r = unpack_generator(f(t, rho), rates, basis)
        return lindblad_rhs(rho.data, H, J, Jd, r).ravel()

    states = integrate_adaptive(rhs, rho0.data, times, config, _sampler(basis, n, fout))
    return EvolutionResult(times, states)


def hermitian_part(rho: DensityOperator) -> DensityOperator:
    return DensityOperator(rho.basis, 0.5 * (rho.data + rho.data.conj().T))


def unpack_generator(gen, default_rates, basis):
    """Validate the ``(H, J, Jdagger[, rates])`` tuple of a dynamic callback."""
    if len(gen) == 4:
        H, J, Jd, r = gen
    elif len(gen) == 3:
        (H, J, Jd), r = gen, default_rates
    else:
        raise ValueError("generator callback must return (H, J, Jdagger) or (H, J, Jdagger, rates)")
    if len(J) != len(Jd):
        raise ValueError("need as many daggered jump operators as jump operators")
    r = check_rates(r, len(J))
    if H.basis_l is not basis or H.basis_r is not basis:
        check_square(H, basis, "generator callback: Hamiltonian")
    for j, jd in zip(J, Jd):
        if j.basis_l is not basis or j.basis_r is not basis:
            check_square(j, basis, "generator callback: jump operator")
        if jd.basis_l is not basis or jd.basis_r is not basis:
            check_square(jd, basis, "generator callback: daggered jump operator")
    return H, J, Jd, r
