"""Coupled quantum-classical dynamics.

The quantum part (ket or density operator) and a vector of classical
variables are integrated together as one flat ODE state, so both callbacks
always see the partner state at the same instant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics.common import EvolutionResult, as_density
from .dynamics.integrator import IntegratorConfig, check_times, integrate_adaptive
from .dynamics.master import hermitian_part, lindblad_rhs, unpack_generator
from .errors import IncompatibleBasesError
from .operators import DensityOperator, Operator
from .states import Ket

IMAG_TOL = 1e-10


@dataclass
class SemiclassicalState:
    """Quantum state plus classical variables.

    Classical variables are stored as complex numbers but carry real values;
    their imaginary parts must stay below ``1e-10``.
    """

    quantum: Ket | DensityOperator
    classical: np.ndarray

    def __post_init__(self):
        self.classical = np.array(self.classical, dtype=complex).ravel()

    @property
    def basis(self):
        q = self.quantum
        return q.basis if isinstance(q, Ket) else q.basis_l


def pack(state: SemiclassicalState) -> np.ndarray:
    """Flatten into ``[quantum coefficients..., classical...]``."""
    q = state.quantum
    qdata = q.data if isinstance(q, Ket) else q.data.ravel()
    return np.concatenate([qdata, state.classical])


def unpack(y: np.ndarray, template: SemiclassicalState) -> SemiclassicalState:
    """Inverse of :func:`pack`, reusing the bases of ``template``."""
    q = template.quantum
    if isinstance(q, Ket):
        n = q.basis.dimension
        return SemiclassicalState(Ket(q.basis, y[:n].copy()), y[n:].copy())
    n = q.shape[0]
    return SemiclassicalState(DensityOperator(q.basis_l, y[:n * n].reshape(n, n).copy()), y[n * n:].copy())


def _classical_rhs(f_cl, t, quantum, u, du):
    du[:] = 0
    ret = f_cl(t, quantum, u, du)
    if ret is not None:
        ret = np.asarray(ret)
        if ret.shape != du.shape:
            raise ValueError(f"classical derivative has shape {ret.shape}, expected {du.shape}")
        du[:] = ret


def _sampler(template, fout):
    def sample(t, y):
        s = unpack(y, template)
        if isinstance(s.quantum, Ket):
            s.quantum = s.quantum.normalize()
        assert np.max(np.abs(s.classical.imag), initial=0.0) < IMAG_TOL, "classical variables became complex"
        return s if fout is None else fout(t, s)
    return sample


def sc_master_dynamic(times, state0: SemiclassicalState, f_q: Callable, f_cl: Callable, rates=None,
                      config: IntegratorConfig | None = None, fout=None) -> EvolutionResult:
    """Master equation coupled to classical variables.

    Args:
        times: Strictly increasing output times.
        state0: Initial state; a ket quantum part is promoted to a density operator.
        f_q: ``f_q(t, rho, u) -> (H, J, Jdagger[, rates])``.
        f_cl: ``f_cl(t, rho, u, du)`` writing the classical derivative into
            ``du`` (returning an array of the same length also works).
        rates: Jump rates used when ``f_q`` does not return any.
        config: Integrator tolerances, shared by both parts.
        fout: Optional ``fout(t, state)`` replacing stored states.

    The callbacks receive the raw integrator state. Stored density operators
    are not renormalized either, so their trace doubles as an accuracy check.
    """
    times = check_times(times)
    rho0 = hermitian_part(as_density(state0.quantum))
    template = SemiclassicalState(rho0, state0.classical)
    basis, n = rho0.basis, rho0.shape[0]
    nq = n * n

    def rhs(t, y):
        rho = DensityOperator(basis, y[:nq].reshape(n, n))
        u = y[nq:]
        H, J, Jd, r = unpack_generator(f_q(t, rho, u), rates, basis)
        dy = np.empty_like(y)
        dy[:nq] = lindblad_rhs(rho.data, H, J, Jd, r).ravel()
        _classical_rhs(f_cl, t, rho, u, dy[nq:])
        return dy

    states = integrate_adaptive(rhs, pack(template), times, config, _sampler(template, fout))
    return EvolutionResult(times, states)


def sc_schroedinger_dynamic(times, state0: SemiclassicalState, f_q: Callable, f_cl: Callable,
                            config: IntegratorConfig | None = None, fout=None) -> EvolutionResult:
    """Schroedinger equation coupled to classical variables.

    ``f_q(t, psi, u)`` returns the Hamiltonian; ``f_cl`` is as in
    :func:`sc_master_dynamic`. The callbacks see the raw integrator ket,
    stored kets are normalized.
    """
    times = check_times(times)
    if not isinstance(state0.quantum, Ket):
        raise TypeError("sc_schroedinger_dynamic needs a ket as quantum part")
    template = SemiclassicalState(state0.quantum, state0.classical)
    basis = template.quantum.basis
    nq = basis.dimension

    def rhs(t, y):
        psi = Ket(basis, y[:nq])
        u = y[nq:]
        H = f_q(t, psi, u)
        if not isinstance(H, Operator):
            raise TypeError("f_q must return an Operator")
        if H.basis_l != basis or H.basis_r != basis:
            raise IncompatibleBasesError(
                f"f_q returned an operator on {H.basis_l!r} <- {H.basis_r!r}, state lives in {basis!r}",
                basis, H.basis_r)
        dy = np.empty_like(y)
        dy[:nq] = -1j * H.apply_array(psi.data)
        _classical_rhs(f_cl, t, psi, u, dy[nq:])
        return dy

    states = integrate_adaptive(rhs, pack(template), times, config, _sampler(template, fout))
    return EvolutionResult(times, states)
