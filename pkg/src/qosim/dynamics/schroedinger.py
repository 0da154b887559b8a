"""Closed-system evolution, ``i d|psi>/dt = H |psi>`` with hbar = 1."""

from __future__ import annotations

from typing import Callable

from ..errors import IncompatibleBasesError
from ..operators import Operator
from ..states import Ket
from .common import EvolutionResult, check_square
from .integrator import IntegratorConfig, check_times, integrate_adaptive


def _sampler(basis, fout):
    if fout is None:
        return lambda t, y: Ket(basis, y)
    return lambda t, y: fout(t, Ket(basis, y))


def schroedinger(times, psi0: Ket, H: Operator, config: IntegratorConfig | None = None,
                 fout=None) -> EvolutionResult:
    """Evolve ``psi0`` under the time-independent Hamiltonian ``H``.

    Args:
        times: Strictly increasing output times; ``times[0]`` is the start.
        psi0: Initial ket.
        H: Hamiltonian on the basis of ``psi0`` (any representation).
        config: Integrator tolerances.
        fout: Optional ``fout(t, psi)`` evaluated at every output time instead
            of storing the states.
    """
    times = check_times(times)
    check_square(H, psi0.basis, "schroedinger")

    def rhs(t, y):
        return -1j * H.apply_array(y)

    states = integrate_adaptive(rhs, psi0.data, times, config, _sampler(psi0.basis, fout))
    return EvolutionResult(times, states)


def schroedinger_dynamic(times, psi0: Ket, f: Callable[[float, Ket], Operator],
                         config: IntegratorConfig | None = None, fout=None) -> EvolutionResult:
    """Evolve under a Hamiltonian ``f(t, psi)`` rebuilt at every derivative evaluation.

    ``f`` receives a ket viewing the integrator's current (unnormalized) state
    and may update operators it owns in place before returning one of them.
    """
    times = check_times(times)
    basis = psi0.basis

    def rhs(t, y):
        H = f(t, Ket(basis, y))
        if not isinstance(H, Operator):
            raise TypeError("the Hamiltonian callback must return an Operator")
        if H.basis_l is not basis or H.basis_r is not basis:
            if H.basis_l != basis or H.basis_r != basis:
                raise IncompatibleBasesError(
                    f"Hamiltonian callback returned an operator on {H.basis_l!r} <- {H.basis_r!r}, "
                    f"state lives in {basis!r}", basis, H.basis_r)
        return -1j * H.apply_array(y)

    states = integrate_adaptive(rhs, psi0.data, times, config, _sampler(basis, fout))
    return EvolutionResult(times, states)
