from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import check_bases
from ..operators import DensityOperator, Operator, dm
from ..states import Ket


@dataclass
class EvolutionResult:
    """Output of a time evolution.

    ``states[k]`` belongs to ``times[k]``. When an evolution is run with an
    ``fout`` callback, ``states`` holds whatever that callback returned.
    ``jumps`` lists ``(time, channel)`` pairs for quantum-jump trajectories.
    """

    times: np.ndarray
    states: list
    jumps: list[tuple[float, int]] = field(default_factory=list)

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        # allows ``tout, states = result``
        yield self.times
        yield self.states


def check_square(op: Operator, basis, what: str) -> None:
    check_bases(basis, op.basis_l, f"{what}: state basis vs operator left basis")
    check_bases(basis, op.basis_r, f"{what}: state basis vs operator right basis")


def as_density(state) -> DensityOperator:
    """Promote a ket to ``|psi><psi|``; density operators are copied."""
    if isinstance(state, Ket):
        return dm(state)
    if isinstance(state, Operator):
        check_bases(state.basis_l, state.basis_r, "density operator: left vs right basis")
        return DensityOperator(state.basis_l, state.to_array())
    raise TypeError(f"expected a Ket or density operator, got {type(state).__name__}")


def check_rates(rates, n_jumps: int) -> np.ndarray:
    if rates is None:
        return np.ones(n_jumps)
    rates = np.asarray(rates, dtype=float).ravel()
    if rates.shape[0] != n_jumps:
        raise ValueError(f"got {rates.shape[0]} rates for {n_jumps} jump operators")
    if np.any(rates < 0) or not np.all(np.isfinite(rates)):
        raise ValueError("rates must be finite and nonnegative")
    return rates


def nonhermitian_hamiltonian(H: Operator, J, rates) -> Operator:
    """``H - i/2 * sum_k rates[k] * J_k^dagger J_k``."""
    out = H
    for j, r in zip(J, rates):
        if r != 0:
            out = out - (0.5j * r) * (j.dagger() * j)
    return out
