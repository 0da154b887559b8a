"""Monte Carlo wave-function (quantum jump) trajectories.

A trajectory evolves the unnormalized ket under the non-Hermitian Hamiltonian

    H_nh = H - i/2 * sum_k r_k J_k^+ J_k

until its squared norm drops below a uniform random number. The crossing
time is located by bisection on the continuous output of the integrator, a
jump channel is drawn with probability proportional to ``r_k ||J_k psi||^2``,
the ket is replaced by the normalized ``J_k psi`` and a fresh threshold is
drawn.

Random numbers come from ``numpy.random.default_rng(seed)`` (PCG64). The
ensemble driver gives trajectory ``k`` the seed ``base_seed + k``, so results
do not depend on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateJumpError
from ..operators import Operator, expect
from ..states import Ket
from .common import EvolutionResult, check_rates, check_square, nonhermitian_hamiltonian
from .integrator import DormandPrince, IntegratorConfig, check_times

JUMP_TIME_RTOL = 1e-6


def _locate_crossing(solver: DormandPrince, threshold: float) -> tuple[float, np.ndarray]:
    lo, hi = solver.t_old, solver.t
    psi_hi = solver.y
    tol = JUMP_TIME_RTOL * (hi - lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        psi = solver.dense(mid)
        if np.vdot(psi, psi).real < threshold:
            hi, psi_hi = mid, psi
        else:
            lo = mid
    return hi, psi_hi


def mcwf(times, psi0: Ket, H: Operator, J=(), rates=None, seed=None,
         config: IntegratorConfig | None = None, fout=None) -> EvolutionResult:
    """Compute a single quantum-jump trajectory.

    Args:
        times: Strictly increasing output times.
        psi0: Initial ket.
        H: Hamiltonian.
        J: Jump operators.
        rates: Nonnegative rate per jump operator (default 1).
        seed: Seed of the trajectory's random stream.
        config: Integrator tolerances.
        fout: Optional ``fout(t, psi)`` replacing stored states.

    Returns:
        Result with normalized kets at the output times and the list of
        ``(time, channel)`` jumps.
    """
    times = check_times(times)
    basis = psi0.basis
    J = list(J)
    rates = check_rates(rates, len(J))
    check_square(H, basis, "mcwf: Hamiltonian")
    for k, j in enumerate(J):
        check_square(j, basis, f"mcwf: jump operator {k}")
    channels = [(k, j) for k, (j, r) in enumerate(zip(J, rates)) if r > 0]
    Hnh = nonhermitian_hamiltonian(H, J, rates)
    rng = np.random.default_rng(seed)

    def rhs(t, y):
        return -1j * Hnh.apply_array(y)

    def emit(t, y):
        psi = Ket(basis, y / np.linalg.norm(y))
        return psi if fout is None else fout(t, psi)

    y0 = np.array(psi0.data, dtype=complex)
    out = [emit(times[0], y0)]
    jumps: list[tuple[float, int]] = []
    if len(times) == 1:
        return EvolutionResult(times, out, jumps)

    solver = DormandPrince(rhs, times[0], y0, times[-1], config)
    threshold = rng.random()
    k = 1
    while k < len(times):
        solver.step()
        y = solver.y
        if channels and np.vdot(y, y).real < threshold:
            t_jump, psi = _locate_crossing(solver, threshold)
            while k < len(times) and times[k] <= t_jump:
                out.append(emit(times[k], solver.dense(times[k])))
                k += 1
            candidates = [j.apply_array(psi) for _, j in channels]
            weights = np.array([rates[c] * np.vdot(v, v).real for (c, _), v in zip(channels, candidates)])
            total = weights.sum()
            if not total > 0:
                raise DegenerateJumpError(f"all jump channels vanish at t = {t_jump}")
            pick = int(np.searchsorted(np.cumsum(weights), rng.random() * total, side="right"))
            pick = min(pick, len(channels) - 1)
            new = candidates[pick]
            jumps.append((float(t_jump), channels[pick][0]))
            threshold = rng.random()
            if k < len(times):
                solver.restart(t_jump, new / np.linalg.norm(new))
            continue
        while k < len(times) and times[k] <= solver.t:
            out.append(emit(times[k], solver.dense(times[k])))
            k += 1
    return EvolutionResult(times, out, jumps)


@dataclass
class EnsembleAverage:
    """Trajectory-averaged expectation values.

    ``mean`` and ``stderr`` have shape ``(n_operators, n_times)``; ``stderr``
    is the standard error of the mean.
    """

    times: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_traj: int


def _trajectory_expectations(times, psi0, H, J, rates, seed, config, e_ops):
    res = mcwf(times, psi0, H, J, rates, seed, config,
               fout=lambda t, psi: [expect(op, psi) for op in e_ops])
    return np.array(res.states, dtype=complex).T


def _trajectory(times, psi0, H, J, rates, seed, config):
    return mcwf(times, psi0, H, J, rates, seed, config)


def mcwf_ensemble(times, psi0: Ket, H: Operator, J=(), rates=None, n_traj: int = 1, base_seed: int = 0,
                  config: IntegratorConfig | None = None, e_ops=None, n_jobs: int = 1):
    """Run ``n_traj`` independent trajectories with seeds ``base_seed + k``.

    Without ``e_ops`` the list of trajectory results is returned. With a list
    of operators ``e_ops`` only their expectation values are kept and an
    :class:`EnsembleAverage` is returned. ``n_jobs`` other than 1 runs the
    trajectories in worker processes; the outcome is identical either way.
    """
    if int(n_traj) != n_traj or n_traj < 1:
        raise ValueError("n_traj must be a positive integer")
    times = check_times(times)
    seeds = [int(base_seed) + k for k in range(int(n_traj))]
    if e_ops is None:
        task, extra = _trajectory, ()
    else:
        task, extra = _trajectory_expectations, (list(e_ops),)
    if n_jobs == 1:
        results = [task(times, psi0, H, J, rates, s, config, *extra) for s in seeds]
    else:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(
            delayed(task)(times, psi0, H, J, rates, s, config, *extra) for s in seeds)
    if e_ops is None:
        return results
    stack = np.stack(results)  # (n_traj, n_ops, n_times)
    mean = stack.sum(axis=0) / len(seeds)
    if len(seeds) > 1:
        stderr = np.sqrt(np.sum(np.abs(stack - mean) ** 2, axis=0) / (len(seeds) - 1) / len(seeds))
    else:
        stderr = np.zeros(mean.shape)
    return EnsembleAverage(times, mean, stderr, len(seeds))
