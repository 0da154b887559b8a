"""Ready-made model systems used by the command line and the acceptance tests.

Default parameters reproduce the Jaynes-Cummings, lossy Jaynes-Cummings,
Gross-Pitaevskii and cavity-cooling examples published with QuantumOptics.jl.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bases import fock_basis, momentum_basis_from, position_basis, spin_basis
from .operators import (
    Operator,
    dagger,
    destroy,
    diagonal_operator,
    identity_op,
    lazy_product,
    lazy_sum,
    momentum,
    sigmam,
    tensor_op,
    transform,
)
from .semiclassical import SemiclassicalState
from .states import Ket, coherent_state, fock_state, gaussian_state, normalize, spin_down, tensor_state


def time_grid(t_end: float, dt: float) -> np.ndarray:
    """``[0, dt, 2 dt, ..., t_end]`` built from integer multiples (no drift)."""
    n = int(round(t_end / dt))
    return dt * np.arange(n + 1)


@dataclass
class JaynesCummings:
    """Cavity mode coupled to a two-level atom, ``H = delta a^+ a + g (a^+ s- + a s+)``."""

    g: float = 1.0
    delta: float = -0.1
    alpha: complex = 4.0
    cutoff: int = 40

    def __post_init__(self):
        self.bc = fock_basis(self.cutoff)
        self.ba = spin_basis(0.5)
        self.a = tensor_op([destroy(self.bc), identity_op(self.ba)])
        self.sm = tensor_op([identity_op(self.bc), sigmam(self.ba)])
        self.coupling = self.g * dagger(self.a) * self.sm
        self.H = self.delta * dagger(self.a) * self.a + self.coupling + dagger(self.coupling)
        self.psi0 = tensor_state([coherent_state(self.bc, self.alpha), spin_down(self.ba)])
        self.excitation = dagger(self.sm) * self.sm
        self.photons = dagger(self.a) * self.a

    def lossy(self, kappa: float = 0.01, gamma: float = 0.01, n_th: float = 0.75):
        """Jump operators and rates for cavity loss/gain and spontaneous emission."""
        J = [self.a, dagger(self.a), self.sm]
        rates = [(n_th + 1) * kappa, n_th * kappa, gamma]
        return J, rates

    def rotating_frame(self, J):
        """Callback for ``master_dynamic`` in the frame rotating at the detuning.

        ``H(t) = g (a^+ s- exp(i delta t) + a s+ exp(-i delta t))``.
        """
        h1 = self.coupling
        h2 = dagger(h1)
        Jd = dagger(J)
        delta = self.delta

        def generator(t, rho):
            phase = complex(math.cos(delta * t), math.sin(delta * t))
            return phase * h1 + phase.conjugate() * h2, J, Jd

        return generator


@dataclass
class GrossPitaevskii:
    """1-D condensate ``H = p^2/2m + g |psi|^2`` on a periodic grid.

    The kinetic term is a lazy product of two FFT operators around a diagonal
    momentum operator, the interaction term a diagonal operator refreshed
    from the current state at every derivative evaluation.
    """

    g: float = -3.33
    mass: float = 1.0
    x_min: float = -10.0
    x_max: float = 10.0
    n_points: int = 300
    x0: float = 2 * math.pi
    p0: float = 2.0
    sigma: float = 1.5

    def __post_init__(self):
        self.bx = position_basis(self.x_min, self.x_max, self.n_points)
        self.bp = momentum_basis_from(self.bx)
        self.dx = self.bx.spacing
        t_xp = transform(self.bx, self.bp)
        t_px = transform(self.bp, self.bx)
        p = momentum(self.bp)
        self.kinetic = lazy_product([t_xp, p ** 2 / (2 * self.mass), t_px])
        self.interaction = diagonal_operator(self.bx, Ket(self.bx).data)
        self.H = lazy_sum([self.kinetic, self.interaction])

    def hamiltonian(self, t, psi: Ket) -> Operator:
        self.interaction.data[:] = self.g / self.dx * np.abs(psi.data) ** 2
        return self.H

    def two_packets(self) -> Ket:
        """Counter-propagating packets at ``-x0`` and ``+x0``."""
        psi1 = gaussian_state(self.bx, -self.x0, self.p0, self.sigma)
        psi2 = gaussian_state(self.bx, self.x0, -self.p0, self.sigma)
        return normalize(psi1 + psi2)

    def one_packet(self) -> Ket:
        return gaussian_state(self.bx, -self.x0, self.p0, self.sigma)


@dataclass
class CavityCooling:
    """Atom moving along a driven lossy cavity, motion treated classically."""

    kappa: float = 1.0
    eta: float = 1.0
    g: float = 0.5
    gamma: float = 2.0
    delta_c: float = 0.0
    delta_a: float = -1.0
    mass: float = 3.33
    k: float = 1.0
    cutoff: int = 16
    x0: float = -2 * math.pi
    p0: float | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.p0 is None:
            self.p0 = 2 * self.mass
        self.bc = fock_basis(self.cutoff)
        self.ba = spin_basis(0.5)
        self.a = tensor_op([destroy(self.bc), identity_op(self.ba)])
        self.sm = tensor_op([identity_op(self.bc), sigmam(self.ba)])
        ad, sp_ = dagger(self.a), dagger(self.sm)
        self.H0 = (-self.delta_c) * ad * self.a + self.eta * (self.a + ad) + (-self.delta_a) * sp_ * self.sm
        self.Hx = self.g * (self.a * sp_ + ad * self.sm)
        self.J = [self.a, self.sm]
        self.Jd = dagger(self.J)
        self.rates = [self.kappa, self.gamma]
        self.atasm = ad * self.sm
        self.photons = ad * self.a
        self.state0 = SemiclassicalState(
            tensor_state([fock_state(self.bc, 0), spin_down(self.ba)]), [self.x0, self.p0])

    def f_q(self, t, rho, u):
        x = u[0].real
        return self.H0 + math.cos(self.k * x) * self.Hx, self.J, self.Jd, self.rates

    def f_cl(self, t, rho, u, du):
        from .operators import expect

        x, p = u[0].real, u[1].real
        du[0] = p / self.mass
        du[1] = 2 * self.g * self.k * math.sin(self.k * x) * expect(self.atasm, rho).real

    def kinetic_energy(self, p):
        return np.asarray(p) ** 2 / (2 * self.mass)
