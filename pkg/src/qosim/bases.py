"""Hilbert-space basis descriptors.

Every state and operator carries the basis (or bases) its coefficients refer
to. Bases are immutable and compare structurally, so two objects are
compatible only if they were built over the same kind of space with the same
parameters. Matching dimensions alone are never enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np


class Basis:
    """Base class of all basis descriptors."""

    __slots__ = ()

    @property
    def dimension(self) -> int:
        raise NotImplementedError

    @property
    def shape(self) -> tuple[int, ...]:
        """Dimensions of the tensor factors (a 1-tuple for simple bases)."""
        return (self.dimension,)


@dataclass(frozen=True)
class FockBasis(Basis):
    """Number states |0>, ..., |cutoff> of a single bosonic mode."""

    cutoff: int

    def __post_init__(self):
        if int(self.cutoff) != self.cutoff or self.cutoff < 0:
            raise ValueError(f"Fock cutoff must be a nonnegative integer, got {self.cutoff!r}")
        object.__setattr__(self, "cutoff", int(self.cutoff))

    @property
    def dimension(self) -> int:
        return self.cutoff + 1


@dataclass(frozen=True)
class SpinBasis(Basis):
    """Angular momentum eigenbasis for spin ``two_s / 2``.

    Index 0 holds the largest magnetic quantum number (spin up), the last
    index the smallest (spin down).
    """

    two_s: int

    def __post_init__(self):
        if int(self.two_s) != self.two_s or self.two_s < 1:
            raise ValueError(f"two_s must be a positive integer, got {self.two_s!r}")
        object.__setattr__(self, "two_s", int(self.two_s))

    @property
    def spin(self) -> float:
        return self.two_s / 2

    @property
    def dimension(self) -> int:
        return self.two_s + 1


@dataclass(frozen=True)
class PositionBasis(Basis):
    """Periodic real-space grid ``x_j = x_min + j*dx`` excluding ``x_max``."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)) or self.x_max <= self.x_min:
            raise ValueError(f"need x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"need at least 2 grid points, got {self.n_points!r}")
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def dimension(self) -> int:
        return self.n_points

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.n_points)


@dataclass(frozen=True)
class MomentumBasis(Basis):
    """Momentum grid ``p_k = p_min + k*dp`` excluding ``p_max``.

    Usually obtained from :func:`momentum_basis_from`, which makes it the
    discrete Fourier conjugate of a :class:`PositionBasis`.
    """

    p_min: float
    p_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.p_min) and math.isfinite(self.p_max)) or self.p_max <= self.p_min:
            raise ValueError(f"need p_max > p_min, got [{self.p_min}, {self.p_max}]")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"need at least 2 grid points, got {self.n_points!r}")
        object.__setattr__(self, "p_min", float(self.p_min))
        object.__setattr__(self, "p_max", float(self.p_max))
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def dimension(self) -> int:
        return self.n_points

    @property
    def spacing(self) -> float:
        return (self.p_max - self.p_min) / self.n_points

    @property
    def points(self) -> np.ndarray:
        return self.p_min + self.spacing * np.arange(self.n_points)


@dataclass(frozen=True)
class CompositeBasis(Basis):
    """Tensor product of two or more non-composite bases, order preserved."""

    factors: tuple[Basis, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if len(factors) < 2:
            raise ValueError("a composite basis needs at least two factors")
        if any(isinstance(f, CompositeBasis) for f in factors):
            raise ValueError("composite factors must be flattened; use tensor_basis")
        object.__setattr__(self, "factors", factors)

    @property
    def dimension(self) -> int:
        return reduce(lambda a, b: a * b, (f.dimension for f in self.factors), 1)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(f.dimension for f in self.factors)


def fock_basis(cutoff: int) -> FockBasis:
    return FockBasis(cutoff)


def spin_basis(spin) -> SpinBasis:
    """Spin basis for ``spin`` in {1/2, 1, 3/2, ...}; ``Fraction`` is accepted."""
    two_s = 2 * float(spin)
    if not math.isfinite(two_s) or abs(two_s - round(two_s)) > 1e-12 or round(two_s) < 1:
        raise ValueError(f"spin must be a positive multiple of 1/2, got {spin!r}")
    return SpinBasis(int(round(two_s)))


def position_basis(x_min: float, x_max: float, n_points: int) -> PositionBasis:
    return PositionBasis(x_min, x_max, n_points)


def momentum_basis_from(position: PositionBasis) -> MomentumBasis:
    """Momentum grid conjugate to ``position`` under the discrete Fourier transform.

    The grid has the same number of points, spacing ``2*pi/L`` and is centered
    on zero: ``p_min = -pi/dx``, ``p_max = pi/dx``.
    """
    if not isinstance(position, PositionBasis):
        raise ValueError(f"expected a PositionBasis, got {position!r}")
    half_extent = math.pi / position.spacing
    return MomentumBasis(-half_extent, half_extent, position.n_points)


def position_basis_from(momentum: MomentumBasis) -> PositionBasis:
    """Inverse of :func:`momentum_basis_from` for a zero-centered grid."""
    if not isinstance(momentum, MomentumBasis):
        raise ValueError(f"expected a MomentumBasis, got {momentum!r}")
    half_extent = math.pi / momentum.spacing
    return PositionBasis(-half_extent, half_extent, momentum.n_points)


def are_conjugate(position: PositionBasis, momentum: MomentumBasis, rtol: float = 1e-12) -> bool:
    """True if the grids are related by the discrete Fourier transform."""
    if not isinstance(position, PositionBasis) or not isinstance(momentum, MomentumBasis):
        return False
    if position.n_points != momentum.n_points:
        return False
    # dx * dp = 2 pi / n is the only requirement; offsets enter as phases
    product = position.spacing * momentum.spacing * position.n_points
    return abs(product - 2 * math.pi) <= rtol * 2 * math.pi * 10


def tensor_basis(factors: Sequence[Basis]) -> Basis:
    """Tensor product of ``factors``; nested composites are flattened."""
    factors = list(factors)
    if not factors:
        raise ValueError("tensor_basis needs at least one factor")
    flat: list[Basis] = []
    for f in factors:
        if not isinstance(f, Basis):
            raise TypeError(f"not a basis: {f!r}")
        flat.extend(f.factors if isinstance(f, CompositeBasis) else (f,))
    if len(flat) == 1:
        return flat[0]
    return CompositeBasis(tuple(flat))
