"""State vectors (kets and bras) and standard state constructors."""

from __future__ import annotations

import math
from numbers import Number
from typing import Sequence

import numpy as np

from .bases import Basis, FockBasis, PositionBasis, SpinBasis, tensor_basis
from .errors import DegenerateStateError, check_bases


class StateVector:
    """Coefficient vector of a state with respect to ``basis``.

    Do not instantiate directly, use :class:`Ket` or :class:`Bra`. All
    arithmetic returns new objects; ``data`` is only written in place by the
    integrators on their private copies.
    """

    __slots__ = ("basis", "data")
    __array_ufunc__ = None

    def __init__(self, basis: Basis, data=None):
        if not isinstance(basis, Basis):
            raise TypeError(f"not a basis: {basis!r}")
        if data is None:
            data = np.zeros(basis.dimension, dtype=complex)
        else:
            data = np.asarray(data, dtype=complex)
            if data.ndim != 1 or data.shape[0] != basis.dimension:
                raise ValueError(
                    f"amplitude vector of shape {data.shape} does not fit basis of dimension {basis.dimension}"
                )
        self.basis = basis
        self.data = data

    def _new(self, data):
        return type(self)(self.basis, data)

    def copy(self):
        return self._new(self.data.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def normalize(self):
        n = self.norm()
        if n == 0.0:
            raise DegenerateStateError("cannot normalize a zero vector")
        return self._new(self.data / n)

    def _check_same(self, other, op: str):
        if type(other) is not type(self):
            raise TypeError(f"cannot {op} {type(self).__name__} and {type(other).__name__}")
        check_bases(self.basis, other.basis, f"{op}: left vs right operand")

    def __add__(self, other):
        self._check_same(other, "add")
        return self._new(self.data + other.data)

    def __sub__(self, other):
        self._check_same(other, "subtract")
        return self._new(self.data - other.data)

    def __neg__(self):
        return self._new(-self.data)

    def __mul__(self, other):
        if isinstance(other, Number):
            return self._new(self.data * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self._new(other * self.data)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self._new(self.data / other)
        return NotImplemented

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and self.basis == other.basis
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}({self.basis!r}, dim={self.basis.dimension})"


class Ket(StateVector):
    """Column state vector."""

    __slots__ = ()

    def dagger(self) -> "Bra":
        return Bra(self.basis, self.data.conj())

    def __mul__(self, other):
        if isinstance(other, Bra):
            from .operators import DenseOperator

            return DenseOperator(self.basis, other.basis, np.outer(self.data, other.data))
        return super().__mul__(other)


class Bra(StateVector):
    """Row state vector; the conjugate transpose of a :class:`Ket`."""

    __slots__ = ()

    def dagger(self) -> Ket:
        return Ket(self.basis, self.data.conj())

    def __mul__(self, other):
        if isinstance(other, Ket):
            check_bases(self.basis, other.basis, "bra * ket")
            return complex(np.dot(self.data, other.data))
        from .operators import Operator

        if isinstance(other, Operator):
            check_bases(self.basis, other.basis_l, "bra * operator: bra vs operator left basis")
            return Bra(other.basis_r, other.dagger().apply_array(self.data.conj()).conj())
        return super().__mul__(other)


def fock_state(basis: FockBasis, n: int) -> Ket:
    """Number state ``|n>``."""
    if not isinstance(basis, FockBasis):
        raise ValueError(f"fock_state needs a FockBasis, got {basis!r}")
    if not 0 <= n <= basis.cutoff:
        raise IndexError(f"photon number {n} outside 0..{basis.cutoff}")
    data = np.zeros(basis.dimension, dtype=complex)
    data[n] = 1.0
    return Ket(basis, data)


def coherent_state(basis: FockBasis, alpha: complex) -> Ket:
    """Coherent state ``|alpha>`` truncated at the cutoff (not renormalized).

    Amplitudes follow ``c_n = c_{n-1} * alpha / sqrt(n)`` starting from
    ``c_0 = exp(-|alpha|^2 / 2)``, which avoids factorial overflow.
    """
    if not isinstance(basis, FockBasis):
        raise ValueError(f"coherent_state needs a FockBasis, got {basis!r}")
    alpha = complex(alpha)
    data = np.empty(basis.dimension, dtype=complex)
    data[0] = math.exp(-abs(alpha) ** 2 / 2)
    for n in range(1, basis.dimension):
        data[n] = data[n - 1] * alpha / math.sqrt(n)
    return Ket(basis, data)


def spin_up(basis: SpinBasis) -> Ket:
    """Eigenstate with the largest magnetic quantum number (index 0)."""
    if not isinstance(basis, SpinBasis):
        raise ValueError(f"spin_up needs a SpinBasis, got {basis!r}")
    data = np.zeros(basis.dimension, dtype=complex)
    data[0] = 1.0
    return Ket(basis, data)


def spin_down(basis: SpinBasis) -> Ket:
    """Eigenstate with the smallest magnetic quantum number (last index)."""
    if not isinstance(basis, SpinBasis):
        raise ValueError(f"spin_down needs a SpinBasis, got {basis!r}")
    data = np.zeros(basis.dimension, dtype=complex)
    data[-1] = 1.0
    return Ket(basis, data)


def gaussian_state(basis: PositionBasis, x0: float, p0: float, sigma: float) -> Ket:
    """Gaussian wave packet centered at ``x0`` with mean momentum ``p0``.

    ``sigma`` is the standard deviation of the position density. Amplitudes
    are ``sqrt(dx) * psi(x_j)``, renormalized on the grid.
    """
    if not isinstance(basis, PositionBasis):
        raise ValueError(f"gaussian_state needs a PositionBasis, got {basis!r}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    x = basis.points
    dx = basis.spacing
    data = (
        math.sqrt(dx)
        * (2 * math.pi * sigma**2) ** -0.25
        * np.exp(1j * p0 * x - (x - x0) ** 2 / (4 * sigma**2))
    )
    return Ket(basis, data).normalize()


def tensor_state(factors: Sequence[StateVector]) -> StateVector:
    """Tensor product; the leftmost factor's index varies slowest."""
    factors = list(factors)
    if not factors:
        raise ValueError("tensor_state needs at least one factor")
    kind = type(factors[0])
    if any(type(f) is not kind for f in factors):
        raise ValueError("cannot tensor kets with bras")
    if len(factors) == 1:
        return factors[0]
    data = factors[0].data
    for f in factors[1:]:
        data = np.kron(data, f.data)
    return kind(tensor_basis([f.basis for f in factors]), data)


def norm(state: StateVector) -> float:
    return state.norm()


def normalize(state: StateVector) -> StateVector:
    return state.normalize()


def inner(a: StateVector, b: Ket) -> complex:
    """``<a|b>``; a ket as first argument is conjugated first."""
    if not isinstance(b, Ket):
        raise TypeError("second argument of inner must be a Ket")
    check_bases(a.basis, b.basis, "inner: first vs second argument")
    left = a.data.conj() if isinstance(a, Ket) else a.data
    return complex(np.dot(left, b.data))
