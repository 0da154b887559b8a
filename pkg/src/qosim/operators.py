"""Operators between two bases with interchangeable numerical representations.

An operator maps kets over ``basis_r`` to kets over ``basis_l``. The
numerical payload is chosen per operator:

* :class:`DenseOperator` - full ``ndarray``
* :class:`SparseOperator` - ``scipy.sparse.csr_matrix``
* :class:`DiagonalOperator` - vector of diagonal entries (mutable in place)
* :class:`FFTOperator` - unitary change between a position grid and its
  conjugate momentum grid, applied with FFTs
* :class:`LazySum` / :class:`LazyProduct` - unevaluated sums and products

Arithmetic follows a fixed promotion table:

=====================  =================================
operands               result of ``+``, ``-`` and ``*``
=====================  =================================
diagonal, diagonal     diagonal
diagonal/sparse mix    sparse
anything, dense        dense
FFT or lazy involved   lazy sum (``+``) / lazy product (``*``)
=====================  =================================

Lazy operators are only ever materialized by :meth:`Operator.to_dense` or
:meth:`Operator.to_sparse`.
"""

from __future__ import annotations

import math
from numbers import Number
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .bases import (
    Basis,
    CompositeBasis,
    FockBasis,
    MomentumBasis,
    PositionBasis,
    SpinBasis,
    are_conjugate,
    momentum_basis_from,
    position_basis_from,
    tensor_basis,
)
from .errors import IncompatibleBasesError, check_bases
from .states import Ket, StateVector


class Operator:
    """Abstract operator from ``basis_r`` (domain) into ``basis_l`` (codomain)."""

    lazy = False
    __array_ufunc__ = None  # make numpy scalars defer to our __rmul__

    def __init__(self, basis_l: Basis, basis_r: Basis):
        if not isinstance(basis_l, Basis) or not isinstance(basis_r, Basis):
            raise TypeError("operator bases must be Basis instances")
        self.basis_l = basis_l
        self.basis_r = basis_r

    @property
    def shape(self) -> tuple[int, int]:
        return (self.basis_l.dimension, self.basis_r.dimension)

    # -- numerical kernels, overridden by the representations ----------------

    def apply_array(self, x: np.ndarray) -> np.ndarray:
        """Return ``A @ x`` for a vector or a stack of column vectors."""
        raise NotImplementedError

    def rapply_array(self, x: np.ndarray) -> np.ndarray:
        """Return ``x @ A`` for a 2-D array ``x``."""
        return self.dagger().apply_array(x.conj().T).conj().T

    def dagger(self) -> "Operator":
        raise NotImplementedError

    def to_array(self) -> np.ndarray:
        return self.apply_array(np.eye(self.shape[1], dtype=complex))

    def to_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.to_array())

    def to_dense(self) -> "DenseOperator":
        return DenseOperator(self.basis_l, self.basis_r, self.to_array())

    def to_sparse(self) -> "SparseOperator":
        return SparseOperator(self.basis_l, self.basis_r, self.to_csr())

    def _scaled(self, c: complex) -> "Operator":
        raise NotImplementedError

    # -- operator algebra ------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return _add(self, other, 1.0)

    def __sub__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return _add(self, other, -1.0)

    def __neg__(self):
        return self._scaled(-1.0)

    def __mul__(self, other):
        if isinstance(other, Number):
            return self._scaled(other)
        if isinstance(other, Operator):
            return multiply(self, other)
        if isinstance(other, Ket):
            return apply(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self._scaled(other)
        return NotImplemented

    __matmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self._scaled(1.0 / other)
        return NotImplemented

    def __pow__(self, n: int):
        if int(n) != n or n < 1:
            raise ValueError("only positive integer powers are supported")
        result = self
        for _ in range(int(n) - 1):
            result = multiply(result, self)
        return result

    def __repr__(self):
        return f"{type(self).__name__}({self.basis_l!r} <- {self.basis_r!r})"


class DenseOperator(Operator):
    """Operator backed by a full complex matrix."""

    def __init__(self, basis_l: Basis, basis_r: Basis, data):
        super().__init__(basis_l, basis_r)
        data = np.asarray(data, dtype=complex)
        if data.shape != self.shape:
            raise ValueError(f"matrix of shape {data.shape} does not fit bases {self.shape}")
        self.data = data

    def apply_array(self, x):
        return self.data @ x

    def rapply_array(self, x):
        return x @ self.data

    def dagger(self):
        return DenseOperator(self.basis_r, self.basis_l, self.data.conj().T)

    def to_array(self):
        return self.data.copy()

    def _scaled(self, c):
        return DenseOperator(self.basis_l, self.basis_r, c * self.data)


class SparseOperator(Operator):
    """Operator backed by a CSR matrix."""

    def __init__(self, basis_l: Basis, basis_r: Basis, data):
        super().__init__(basis_l, basis_r)
        data = sp.csr_matrix(data, dtype=complex)
        if data.shape != self.shape:
            raise ValueError(f"matrix of shape {data.shape} does not fit bases {self.shape}")
        self.data = data

    def apply_array(self, x):
        return self.data @ x

    def rapply_array(self, x):
        return x @ self.data

    def dagger(self):
        return SparseOperator(self.basis_r, self.basis_l, self.data.conj().T.tocsr())

    def to_array(self):
        return self.data.toarray()

    def to_csr(self):
        return self.data.copy()

    def _scaled(self, c):
        return SparseOperator(self.basis_l, self.basis_r, c * self.data)


class DiagonalOperator(Operator):
    """Diagonal operator on a single basis.

    ``data`` holds the diagonal and may be overwritten in place between
    applications (e.g. a state-dependent potential); nothing is cached.
    """

    def __init__(self, basis: Basis, data):
        super().__init__(basis, basis)
        data = np.array(data, dtype=complex)
        if data.ndim != 1 or data.shape[0] != basis.dimension:
            raise ValueError(f"diagonal of length {data.shape} does not fit dimension {basis.dimension}")
        self.data = data

    def apply_array(self, x):
        if x.ndim == 1:
            return self.data * x
        return self.data[:, None] * x

    def rapply_array(self, x):
        return x * self.data

    def dagger(self):
        return DiagonalOperator(self.basis_l, self.data.conj())

    def to_array(self):
        return np.diag(self.data)

    def to_csr(self):
        return sp.diags(self.data, format="csr")

    def _scaled(self, c):
        return DiagonalOperator(self.basis_l, c * self.data)


class FFTOperator(Operator):
    """Unitary transform between a position grid and its momentum grid.

    For position-to-momentum the coefficients map as

        psi_p[k] = n**-0.5 * sum_j exp(-1j * p_k * x_j) * psi_x[j]

    which is the Fourier integral discretized with amplitudes
    ``sqrt(dx) * psi(x_j)`` and ``sqrt(dp) * psi(p_k)``. The grid offsets turn
    into two phase vectors around a plain orthonormal FFT.
    """

    lazy = True

    def __init__(self, basis_l: Basis, basis_r: Basis):
        super().__init__(basis_l, basis_r)
        if isinstance(basis_r, PositionBasis) and isinstance(basis_l, MomentumBasis):
            bx, bp, self.forward = basis_r, basis_l, True
        elif isinstance(basis_r, MomentumBasis) and isinstance(basis_l, PositionBasis):
            bx, bp, self.forward = basis_l, basis_r, False
        else:
            raise IncompatibleBasesError(
                f"transform needs a position/momentum pair, got {basis_l!r} <- {basis_r!r}", basis_l, basis_r
            )
        if not are_conjugate(bx, bp):
            raise IncompatibleBasesError(f"grids are not Fourier conjugate: {bx!r}, {bp!r}", bx, bp)
        n = bx.n_points
        j = np.arange(n)
        # phase applied on the position side / on the momentum side
        x_phase = np.exp(-1j * bp.p_min * bx.spacing * j)
        p_phase = np.exp(-1j * (bp.p_min * bx.x_min + bp.spacing * bx.x_min * j))
        if self.forward:
            self._pre, self._post = x_phase, p_phase
        else:
            self._pre, self._post = p_phase.conj(), x_phase.conj()
        self._bx, self._bp = bx, bp

    def apply_array(self, x):
        if x.ndim == 1:
            y = self._pre * x
            y = np.fft.fft(y, norm="ortho") if self.forward else np.fft.ifft(y, norm="ortho")
            return self._post * y
        y = self._pre[:, None] * x
        y = np.fft.fft(y, axis=0, norm="ortho") if self.forward else np.fft.ifft(y, axis=0, norm="ortho")
        return self._post[:, None] * y

    def dagger(self):
        return FFTOperator(self.basis_r, self.basis_l)

    def to_array(self):
        x = self._bx.points
        p = self._bp.points
        n = len(x)
        m = np.exp(-1j * np.outer(p, x)) / math.sqrt(n)
        return m if self.forward else m.conj().T

    def _scaled(self, c):
        return LazyProduct([self], c)


class LazySum(Operator):
    """Unevaluated ``sum_k coefficients[k] * terms[k]``.

    Applying it applies every term to the state separately and adds the
    results. Terms are held by reference.
    """

    lazy = True

    def __init__(self, terms: Sequence[Operator], coefficients=None):
        terms = list(terms)
        if not terms:
            raise ValueError("LazySum needs at least one term")
        if coefficients is None:
            coefficients = [1.0] * len(terms)
        coefficients = [complex(c) for c in coefficients]
        if len(coefficients) != len(terms):
            raise ValueError("need one coefficient per term")
        bl, br = terms[0].basis_l, terms[0].basis_r
        for k, t in enumerate(terms[1:], start=1):
            check_bases(bl, t.basis_l, f"lazy sum: left basis of term 0 vs term {k}")
            check_bases(br, t.basis_r, f"lazy sum: right basis of term 0 vs term {k}")
        super().__init__(bl, br)
        self.terms = terms
        self.coefficients = coefficients

    def apply_array(self, x):
        out = self.coefficients[0] * self.terms[0].apply_array(x)
        for c, t in zip(self.coefficients[1:], self.terms[1:]):
            out += c * t.apply_array(x)
        return out

    def rapply_array(self, x):
        out = self.coefficients[0] * self.terms[0].rapply_array(x)
        for c, t in zip(self.coefficients[1:], self.terms[1:]):
            out += c * t.rapply_array(x)
        return out

    def dagger(self):
        return LazySum([t.dagger() for t in self.terms], [c.conjugate() for c in self.coefficients])

    def _scaled(self, c):
        return LazySum(self.terms, [c * k for k in self.coefficients])


class LazyProduct(Operator):
    """Unevaluated ``coefficient * factors[0] * factors[1] * ...``.

    Applied right to left, one factor at a time.
    """

    lazy = True

    def __init__(self, factors: Sequence[Operator], coefficient: complex = 1.0):
        factors = list(factors)
        if not factors:
            raise ValueError("LazyProduct needs at least one factor")
        for k in range(len(factors) - 1):
            check_bases(
                factors[k].basis_r, factors[k + 1].basis_l,
                f"lazy product: right basis of factor {k} vs left basis of factor {k + 1}",
            )
        super().__init__(factors[0].basis_l, factors[-1].basis_r)
        self.factors = factors
        self.coefficient = complex(coefficient)

    def apply_array(self, x):
        for f in reversed(self.factors):
            x = f.apply_array(x)
        return self.coefficient * x

    def rapply_array(self, x):
        for f in self.factors:
            x = f.rapply_array(x)
        return self.coefficient * x

    def dagger(self):
        return LazyProduct([f.dagger() for f in reversed(self.factors)], self.coefficient.conjugate())

    def _scaled(self, c):
        return LazyProduct(self.factors, c * self.coefficient)


class DensityOperator(DenseOperator):
    """Dense operator with equal left and right bases describing a mixed state."""

    def __init__(self, basis: Basis, data):
        super().__init__(basis, basis, data)

    @property
    def basis(self) -> Basis:
        return self.basis_l

    def validate(self, herm_tol: float = 1e-10, trace_tol: float = 1e-8, eig_tol: float = 1e-8):
        """Raise ``ValueError`` unless Hermitian, unit trace and positive semidefinite."""
        rho = self.data
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > herm_tol:
            raise ValueError("density operator is not Hermitian")
        if abs(np.trace(rho) - 1) > trace_tol:
            raise ValueError(f"density operator trace {np.trace(rho).real} differs from 1")
        if np.linalg.eigvalsh(rho).min() < -eig_tol:
            raise ValueError("density operator has negative eigenvalues")
        return self


def dm(state: Ket) -> DensityOperator:
    """Projector ``|psi><psi|`` (the ket is not normalized first)."""
    if not isinstance(state, Ket):
        raise TypeError("dm expects a Ket")
    return DensityOperator(state.basis, np.outer(state.data, state.data.conj()))


def density_operator(basis: Basis, matrix) -> DensityOperator:
    """Validated density operator from a matrix."""
    return DensityOperator(basis, matrix).validate()


# -- promotion helpers -----------------------------------------------------------


def _raw(op: Operator):
    if isinstance(op, DenseOperator):
        return op.data
    if isinstance(op, DiagonalOperator):
        return sp.diags(op.data, format="csr")
    return op.to_csr() if not isinstance(op, SparseOperator) else op.data


def _wrap(basis_l, basis_r, m) -> Operator:
    if sp.issparse(m):
        return SparseOperator(basis_l, basis_r, m)
    return DenseOperator(basis_l, basis_r, np.asarray(m))


def _add(a: Operator, b: Operator, sign: float) -> Operator:
    check_bases(a.basis_l, b.basis_l, "add: left basis of left vs right operand")
    check_bases(a.basis_r, b.basis_r, "add: right basis of left vs right operand")
    if a.lazy or b.lazy:
        terms, coeffs = [], []
        for op, s in ((a, 1.0), (b, sign)):
            if isinstance(op, LazySum):
                terms.extend(op.terms)
                coeffs.extend(s * c for c in op.coefficients)
            else:
                terms.append(op)
                coeffs.append(s)
        return LazySum(terms, coeffs)
    if isinstance(a, DiagonalOperator) and isinstance(b, DiagonalOperator):
        return DiagonalOperator(a.basis_l, a.data + sign * b.data)
    if isinstance(a, DenseOperator) or isinstance(b, DenseOperator):
        return DenseOperator(a.basis_l, a.basis_r, a.to_array() + sign * b.to_array())
    return SparseOperator(a.basis_l, a.basis_r, _raw(a) + sign * _raw(b))


def add(a: Operator, b: Operator) -> Operator:
    return _add(a, b, 1.0)


def sub(a: Operator, b: Operator) -> Operator:
    return _add(a, b, -1.0)


def scale(a: Operator, c: complex) -> Operator:
    return a._scaled(c)


def multiply(a: Operator, b: Operator) -> Operator:
    """Operator product ``a * b``."""
    check_bases(a.basis_r, b.basis_l, "multiply: right basis of left factor vs left basis of right factor")
    if a.lazy or b.lazy:
        factors: list[Operator] = []
        coeff = 1.0
        for op in (a, b):
            if isinstance(op, LazyProduct):
                factors.extend(op.factors)
                coeff *= op.coefficient
            else:
                factors.append(op)
        return LazyProduct(factors, coeff)
    if isinstance(a, DiagonalOperator) and isinstance(b, DiagonalOperator):
        return DiagonalOperator(a.basis_l, a.data * b.data)
    return _wrap(a.basis_l, b.basis_r, _raw(a) @ _raw(b))


def tensor_op(factors: Sequence[Operator]) -> Operator:
    """Tensor product of operators, left factor varying slowest."""
    factors = list(factors)
    if not factors:
        raise ValueError("tensor_op needs at least one factor")
    if len(factors) == 1:
        return factors[0]
    if any(f.lazy for f in factors):
        raise TypeError("lazy and FFT operators cannot be tensored; call to_dense() first")
    bl = tensor_basis([f.basis_l for f in factors])
    br = tensor_basis([f.basis_r for f in factors])
    if all(isinstance(f, DiagonalOperator) for f in factors):
        data = factors[0].data
        for f in factors[1:]:
            data = np.kron(data, f.data)
        return DiagonalOperator(bl, data)
    if any(isinstance(f, DenseOperator) for f in factors):
        data = factors[0].to_array()
        for f in factors[1:]:
            data = np.kron(data, f.to_array())
        return DenseOperator(bl, br, data)
    data = _raw(factors[0])
    for f in factors[1:]:
        data = sp.kron(data, _raw(f), format="csr")
    return SparseOperator(bl, br, data)


def tensor(*objs):
    """Tensor product of kets, bras or operators given as positional arguments."""
    if all(isinstance(o, StateVector) for o in objs):
        from .states import tensor_state

        return tensor_state(objs)
    return tensor_op(objs)


def dagger(obj):
    """Hermitian conjugate of a state or operator (lists are mapped)."""
    if isinstance(obj, (list, tuple)):
        return [o.dagger() for o in obj]
    return obj.dagger()


def apply(op: Operator, state: Ket) -> Ket:
    """``op * state``."""
    check_bases(op.basis_r, state.basis, "apply: operator right basis vs ket basis")
    return Ket(op.basis_l, op.apply_array(state.data))


def to_dense(op: Operator) -> DenseOperator:
    return op.to_dense()


def to_sparse(op: Operator) -> SparseOperator:
    return op.to_sparse()


def is_hermitian(op: Operator, tol: float = 1e-12) -> bool:
    """Elementwise check ``max |A - A^dagger| <= tol`` (materializes lazy operators)."""
    if op.basis_l != op.basis_r:
        return False
    if isinstance(op, DiagonalOperator):
        return bool(np.max(np.abs(op.data.imag), initial=0.0) <= tol)
    if isinstance(op, SparseOperator):
        diff = op.data - op.data.conj().T
        return bool(np.max(np.abs(diff.data), initial=0.0) <= tol)
    m = op.to_array()
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def expect(op: Operator, state):
    """Expectation value ``<psi|A|psi>`` or ``tr(A rho)``; lists are mapped.

    Semiclassical states contribute their quantum part.
    """
    if isinstance(state, (list, tuple)):
        return np.array([expect(op, s) for s in state], dtype=complex)
    quantum = getattr(state, "quantum", None)
    if quantum is not None:
        return expect(op, quantum)
    if isinstance(state, Ket):
        check_bases(op.basis_r, state.basis, "expect: operator right basis vs state basis")
        check_bases(op.basis_l, state.basis, "expect: operator left basis vs state basis")
        return complex(np.vdot(state.data, op.apply_array(state.data)))
    if isinstance(state, Operator):
        check_bases(op.basis_r, state.basis_l, "expect: operator right basis vs state basis")
        check_bases(op.basis_l, state.basis_r, "expect: operator left basis vs state basis")
        rho = state.to_array() if not isinstance(state, DenseOperator) else state.data
        if isinstance(op, DiagonalOperator):
            return complex(np.dot(op.data, np.diagonal(rho)))
        if isinstance(op, SparseOperator):
            return complex(op.data.multiply(rho.T).sum())
        if isinstance(op, DenseOperator):
            return complex(np.einsum("ij,ji->", op.data, rho))
        return complex(np.trace(op.apply_array(rho)))
    raise TypeError(f"cannot take an expectation value in {type(state).__name__}")


# -- constructors ---------------------------------------------------------------


def _require(basis, kind, name):
    if not isinstance(basis, kind):
        raise ValueError(f"{name} needs a {kind.__name__}, got {basis!r}")


def destroy(basis: FockBasis) -> SparseOperator:
    """Annihilation operator, ``<n-1|a|n> = sqrt(n)``."""
    _require(basis, FockBasis, "destroy")
    n = basis.dimension
    m = sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, shape=(n, n), format="csr", dtype=complex)
    return SparseOperator(basis, basis, m)


def create(basis: FockBasis) -> SparseOperator:
    """Creation operator, the adjoint of :func:`destroy`."""
    return destroy(basis).dagger()


def number(basis: FockBasis) -> DiagonalOperator:
    _require(basis, FockBasis, "number")
    return DiagonalOperator(basis, np.arange(basis.dimension, dtype=float))


def _spin_m(basis: SpinBasis) -> np.ndarray:
    # index i carries magnetic quantum number m = s - i
    return basis.spin - np.arange(basis.dimension)


def sigmam(basis: SpinBasis) -> SparseOperator:
    """Spin lowering operator; maps index i to i+1 (for spin 1/2: up -> down)."""
    _require(basis, SpinBasis, "sigmam")
    s = basis.spin
    m = _spin_m(basis)[:-1]
    elems = np.sqrt(s * (s + 1) - m * (m - 1))
    mat = sp.diags(elems, -1, shape=(basis.dimension,) * 2, format="csr", dtype=complex)
    return SparseOperator(basis, basis, mat)


def sigmap(basis: SpinBasis) -> SparseOperator:
    return sigmam(basis).dagger()


def sigmaz(basis: SpinBasis) -> DiagonalOperator:
    """``2 S_z``; ``diag(1, -1)`` for spin 1/2."""
    _require(basis, SpinBasis, "sigmaz")
    return DiagonalOperator(basis, 2 * _spin_m(basis))


def identity_op(basis: Basis) -> DiagonalOperator:
    return DiagonalOperator(basis, np.ones(basis.dimension))


one = identity_op


def diagonal_operator(basis: Basis, values) -> DiagonalOperator:
    values = np.asarray(values)
    if values.ndim != 1 or values.shape[0] != basis.dimension:
        raise ValueError(f"need {basis.dimension} diagonal values, got shape {values.shape}")
    return DiagonalOperator(basis, values)


def transform(target: Basis, source: Basis) -> FFTOperator:
    """FFT-backed change of representation from ``source`` to ``target``."""
    return FFTOperator(target, source)


def position(basis: Basis) -> Operator:
    """Position operator on a position grid (diagonal) or momentum grid (dense)."""
    if isinstance(basis, PositionBasis):
        return DiagonalOperator(basis, basis.points)
    if isinstance(basis, MomentumBasis):
        bx = position_basis_from(basis)
        return LazyProduct([transform(basis, bx), position(bx), transform(bx, basis)]).to_dense()
    raise ValueError(f"position needs a PositionBasis or MomentumBasis, got {basis!r}")


def momentum(basis: Basis) -> Operator:
    """Momentum operator on a momentum grid (diagonal) or position grid (dense)."""
    if isinstance(basis, MomentumBasis):
        return DiagonalOperator(basis, basis.points)
    if isinstance(basis, PositionBasis):
        bp = momentum_basis_from(basis)
        return LazyProduct([transform(basis, bp), momentum(bp), transform(bp, basis)]).to_dense()
    raise ValueError(f"momentum needs a PositionBasis or MomentumBasis, got {basis!r}")


def lazy_sum(terms: Sequence[Operator], coefficients=None) -> LazySum:
    return LazySum(terms, coefficients)


def lazy_product(factors: Sequence[Operator], coefficient: complex = 1.0) -> LazyProduct:
    return LazyProduct(factors, coefficient)


def embed(basis: CompositeBasis, index: int, op: Operator) -> Operator:
    """``op`` acting on factor ``index`` of ``basis``, identity elsewhere."""
    factors = [identity_op(b) for b in basis.factors]
    check_bases(basis.factors[index], op.basis_l, "embed: factor vs operator basis")
    factors[index] = op
    return tensor_op(factors)
