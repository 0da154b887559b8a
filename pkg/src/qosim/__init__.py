"""Simulation of closed and open quantum systems with basis-tracked states and operators."""

from .bases import (
    Basis,
    CompositeBasis,
    FockBasis,
    MomentumBasis,
    PositionBasis,
    SpinBasis,
    fock_basis,
    momentum_basis_from,
    position_basis,
    position_basis_from,
    spin_basis,
    tensor_basis,
)
from .dynamics import (
    EnsembleAverage,
    EvolutionResult,
    IntegratorConfig,
    master,
    master_dynamic,
    mcwf,
    mcwf_ensemble,
    schroedinger,
    schroedinger_dynamic,
)
from .errors import DegenerateJumpError, DegenerateStateError, IncompatibleBasesError, IntegrationError
from .operators import (
    DenseOperator,
    DensityOperator,
    DiagonalOperator,
    FFTOperator,
    LazyProduct,
    LazySum,
    Operator,
    SparseOperator,
    add,
    apply,
    create,
    dagger,
    density_operator,
    destroy,
    diagonal_operator,
    dm,
    embed,
    expect,
    identity_op,
    is_hermitian,
    lazy_product,
    lazy_sum,
    momentum,
    multiply,
    number,
    one,
    position,
    scale,
    sigmam,
    sigmap,
    sigmaz,
    sub,
    tensor,
    tensor_op,
    to_dense,
    to_sparse,
    transform,
)
from .semiclassical import SemiclassicalState, sc_master_dynamic, sc_schroedinger_dynamic
from .states import (
    Bra,
    Ket,
    StateVector,
    coherent_state,
    fock_state,
    gaussian_state,
    inner,
    norm,
    normalize,
    spin_down,
    spin_up,
    tensor_state,
)

__version__ = "0.1.0"
