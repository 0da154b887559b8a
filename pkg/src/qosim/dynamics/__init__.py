"""Time evolution: Schroedinger, master equation and quantum-jump trajectories."""

from .common import EvolutionResult
from .integrator import DormandPrince, IntegratorConfig, integrate_adaptive
from .master import lindblad_rhs, lindblad_rhs_naive, master, master_dynamic
from .mcwf import EnsembleAverage, mcwf, mcwf_ensemble
from .schroedinger import schroedinger, schroedinger_dynamic

__all__ = [
    "DormandPrince",
    "EnsembleAverage",
    "EvolutionResult",
    "IntegratorConfig",
    "integrate_adaptive",
    "lindblad_rhs",
    "lindblad_rhs_naive",
    "master",
    "master_dynamic",
    "mcwf",
    "mcwf_ensemble",
    "schroedinger",
    "schroedinger_dynamic",
]
