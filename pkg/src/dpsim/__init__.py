"""Marine vessel simulation and dynamic-positioning control stack."""
from .dynamics import VesselParams, VesselState, ModelMatrices, build_matrices, eom_rhs
from .integrator import SimConfig, rk4_step, run_sim

__all__ = [
    "VesselParams", "VesselState", "ModelMatrices", "build_matrices", "eom_rhs",
    "SimConfig", "rk4_step", "run_sim",
]
__version__ = "0.1.0"
