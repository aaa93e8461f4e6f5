"""Reduced dynamics and thermodynamics of bipartite pure states via the Schmidt decomposition."""
from .effective import LocalGenerator, SuperOp, canonical_hamiltonian, local_generator, phi_map_exact, phi_map_mc
from .evolution import Trajectory, propagate
from .model import Scenario, SystemSpec, builtin_model, load_scenario, random_system
from .numerics import TOL, PreconditionError, Tolerances
from .schmidt import SchmidtTrajectory, schmidt_trajectory
from .thermo import ThermoRecord, thermo_record
from .verification import Simulation, VerificationReport, simulate, verify

__all__ = [
    "LocalGenerator", "SuperOp", "canonical_hamiltonian", "local_generator", "phi_map_exact", "phi_map_mc",
    "Trajectory", "propagate", "Scenario", "SystemSpec", "builtin_model", "load_scenario", "random_system",
    "TOL", "PreconditionError", "Tolerances", "SchmidtTrajectory", "schmidt_trajectory", "ThermoRecord",
    "thermo_record", "Simulation", "VerificationReport", "simulate", "verify",
]
