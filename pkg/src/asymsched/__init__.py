"""Scheduling unit-task DAGs on asymmetric (multi-speed) machines."""

from .bounds import bound_report, list_bound_quantities
from .errors import SchedulingError
from .lprelax import RoundingConfig, build_mip, rounding_pipeline, solve_lp
from .oracle import asymmetrize, exact_optimal_makespan, exact_optimal_schedule, exhaustive_min_energy
from .remnants import remnants_schedule
from .save_energy import save_energy, verify_local_optimality
from .schedule import Schedule, Segment, energy, makespan, supported_set_blocks, validate
from .taskmodel import EnergyParams, Instance, MachineConfig, TaskGraph, chain_instance, decompose_chains

__version__ = "0.1.0"

__all__ = [
    "EnergyParams", "Instance", "MachineConfig", "RoundingConfig", "Schedule", "SchedulingError", "Segment",
    "TaskGraph", "asymmetrize", "bound_report", "build_mip", "chain_instance", "decompose_chains", "energy",
    "exact_optimal_makespan", "exact_optimal_schedule", "exhaustive_min_energy", "list_bound_quantities",
    "makespan", "remnants_schedule", "rounding_pipeline", "save_energy", "solve_lp", "supported_set_blocks",
    "validate", "verify_local_optimality",
]
