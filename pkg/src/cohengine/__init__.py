"""Steady-state thermodynamics of a two-qubit autonomous thermal machine
driven by a tape of (possibly coherent) qubits."""

__version__ = "0.1.0"

from .model import (ConfigError, MachineConfig, RatePair, TapeQubitState,
                    UnboundedTemperature, bath_rates, bloch_radius, gibbs_qubit,
                    incoherent_tape_beta, qubit_spectrum, tape_rates, virtual_beta)
from .steady import (DegenerateSteadyState, DynamicalMatrix, SteadyState,
                     build_dynamical_matrix, solve_steady_state)
from .tapemap import (DegenerateSpectrum, MapOutput, apply_map, map_with_shifts,
                      second_order_shifts)
from .thermo import (CurrentSet, Performance, PureStateBoundary, Regime,
                     UnclassifiedPoint, classify_regime, components,
                     default_tolerance, energy_currents, entropy_production,
                     entropy_rate, ergotropy, ergotropy_rate, evaluate_currents,
                     free_energy, free_energy_split, performance)
from .oracle import (Liouvillian, SteadyStateTimeout, TrajectoryResult,
                     build_liouvillian, collision_unitary, exact_map_entropy_delta,
                     exact_map_ergotropy_delta, integrate_to_steady,
                     project_dynamical_block, simulate_collisions, spawn_seeds,
                     trace_distance)
from .sweepopt import (MachineTemplate, OptimizationTarget, OptimizerInfo,
                       SweepGrid, SweepRecord, SweepTable, TargetInfeasible,
                       evaluate_point, optimize_gap, sweep)
from .presets import PRESETS, Preset
from .validate import run_validation

__all__ = [name for name in dir() if not name.startswith("_")]
