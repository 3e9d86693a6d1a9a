"""Self-validation suite: analytic pipeline vs. brute-force oracles.

Checks (quick level runs all but the Monte Carlo one):

* projection_equivalence -- the 6x6 generator assembled directly matches
  the full 16x16 superoperator restricted to the closed subspace,
  entrywise, over random parameter draws;
* kernel_vs_integration -- the kernel steady state agrees with long-time
  integration of the full generator in trace distance;
* entropy_order_ladder / ergotropy_order_ladder -- perturbative rates
  converge to the exact per-collision differences with error shrinking
  linearly in phi;
* map_energy_consistency -- the tape energy current e_q*(delta+zeta)
  equals the energy change of the exact map output (supports fault
  injection for self-testing the validator);
* monte_carlo (full level) -- the stochastic collision trajectory
  reproduces the kernel steady state within sampled error bars.

Random draws keep every rate within a few decades and bath occupations
away from underflow so the integration oracle converges in bounded time.
"""
from __future__ import annotations

import time
from typing import Any

import numpy as np

from .model import MachineConfig, TapeQubitState, gibbs_qubit
from .steady import build_dynamical_matrix, solve_steady_state
from .tapemap import apply_map
from .thermo import components, energy_currents, entropy_rate, ergotropy_rate
from .oracle import (build_liouvillian, exact_map_entropy_delta,
                     exact_map_ergotropy_delta, integrate_to_steady,
                     project_dynamical_block, simulate_collisions, trace_distance)

PHI_LADDER = (0.08, 0.04, 0.02, 0.01)


def random_config(rng: np.random.Generator, phi: float | None = None) -> MachineConfig:
    """Random machine with rates spread log-uniformly over safe decades."""
    e_c = float(np.exp(rng.uniform(np.log(0.25), np.log(2.5))))
    beta_c = float(np.exp(rng.uniform(np.log(0.4), np.log(2.0))))
    # keep beta*gap <= ~3.5 so all bath rates stay above ~1e-4 * gamma0
    beta_c = min(beta_c, 3.0 / e_c)
    beta_h = beta_c * float(rng.uniform(0.05, 0.9))
    gamma0 = float(np.exp(rng.uniform(np.log(2e-3), np.log(2e-2))))
    r = float(np.exp(rng.uniform(np.log(0.5), np.log(5.0))))
    if phi is None:
        phi = float(np.exp(rng.uniform(np.log(0.01), np.log(0.08))))
    return MachineConfig(e_c=e_c, beta_c=beta_c, beta_h=beta_h, gamma0=gamma0,
                         r=r, phi=phi)


def random_tape(rng: np.random.Generator, margin: float = 0.9) -> TapeQubitState:
    p1 = float(rng.uniform(0.08, 0.92))
    c_mag = margin * np.sqrt(p1 * (1 - p1)) * float(rng.uniform(0.0, 1.0))
    phase = float(rng.uniform(0.0, 2.0 * np.pi))
    return TapeQubitState(p1=p1, c=c_mag * np.exp(1j * phase))


def _check_projection(rng: np.random.Generator, draws: int) -> dict[str, Any]:
    worst = 0.0
    for _ in range(draws):
        config = random_config(rng)
        tape = random_tape(rng)
        direct = build_dynamical_matrix(config, tape).entries
        projected = project_dynamical_block(build_liouvillian(config, tape))
        scale = np.abs(direct).max()
        worst = max(worst, float(np.abs(direct - projected).max() / scale))
    return {"name": "projection_equivalence", "draws": draws,
            "worst_relative_mismatch": worst, "passed": worst <= 1e-13}


def _check_kernel_vs_integration(rng: np.random.Generator, draws: int) -> dict[str, Any]:
    worst = 0.0
    for _ in range(draws):
        config = random_config(rng)
        tape = random_tape(rng)
        pi = solve_steady_state(build_dynamical_matrix(config, tape))
        liou = build_liouvillian(config, tape)
        cold = gibbs_qubit(config.beta_c, config.e_c)
        hot = gibbs_qubit(config.beta_h, config.e_h)
        initial = np.kron(np.diag([cold.p0, cold.p1]),
                          np.diag([hot.p0, hot.p1])).astype(complex)
        integrated = integrate_to_steady(liou, initial)
        worst = max(worst, trace_distance(pi.as_matrix(), integrated))
    return {"name": "kernel_vs_integration", "draws": draws,
            "worst_trace_distance": worst, "passed": worst <= 1e-8}


def _ladder_errors(config_base: MachineConfig, tape: TapeQubitState,
                   kind: str) -> list[float]:
    errors = []
    for phi in PHI_LADDER:
        config = MachineConfig(e_c=config_base.e_c, beta_c=config_base.beta_c,
                               beta_h=config_base.beta_h, gamma0=config_base.gamma0,
                               r=config_base.r, phi=phi, e_q=config_base.e_q)
        pi = solve_steady_state(build_dynamical_matrix(config, tape))
        delta, _ = components(pi, tape, config)
        if kind == "entropy":
            pert = entropy_rate(pi, tape, config, delta)
            exact = exact_map_entropy_delta(pi, tape, phi, config.r)
        else:
            e_tape = config.e_q * sum(components(pi, tape, config))
            pert = ergotropy_rate(e_tape, pi, tape, config, delta)
            exact = exact_map_ergotropy_delta(pi, tape, phi, config.r, config.e_q)
        errors.append(abs(pert - exact) / max(abs(exact), 1e-300))
    return errors


def _check_ladder(kind: str) -> dict[str, Any]:
    config = MachineConfig(e_c=0.5, beta_c=1.2, beta_h=0.06, gamma0=0.0025,
                           r=2.0, phi=0.02)
    tape = TapeQubitState(p1=0.5, c=0.35)
    errors = _ladder_errors(config, tape, kind)
    ratios = [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]
    passed = all(1.6 <= ratio <= 2.6 for ratio in ratios)
    return {"name": f"{kind}_order_ladder", "phi": list(PHI_LADDER),
            "relative_errors": errors, "ratios": ratios, "passed": passed}


def _check_map_energy(rng: np.random.Generator, draws: int,
                      fault: str | None) -> dict[str, Any]:
    worst = 0.0
    for _ in range(draws):
        config = random_config(rng)
        tape = random_tape(rng)
        pi = solve_steady_state(build_dynamical_matrix(config, tape))
        delta, zeta = components(pi, tape, config)
        if fault == "zeta_sign":
            zeta = -zeta
        e_tape, _, _ = energy_currents(delta, zeta, config)
        out = apply_map(pi, tape, config.phi)
        e_map = config.r * config.e_q * (out.p1 - tape.p1)
        scale = max(abs(e_tape), abs(e_map), config.r * config.phi ** 2 * config.e_q)
        worst = max(worst, abs(e_tape - e_map) / scale)
    return {"name": "map_energy_consistency", "draws": draws,
            "worst_relative_mismatch": worst, "passed": worst <= 1e-12}


def _check_monte_carlo(seed: int) -> dict[str, Any]:
    config = MachineConfig(e_c=0.5, beta_c=1.2, beta_h=0.06, gamma0=0.0025,
                           r=2.0, phi=0.02)
    tape = TapeQubitState(p1=0.5, c=0.4)
    pi = solve_steady_state(build_dynamical_matrix(config, tape)).as_matrix()
    result = simulate_collisions(config, tape, tau=0.1, n_collisions=100_000,
                                 seed=seed)
    gap = np.abs(result.mean_state - pi)
    allowed = 3.0 * result.stderr + 1e-12
    passed = bool((gap <= allowed).all())
    return {"name": "monte_carlo", "n_collisions": result.n_collisions,
            "max_sigma_excess": float((gap / (result.stderr + 1e-30)).max()),
            "passed": passed}


def run_validation(level: str = "quick", seed: int = 1234,
                   fault: str | None = None) -> dict[str, Any]:
    """Run the validation suite; returns a JSON-serializable report."""
    if level not in ("quick", "full"):
        raise ValueError(f"unknown validation level {level!r}")
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    checks = [
        _check_projection(rng, draws=1000 if level == "full" else 200),
        _check_kernel_vs_integration(rng, draws=100 if level == "full" else 10),
        _check_ladder("entropy"),
        _check_ladder("ergotropy"),
        _check_map_energy(rng, draws=200 if level == "full" else 50, fault=fault),
    ]
    if level == "full":
        checks.append(_check_monte_carlo(seed))
    return {
        "level": level,
        "seed": seed,
        "fault": fault,
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
        "elapsed_seconds": round(time.perf_counter() - t0, 3),
    }
