"""Nonequilibrium steady state of the driven machine.

The full master equation closes on a six-component subspace: the four
populations of the machine basis |ij> (i = cold qubit, j = hot qubit)
plus the inner coherence rho_v = <10|rho|01> and its conjugate.  All
other coherences decay independently to zero.  This module assembles the
6x6 generator on the ordered vector

    P = (rho_00, rho_01, rho_10, rho_11, rho_v, rho_v*)

directly from the dissipators and the coherent drive, and extracts its
kernel to obtain the steady state.

Generator structure (up/down rates: cold bath cu/cd, hot bath hu/hd,
tape channel qu = r*phi^2*p1 / qd = r*phi^2*p0, drive amplitude r*phi*c):

* baths flip one qubit at a time and damp rho_v at half the sum of all
  four bath rates;
* the tape channel exchanges 01 <-> 10 (qd downhill, qu uphill) and
  damps rho_v at half of (qu + qd) -- the pure-relaxation T2 = 2*T1
  relation, since the resonant exchange carries no extra dephasing;
* the drive couples rho_v to the population difference rho_01 - rho_10
  with amplitude r*phi*c and feeds back conjugately.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MachineConfig, TapeQubitState, tape_rates

KERNEL_RESIDUAL_FACTOR = 1e-11
_DEGENERACY_RTOL = 1e-10


class DegenerateSteadyState(RuntimeError):
    """The generator kernel is not one-dimensional (or is empty)."""

    def __init__(self, message: str, sigma_min: float, sigma_next: float):
        super().__init__(message)
        self.sigma_min = sigma_min
        self.sigma_next = sigma_next


@dataclass(frozen=True)
class DynamicalMatrix:
    """6x6 generator on (rho_00, rho_01, rho_10, rho_11, rho_v, rho_v*)."""

    entries: np.ndarray


@dataclass(frozen=True)
class SteadyState:
    """Nonzero steady-state elements of the machine density operator.

    ``pi_c`` is the inner coherence <10|pi|01>.
    """

    pi00: float
    pi01: float
    pi10: float
    pi11: float
    pi_c: complex

    def populations(self) -> np.ndarray:
        return np.array([self.pi00, self.pi01, self.pi10, self.pi11])

    def as_matrix(self) -> np.ndarray:
        """4x4 density operator in the basis (|00>, |01>, |10>, |11>)."""
        rho = np.diag(np.array([self.pi00, self.pi01, self.pi10, self.pi11],
                               dtype=complex))
        rho[2, 1] = self.pi_c
        rho[1, 2] = np.conj(self.pi_c)
        return rho

    def min_eigenvalue(self) -> float:
        half_sum = 0.5 * (self.pi10 + self.pi01)
        half_diff = 0.5 * (self.pi10 - self.pi01)
        inner = half_sum - np.hypot(half_diff, abs(self.pi_c))
        return min(self.pi00, self.pi11, inner)


def build_dynamical_matrix(config: MachineConfig, tape: TapeQubitState) -> DynamicalMatrix:
    """Assemble the 6x6 generator for the given machine and tape state."""
    cu, cd = config.cold_rates()
    hu, hd = config.hot_rates()
    qu, qd = tape_rates(config, tape)
    g = 1j * config.r * config.phi
    c = tape.c
    cb = np.conj(c)
    decay = -0.5 * (qu + qd) - 0.5 * (cu + cd + hu + hd)
    m = np.array([
        [-(cu + hu), hd,                cd,                0.0,        0.0,     0.0],
        [hu,         -(qd + hd + cu),   qu,                cd,         -g * cb, g * c],
        [cu,         qd,                -(qu + cd + hu),   hd,         g * cb,  -g * c],
        [0.0,        cu,                hu,                -(cd + hd), 0.0,     0.0],
        [0.0,        -g * c,            g * c,             0.0,        decay,   0.0],
        [0.0,        g * cb,            -g * cb,           0.0,        0.0,     decay],
    ], dtype=complex)
    return DynamicalMatrix(entries=m)


def _solution_to_state(x: np.ndarray) -> SteadyState:
    pops = x[:4].real
    total = pops.sum()
    pops = pops / total
    pi_c = 0.5 * (x[4] + np.conj(x[5])) / total
    return SteadyState(pi00=pops[0], pi01=pops[1], pi10=pops[2], pi11=pops[3],
                       pi_c=complex(pi_c))


def _svd_kernel(m: np.ndarray) -> np.ndarray:
    u, sigma, vh = np.linalg.svd(m)
    scale = sigma[0] if sigma[0] > 0 else 1.0
    if sigma[-1] > _DEGENERACY_RTOL * scale * 1e2:
        raise DegenerateSteadyState(
            "no kernel vector found (smallest singular value "
            f"{sigma[-1]:.3e} vs scale {scale:.3e})", sigma[-1], sigma[-2])
    if sigma[-2] < _DEGENERACY_RTOL * scale:
        raise DegenerateSteadyState(
            "stationary subspace is multi-dimensional (two smallest singular "
            f"values {sigma[-1]:.3e}, {sigma[-2]:.3e})", sigma[-1], sigma[-2])
    return vh[-1].conj()


def solve_steady_state(m: DynamicalMatrix) -> SteadyState:
    """Unique trace-one kernel vector of the generator.

    Exploits trace preservation: the first population row is redundant,
    so it is replaced by the normalization row (1,1,1,1,0,0) and the
    resulting inhomogeneous system is solved by partial-pivoted
    elimination.  Falls back to a full SVD kernel extraction when that
    system is ill-conditioned, and diagnoses degenerate stationary
    subspaces there.
    """
    entries = m.entries
    a = entries.copy()
    a[0, :] = (1.0, 1.0, 1.0, 1.0, 0.0, 0.0)
    rhs = np.zeros(6, dtype=complex)
    rhs[0] = 1.0
    scale = np.abs(entries).max()
    x: np.ndarray | None = None
    try:
        cand = np.linalg.solve(a, rhs)
        residual = np.abs(entries @ cand).max()
        if residual <= KERNEL_RESIDUAL_FACTOR * scale:
            x = cand
    except np.linalg.LinAlgError:
        x = None
    if x is None:
        # replaced system is ill-conditioned or inaccurate; diagnose via SVD
        x = _svd_kernel(entries)
        total = x[:4].real.sum()
        if abs(total) < 1e-300:
            raise DegenerateSteadyState(
                "kernel vector carries no population weight", 0.0, 0.0)
        x = x / total
    return _solution_to_state(x)
