"""Physical parameter types and elementary closed-form quantities.

The machine is a pair of non-interacting qubits ("cold" and "hot", gaps
``e_c`` and ``e_h``) locally coupled to thermal baths at inverse
temperatures ``beta_c >= beta_h``.  It is driven by a tape of identically
prepared qubits with gap ``e_q`` that collide with the machine one at a
time, at Poisson rate ``r``, each collision applying a three-body
excitation-exchange unitary of effective strength ``phi``.  Resonance,
``e_h = e_c + e_q``, is enforced structurally: ``e_h`` is always stored
derived, never taken as input.

Natural units are used throughout: k_B = hbar = 1, and the tape gap
``e_q`` (default 1) sets the energy scale.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple


class ConfigError(ValueError):
    """A physical parameter set violates its domain constraints."""


class UnboundedTemperature(ValueError):
    """log(p0/p1) requested for a population at 0 or 1."""


class RatePair(NamedTuple):
    """Absorption (``up``) and emission (``down``) rates of one channel."""

    up: float
    down: float


@dataclass(frozen=True)
class MachineConfig:
    """All machine, bath and tape-coupling parameters.

    ``e_h`` is derived (``e_c + e_q``); construct from the total machine
    spacing ``e_m = e_c + e_h`` with :meth:`from_gap_sum`.
    """

    e_c: float
    beta_c: float
    beta_h: float
    gamma0: float
    r: float
    phi: float
    e_q: float = 1.0

    def __post_init__(self) -> None:
        if not (self.e_q > 0 and self.e_c > 0):
            raise ConfigError(f"qubit gaps must be positive: e_q={self.e_q}, e_c={self.e_c}")
        if not (self.beta_c >= self.beta_h > 0):
            raise ConfigError(
                f"bath temperatures must satisfy beta_c >= beta_h > 0: "
                f"beta_c={self.beta_c}, beta_h={self.beta_h}")
        if not self.gamma0 > 0:
            raise ConfigError(f"gamma0 must be positive: {self.gamma0}")
        if not self.r > 0:
            raise ConfigError(f"collision rate r must be positive: {self.r}")
        if not self.phi > 0:
            raise ConfigError(f"collision strength phi must be positive: {self.phi}")
        if self.phi > 0.2:
            warnings.warn(
                f"phi={self.phi} is outside the weak-collision regime (phi << 1); "
                "second-order collision expressions degrade", stacklevel=2)

    @property
    def e_h(self) -> float:
        return self.e_c + self.e_q

    @property
    def e_m(self) -> float:
        """Largest machine spacing, e_c + e_h."""
        return self.e_c + self.e_h

    @classmethod
    def from_gap_sum(cls, e_m: float, *, beta_c: float, beta_h: float, gamma0: float,
                     r: float, phi: float, e_q: float = 1.0) -> "MachineConfig":
        e_c = (e_m - e_q) / 2.0
        if e_c <= 0:
            raise ConfigError(f"e_m={e_m} must exceed e_q={e_q} for a positive cold gap")
        return cls(e_c=e_c, beta_c=beta_c, beta_h=beta_h, gamma0=gamma0,
                   r=r, phi=phi, e_q=e_q)

    def cold_rates(self) -> RatePair:
        return bath_rates(self.beta_c, self.e_c, self.gamma0)

    def hot_rates(self) -> RatePair:
        return bath_rates(self.beta_h, self.e_h, self.gamma0)


@dataclass(frozen=True)
class TapeQubitState:
    """Single-qubit state (p1, c): excited population and off-diagonal element.

    The density matrix is [[p0, c], [conj(c), p1]] in the (ground, excited)
    basis, positive semi-definite iff |c|^2 <= p0*p1.
    """

    p1: float
    c: complex = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p1 <= 1.0:
            raise ConfigError(f"population p1={self.p1} outside [0, 1]")
        # 4 ulp slack admits states reconstructed from map outputs
        if abs(self.c) ** 2 > self.p0 * self.p1 + 4e-16:
            raise ConfigError(
                f"|c|^2={abs(self.c)**2:.3e} exceeds the positivity bound "
                f"p0*p1={self.p0 * self.p1:.3e}")

    @property
    def p0(self) -> float:
        return 1.0 - self.p1

    def with_phase(self, theta: float) -> "TapeQubitState":
        """Rotate the off-diagonal element by exp(i*theta)."""
        return TapeQubitState(self.p1, self.c * complex(math.cos(theta), math.sin(theta)))


def virtual_beta(config: MachineConfig) -> float:
    """Inverse temperature of the inner machine transition |10> <-> |01>.

    (beta_h*e_h - beta_c*e_c) / (e_h - e_c).  Negative values signal
    population inversion of the virtual qubit.
    """
    return (config.beta_h * config.e_h - config.beta_c * config.e_c) / config.e_q


def gibbs_qubit(beta: float, gap: float) -> TapeQubitState:
    """Thermal qubit state at inverse temperature ``beta`` (any sign)."""
    x = beta * gap
    if x >= 0:
        t = math.exp(-x) if x < 745 else 0.0
        p1 = t / (1.0 + t)
    else:
        t = math.exp(x) if x > -745 else 0.0
        p1 = 1.0 / (1.0 + t)
    return TapeQubitState(p1=p1, c=0.0)


def bath_rates(beta: float, gap: float, gamma0: float) -> RatePair:
    """Bosonic-bath absorption/emission rates on a qubit of the given gap.

    up = gamma0*N, down = gamma0*(N+1) with N the thermal occupation at
    the qubit frequency, so down/up = exp(beta*gap) exactly (local
    detailed balance).  Guards against overflow for beta*gap > 700 by
    returning the zero-temperature limit (0, gamma0).
    """
    if beta <= 0 or gap <= 0:
        raise ConfigError(f"bath_rates requires beta, gap > 0 (got {beta}, {gap})")
    x = beta * gap
    if x > 700.0:
        return RatePair(up=0.0, down=gamma0)
    n_th = 1.0 / math.expm1(x)
    return RatePair(up=gamma0 * n_th, down=gamma0 * (n_th + 1.0))


def tape_rates(config: MachineConfig, tape: TapeQubitState) -> RatePair:
    """Incoherent transition rates induced on the inner machine transition
    by the collisions: up = r*phi^2*p1, down = r*phi^2*p0."""
    w = config.r * config.phi * config.phi
    return RatePair(up=w * tape.p1, down=w * tape.p0)


def qubit_spectrum(tape: TapeQubitState) -> tuple[float, float]:
    """Eigenvalues (lambda_plus, lambda_minus) of the tape qubit state:
    (1 +- sqrt((p1-p0)^2 + 4|c|^2)) / 2."""
    s = math.sqrt((tape.p1 - tape.p0) ** 2 + 4.0 * abs(tape.c) ** 2)
    return (1.0 + s) / 2.0, (1.0 - s) / 2.0


def bloch_radius(tape: TapeQubitState) -> float:
    """Bloch-vector length s = lambda_plus - lambda_minus."""
    return math.sqrt((tape.p1 - tape.p0) ** 2 + 4.0 * abs(tape.c) ** 2)


def incoherent_tape_beta(tape: TapeQubitState, e_q: float) -> float:
    """Inverse temperature log(p0/p1)/e_q assigned to the tape populations.

    Negative for inverted tapes (p1 > p0).  Meaningful as a temperature
    only for diagonal states, but computable for any 0 < p1 < 1.
    """
    if not 0.0 < tape.p1 < 1.0:
        raise UnboundedTemperature(f"p1={tape.p1} has no finite population temperature")
    return math.log(tape.p0 / tape.p1) / e_q
