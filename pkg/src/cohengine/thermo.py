"""Steady-state thermodynamic rates, performance metrics and regimes.

All currents follow from the net rate J = delta + zeta of resonant
quanta flowing into the tape: the tape energy current is e_q*J, the cold
bath supplies -e_c*J and the hot bath e_h*J, so energy conservation and
the proportionality of the three currents are structural.

delta is the incoherent (population-exchange) component; zeta is the
coherent component driven by the machine coherence pi_c against the tape
coherence c.  zeta is positive exactly when the inner machine transition
is population-inverted (pi01 > pi10) -- pumping energy into the tape --
and flips sign when the virtual qubit is not inverted, which is what
allows input coherence to power refrigeration in otherwise forbidden
regions.

The tape entropy rate is the second-order-in-phi change of the output
qubit's von Neumann entropy per unit time; free energy is referenced to
the cold bath, F = E - S/beta_c (k_B = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .model import MachineConfig, TapeQubitState, UnboundedTemperature, bloch_radius
from .steady import SteadyState

_SMALL_BLOCH = 1e-6
_PURE_MARGIN = 1e-9


class PureStateBoundary(ValueError):
    """Tape state too close to pure: entropy rate diverges logarithmically."""


class UnclassifiedPoint(RuntimeError):
    """Current signs match no operating regime at the given tolerance."""


class Regime(Enum):
    HEAT_ENGINE = "heat_engine"
    REFRIGERATOR = "refrigerator"
    DISSIPATOR = "dissipator"
    EQUILIBRIUM = "equilibrium"


class Performance(NamedTuple):
    eta: float | None
    cop: float | None
    eta_carnot: float
    cop_carnot: float


@dataclass(frozen=True)
class CurrentSet:
    """All steady-state rates and metrics at one operating point.

    Rates are in natural units (e_q = k_B = hbar = 1 by default); eta and
    cop are None where the underlying ratio is undefined (0/0 at
    equilibrium or wrong-signed denominators).
    """

    delta: float
    zeta: float
    e_tape: float
    q_c: float
    q_h: float
    s_tape: float
    f_tape: float
    f_classical: float
    c_coh: float
    s_tot: float
    ergotropy_rate: float
    eta: float | None
    cop: float | None
    eta_carnot: float
    cop_carnot: float


def default_tolerance(config: MachineConfig) -> float:
    """Classification tolerance relative to the natural current scale."""
    return 1e-10 * config.e_q * config.r * config.phi ** 2


def components(pi: SteadyState, tape: TapeQubitState,
               config: MachineConfig) -> tuple[float, float]:
    """Incoherent (delta) and coherent (zeta) parts of the quanta flow.

    delta = r*phi^2*(pi01*p0 - pi10*p1);
    zeta  = 2*r*phi*Im(c*conj(pi_c)), the manifestly real form of the
    drive-induced population flux, so no imaginary residue can leak in.
    """
    w = config.r * config.phi ** 2
    delta = w * (pi.pi01 * tape.p0 - pi.pi10 * tape.p1)
    zeta = 2.0 * config.r * config.phi * (tape.c * pi.pi_c.conjugate()).imag
    return delta, zeta


def energy_currents(delta: float, zeta: float,
                    config: MachineConfig) -> tuple[float, float, float]:
    """(e_tape, q_c, q_h) = (e_q, -e_c, e_h) * (delta + zeta)."""
    j = delta + zeta
    return config.e_q * j, -config.e_c * j, config.e_h * j


def _rate_bracket(pi: SteadyState, tape: TapeQubitState, config: MachineConfig,
                  delta: float) -> tuple[float, float, float]:
    """Shared pieces of the entropy and ergotropy rates.

    Returns (s, aniso, iso) where the second-order shift of the smaller
    eigenvalue is lambda2_minus = -(aniso/s^2 + iso)*s / (r*phi^2):
    iso = r*phi^2*|pi_c|^2 from the coherent drive, aniso the
    population/coherence mix of the dissipative part.
    """
    w = config.r * config.phi ** 2
    s = bloch_radius(tape)
    exchange = w * (pi.pi01 + pi.pi10)
    aniso = delta * (tape.p1 - tape.p0) - exchange * abs(tape.c) ** 2
    iso = w * abs(pi.pi_c) ** 2
    return s, aniso, iso


def entropy_rate(pi: SteadyState, tape: TapeQubitState, config: MachineConfig,
                 delta: float) -> float:
    """Entropy change of the tape per unit time, to second order in phi.

    (lam_plus - lam_minus) * log(lam_minus/lam_plus) * (iso + aniso/s^2),
    with the removable singularity at s -> 0 expanded analytically.
    Raises PureStateBoundary within 1e-9 of the positivity boundary,
    where the logarithm diverges.
    """
    _require_mixed(tape)
    s, aniso, iso = _rate_bracket(pi, tape, config, delta)
    if s < _SMALL_BLOCH:
        return -(2.0 + 2.0 * s * s / 3.0) * (s * s * iso + aniso)
    lam_plus = (1.0 + s) / 2.0
    lam_minus = (1.0 - s) / 2.0
    return s * math.log(lam_minus / lam_plus) * (iso + aniso / (s * s))


def free_energy(e_tape: float, s_tape: float, beta_c: float) -> float:
    """Nonequilibrium free-energy current referenced to the cold bath."""
    return e_tape - s_tape / beta_c


def free_energy_split(pi: SteadyState, tape: TapeQubitState, config: MachineConfig,
                      delta: float, zeta: float,
                      s_tape: float) -> tuple[float, float]:
    """(f_classical, c_coh): population-only free energy plus the
    relative-entropy-of-coherence rate.

    The dephased tape entropy rate is (delta+zeta)*log(p0/p1); the
    classical free energy keeps the same cold-bath reference as f_tape so
    that f_tape = f_classical + c_coh/beta_c holds identically.
    """
    if not 0.0 < tape.p1 < 1.0:
        raise UnboundedTemperature(f"p1={tape.p1}: dephased entropy rate diverges")
    e_tape = config.e_q * (delta + zeta)
    s_dephased = (delta + zeta) * math.log(tape.p0 / tape.p1)
    f_classical = e_tape - s_dephased / config.beta_c
    c_coh = s_dephased - s_tape
    return f_classical, c_coh


def entropy_production(s_tape: float, q_c: float, q_h: float,
                       config: MachineConfig) -> float:
    """Total entropy production rate; non-negative by the second law."""
    return s_tape - config.beta_c * q_c - config.beta_h * q_h


def performance(f_tape: float, q_c: float, q_h: float, config: MachineConfig,
                tol: float | None = None) -> Performance:
    """Engine efficiency and refrigerator COP with their reversible bounds.

    eta = f_tape/q_h needs heat drawn from the hot bath; cop =
    q_c/(-f_tape) needs free energy consumed from the tape.  Otherwise
    the metric is undefined (None), never a number.
    """
    if tol is None:
        tol = default_tolerance(config)
    eta = f_tape / q_h if q_h > tol else None
    cop = q_c / (-f_tape) if f_tape < -tol else None
    return Performance(eta=eta, cop=cop,
                       eta_carnot=1.0 - config.beta_h / config.beta_c,
                       cop_carnot=config.beta_c / (config.beta_c - config.beta_h))


def ergotropy(tape: TapeQubitState, gap: float) -> float:
    """Maximum unitarily extractable work from one tape qubit.

    For a qubit the optimal cyclic unitary sends the dominant eigenvector
    to the ground state: W = gap*(p1 - lambda_minus).  Zero for passive
    (diagonal, non-inverted) states.
    """
    s = bloch_radius(tape)
    return gap * (tape.p1 - (1.0 - s) / 2.0)


def ergotropy_rate(e_tape: float, pi: SteadyState, tape: TapeQubitState,
                   config: MachineConfig, delta: float) -> float:
    """Ergotropy change of the tape per unit time, to second order in phi.

    W_dot = e_tape - r*phi^2*e_q*lambda2_minus, with lambda2_minus the
    second-order shift of the smaller eigenvalue; equals
    e_tape + e_q*s*(iso + aniso/s^2).  The s -> 0 limit is direction
    dependent (the ergotropy of a qubit has a conical point at the
    maximally mixed state) and is evaluated along the incoming direction;
    at s = 0 exactly the shift magnitude |delta|/(r*phi^2) applies.
    """
    _require_mixed(tape)
    s, aniso, iso = _rate_bracket(pi, tape, config, delta)
    if s == 0.0:
        return e_tape + config.e_q * abs(delta)
    return e_tape + config.e_q * (s * iso + aniso / s)


def _require_mixed(tape: TapeQubitState) -> None:
    det = tape.p0 * tape.p1 - abs(tape.c) ** 2
    if abs(tape.c) ** 2 > tape.p0 * tape.p1 * (1.0 - _PURE_MARGIN) or det < 1e-15:
        raise PureStateBoundary(
            f"tape state (p1={tape.p1}, |c|={abs(tape.c):.4g}) is within the "
            "pure-state margin; perturbative rates diverge there")


def classify_regime(cs: CurrentSet, tol: float) -> Regime:
    """Operating regime from the signs of (f_tape, q_c, q_h).

    Equilibrium covers the measure-zero boundary where both the currents
    and the free-energy flow vanish at tolerance.  The three operating
    labels are mutually exclusive because all heat currents share the
    sign of delta+zeta.
    """
    if abs(cs.e_tape) <= tol and abs(cs.f_tape) <= tol:
        return Regime.EQUILIBRIUM
    if cs.f_tape > tol and cs.q_h > tol:
        return Regime.HEAT_ENGINE
    if cs.q_c > tol and cs.f_tape < -tol:
        return Regime.REFRIGERATOR
    if cs.f_tape < -tol and cs.q_h > tol:
        return Regime.DISSIPATOR
    raise UnclassifiedPoint(
        f"no regime at tol={tol:.2e}: f_tape={cs.f_tape:.3e}, "
        f"q_c={cs.q_c:.3e}, q_h={cs.q_h:.3e}")


def evaluate_currents(pi: SteadyState, tape: TapeQubitState, config: MachineConfig,
                      tol: float | None = None) -> CurrentSet:
    """Full CurrentSet for a steady state self-consistent with ``tape``."""
    if tol is None:
        tol = default_tolerance(config)
    delta, zeta = components(pi, tape, config)
    e_tape, q_c, q_h = energy_currents(delta, zeta, config)
    s_tape = entropy_rate(pi, tape, config, delta)
    f_tape = free_energy(e_tape, s_tape, config.beta_c)
    f_classical, c_coh = free_energy_split(pi, tape, config, delta, zeta, s_tape)
    s_tot = entropy_production(s_tape, q_c, q_h, config)
    perf = performance(f_tape, q_c, q_h, config, tol)
    w_rate = ergotropy_rate(e_tape, pi, tape, config, delta)
    return CurrentSet(delta=delta, zeta=zeta, e_tape=e_tape, q_c=q_c, q_h=q_h,
                      s_tape=s_tape, f_tape=f_tape, f_classical=f_classical,
                      c_coh=c_coh, s_tot=s_tot, ergotropy_rate=w_rate,
                      eta=perf.eta, cop=perf.cop, eta_carnot=perf.eta_carnot,
                      cop_carnot=perf.cop_carnot)
