"""Per-collision effect of the machine on one tape qubit.

In the steady state every collision transforms the incoming qubit by the
same trace-preserving map: a coherent rotation generated by the machine
coherence pi_c plus emission/absorption weighted by the inner machine
populations,

    E(rho) = rho - i*phi*[sp*conj(pi_c) + sm*pi_c, rho]
             + phi^2*pi_01*D[sp](rho) + phi^2*pi_10*D[sm](rho),

with sp/sm the tape raising/lowering operators and D the usual
dissipator.  pi_01 (hot-qubit-excited population) weights absorption by
the tape because the inner transition releases one tape quantum when the
machine drops from hot-excited to cold-excited; pi_10 weights the
reverse.  The map is expanded here in exact closed form on the (p1, c)
parametrization, so trace preservation is structural.

The entropy and ergotropy rates downstream need the second-order shifts
of the map-output eigenvalues; these are computed in the explicit
eigenbasis of the input state (first-order shifts vanish identically).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import TapeQubitState, bloch_radius
from .steady import SteadyState


class DegenerateSpectrum(RuntimeError):
    """Input spectrum too close to degenerate for perturbation theory."""


@dataclass(frozen=True)
class MapOutput:
    """Map output state together with the second-order eigenvalue shifts."""

    state: TapeQubitState
    lambda2_minus: float
    lambda2_plus: float


def apply_map(pi: SteadyState, tape: TapeQubitState, phi: float) -> TapeQubitState:
    """Exact output state of one steady-state collision.

    ``pi`` must be the steady state computed for this same tape state;
    callers normally go through the evaluation pipeline.
    """
    p1, c = tape.p1, tape.c
    pop_flow = 2.0 * phi * (pi.pi_c * np.conj(c)).imag
    p1_out = p1 - pop_flow + phi * phi * (pi.pi01 * tape.p0 - pi.pi10 * p1)
    c_out = (c
             - 1j * phi * pi.pi_c * (p1 - tape.p0)
             - 0.5 * phi * phi * (pi.pi01 + pi.pi10) * c)
    # collisions cannot push a valid state past the positivity boundary
    # beyond truncation order; clip the float residue only
    p1_out = min(max(p1_out, 0.0), 1.0)
    limit = math.sqrt(p1_out * (1.0 - p1_out))
    mag = abs(c_out)
    if mag > limit:
        c_out *= limit / mag
    return TapeQubitState(p1=p1_out, c=complex(c_out))


def _eigenbasis(tape: TapeQubitState) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigenvectors (plus, minus) of the tape state.

    Bloch components: <0|rho|1> = c fixes w = vx + i*vy = 2*conj(c) and
    vz = p0 - p1.  The branch keeps the normalization away from zero.
    Overall phases are arbitrary; every consumer below is phase-invariant.
    """
    w = 2.0 * np.conj(tape.c)
    vz = tape.p0 - tape.p1
    s = math.sqrt(abs(w) ** 2 + vz * vz)
    if vz >= 0.0:
        norm = math.sqrt(2.0 * s * (s + vz))
        plus = np.array([s + vz, w], dtype=complex) / norm
        minus = np.array([-np.conj(w), s + vz], dtype=complex) / norm
    else:
        norm = math.sqrt(2.0 * s * (s - vz))
        plus = np.array([np.conj(w), s - vz], dtype=complex) / norm
        minus = np.array([-(s - vz), w], dtype=complex) / norm
    return plus, minus


def second_order_shifts(pi: SteadyState, tape: TapeQubitState) -> tuple[float, float]:
    """Second-order shifts (lambda2_minus, lambda2_plus) of the map-output
    eigenvalues, from non-degenerate perturbation theory in the input
    eigenbasis.  The two shifts sum to zero (trace preservation)."""
    s = bloch_radius(tape)
    if s < 1e-9:
        raise DegenerateSpectrum(
            f"spectral gap {s:.2e} too small for non-degenerate perturbation theory")
    plus, minus = _eigenbasis(tape)
    rho = np.array([[tape.p0, tape.c], [np.conj(tape.c), tape.p1]], dtype=complex)
    sm = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1|
    sp = sm.conj().T
    diss_up = sp @ rho @ sm - 0.5 * (sm @ sp @ rho + rho @ sm @ sp)
    diss_dn = sm @ rho @ sp - 0.5 * (sp @ sm @ rho + rho @ sp @ sm)
    a2 = pi.pi01 * diss_up + pi.pi10 * diss_dn
    drive = sp * np.conj(pi.pi_c) + sm * pi.pi_c
    lam_plus = (1.0 + s) / 2.0
    lam_minus = (1.0 - s) / 2.0
    cross = abs(plus.conj() @ drive @ minus) ** 2
    shift_minus = (minus.conj() @ a2 @ minus).real - (lam_plus - lam_minus) * cross
    shift_plus = (plus.conj() @ a2 @ plus).real - (lam_minus - lam_plus) * cross
    return float(shift_minus), float(shift_plus)


def map_with_shifts(pi: SteadyState, tape: TapeQubitState, phi: float) -> MapOutput:
    lam2_minus, lam2_plus = second_order_shifts(pi, tape)
    return MapOutput(state=apply_map(pi, tape, phi),
                     lambda2_minus=lam2_minus, lambda2_plus=lam2_plus)
