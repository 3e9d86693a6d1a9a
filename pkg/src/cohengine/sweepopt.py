"""Evaluation pipelines: single points, Bloch-disc sweeps, gap optimization.

A sweep walks a rectangular (p1, c) grid in row-major order (p1 outer, c
inner); grid nodes outside the clipped positivity disc |c|^2 <=
p0*p1*(1 - 1e-9) are emitted with status "outside" and no numerics, so a
table always carries exactly p1_count*c_count rows.  Per-point failures
(pure-state boundary, degenerate kernel, unclassifiable signs) are
recorded in the row status instead of aborting the sweep.

Gap optimization maximizes one scalar target over the total machine
spacing e_m = e_c + e_h at fixed e_q: a 64-point log-spaced coarse scan
followed by golden-section refinement of the best three brackets.
Unimodality in e_m is not assumed.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator

from .model import ConfigError, MachineConfig, TapeQubitState
from .steady import DegenerateSteadyState, build_dynamical_matrix, solve_steady_state
from .thermo import (CurrentSet, PureStateBoundary, Regime, UnclassifiedPoint,
                     classify_regime, default_tolerance, evaluate_currents)

CLIP_FACTOR = 1.0 - 1e-9
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

STATUS_OK = "ok"
STATUS_OUTSIDE = "outside"
STATUS_PURE_BOUNDARY = "pure_boundary"
STATUS_DEGENERATE = "degenerate"
STATUS_UNCLASSIFIED = "unclassified"
STATUS_INFEASIBLE = "infeasible"


class TargetInfeasible(RuntimeError):
    """The optimization target is not attainable anywhere in the gap range."""


class OptimizationTarget(Enum):
    FREE_ENERGY = "free_energy"
    COOLING_POWER = "cooling_power"
    ERGOTROPY = "ergotropy"

    def metric(self, cs: CurrentSet) -> float:
        if self is OptimizationTarget.FREE_ENERGY:
            return cs.f_tape
        if self is OptimizationTarget.COOLING_POWER:
            return cs.q_c
        return cs.ergotropy_rate


@dataclass(frozen=True)
class MachineTemplate:
    """Machine parameters with the gaps left open for optimization."""

    beta_c: float
    beta_h: float
    gamma0: float
    r: float
    phi: float
    e_q: float = 1.0

    def with_gap_sum(self, e_m: float) -> MachineConfig:
        return MachineConfig.from_gap_sum(
            e_m, beta_c=self.beta_c, beta_h=self.beta_h, gamma0=self.gamma0,
            r=self.r, phi=self.phi, e_q=self.e_q)

    def with_cold_gap(self, e_c: float) -> MachineConfig:
        return MachineConfig(e_c=e_c, beta_c=self.beta_c, beta_h=self.beta_h,
                             gamma0=self.gamma0, r=self.r, phi=self.phi, e_q=self.e_q)


@dataclass(frozen=True)
class SweepGrid:
    """Rectangular (p1, c) grid over a Bloch-disc cross section.

    c_mode "diameter" spans [-c_max, c_max] (signed real coherence);
    "half" spans [0, c_max] (results depend on |c| only).
    """

    p1_count: int
    c_count: int
    c_mode: str = "diameter"
    c_max: float = 0.5
    clip: float = CLIP_FACTOR

    def __post_init__(self) -> None:
        if self.p1_count < 2 or self.c_count < 2:
            raise ConfigError("grid needs at least 2 points per axis")
        if self.c_mode not in ("diameter", "half"):
            raise ConfigError(f"unknown c_mode {self.c_mode!r}")

    def p1_values(self) -> list[float]:
        n = self.p1_count
        return [i / (n - 1) for i in range(n)]

    def c_values(self) -> list[float]:
        n = self.c_count
        lo = -self.c_max if self.c_mode == "diameter" else 0.0
        return [lo + (self.c_max - lo) * i / (n - 1) for i in range(n)]

    def in_disc(self, p1: float, c: float) -> bool:
        return c * c <= p1 * (1.0 - p1) * self.clip


@dataclass(frozen=True)
class OptimizerInfo:
    e_m_star: float
    iterations: int
    bracket: tuple[float, float]
    at_boundary: bool


@dataclass(frozen=True)
class SweepRecord:
    """One evaluated grid point (optionally gap-optimized)."""

    p1: float
    c: complex
    e_m: float | None
    currents: CurrentSet | None
    regime: Regime | None
    status: str
    optimizer: OptimizerInfo | None = None


@dataclass(frozen=True)
class SweepTable:
    records: list[SweepRecord]
    grid: SweepGrid
    target: OptimizationTarget | None

    def __iter__(self) -> Iterator[SweepRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)


def evaluate_point(config: MachineConfig, tape: TapeQubitState,
                   tol: float | None = None) -> SweepRecord:
    """Solve the steady state at one operating point and fill a record.

    Raises the underlying solver/domain errors; ``sweep`` converts them
    to row statuses.
    """
    if abs(tape.c) ** 2 > tape.p0 * tape.p1 * CLIP_FACTOR:
        raise PureStateBoundary(
            f"(p1={tape.p1}, |c|={abs(tape.c):.4g}) outside the clipped disc")
    if tol is None:
        tol = default_tolerance(config)
    pi = solve_steady_state(build_dynamical_matrix(config, tape))
    cs = evaluate_currents(pi, tape, config, tol)
    regime = classify_regime(cs, tol)
    return SweepRecord(p1=tape.p1, c=tape.c, e_m=config.e_m, currents=cs,
                       regime=regime, status=STATUS_OK)


DEFAULT_EM_RANGE = (1.0 + 1e-6, 20.0)
_COARSE_POINTS = 64
_REFINE_BRACKETS = 3


def _metric_or_none(template: MachineTemplate, tape: TapeQubitState, e_m: float,
                    target: OptimizationTarget, tol: float | None):
    try:
        record = evaluate_point(template.with_gap_sum(e_m), tape, tol)
    except (PureStateBoundary, DegenerateSteadyState, UnclassifiedPoint):
        return None, None
    return target.metric(record.currents), record


def optimize_gap(template: MachineTemplate, tape: TapeQubitState,
                 target: OptimizationTarget,
                 e_m_range: tuple[float, float] = DEFAULT_EM_RANGE,
                 rel_tol: float = 1e-5,
                 tol: float | None = None) -> tuple[float, SweepRecord]:
    """Maximize the target over e_m; returns (e_m_star, optimized record).

    Coarse log-spaced scan, then golden-section refinement of the best
    three local brackets (multi-modal profiles are not assumed away).
    Raises TargetInfeasible when the best value never exceeds the
    classification tolerance anywhere in the range.
    """
    lo, hi = e_m_range
    lo = max(lo, template.e_q * (1.0 + 1e-6))
    if hi <= lo:
        raise ConfigError(f"empty e_m range [{lo}, {hi}]")
    grid = [math.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * i / (_COARSE_POINTS - 1))
            for i in range(_COARSE_POINTS)]
    values: list[float | None] = []
    for e_m in grid:
        value, _ = _metric_or_none(template, tape, e_m, target, tol)
        values.append(value)
    evals = _COARSE_POINTS

    ranked = sorted((v, i) for i, v in enumerate(values) if v is not None)
    if not ranked:
        raise TargetInfeasible("target undefined over the whole gap range")
    best_value, best_em, best_record = -math.inf, None, None
    seen: set[int] = set()
    for v, idx in ranked[-_REFINE_BRACKETS:]:
        if idx in seen:
            continue
        seen.add(idx)
        a = grid[max(idx - 1, 0)]
        b = grid[min(idx + 1, _COARSE_POINTS - 1)]
        em, value, record, n = _golden_max(template, tape, target, a, b, rel_tol, tol)
        evals += n
        if value is not None and value > best_value:
            best_value, best_em, best_record = value, em, record
    if best_record is None:
        raise TargetInfeasible("target undefined over the whole gap range")
    feasible_tol = tol if tol is not None else default_tolerance(
        template.with_gap_sum(best_em))
    if best_value <= feasible_tol:
        raise TargetInfeasible(
            f"best {target.value} over e_m in [{lo:.3g}, {hi:.3g}] is "
            f"{best_value:.3e}, below tolerance")
    boundary = best_em <= grid[0] * 1.001 or best_em >= grid[-1] * 0.999
    info = OptimizerInfo(e_m_star=best_em, iterations=evals,
                         bracket=(lo, hi), at_boundary=boundary)
    return best_em, replace(best_record, optimizer=info)


def _golden_max(template: MachineTemplate, tape: TapeQubitState,
                target: OptimizationTarget, a: float, b: float,
                rel_tol: float, tol: float | None):
    n = 0

    def metric_at(e_m: float) -> float:
        nonlocal n
        n += 1
        value, _ = _metric_or_none(template, tape, e_m, target, tol)
        return -math.inf if value is None else value

    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = metric_at(x1), metric_at(x2)
    while (b - a) > rel_tol * b:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = metric_at(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = metric_at(x2)
    e_m = 0.5 * (a + b)
    value, record = _metric_or_none(template, tape, e_m, target, tol)
    return e_m, value, record, n + 1


def _point_record(template_or_config, tape: TapeQubitState,
                  target: OptimizationTarget | None,
                  tol: float | None) -> SweepRecord:
    try:
        if target is None:
            return evaluate_point(template_or_config, tape, tol)
        _, record = optimize_gap(template_or_config, tape, target, tol=tol)
        return record
    except PureStateBoundary:
        return SweepRecord(tape.p1, tape.c, None, None, None, STATUS_PURE_BOUNDARY)
    except DegenerateSteadyState:
        return SweepRecord(tape.p1, tape.c, None, None, None, STATUS_DEGENERATE)
    except UnclassifiedPoint:
        return SweepRecord(tape.p1, tape.c, None, None, None, STATUS_UNCLASSIFIED)
    except TargetInfeasible:
        return SweepRecord(tape.p1, tape.c, None, None, None, STATUS_INFEASIBLE)


def _sweep_row(args) -> list[SweepRecord]:
    template_or_config, grid, p1, target, tol = args
    row: list[SweepRecord] = []
    for c in grid.c_values():
        if not grid.in_disc(p1, c):
            row.append(SweepRecord(p1, complex(c), None, None, None, STATUS_OUTSIDE))
            continue
        row.append(_point_record(template_or_config, TapeQubitState(p1, complex(c)),
                                 target, tol))
    return row


def sweep(template_or_config: MachineConfig | MachineTemplate, grid: SweepGrid,
          target: OptimizationTarget | None = None, tol: float | None = None,
          workers: int = 1) -> SweepTable:
    """Evaluate every grid node; row-major deterministic ordering.

    With a target, each in-disc node runs a full gap optimization
    (``template_or_config`` must then be a MachineTemplate).  Rows are
    independent, so they are distributed over ``workers`` processes and
    gathered in grid order.
    """
    if target is not None and not isinstance(template_or_config, MachineTemplate):
        raise ConfigError("gap optimization requires a MachineTemplate")
    if target is None and isinstance(template_or_config, MachineTemplate):
        raise ConfigError("plain sweeps need a full MachineConfig (fixed gaps)")
    tasks = [(template_or_config, grid, p1, target, tol) for p1 in grid.p1_values()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, tasks, chunksize=1))
    else:
        rows = [_sweep_row(task) for task in tasks]
    records = [record for row in rows for record in row]
    return SweepTable(records=records, grid=grid, target=target)
