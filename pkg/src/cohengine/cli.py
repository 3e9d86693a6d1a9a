"""Command-line surface.

    cohengine point    --preset fig3 --set p1=0.5 --set c_re=0.4
    cohengine sweep    --preset fig3 --grid 201x201 --out fig3.csv
    cohengine optimize --preset fig5b --grid 101x101 --out fig5b.csv
    cohengine validate --level quick --seed 7

Configuration keys (flat JSON schema, overridable with --set key=value):
e_q, e_c | e_m, beta_c, beta_h, gamma0, r, phi, p1, c_re, c_im.
Exit codes: 0 ok, 2 configuration error, 3 solver error, 4 I/O error,
5 validation failure.
"""
from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
import time
from typing import Any, Sequence

from . import __version__
from .model import ConfigError, MachineConfig, TapeQubitState
from .presets import PRESETS, Preset
from .steady import DegenerateSteadyState
from .sweepopt import (MachineTemplate, OptimizationTarget, SweepGrid, SweepRecord,
                       SweepTable, TargetInfeasible, evaluate_point, sweep)
from .thermo import PureStateBoundary, UnclassifiedPoint
from .validate import run_validation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4
EXIT_VALIDATION = 5

MACHINE_KEYS = ("e_q", "e_c", "e_m", "beta_c", "beta_h", "gamma0", "r", "phi")
TAPE_KEYS = ("p1", "c_re", "c_im")
EXTRA_KEYS = ("tol",)

CSV_COLUMNS = ("p1", "c_re", "c_im", "e_m", "delta", "zeta", "e_tape", "q_c", "q_h",
               "s_tape", "f_tape", "f_classical", "c_coh", "s_tot", "eta",
               "eta_over_carnot", "cop", "cop_over_carnot", "ergotropy_rate",
               "regime", "status")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    """17 significant digits: lossless round trip of doubles."""
    return format(float(x), ".17g")


def _load_settings(args: argparse.Namespace) -> tuple[dict[str, float], Preset | None]:
    settings: dict[str, float] = {}
    preset: Preset | None = None
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise CliError(f"unknown preset {args.preset!r}; available: "
                           f"{', '.join(sorted(PRESETS))}", EXIT_CONFIG)
        preset = PRESETS[args.preset]
        t = preset.template
        settings.update(e_q=t.e_q, beta_c=t.beta_c, beta_h=t.beta_h,
                        gamma0=t.gamma0, r=t.r, phi=t.phi)
        if preset.e_c is not None:
            settings["e_c"] = preset.e_c
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise CliError(f"cannot read config file: {exc}", EXIT_IO)
        except json.JSONDecodeError as exc:
            raise CliError(f"config file is not valid JSON: {exc}", EXIT_CONFIG)
        if not isinstance(loaded, dict):
            raise CliError("config file must hold a flat JSON object", EXIT_CONFIG)
        settings.update(loaded)
    for item in args.set or ():
        if "=" not in item:
            raise CliError(f"--set expects key=value, got {item!r}", EXIT_CONFIG)
        key, _, value = item.partition("=")
        try:
            settings[key.strip()] = float(value)
        except ValueError:
            raise CliError(f"--set {key}: {value!r} is not a number", EXIT_CONFIG)
    allowed = set(MACHINE_KEYS) | set(TAPE_KEYS) | set(EXTRA_KEYS)
    for key in settings:
        if key not in allowed:
            raise CliError(f"unknown configuration key {key!r}", EXIT_CONFIG)
    return settings, preset


def _build_config(settings: dict[str, float]) -> MachineConfig:
    for key in ("beta_c", "beta_h", "gamma0", "r", "phi"):
        if key not in settings:
            raise CliError(f"missing required key {key!r}", EXIT_CONFIG)
    e_q = settings.get("e_q", 1.0)
    has_ec, has_em = "e_c" in settings, "e_m" in settings
    if has_ec and has_em:
        raise CliError("give either e_c or e_m, not both", EXIT_CONFIG)
    if not has_ec and not has_em:
        raise CliError("missing required key 'e_c' (or 'e_m')", EXIT_CONFIG)
    try:
        if has_em:
            return MachineConfig.from_gap_sum(
                settings["e_m"], beta_c=settings["beta_c"], beta_h=settings["beta_h"],
                gamma0=settings["gamma0"], r=settings["r"], phi=settings["phi"], e_q=e_q)
        return MachineConfig(e_c=settings["e_c"], beta_c=settings["beta_c"],
                             beta_h=settings["beta_h"], gamma0=settings["gamma0"],
                             r=settings["r"], phi=settings["phi"], e_q=e_q)
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_CONFIG)


def _build_template(settings: dict[str, float]) -> MachineTemplate:
    for key in ("beta_c", "beta_h", "gamma0", "r", "phi"):
        if key not in settings:
            raise CliError(f"missing required key {key!r}", EXIT_CONFIG)
    return MachineTemplate(beta_c=settings["beta_c"], beta_h=settings["beta_h"],
                           gamma0=settings["gamma0"], r=settings["r"],
                           phi=settings["phi"], e_q=settings.get("e_q", 1.0))


def _build_tape(settings: dict[str, float]) -> TapeQubitState:
    if "p1" not in settings:
        raise CliError("missing required key 'p1'", EXIT_CONFIG)
    c = complex(settings.get("c_re", 0.0), settings.get("c_im", 0.0))
    try:
        return TapeQubitState(p1=settings["p1"], c=c)
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_CONFIG)


def _manifest(args: argparse.Namespace, settings: dict[str, float],
              preset: Preset | None, extra: dict[str, Any]) -> dict[str, Any]:
    manifest = {
        "tool": "cohengine",
        "version": __version__,
        "command": args.command,
        "resolved": dict(sorted(settings.items())),
        "preset": preset.name if preset else None,
        "assumptions": list(preset.assumptions) if preset else [],
        "seed": getattr(args, "seed", None),
        "workers": getattr(args, "workers", None),
        "wall_clock_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    manifest.update(extra)
    return manifest


def _record_fields(record: SweepRecord) -> dict[str, Any]:
    cs = record.currents
    fields: dict[str, Any] = {
        "p1": record.p1, "c_re": record.c.real, "c_im": record.c.imag,
        "e_m": record.e_m, "regime": record.regime.value if record.regime else "",
        "status": record.status,
    }
    if cs is None:
        for key in ("delta", "zeta", "e_tape", "q_c", "q_h", "s_tape", "f_tape",
                    "f_classical", "c_coh", "s_tot", "eta", "eta_over_carnot",
                    "cop", "cop_over_carnot", "ergotropy_rate"):
            fields[key] = None
        return fields
    fields.update(delta=cs.delta, zeta=cs.zeta, e_tape=cs.e_tape, q_c=cs.q_c,
                  q_h=cs.q_h, s_tape=cs.s_tape, f_tape=cs.f_tape,
                  f_classical=cs.f_classical, c_coh=cs.c_coh, s_tot=cs.s_tot,
                  eta=cs.eta, cop=cs.cop, ergotropy_rate=cs.ergotropy_rate,
                  eta_over_carnot=None if cs.eta is None else cs.eta / cs.eta_carnot,
                  cop_over_carnot=None if cs.cop is None else cs.cop / cs.cop_carnot)
    return fields


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return _fmt(value)


def _write_csv(path: str, table: SweepTable) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for record in table:
                fields = _record_fields(record)
                fh.write(",".join(_csv_cell(fields[col]) for col in CSV_COLUMNS) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write output file: {exc}", EXIT_IO)


def _write_sidecar(path: str, manifest: dict[str, Any]) -> None:
    try:
        with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise CliError(f"cannot write manifest: {exc}", EXIT_IO)


def _emit_json(document: dict[str, Any], out: str | None) -> None:
    text = json.dumps(document, indent=2, sort_keys=True, allow_nan=True)
    if out is None:
        sys.stdout.write(text + "\n")
    else:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise CliError(f"cannot write output file: {exc}", EXIT_IO)


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        p1_count, _, c_count = text.lower().partition("x")
        return int(p1_count), int(c_count)
    except ValueError:
        raise CliError(f"--grid expects NxM, got {text!r}", EXIT_CONFIG)


def _parse_target(name: str) -> OptimizationTarget:
    try:
        return OptimizationTarget(name)
    except ValueError:
        raise CliError(f"unknown target {name!r}; choose from "
                       f"{', '.join(t.value for t in OptimizationTarget)}", EXIT_CONFIG)


def cmd_point(args: argparse.Namespace) -> int:
    settings, preset = _load_settings(args)
    config = _build_config(settings)
    tape = _build_tape(settings)
    try:
        record = evaluate_point(config, tape, tol=settings.get("tol"))
    except PureStateBoundary as exc:
        raise CliError(f"tape state violates the positivity bound |c|^2 <= p0*p1 "
                       f"(clipped): {exc}", EXIT_CONFIG)
    except (DegenerateSteadyState, UnclassifiedPoint) as exc:
        raise CliError(f"solver failure: {exc}", EXIT_SOLVER)
    document = {
        "record": _record_fields(record),
        "manifest": _manifest(args, settings, preset, {}),
    }
    _emit_json(document, args.out)
    return EXIT_OK


def _resolve_workers(args: argparse.Namespace) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("COHENGINE_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CliError(f"COHENGINE_WORKERS={env!r} is not an integer", EXIT_CONFIG)
    return os.cpu_count() or 1


def cmd_sweep(args: argparse.Namespace, force_optimize: bool = False) -> int:
    settings, preset = _load_settings(args)
    target: OptimizationTarget | None = None
    if args.optimize is not None:
        target = _parse_target(args.optimize)
    elif preset is not None and (force_optimize or args.command == "optimize"):
        target = preset.target
    if force_optimize and target is None:
        raise CliError("optimize needs a target: --optimize "
                       "free_energy|cooling_power|ergotropy (or a campaign preset)",
                       EXIT_CONFIG)
    p1_count, c_count = _parse_grid(args.grid)
    c_mode = args.c_mode or (preset.c_mode if preset else "diameter")
    grid = SweepGrid(p1_count=p1_count, c_count=c_count, c_mode=c_mode)
    try:
        if target is None:
            machine: MachineConfig | MachineTemplate = _build_config(settings)
        else:
            machine = _build_template(settings)
        table = sweep(machine, grid, target=target, tol=settings.get("tol"),
                      workers=_resolve_workers(args))
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_CONFIG)
    if args.out is None:
        raise CliError("sweep requires --out PATH", EXIT_CONFIG)
    manifest = _manifest(args, settings, preset, {
        "grid": {"p1_count": p1_count, "c_count": c_count, "c_mode": c_mode},
        "target": target.value if target else None,
        "rows": len(table),
    })
    _write_csv(args.out, table)
    _write_sidecar(args.out, manifest)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    report = run_validation(level=args.level, seed=args.seed, fault=args.fault)
    report["manifest"] = _manifest(args, {}, None, {"level": args.level})
    _emit_json(report, args.out)
    return EXIT_OK if report["all_passed"] else EXIT_VALIDATION


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", help="named parameter preset "
                        f"({', '.join(sorted(PRESETS))})")
    parser.add_argument("--config", help="flat JSON configuration file")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one configuration key")
    parser.add_argument("--out", help="output path (default: stdout for JSON)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohengine",
        description="Steady-state thermodynamics of a qubit-tape-driven "
                    "two-qubit autonomous thermal machine.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_point = sub.add_parser("point", help="evaluate a single operating point")
    _add_common(p_point)
    p_point.set_defaults(func=cmd_point)

    for name, help_text, force in (("sweep", "evaluate a (p1, c) grid", False),
                                   ("optimize", "gap-optimized campaign over a grid",
                                    True)):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        p.add_argument("--grid", default="201x201", help="p1-count x c-count")
        p.add_argument("--c-mode", choices=("diameter", "half"),
                       help="signed diameter or |c| half-disc (preset default)")
        p.add_argument("--optimize", metavar="TARGET",
                       help="free_energy | cooling_power | ergotropy")
        p.add_argument("--workers", type=int,
                       help="parallel processes (default: cores, or COHENGINE_WORKERS)")
        p.set_defaults(func=lambda a, _force=force: cmd_sweep(a, force_optimize=_force))

    p_val = sub.add_parser("validate", help="run the oracle validation suite")
    p_val.add_argument("--level", choices=("quick", "full"), default="quick")
    p_val.add_argument("--seed", type=int, default=1234)
    p_val.add_argument("--out", help="write the JSON report here instead of stdout")
    p_val.add_argument("--fault", choices=("zeta_sign",), help=argparse.SUPPRESS)
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"cohengine: error: {exc}", file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"cohengine: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
