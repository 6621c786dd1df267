"""Command-line front door.

Subcommands: validate, bracket, closure, check-e, homology, simulate.
Reports are JSON (CSV for simulate) with sorted keys, written to --out
or stdout.  Every report embeds the seed and, where Delta enters, the
cross_variant in use; identical configuration and seed give identical
output bytes.

Exit codes: 0 success, 1 verification failure (closure constants not
constant, check-e conditions not met, validate violations), 2 input
error (missing or malformed files, bad expressions or descriptors,
inadmissible parameters outside validate, singular candidates).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .closure import check_closure
from .evapo import (
    PoleError, default_grid, descriptor_to_expr, make_grid, verify_candidate,
)
from .homology import StructureMatrix, build_algebra, homology_report
from .model import (
    ControlSchedule, InvalidParamsError, Params, simulate, validate_params,
)
from .symbolic import to_text


@dataclass
class RunConfig:
    """One CLI invocation, fully determined (with the seed) by its
    fields."""

    command: str
    params: Optional[str] = None
    e: Optional[str] = None
    c: str = "identity"
    mode: str = "symbolic"
    cross: str = "bracket_1"
    seed: int = 0
    out: Optional[str] = None
    grid: Optional[str] = None
    tol: float = 1e-9
    init: str = "0,0,0"
    dt: float = 0.01
    steps: int = 100
    ctrl: Optional[str] = None


def _emit_json(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _load_params(config: RunConfig) -> Params:
    if config.params is None:
        raise ValueError("--params is required for this command")
    return Params.from_file(config.params)


def _admissible_params(config: RunConfig) -> Params:
    p = _load_params(config)
    violations = validate_params(p)
    if violations:
        raise InvalidParamsError(violations)
    return p


def _parse_grid(text: Optional[str]):
    if text is None:
        return default_grid()
    parts = [s.strip() for s in text.split(",")]
    if len(parts) == 2:
        nx, ny = int(parts[0]), int(parts[1])
        return make_grid(nx, ny, 0.1, 0.9, 0.1, 0.9)
    if len(parts) == 6:
        nx, ny = int(parts[0]), int(parts[1])
        x0, x1, y0, y1 = (float(s) for s in parts[2:])
        return make_grid(nx, ny, x0, x1, y0, y1)
    raise ValueError('--grid wants "nx,ny" or "nx,ny,x0,x1,y0,y1"')


def _parse_init(text: str):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 3:
        raise ValueError('--init wants "x,y,z"')
    return tuple(float(s) for s in parts)


def _load_ctrl(path: Optional[str]) -> ControlSchedule:
    if path is None:
        return ControlSchedule.zero()
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if isinstance(data, dict):
        data = data.get("entries")
    if not isinstance(data, list):
        raise ValueError(
            "control file wants a list of [t, u1, u2, u3] entries")
    return ControlSchedule(tuple(tuple(float(v) for v in row)
                                 for row in data))


def _cmd_validate(config: RunConfig) -> int:
    p = _load_params(config)
    violations = validate_params(p)
    _emit_json({
        "command": "validate",
        "violations": violations,
        "valid": not violations,
        "seed": config.seed,
    }, config.out)
    return 0 if not violations else 1


def _cmd_bracket(config: RunConfig) -> int:
    from .closure import ClosureEngine
    from .fields import lie_bracket, proportional_to

    p = _admissible_params(config)
    e = descriptor_to_expr(p, config.e) if config.e else None
    engine = ClosureEngine(p, e)

    def field_text(f):
        return [to_text(c) for c in f.components()]

    commute = all(
        lie_bracket(engine.control(i), engine.control(j)).is_zero_field()
        for i in (1, 2, 3) for j in (1, 2, 3))
    report = {
        "command": "bracket",
        "f0": field_text(engine.f0),
        "controls": {str(i): field_text(engine.control(i))
                     for i in (1, 2, 3)},
        "b": field_text(engine.b),
        "controls_commute": commute,
        "y": {str(k): field_text(engine.y(k)) for k in (1, 2, 3)},
        "delta": {f"{i}{j}": to_text(engine.delta(i, j))
                  for i in (1, 2, 3) for j in (1, 2, 3)},
        "b_proportional": True,  # delta construction verified each entry
        "cross_variant": "bracket_1",
        "seed": config.seed,
    }
    _emit_json(report, config.out)
    return 0


def _cmd_closure(config: RunConfig) -> int:
    p = _admissible_params(config)
    e = descriptor_to_expr(p, config.e) if config.e else None
    report = check_closure(p, e, mode=config.mode,
                           cross_variant=config.cross, seed=config.seed)
    payload = {"command": "closure"}
    payload.update(report.to_dict())
    _emit_json(payload, config.out)
    all_constant = all(all(row) for row in report.constant_ok)
    return 0 if all_constant else 1


def _cmd_check_e(config: RunConfig) -> int:
    p = _admissible_params(config)
    if not config.e:
        raise ValueError("--e is required for check-e")
    e = descriptor_to_expr(p, config.e)
    grid = _parse_grid(config.grid)
    report = verify_candidate(p, e, grid=grid, tol=config.tol,
                              cross_variant=config.cross, seed=config.seed)
    payload = {"command": "check-e"}
    payload.update(report.to_dict())
    _emit_json(payload, config.out)
    return 0 if report.passed else 1


def _cmd_homology(config: RunConfig) -> int:
    if config.c == "identity":
        c = StructureMatrix.identity()
    else:
        with open(config.c, "r", encoding="utf-8") as handle:
            c = StructureMatrix.from_json(handle.read())
    report = homology_report(build_algebra(c))
    payload = {
        "command": "homology",
        "c": [[str(v) for v in row] for row in c.rows],
        "seed": config.seed,
    }
    payload.update(report)
    _emit_json(payload, config.out)
    return 0


def _cmd_simulate(config: RunConfig) -> int:
    p = _admissible_params(config)
    if not config.e:
        raise ValueError("--e is required for simulate")
    e = descriptor_to_expr(p, config.e)
    ctrl = _load_ctrl(config.ctrl)
    init = _parse_init(config.init)
    traj = simulate(p, e, ctrl, init, config.dt, config.steps)
    if config.out is None:
        traj.to_csv(sys.stdout)
    else:
        traj.write_csv(config.out)
    if traj.diverged:
        sys.stderr.write(
            f"warning: trajectory diverged after {len(traj.times) - 1} "
            f"steps; output truncated\n")
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "bracket": _cmd_bracket,
    "closure": _cmd_closure,
    "check-e": _cmd_check_e,
    "homology": _cmd_homology,
    "simulate": _cmd_simulate,
}


def run(config: RunConfig) -> int:
    """Dispatch one configuration; returns the process exit code."""
    handler = _COMMANDS.get(config.command)
    if handler is None:
        raise ValueError(f"unknown command {config.command!r}")
    return handler(config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liehouse",
        description="Bracket structure, evapotranspiration candidates, "
                    "and homology for the greenhouse climate model.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, params=False, e=False, grid=False):
        if params:
            sp.add_argument("--params", required=True,
                            help="JSON parameter file")
        if e:
            sp.add_argument("--e", help="E descriptor: tanh:C1,C2,C3,C4,i "
                            "| char:i,j[,k][,diag]:<F1>;<F2>[;<F3>] "
                            "| expr:<text>")
        if grid:
            sp.add_argument("--grid",
                            help='"nx,ny" or "nx,ny,x0,x1,y0,y1"')
        sp.add_argument("--seed", type=int, default=0,
                        help="seed for sampled zero tests (default 0)")
        sp.add_argument("--out", help="output path (default stdout)")

    add_common(sub.add_parser("validate", help="check parameter signs"),
               params=True)
    add_common(sub.add_parser("bracket", help="fields and raw brackets"),
               params=True, e=True)

    sp = sub.add_parser("closure", help="full closure scan")
    add_common(sp, params=True, e=True)
    sp.add_argument("--mode", choices=("symbolic", "numeric"),
                    default="symbolic")
    sp.add_argument("--cross", choices=("bracket_1", "paper_2"),
                    default="bracket_1",
                    help="mixed-partial coefficient variant of Delta_ij")

    sp = sub.add_parser("check-e", help="measure an E candidate on a grid")
    add_common(sp, params=True, e=True, grid=True)
    sp.add_argument("--cross", choices=("bracket_1", "paper_2"),
                    default="bracket_1")
    sp.add_argument("--tol", type=float, default=1e-9,
                    help="pass tolerance (default 1e-9)")

    sp = sub.add_parser("homology", help="Betti numbers of the span algebra")
    sp.add_argument("--c", default="identity",
                    help='"identity" or a JSON 3x3 matrix file')
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = sub.add_parser("simulate", help="fixed-step trajectory CSV")
    add_common(sp, params=True, e=True)
    sp.add_argument("--init", default="0,0,0", help='"x,y,z" start state')
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--ctrl", help="JSON control schedule "
                    "[[t,u1,u2,u3], ...] (default: zero controls)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    fields = {k: v for k, v in vars(ns).items() if v is not None}
    config = RunConfig(**fields)
    try:
        return run(config)
    except (OSError, ValueError, InvalidParamsError, PoleError) as err:
        sys.stderr.write(f"error: {err}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
