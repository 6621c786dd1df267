"""Evapotranspiration candidates and their measurement against the
closure system.

Two constructive families are provided.  The characteristic family
composes arbitrary one-variable shapes with the lines
l_i = -gamma_2i x + gamma_1i y that the operators Delta annihilate,
optionally adding the diagonal term x^2 / (2 gamma_1i gamma_1j) whose
Delta_ij is exactly 1.  The tanh family is the quotient

    E_i = 1 / (C4 + C3 tanh((C1 g_1i - C2 g_2i x + C2 g_1i y) / g_1i)).

verify_candidate measures a candidate against the full system

    Delta_ij = 1 (i = j), 0 (i != j);  Delta_ijk = 0;  Lambda_ijk = 0

on a grid and reports residuals.  It never asserts the claim: the tanh
family in particular is a function of its own characteristic line, so
Delta_ii comes out 0 rather than the required 1; the report flags that
tension instead of repairing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .closure import ClosureEngine, _check_variant, delta_ij_formula
from .fields import apply_to_scalar
from .model import Params
from .parsing import parse
from .symbolic import (
    Expr, as_expr, base_atoms, eval_numeric, substitute, tanh, var, _VAR,
)

_INDICES = (1, 2, 3)


class PoleError(ValueError):
    """The candidate E (or a derivative) is singular on the grid."""


def _rat(v) -> Fraction:
    return Fraction(v)


def _check_family_index(*indices: int) -> None:
    for i in indices:
        if i not in _INDICES:
            raise ValueError(f"family index must be 1, 2 or 3, got {i}")


@dataclass(frozen=True)
class TanhConstants:
    """Constants of the tanh quotient family, attached to channel i."""

    c1: Fraction
    c2: Fraction
    c3: Fraction
    c4: Fraction
    i: int

    @classmethod
    def of(cls, c1, c2, c3, c4, i: int) -> "TanhConstants":
        _check_family_index(i)
        out = cls(_rat(c1), _rat(c2), _rat(c3), _rat(c4), i)
        if out.c3 == 0 and out.c4 == 0:
            raise ValueError("C3 and C4 cannot both vanish")
        return out


def e_tanh(p: Params, c: TanhConstants) -> Expr:
    """The tanh quotient candidate.  Needs gamma_1i nonzero (it divides
    the argument); the result is constant along the i-th line."""
    g1 = p.gamma_entry(1, c.i)
    g2 = p.gamma_entry(2, c.i)
    if not isinstance(g1, Expr) and g1 == 0:
        raise ValueError(f"gamma_1{c.i} must be nonzero")
    g1e = g1 if isinstance(g1, Expr) else as_expr(g1)
    g2e = g2 if isinstance(g2, Expr) else as_expr(g2)
    x, y = var("x"), var("y")
    arg = (as_expr(c.c1) * g1e - as_expr(c.c2) * g2e * x
           + as_expr(c.c2) * g1e * y) / g1e
    denom = as_expr(c.c4) + as_expr(c.c3) * tanh(arg)
    return 1 / denom


@dataclass(frozen=True)
class CharacteristicFamily:
    """Shapes composed with characteristic lines.

    f1, f2 (and optionally f3) are expressions in the single formal
    variable x; composition replaces that variable by the line of the
    matching index.  f1 rides the j-line and f2 the i-line, the order
    the two-shape solution is usually written in; the three-shape
    variant pairs (f1, f2, f3) with (i, j, k).  diagonal_term adds
    x^2 / (2 gamma_1i gamma_1j) and is meaningful for the two-shape
    family only.
    """

    f1: Expr
    f2: Expr
    i: int
    j: int
    f3: Optional[Expr] = None
    k: Optional[int] = None
    diagonal_term: bool = False

    def __post_init__(self):
        _check_family_index(self.i, self.j)
        if (self.f3 is None) != (self.k is None):
            raise ValueError("f3 and k must be given together")
        if self.k is not None:
            _check_family_index(self.k)
            if self.diagonal_term:
                raise ValueError(
                    "diagonal_term belongs to the two-shape family")
        for f in (self.f1, self.f2, self.f3):
            if f is None:
                continue
            for atom in base_atoms(f):
                if atom.kind == _VAR and atom.data != "x":
                    raise ValueError(
                        f"shapes are unary (in x); found {atom!r}")


def characteristic_line(p: Params, idx: int) -> Expr:
    """-gamma_2idx x + gamma_1idx y, annihilated by the idx-th
    directional operator."""
    _check_family_index(idx)
    g1 = p.gamma_entry(1, idx)
    g2 = p.gamma_entry(2, idx)
    g1e = g1 if isinstance(g1, Expr) else as_expr(g1)
    g2e = g2 if isinstance(g2, Expr) else as_expr(g2)
    return -g2e * var("x") + g1e * var("y")


def e_characteristic(p: Params, fam: CharacteristicFamily) -> Expr:
    """Compose each shape with its line; add the diagonal term when
    requested."""
    x = var("x")
    out = substitute(fam.f1, {x: characteristic_line(p, fam.j)})
    out = out + substitute(fam.f2, {x: characteristic_line(p, fam.i)})
    if fam.f3 is not None:
        out = out + substitute(fam.f3, {x: characteristic_line(p, fam.k)})
    if fam.diagonal_term:
        g1i = p.gamma_entry(1, fam.i)
        g1j = p.gamma_entry(1, fam.j)
        g1ie = g1i if isinstance(g1i, Expr) else as_expr(g1i)
        g1je = g1j if isinstance(g1j, Expr) else as_expr(g1j)
        out = out + x ** 2 / (2 * g1ie * g1je)
    return out


# -- descriptors -------------------------------------------------------

def parse_descriptor(text: str):
    """CLI mini-syntax for candidates:

        tanh:C1,C2,C3,C4,i
        char:i,j[,k][,diag]:<F1 expr>;<F2 expr>[;<F3 expr>]
        expr:<closed form in x, y>

    Returns a TanhConstants, CharacteristicFamily, or Expr.
    """
    kind, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(
            f"E descriptor needs a kind prefix (tanh:, char:, expr:), "
            f"got {text!r}")
    if kind == "expr":
        return parse(rest)
    if kind == "tanh":
        parts = [s.strip() for s in rest.split(",")]
        if len(parts) != 5:
            raise ValueError(
                "tanh descriptor needs C1,C2,C3,C4,i "
                f"(5 fields, got {len(parts)})")
        try:
            consts = [Fraction(s) for s in parts[:4]]
            idx = int(parts[4])
        except (ValueError, ZeroDivisionError) as err:
            raise ValueError(f"bad tanh descriptor field: {err}")
        return TanhConstants.of(*consts, idx)
    if kind == "char":
        head, sep2, funcs = rest.partition(":")
        if not sep2:
            raise ValueError(
                "char descriptor needs an index head and a shape list "
                "separated by ':'")
        head_parts = [s.strip() for s in head.split(",")]
        diagonal = False
        if head_parts and head_parts[-1] == "diag":
            diagonal = True
            head_parts = head_parts[:-1]
        if len(head_parts) not in (2, 3):
            raise ValueError("char descriptor needs indices i,j or i,j,k")
        try:
            idxs = [int(s) for s in head_parts]
        except ValueError as err:
            raise ValueError(f"bad char descriptor index: {err}")
        shapes = [parse(s) for s in funcs.split(";")]
        if len(shapes) != len(idxs):
            raise ValueError(
                f"char descriptor has {len(idxs)} indices but "
                f"{len(shapes)} shapes")
        if len(idxs) == 2:
            return CharacteristicFamily(
                f1=shapes[0], f2=shapes[1], i=idxs[0], j=idxs[1],
                diagonal_term=diagonal)
        return CharacteristicFamily(
            f1=shapes[0], f2=shapes[1], f3=shapes[2],
            i=idxs[0], j=idxs[1], k=idxs[2], diagonal_term=diagonal)
    raise ValueError(f"unknown E descriptor kind {kind!r}")


def descriptor_to_expr(p: Params, descriptor: str) -> Expr:
    parsed = parse_descriptor(descriptor)
    if isinstance(parsed, TanhConstants):
        return e_tanh(p, parsed)
    if isinstance(parsed, CharacteristicFamily):
        return e_characteristic(p, parsed)
    return parsed


# -- measurement -------------------------------------------------------

def make_grid(nx: int, ny: int, x0: float, x1: float,
              y0: float, y1: float) -> list:
    """nx by ny uniform grid, inclusive of both ends."""
    if nx < 1 or ny < 1:
        raise ValueError("grid needs at least one point per axis")
    xs = [x0 + (x1 - x0) * t / (nx - 1) for t in range(nx)] if nx > 1 \
        else [x0]
    ys = [y0 + (y1 - y0) * t / (ny - 1) for t in range(ny)] if ny > 1 \
        else [y0]
    return [(gx, gy) for gx in xs for gy in ys]


def default_grid() -> list:
    """5x5 over [0.1, 0.9]^2, away from tanh saturation and the usual
    pole locations."""
    return make_grid(5, 5, 0.1, 0.9, 0.1, 0.9)


@dataclass
class ConditionMeasurement:
    """One measured condition: the largest raw magnitude and the largest
    deviation from the target over the grid."""

    target: float
    max_abs: float
    max_dev: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "max_abs": self.max_abs,
            "max_dev": self.max_dev,
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    """Grid measurement of one candidate against the closure system."""

    delta: dict       # (i, j) -> ConditionMeasurement, target delta_ij
    delta3: dict      # (i, j, k) -> ConditionMeasurement, target 0
    lam: dict         # (i, j, k) -> ConditionMeasurement, target 0
    tol: float
    grid_size: int
    cross_variant: str
    seed: int
    passed: bool
    tension_indices: list   # diagonal i with measured |Delta_ii| <= tol
    heisenberg_tension: bool

    def to_dict(self) -> dict:
        def keyed(d):
            return {"".join(str(t) for t in k): v.to_dict()
                    for k, v in sorted(d.items())}
        return {
            "delta": keyed(self.delta),
            "delta3": keyed(self.delta3),
            "lambda": keyed(self.lam),
            "tol": self.tol,
            "grid_size": self.grid_size,
            "cross_variant": self.cross_variant,
            "seed": self.seed,
            "passed": self.passed,
            "tension_indices": list(self.tension_indices),
            "heisenberg_tension": self.heisenberg_tension,
        }


def _measure(expr: Expr, grid: Sequence, target: float,
             tol: float) -> ConditionMeasurement:
    ax, ay = var("x"), var("y")
    max_abs = 0.0
    max_dev = 0.0
    for gx, gy in grid:
        try:
            val = eval_numeric(expr, {ax: gx, ay: gy})
        except (ZeroDivisionError, OverflowError):
            raise PoleError(
                f"candidate is singular at grid point (x={gx}, y={gy})")
        if not math.isfinite(val):
            raise PoleError(
                f"candidate is singular at grid point (x={gx}, y={gy})")
        max_abs = max(max_abs, abs(val))
        max_dev = max(max_dev, abs(val - target))
    return ConditionMeasurement(target=target, max_abs=max_abs,
                                max_dev=max_dev, passed=max_dev <= tol)


def verify_candidate(p: Params, e: Expr, grid: Optional[Sequence] = None,
                     tol: float = 1e-9, cross_variant: str = "bracket_1",
                     seed: int = 0) -> VerificationReport:
    """Measure Delta_ij against its Kronecker target and Delta_ijk,
    Lambda_ijk against zero, pointwise over the grid.

    Pure measurement: the report carries residuals and pass flags at
    tol, plus the Heisenberg-tension flag for diagonal entries that
    measure zero where the structure wants a nonzero constant.  The
    seed is recorded for provenance; the grid sweep itself is
    deterministic.  A pole of the candidate (or its derivatives) on the
    grid raises PoleError naming the first failing point.
    """
    _check_variant(cross_variant)
    if grid is None:
        grid = default_grid()
    grid = list(grid)
    if not grid:
        raise ValueError("grid must be nonempty")
    if not tol > 0:
        raise ValueError("tol must be positive")

    engine = ClosureEngine(p, e)
    delta_m = {}
    delta3_m = {}
    lam_m = {}
    for i in _INDICES:
        for j in _INDICES:
            if cross_variant == "bracket_1":
                cij = engine.delta(i, j)
            else:
                cij = delta_ij_formula(p, engine.e_binding, i, j,
                                       cross_variant)
            target = 1.0 if i == j else 0.0
            delta_m[(i, j)] = _measure(cij, grid, target, tol)
            for k in _INDICES:
                d3 = apply_to_scalar(engine.control(k), cij)
                delta3_m[(i, j, k)] = _measure(d3, grid, 0.0, tol)
                lam = engine.lam_with(k, cij, f"Delta_{i}{j}")
                lam_m[(i, j, k)] = _measure(lam, grid, 0.0, tol)

    passed = (all(m.passed for m in delta_m.values())
              and all(m.passed for m in delta3_m.values())
              and all(m.passed for m in lam_m.values()))
    tension = [i for i in _INDICES if delta_m[(i, i)].max_abs <= tol]
    return VerificationReport(
        delta=delta_m, delta3=delta3_m, lam=lam_m, tol=tol,
        grid_size=len(grid), cross_variant=cross_variant, seed=seed,
        passed=passed, tension_indices=tension,
        heisenberg_tension=bool(tension))
