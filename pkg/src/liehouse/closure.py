"""Bracket-closure operators for the greenhouse system.

Iterated brackets of the drift f0 with the constant control fields f_i
stay inside the span of {f_i, [f0, f_i], B} exactly when three families
of scalars behave:

    Delta_ij  E . B = [f_i, [f0, f_j]]          second order in E
    Delta_ijk E . B = [f_k, Delta_ij E . B]     third order in E
    Lambda_ijk E . B = [[f0, f_k], Delta_ij E . B]

Every operator is computed here from the brackets themselves (the
oracle route); closed-form coefficient expansions are provided
separately for cross-checking.  The closed form of Delta_ij circulates
in two versions that differ in the mixed-partial coefficient: the
bracket expansion gives (g_1i g_2j + g_2i g_1j) E_xy, while a doubled
coefficient also appears in print.  Both are available via
cross_variant ("bracket_1", the default, and "paper_2"); the bracket
route is canonical and the doubled version is reported as a deviation
when the two disagree.

The span {X_i = f_i, Y_i = [f0, f_i], Z = B} has seven abstract
generators; check_closure reports whether the scalars make the
multiplication table that of a two-step nilpotent algebra and whether
it is the Heisenberg-like diagonal case.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .fields import VectorField, apply_to_scalar, lie_bracket, proportional_to
from .homology import rank_exact
from .model import Params, build_fields
from .symbolic import (
    E, Expr, as_expr, base_atoms, differentiate, epartial, eval_numeric,
    has_transcendental, is_zero, substitute, to_text,
    _FUNC, _RECIP,
)

CROSS_VARIANTS = ("bracket_1", "paper_2")

_INDICES = (1, 2, 3)


class ClosureDefectError(RuntimeError):
    """An iterated bracket left the B line; the model structure rules
    this out, so reaching it signals an internal inconsistency."""


def magic_tuples(k: int, n: int):
    """Rows of the k-wide magic table with entries in {1, 2} and row sum
    n: all distinct k-tuples over {1, 2} summing to n, sorted."""
    if k < 1:
        raise ValueError("k must be at least 1")
    out = []
    for mask in range(2 ** k):
        row = tuple(1 + ((mask >> pos) & 1) for pos in range(k))
        if sum(row) == n:
            out.append(row)
    return sorted(out)


def _check_variant(cross_variant: str) -> None:
    if cross_variant not in CROSS_VARIANTS:
        raise ValueError(
            f"cross_variant must be one of {CROSS_VARIANTS}, "
            f"got {cross_variant!r}")


def _check_index(*indices: int) -> None:
    for i in indices:
        if i not in _INDICES:
            raise ValueError(f"field index must be 1, 2 or 3, got {i}")


class ClosureEngine:
    """Caches the model fields and repeated brackets for one (params, E)
    pair.  e_binding None leaves E formal; otherwise E and all of its
    partials are replaced by the bound expression and its derivatives."""

    def __init__(self, p: Params, e_binding: Optional[Expr] = None):
        self.params = p
        if e_binding is not None and not p.is_symbolic():
            e_binding = substitute(e_binding, p.bindings())
        self.e_binding = e_binding
        f0, f1, f2, f3, b = build_fields(p)
        if e_binding is not None:
            bind = {E: e_binding}
            f0 = VectorField(*(substitute(c, bind) for c in f0.components()))
        self.f0 = f0
        self.controls = (f1, f2, f3)
        self.b = b
        self._y: dict = {}
        self._delta: dict = {}

    def control(self, i: int) -> VectorField:
        _check_index(i)
        return self.controls[i - 1]

    def y(self, k: int) -> VectorField:
        """[f0, f_k], cached."""
        _check_index(k)
        got = self._y.get(k)
        if got is None:
            got = lie_bracket(self.f0, self.control(k))
            self._y[k] = got
        return got

    def _multiple_of_b(self, field: VectorField, what: str) -> Expr:
        phi = proportional_to(field, self.b)
        if phi is None:
            raise ClosureDefectError(
                f"{what} is not a multiple of B; components "
                f"({to_text(field.cx)}, {to_text(field.cy)}, "
                f"{to_text(field.cz)})")
        return phi

    def delta(self, i: int, j: int) -> Expr:
        """Scalar of [f_i, [f0, f_j]] along B."""
        _check_index(i, j)
        got = self._delta.get((i, j))
        if got is None:
            br = lie_bracket(self.control(i), self.y(j))
            got = self._multiple_of_b(br, f"[f_{i}, [f0, f_{j}]]")
            self._delta[(i, j)] = got
        return got

    def delta3(self, i: int, j: int, k: int) -> Expr:
        """f_k applied to delta(i, j); equals the scalar of
        [f_k, delta(i,j) B] because the f_k are constant and commute
        with B."""
        _check_index(i, j, k)
        return apply_to_scalar(self.control(k), self.delta(i, j))

    def delta3_bracket(self, i: int, j: int, k: int) -> Expr:
        """Same scalar through the literal bracket route."""
        br = lie_bracket(self.control(k), self.b.scaled(self.delta(i, j)))
        return self._multiple_of_b(br, f"[f_{k}, Delta_{i}{j} B]")

    def lam(self, i: int, j: int, k: int) -> Expr:
        """Scalar of [[f0, f_k], delta(i,j) B] along B."""
        _check_index(i, j, k)
        return self.lam_with(k, self.delta(i, j), f"Delta_{i}{j}")

    def lam_with(self, k: int, phi: Expr, label: str = "phi") -> Expr:
        """Scalar of [[f0, f_k], phi B] along B for any scalar phi."""
        _check_index(k)
        br = lie_bracket(self.y(k), self.b.scaled(phi))
        return self._multiple_of_b(br, f"[[f0, f_{k}], {label} B]")

    def b_drift_factor(self, k: int) -> Expr:
        """Scalar s with [[f0, f_k], B] = s B; a nonzero value means B
        fails to be central against the Y_k directions (diagnostic)."""
        _check_index(k)
        return self._multiple_of_b(
            lie_bracket(self.y(k), self.b), f"[[f0, f_{k}], B]")


def _bind_e(expr: Expr, e_binding: Optional[Expr]) -> Expr:
    if e_binding is None:
        return expr
    return substitute(expr, {E: e_binding})


def delta_ij(p: Params, e: Optional[Expr], i: int, j: int) -> Expr:
    """Second-order closure scalar by the bracket route."""
    return ClosureEngine(p, e).delta(i, j)


def _gamma_expr(p: Params, row: int, idx: int) -> Expr:
    got = p.gamma_entry(row, idx)
    return got if isinstance(got, Expr) else as_expr(got)


def delta_ij_formula(p: Params, e: Optional[Expr], i: int, j: int,
                     cross_variant: str = "bracket_1") -> Expr:
    """Coefficient expansion of delta_ij over the second partials of E.

    bracket_1 puts (g_1i g_2j + g_2i g_1j) on E_xy, matching the
    bracket route; paper_2 doubles that coefficient.
    """
    _check_variant(cross_variant)
    _check_index(i, j)

    def g(row, idx):
        return _gamma_expr(p, row, idx)

    cross = g(1, i) * g(2, j) + g(2, i) * g(1, j)
    if cross_variant == "paper_2":
        cross = 2 * cross
    out = (g(1, i) * g(1, j) * epartial(2, 0)
           + cross * epartial(1, 1)
           + g(2, i) * g(2, j) * epartial(0, 2))
    if p.is_symbolic():
        return _bind_e(out, e)
    return substitute(_bind_e(out, e), p.bindings())


def delta_ijk(p: Params, e: Optional[Expr], i: int, j: int, k: int) -> Expr:
    """Third-order closure scalar by the bracket route."""
    return ClosureEngine(p, e).delta3(i, j, k)


def delta_ijk_formula(p: Params, e: Optional[Expr], i: int, j: int,
                      k: int) -> Expr:
    """Coefficient expansion of delta_ijk: pure third partials carry the
    products g_1i g_1j g_1k and g_2i g_2j g_2k, and the mixed partials
    E_xxy / E_xyy sum gamma products over the magic rows with sums 4
    and 5."""
    _check_index(i, j, k)

    def g(row, idx):
        return _gamma_expr(p, row, idx)

    def magic_sum(n):
        total = as_expr(0)
        for s1, s2, s3 in magic_tuples(3, n):
            total = total + g(s1, i) * g(s2, j) * g(s3, k)
        return total

    out = (g(1, i) * g(1, j) * g(1, k) * epartial(3, 0)
           + magic_sum(4) * epartial(2, 1)
           + magic_sum(5) * epartial(1, 2)
           + g(2, i) * g(2, j) * g(2, k) * epartial(0, 3))
    if p.is_symbolic():
        return _bind_e(out, e)
    return substitute(_bind_e(out, e), p.bindings())


def lambda_ijk(p: Params, e: Optional[Expr], i: int, j: int, k: int) -> Expr:
    """Mixed closure scalar [[f0, f_k], Delta_ij E . B] = Lambda B by
    the bracket route.  No transcription of the long coefficient
    expansion is kept; the bracket is the defining computation."""
    return ClosureEngine(p, e).lam(i, j, k)


@dataclass
class ClosureReport:
    """Outcome of the full closure scan for one (params, E) pair."""

    c: list                    # 3x3 delta scalars (Expr)
    constant_ok: list          # 3x3 bools: delta_ij has zero x/y derivative
    delta3_zero: dict          # (i,j,k) -> bool
    lambda_zero: dict          # (i,j,k) -> bool
    b_central: list            # per k: [[f0,f_k],B] vanishes
    realized_span_dim: int     # rank of the 7 generators at a sample point
    heisenberg: bool
    mode: str
    cross_variant: str
    seed: int

    def to_dict(self) -> dict:
        c_text = [[to_text(self.c[i][j]) for j in range(3)] for i in range(3)]
        delta3_fail = sorted(k for k, ok in self.delta3_zero.items() if not ok)
        lambda_fail = sorted(k for k, ok in self.lambda_zero.items() if not ok)
        return {
            "c": c_text,
            "constant_ok": [list(row) for row in self.constant_ok],
            "delta3_zero": not delta3_fail,
            "delta3_failures": [list(k) for k in delta3_fail],
            "lambda_zero": not lambda_fail,
            "lambda_failures": [list(k) for k in lambda_fail],
            "b_central": list(self.b_central),
            "realized_span_dim": self.realized_span_dim,
            "heisenberg": self.heisenberg,
            "mode": self.mode,
            "cross_variant": self.cross_variant,
            "seed": self.seed,
        }


def _sample_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-2_000_000, 2_000_000), 1_000_000)


def _span_dim_at_point(engine: ClosureEngine, rng: random.Random) -> int:
    """Rank of the 7 generators evaluated at one random state.  The
    generators live on R^3, so this is at most 3; it measures how much
    of the abstract span is realized pointwise, not the abstract
    dimension."""
    fields_7 = list(engine.controls) + [engine.y(k) for k in _INDICES] \
        + [engine.b]
    comps = [comp for f in fields_7 for comp in f.components()]
    atoms = set()
    for comp in comps:
        atoms |= base_atoms(comp)
    assign = {}
    for atom in sorted(atoms, key=lambda a: a.key):
        assign[atom] = _sample_rational(rng)
    if not any(has_transcendental(comp) for comp in comps):
        rows = []
        for f in fields_7:
            row = []
            for comp in f.components():
                val = substitute(comp, assign)
                if val.terms and (len(val.terms) > 1 or val.terms[0][0]):
                    raise ClosureDefectError(
                        "generator did not evaluate to a constant")
                row.append(val.terms[0][1] if val.terms else Fraction(0))
            rows.append(row)
        return rank_exact(rows)
    import numpy
    from .symbolic import EvaluationError
    ordered = sorted(atoms, key=lambda a: a.key)
    for _ in range(20):
        float_assign = {k: float(v) for k, v in assign.items()}
        try:
            mat = numpy.array([[eval_numeric(comp, float_assign)
                                for comp in f.components()]
                               for f in fields_7])
        except (ZeroDivisionError, OverflowError, ValueError):
            assign = {atom: _sample_rational(rng) for atom in ordered}
            continue
        if numpy.all(numpy.isfinite(mat)):
            return int(numpy.linalg.matrix_rank(mat, tol=1e-9))
        assign = {atom: _sample_rational(rng) for atom in ordered}
    raise EvaluationError("no finite sample point for the generator rank")


def check_closure(p: Params, e: Optional[Expr] = None,
                  mode: str = "symbolic",
                  cross_variant: str = "bracket_1",
                  seed: int = 0) -> ClosureReport:
    """Scan all closure conditions and build the structure scalars.

    mode "symbolic" keeps canonical forms and exact zero decisions on
    the polynomial fragment; expressions containing reciprocal atoms
    (for example the tanh quotient family) force "numeric", where zero
    decisions come from seeded random evaluation.  The report records
    the mode actually used.  All randomness flows from the single seed.
    """
    if mode not in ("symbolic", "numeric"):
        raise ValueError(f"mode must be 'symbolic' or 'numeric', got {mode!r}")
    _check_variant(cross_variant)
    rng = random.Random(seed)
    engine = ClosureEngine(p, e)

    c = [[None] * 3 for _ in range(3)]
    for i in _INDICES:
        for j in _INDICES:
            if cross_variant == "bracket_1":
                c[i - 1][j - 1] = engine.delta(i, j)
            else:
                c[i - 1][j - 1] = delta_ij_formula(p, engine.e_binding, i, j,
                                                   cross_variant)

    effective_mode = mode
    scanned = [engine.e_binding] if engine.e_binding is not None else []
    scanned += [c[i][j] for i in range(3) for j in range(3)]
    if any(_has_recip(expr) for expr in scanned if expr is not None):
        effective_mode = "numeric"

    constant_ok = [[is_zero(differentiate(c[i][j], "x"), rng)
                    and is_zero(differentiate(c[i][j], "y"), rng)
                    for j in range(3)] for i in range(3)]

    delta3_zero = {}
    lambda_zero = {}
    for i in _INDICES:
        for j in _INDICES:
            cij = c[i - 1][j - 1]
            for k in _INDICES:
                d3 = apply_to_scalar(engine.control(k), cij)
                delta3_zero[(i, j, k)] = is_zero(d3, rng)
                lam = engine.lam_with(k, cij, f"Delta_{i}{j}")
                lambda_zero[(i, j, k)] = is_zero(lam, rng)

    b_central = [is_zero(engine.b_drift_factor(k), rng) for k in _INDICES]

    diag_nonzero = all(not is_zero(c[i][i], rng) for i in range(3))
    offdiag_zero = all(is_zero(c[i][j], rng)
                       for i in range(3) for j in range(3) if i != j)
    heisenberg = (all(all(row) for row in constant_ok)
                  and all(delta3_zero.values())
                  and all(lambda_zero.values())
                  and offdiag_zero and diag_nonzero)

    span_dim = _span_dim_at_point(engine, rng)

    return ClosureReport(
        c=c, constant_ok=constant_ok, delta3_zero=delta3_zero,
        lambda_zero=lambda_zero, b_central=b_central,
        realized_span_dim=span_dim, heisenberg=heisenberg,
        mode=effective_mode, cross_variant=cross_variant, seed=seed)


def _has_recip(e: Expr) -> bool:
    stack = [e]
    while stack:
        cur = stack.pop()
        for m, _ in cur.terms:
            for atom, _k in m:
                if atom.kind == _RECIP:
                    return True
                if atom.kind == _FUNC:
                    stack.append(atom.data[1])
    return False
