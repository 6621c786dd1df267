"""Exact symbolic kernel for the greenhouse bracket toolkit.

Expressions live in a fully expanded canonical form: a sum of terms, each
term an exact rational coefficient attached to a multiset of atom powers.
Atoms come in five flavors:

  * coordinates        x, y, z
  * named parameters   alpha1, ..., gamma23
  * formal partials    E, E_x, E_xy, ...   (derivatives of the
                       evapotranspiration function, indexed by the pair
                       of x- and y-orders)
  * transcendentals    tanh/exp/sin/cos applied to a canonical argument
  * reciprocals        (s)^-1 of a canonical multi-term sum s

The reciprocal flavor is internal bookkeeping: it is what keeps families
like 1/(c4 + c3*tanh(u)) closed under differentiation and substitution.
Reciprocal bases are normalized to leading coefficient one so that equal
quotients collapse to equal atoms.

Two expressions are equal exactly when their canonical forms coincide.
On the fragment without transcendental or reciprocal atoms this makes
zero-testing a decision procedure; with them, is_zero falls back to
seeded random evaluation.  All structural arithmetic uses
fractions.Fraction; floats appear only in eval_numeric and sampling.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Union

Rational = Fraction

VARIABLE_NAMES = ("x", "y", "z")
PARAMETER_NAMES = (
    "alpha1", "alpha2", "alpha3",
    "beta11", "beta12", "beta13", "beta22", "beta22p", "beta32", "beta33",
    "gamma11", "gamma12", "gamma13", "gamma21", "gamma22", "gamma23",
)
FUNCTION_NAMES = ("tanh", "exp", "sin", "cos")

# atom kind ranks; the rank is the first entry of every sort key
_VAR, _PARAM, _EPARTIAL, _FUNC, _RECIP = range(5)


class SymbolicError(Exception):
    """Base class for kernel failures."""


class MissingAssignmentError(SymbolicError):
    """Numeric evaluation hit an atom with no assigned value."""


class InconsistentBindingError(SymbolicError):
    """A substitution binds a partial of E to something other than the
    derivative of the bound E."""


class EvaluationError(SymbolicError):
    """Random sampling could not produce enough finite evaluations."""


class Atom:
    """An indivisible symbol.  Immutable, hashable, totally ordered by key.

    data is the flavor-specific payload: a name for coordinates and
    parameters, an (a, b) order pair for partials of E, a (name, Expr)
    pair for transcendentals, and the base Expr for reciprocals.
    """

    __slots__ = ("kind", "data", "key", "_hash")

    def __init__(self, kind, data, key):
        self.kind = kind
        self.data = data
        self.key = key
        self._hash = hash(key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Atom):
            return NotImplemented
        return self.key == other.key

    def __repr__(self):
        return _atom_text(self)


_var_cache: dict = {}
_param_cache: dict = {}
_epartial_cache: dict = {}


def _var_atom(name: str) -> Atom:
    atom = _var_cache.get(name)
    if atom is None:
        if name not in VARIABLE_NAMES:
            raise ValueError(f"unknown coordinate {name!r}")
        atom = Atom(_VAR, name, (_VAR, name))
        _var_cache[name] = atom
    return atom


def _param_atom(name: str) -> Atom:
    atom = _param_cache.get(name)
    if atom is None:
        atom = Atom(_PARAM, name, (_PARAM, name))
        _param_cache[name] = atom
    return atom


def _epartial_atom(a: int, b: int) -> Atom:
    atom = _epartial_cache.get((a, b))
    if atom is None:
        if a < 0 or b < 0:
            raise ValueError("partial orders must be nonnegative")
        atom = Atom(_EPARTIAL, (a, b), (_EPARTIAL, a, b))
        _epartial_cache[(a, b)] = atom
    return atom


def _func_atom(name: str, arg: "Expr") -> Atom:
    return Atom(_FUNC, (name, arg), (_FUNC, name, arg.key))


def _recip_atom(base: "Expr") -> Atom:
    return Atom(_RECIP, base, (_RECIP, base.key))


# A monomial is a tuple of (Atom, exponent) pairs sorted by atom key with
# no zero exponents.  Reciprocal atoms carry positive exponents only.

def monomial_key(mono) -> tuple:
    return tuple((a.key, k) for a, k in mono)


def _atom_expr(atom: Atom) -> "Expr":
    return Expr(((((atom, 1),), Fraction(1)),))


class Expr:
    """Canonical sum of terms.  Treat instances as immutable.

    terms is a tuple of (monomial, coefficient) sorted by monomial key,
    with nonzero Fraction coefficients.  The empty tuple is zero.
    """

    __slots__ = ("terms", "_key", "_hash")

    def __init__(self, terms=()):
        self.terms = terms
        self._key = None
        self._hash = None

    @property
    def key(self):
        if self._key is None:
            self._key = tuple((monomial_key(m), c) for m, c in self.terms)
        return self._key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = as_expr(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self.terms == other.terms

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        acc = dict(self.terms)
        for m, c in other.terms:
            nc = acc.get(m, _ZERO_F) + c
            if nc:
                acc[m] = nc
            elif m in acc:
                del acc[m]
        return _from_map(acc)

    __radd__ = __add__

    def __neg__(self):
        return Expr(tuple((m, -c) for m, c in self.terms))

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if not self.terms or not other.terms:
            return ZERO
        acc: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = _merge_monomials(m1, m2)
                c = c1 * c2
                nc = acc.get(m, _ZERO_F) + c
                if nc:
                    acc[m] = nc
                elif m in acc:
                    del acc[m]
        return _from_map(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * _invert(other)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * _invert(self)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("exponents must be integers")
        if n == 0:
            return ONE
        if n < 0:
            return _invert(self) ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base_needed = n > 1
            if base_needed:
                base = base * base
            n >>= 1
        return out

    def leading_term(self):
        """Largest term in the monomial order; requires a nonzero expression."""
        if not self.terms:
            raise ValueError("zero expression has no leading term")
        return self.terms[-1]

    def __str__(self):
        return to_text(self)

    __repr__ = __str__


_ZERO_F = Fraction(0)
ZERO = Expr()
ONE = Expr((((), Fraction(1)),))


def _coerce(value) -> Optional[Expr]:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        if value == 0:
            return ZERO
        return Expr((((), Fraction(value)),))
    return None


def as_expr(value) -> Expr:
    """Coerce an int or Fraction to a canonical expression."""
    e = _coerce(value)
    if e is None:
        raise TypeError(f"cannot interpret {value!r} as an exact expression")
    return e


def _from_map(acc: Mapping) -> Expr:
    if not acc:
        return ZERO
    return Expr(tuple(sorted(acc.items(), key=lambda it: monomial_key(it[0]))))


def _merge_monomials(m1, m2):
    """Merge two sorted monomials, adding exponents of equal atoms.

    Canonical inputs carry positive reciprocal exponents, so the merge
    never produces a negative one and needs no expansion step.
    """
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        a1, k1 = m1[i]
        a2, k2 = m2[j]
        if a1.key == a2.key:
            k = k1 + k2
            if k:
                out.append((a1, k))
            i += 1
            j += 1
        elif a1.key < a2.key:
            out.append((a1, k1))
            i += 1
        else:
            out.append((a2, k2))
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _make_term(powers: Mapping, coeff: Fraction) -> Expr:
    """Build an expression from an atom -> exponent map.

    Zero exponents are dropped.  A negative power of a reciprocal atom is
    expanded into the corresponding power of its base sum, which keeps
    the positive-reciprocal-exponent invariant.
    """
    if not coeff:
        return ZERO
    pending = []
    mono = []
    for atom, k in powers.items():
        if k == 0:
            continue
        if atom.kind == _RECIP and k < 0:
            pending.append((atom.data, -k))
        else:
            mono.append((atom, k))
    mono.sort(key=lambda it: it[0].key)
    e = Expr(((tuple(mono), Fraction(coeff)),))
    for base, k in pending:
        e = e * base ** k
    return e


def _invert(e: Expr) -> Expr:
    if not e.terms:
        raise ZeroDivisionError("division by a zero expression")
    if len(e.terms) == 1:
        m, c = e.terms[0]
        return _make_term({a: -k for a, k in m}, 1 / Fraction(c))
    lead_m, lead_c = e.terms[-1]
    base = e * (1 / Fraction(lead_c))
    return _atom_expr(_recip_atom(base)) * (1 / Fraction(lead_c))


# -- constructors ------------------------------------------------------

def var(name: str) -> Expr:
    return _atom_expr(_var_atom(name))


def param(name: str) -> Expr:
    return _atom_expr(_param_atom(name))


def epartial(a: int, b: int) -> Expr:
    """The formal partial derivative of E of order a in x and b in y."""
    return _atom_expr(_epartial_atom(a, b))


def _func_expr(name: str, arg) -> Expr:
    arg = as_expr(arg) if not isinstance(arg, Expr) else arg
    return _atom_expr(_func_atom(name, arg))


def tanh(arg) -> Expr:
    return _func_expr("tanh", arg)


def exp(arg) -> Expr:
    return _func_expr("exp", arg)


def sin(arg) -> Expr:
    return _func_expr("sin", arg)


def cos(arg) -> Expr:
    return _func_expr("cos", arg)


X = var("x")
Y = var("y")
Z = var("z")
E = epartial(0, 0)


def normalize(e) -> Expr:
    """Return the canonical form.  Construction already normalizes, so on
    Expr inputs this re-merges the term list and is idempotent."""
    if not isinstance(e, Expr):
        return as_expr(e)
    acc: dict = {}
    for m, c in e.terms:
        nc = acc.get(m, _ZERO_F) + c
        if nc:
            acc[m] = nc
        elif m in acc:
            del acc[m]
    return _from_map(acc)


# -- differentiation ---------------------------------------------------

def _as_var_name(v) -> str:
    if isinstance(v, str):
        if v not in VARIABLE_NAMES:
            raise ValueError(f"unknown coordinate {v!r}")
        return v
    if isinstance(v, Expr) and len(v.terms) == 1:
        m, c = v.terms[0]
        if c == 1 and len(m) == 1 and m[0][1] == 1 and m[0][0].kind == _VAR:
            return m[0][0].data
    raise ValueError(f"cannot differentiate with respect to {v!r}")


@lru_cache(maxsize=8192)
def _diff_atom(atom: Atom, vname: str) -> Expr:
    if atom.kind == _VAR:
        return ONE if atom.data == vname else ZERO
    if atom.kind == _PARAM:
        return ZERO
    if atom.kind == _EPARTIAL:
        a, b = atom.data
        if vname == "x":
            return epartial(a + 1, b)
        if vname == "y":
            return epartial(a, b + 1)
        return ZERO
    if atom.kind == _FUNC:
        name, arg = atom.data
        darg = differentiate(arg, vname)
        if not darg.terms:
            return ZERO
        if name == "tanh":
            outer = ONE - _func_expr("tanh", arg) ** 2
        elif name == "exp":
            outer = _func_expr("exp", arg)
        elif name == "sin":
            outer = _func_expr("cos", arg)
        else:  # cos
            outer = -_func_expr("sin", arg)
        return outer * darg
    # reciprocal: d(1/g) = -g' / g^2
    base = atom.data
    dbase = differentiate(base, vname)
    if not dbase.terms:
        return ZERO
    return _make_term({atom: 2}, Fraction(-1)) * dbase


def differentiate(e, v) -> Expr:
    """Formal partial derivative.  v is 'x', 'y', 'z' or a coordinate
    expression.  Partials of E shift their order pair; tanh uses
    tanh' = 1 - tanh^2."""
    e = e if isinstance(e, Expr) else as_expr(e)
    vname = _as_var_name(v)
    acc: dict = {}
    for m, c in e.terms:
        for idx, (atom, k) in enumerate(m):
            datom = _diff_atom(atom, vname)
            if not datom.terms:
                continue
            rest = {a: p for a, p in m}
            if k == 1:
                del rest[atom]
            else:
                rest[atom] = k - 1
            piece = _make_term(rest, c * k) * datom
            for pm, pc in piece.terms:
                nc = acc.get(pm, _ZERO_F) + pc
                if nc:
                    acc[pm] = nc
                elif pm in acc:
                    del acc[pm]
    return _from_map(acc)


# -- substitution ------------------------------------------------------

def _as_atom(key) -> Atom:
    if isinstance(key, Atom):
        return key
    if isinstance(key, Expr) and len(key.terms) == 1:
        m, c = key.terms[0]
        if c == 1 and len(m) == 1 and m[0][1] == 1:
            return m[0][0]
    raise TypeError(f"{key!r} is not a single atom")


class _Substitution:
    def __init__(self, bindings: Mapping):
        self.map = {}
        for k, v in bindings.items():
            self.map[_as_atom(k)] = v if isinstance(v, Expr) else as_expr(v)
        self.cache: dict = {}
        base = self.map.get(_epartial_atom(0, 0))
        self.derived: Optional[dict] = None
        if base is not None:
            self.derived = {(0, 0): base}
            for atom, bound in self.map.items():
                if atom.kind == _EPARTIAL and atom.data != (0, 0):
                    want = self.partial(*atom.data)
                    if want != bound:
                        raise InconsistentBindingError(
                            f"{atom!r} bound to {bound} but the bound E "
                            f"derives {want}")

    def partial(self, a: int, b: int) -> Expr:
        got = self.derived.get((a, b))
        if got is None:
            if a > 0:
                got = differentiate(self.partial(a - 1, b), "x")
            else:
                got = differentiate(self.partial(a, b - 1), "y")
            self.derived[(a, b)] = got
        return got

    def atom_value(self, atom: Atom) -> Expr:
        got = self.cache.get(atom)
        if got is not None:
            return got
        direct = self.map.get(atom)
        if direct is not None:
            out = direct
        elif atom.kind == _EPARTIAL and self.derived is not None:
            out = self.partial(*atom.data)
        elif atom.kind == _FUNC:
            name, arg = atom.data
            new_arg = self.run(arg)
            out = _atom_expr(atom) if new_arg == arg else _func_expr(name, new_arg)
        elif atom.kind == _RECIP:
            new_base = self.run(atom.data)
            out = _atom_expr(atom) if new_base == atom.data else _invert(new_base)
        else:
            out = _atom_expr(atom)
        self.cache[atom] = out
        return out

    def run(self, e: Expr) -> Expr:
        out = ZERO
        for m, c in e.terms:
            piece = as_expr(c)
            for atom, k in m:
                piece = piece * self.atom_value(atom) ** k
            out = out + piece
        return out


def substitute(e, bindings: Mapping) -> Expr:
    """Simultaneous substitution of atoms by expressions.

    Binding E itself makes every partial of E resolve to the matching
    derivative of the bound expression; an explicit binding for a partial
    must then agree with that derivative or InconsistentBindingError is
    raised.  Unbound atoms pass through, with transcendental arguments
    and reciprocal bases rewritten recursively.
    """
    e = e if isinstance(e, Expr) else as_expr(e)
    return _Substitution(bindings).run(e)


# -- numeric evaluation ------------------------------------------------

def _eval_atom(atom: Atom, memo: dict) -> float:
    got = memo.get(atom)
    if got is not None:
        return got
    if atom.kind == _FUNC:
        name, arg = atom.data
        val = getattr(math, name)(_eval_expr(arg, memo))
    elif atom.kind == _RECIP:
        val = 1.0 / _eval_expr(atom.data, memo)
    else:
        raise MissingAssignmentError(f"no value assigned to {atom!r}")
    memo[atom] = val
    return val


def _eval_expr(e: Expr, memo: dict) -> float:
    total = 0.0
    for m, c in e.terms:
        prod = float(c)
        for atom, k in m:
            prod *= _eval_atom(atom, memo) ** k
        total += prod
    return total


def _eval_terms(e: Expr, memo: dict):
    """Evaluate term by term, returning (sum, largest term magnitude)."""
    total = 0.0
    scale = 0.0
    for m, c in e.terms:
        prod = float(c)
        for atom, k in m:
            prod *= _eval_atom(atom, memo) ** k
        total += prod
        mag = abs(prod)
        if mag > scale:
            scale = mag
    return total, scale


def eval_numeric(e, assignment: Mapping) -> float:
    """Evaluate at a point.  assignment maps atoms (or single-atom
    expressions) to numbers; transcendentals and reciprocals evaluate
    through their contents unless assigned directly."""
    e = e if isinstance(e, Expr) else as_expr(e)
    memo = {_as_atom(k): float(v) for k, v in assignment.items()}
    return _eval_expr(e, memo)


def base_atoms(e: Expr) -> set:
    """All coordinate, parameter, and E-partial atoms reachable in e,
    descending into transcendental arguments and reciprocal bases."""
    out: set = set()
    stack = [e]
    while stack:
        cur = stack.pop()
        for m, _ in cur.terms:
            for atom, _k in m:
                if atom.kind == _FUNC:
                    stack.append(atom.data[1])
                elif atom.kind == _RECIP:
                    stack.append(atom.data)
                else:
                    out.add(atom)
    return out


def has_transcendental(e: Expr) -> bool:
    """True when any transcendental or reciprocal atom occurs in e."""
    for m, _ in e.terms:
        for atom, _k in m:
            if atom.kind in (_FUNC, _RECIP):
                return True
    return False


def _has_negative_power(e: Expr) -> bool:
    for m, _ in e.terms:
        for _atom, k in m:
            if k < 0:
                return True
    return False


def is_zero(e, rng: Optional[random.Random] = None, points: int = 8,
            tol: float = 1e-9) -> bool:
    """Decide whether e is identically zero.

    Without transcendental or reciprocal atoms (and with no negative
    powers) the canonical form decides exactly.  Otherwise e is sampled
    at seeded uniform rational points in [-2, 2]; a value exceeding
    tol * (1 + largest term magnitude) at any point refutes zero.
    Non-finite samples are redrawn a bounded number of times.
    """
    e = e if isinstance(e, Expr) else as_expr(e)
    if not e.terms:
        return True
    if not has_transcendental(e) and not _has_negative_power(e):
        return False
    if rng is None:
        rng = random.Random(0)
    unknowns = sorted(base_atoms(e), key=lambda a: a.key)
    good = 0
    attempts = 0
    while good < points:
        attempts += 1
        if attempts > 25 * points:
            raise EvaluationError(
                "could not find enough finite sample points")
        memo = {a: Fraction(rng.randint(-2_000_000, 2_000_000), 1_000_000)
                for a in unknowns}
        memo = {a: float(q) for a, q in memo.items()}
        try:
            value, scale = _eval_terms(e, memo)
        except (ZeroDivisionError, OverflowError, ValueError):
            continue
        if not (math.isfinite(value) and math.isfinite(scale)):
            continue
        if abs(value) > tol * (1.0 + scale):
            return False
        good += 1
    return True


# -- printing ----------------------------------------------------------

def _frac_text(q: Fraction) -> str:
    return str(q)


def _atom_text(atom: Atom) -> str:
    if atom.kind in (_VAR, _PARAM):
        return atom.data
    if atom.kind == _EPARTIAL:
        a, b = atom.data
        if a == 0 and b == 0:
            return "E"
        return "E_" + "x" * a + "y" * b
    if atom.kind == _FUNC:
        name, arg = atom.data
        return f"{name}({to_text(arg)})"
    return f"({to_text(atom.data)})^-1"


def _atom_power_text(atom: Atom, k: int) -> str:
    if atom.kind == _RECIP:
        return f"({to_text(atom.data)})^-{k}"
    base = _atom_text(atom)
    return base if k == 1 else f"{base}^{k}"


def _term_text(m, c_abs: Fraction) -> str:
    if not m:
        return _frac_text(c_abs)
    factors = []
    if c_abs != 1:
        factors.append(_frac_text(c_abs))
    factors.extend(_atom_power_text(a, k) for a, k in m)
    return "*".join(factors)


def to_text(e) -> str:
    """Render in the grammar the parser accepts; parse(to_text(e)) == e."""
    e = e if isinstance(e, Expr) else as_expr(e)
    if not e.terms:
        return "0"
    parts = []
    for m, c in e.terms:
        body = _term_text(m, abs(c))
        if not parts:
            parts.append("-" + body if c < 0 else body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)
