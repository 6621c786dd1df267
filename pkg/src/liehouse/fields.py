"""Vector fields on R^3 with exact symbolic coefficients.

A field f = cx d/dx + cy d/dy + cz d/dz acts on scalars as a derivation
and pairs with another field through the Lie bracket
[f, g] = f(g) - g(f), computed componentwise from formal partials.

proportional_to answers "is f a scalar multiple of ref" by dividing one
component exactly and then verifying the candidate multiple against all
three components.  The verification is the authority: a quotient that
does not reproduce f exactly means "not proportional", never an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .symbolic import Expr, ZERO, as_expr, differentiate

_COORDS = ("x", "y", "z")


def _expr(v) -> Expr:
    return v if isinstance(v, Expr) else as_expr(v)


@dataclass(frozen=True)
class VectorField:
    cx: Expr
    cy: Expr
    cz: Expr

    @staticmethod
    def of(cx, cy, cz) -> "VectorField":
        return VectorField(_expr(cx), _expr(cy), _expr(cz))

    def components(self):
        return (self.cx, self.cy, self.cz)

    def is_zero_field(self) -> bool:
        return not (self.cx.terms or self.cy.terms or self.cz.terms)

    def scaled(self, phi) -> "VectorField":
        phi = _expr(phi)
        return VectorField(phi * self.cx, phi * self.cy, phi * self.cz)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.cx + other.cx, self.cy + other.cy,
                           self.cz + other.cz)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.cx - other.cx, self.cy - other.cy,
                           self.cz - other.cz)

    def __neg__(self) -> "VectorField":
        return VectorField(-self.cx, -self.cy, -self.cz)

    def __str__(self):
        return f"({self.cx}, {self.cy}, {self.cz})"


ZERO_FIELD = VectorField(ZERO, ZERO, ZERO)


def apply_to_scalar(f: VectorField, phi) -> Expr:
    """Directional derivative f(phi) = cx phi_x + cy phi_y + cz phi_z."""
    phi = _expr(phi)
    out = ZERO
    for comp, v in zip(f.components(), _COORDS):
        if comp.terms:
            out = out + comp * differentiate(phi, v)
    return out


def lie_bracket(f: VectorField, g: VectorField) -> VectorField:
    """[f, g], antisymmetric and R-bilinear, satisfying Jacobi."""
    comps = []
    for gi, fi in zip(g.components(), f.components()):
        acc = ZERO
        for fl, gl, v in zip(f.components(), g.components(), _COORDS):
            if fl.terms:
                acc = acc + fl * differentiate(gi, v)
            if gl.terms:
                acc = acc - gl * differentiate(fi, v)
        comps.append(acc)
    return VectorField(*comps)


_REDUCTION_CAP = 5000


def _has_negative(e: Expr) -> bool:
    return any(k < 0 for m, _ in e.terms for _, k in m)


def exact_div(num: Expr, den: Expr) -> Optional[Expr]:
    """Exact quotient num/den, or None when the division does not come
    out even.  Monomial divisors divide term by term; multi-term
    divisors go through leading-term reduction under a lexicographic
    term order, with a final product check as the authority.  The
    quotient never introduces negative powers absent from the inputs."""
    num, den = _expr(num), _expr(den)
    if not den.terms:
        raise ZeroDivisionError("division by a zero expression")
    if not num.terms:
        return ZERO
    if len(den.terms) == 1:
        q = num / den
        if q * den != num:
            return None
        if _has_negative(q) and not (_has_negative(num)
                                     or _has_negative(den)):
            return None
        return q
    atoms = sorted({a for m, _ in num.terms for a, _ in m}
                   | {a for m, _ in den.terms for a, _ in m},
                   key=lambda a: a.key)
    index = {a: i for i, a in enumerate(atoms)}

    def dense(mono):
        row = [0] * len(atoms)
        for a, k in mono:
            row[index[a]] = k
        return tuple(row)

    den_mono, den_coeff = max(den.terms, key=lambda t: dense(t[0]))
    den_exp = dense(den_mono)
    quot = ZERO
    rem = num
    for _ in range(_REDUCTION_CAP):
        if not rem.terms:
            break
        rem_mono, rem_coeff = max(rem.terms, key=lambda t: dense(t[0]))
        diff = [r - d for r, d in zip(dense(rem_mono), den_exp)]
        if any(v < 0 for v in diff):
            return None
        t_mono = tuple((a, v) for a, v in zip(atoms, diff) if v)
        t = Expr(((t_mono, rem_coeff / den_coeff),))
        quot = quot + t
        rem = rem - t * den
    if rem.terms:
        return None
    return quot if quot * den == num else None


def proportional_to(f: VectorField, ref: VectorField) -> Optional[Expr]:
    """Scalar phi with f = phi * ref, or None if no such multiple exists.

    The pivot is the first nonzero component of ref in the order x, y, z;
    the candidate from the pivot division must reproduce every component.
    """
    pivot_index = None
    for idx, comp in enumerate(ref.components()):
        if comp.terms:
            pivot_index = idx
            break
    if pivot_index is None:
        raise ValueError("reference field is zero")
    q = exact_div(f.components()[pivot_index], ref.components()[pivot_index])
    if q is None:
        return None
    for fc, rc in zip(f.components(), ref.components()):
        if q * rc != fc:
            return None
    return q
