"""Candidate evapotranspiration surfaces: closed families, descriptor
parsing, and grid verification."""

import math
import random
from fractions import Fraction

import pytest

from liehouse.closure import delta_ij, delta_ijk
from liehouse.evapo import (
    CharacteristicFamily, PoleError, TanhConstants, characteristic_line,
    default_grid, descriptor_to_expr, e_characteristic, e_tanh, make_grid,
    parse_descriptor, verify_candidate,
)
from liehouse.model import demo_params
from liehouse.symbolic import (
    as_expr, eval_numeric, is_zero, substitute, var,
)

from conftest import rand_params, rand_univariate

X, Y = var("x"), var("y")
F = Fraction


def _tanh_reference(p, c, x, y):
    g1 = float(p.gamma_entry(1, c.i))
    g2 = float(p.gamma_entry(2, c.i))
    arg = (float(c.c1) * g1 - float(c.c2) * g2 * x
           + float(c.c2) * g1 * y) / g1
    return 1.0 / (float(c.c4) + float(c.c3) * math.tanh(arg))


# -- tanh family --------------------------------------------------------

def test_tanh_family_evaluates_like_reference():
    p = demo_params()
    c = TanhConstants.of(F(1), F(2), F(1), F(3), 1)
    e = e_tanh(p, c)
    rng = random.Random(4)
    for _ in range(10):
        x, y = rng.uniform(-1, 1), rng.uniform(-1, 1)
        got = eval_numeric(e, {X: x, Y: y})
        assert got == pytest.approx(_tanh_reference(p, c, x, y), abs=1e-12)


def test_tanh_family_kills_its_own_delta_exactly():
    p = demo_params()
    for i in (1, 2, 3):
        e = e_tanh(p, TanhConstants.of(F(1), F(2), F(1), F(3), i))
        assert delta_ij(p, e, i, i) == as_expr(0)


def test_tanh_family_argument_scaling_invariance():
    # scaling C2 by s while scaling coordinates by 1/s leaves E fixed
    p = demo_params()
    base = TanhConstants.of(F(1), F(2), F(1), F(3), 1)
    s = F(5, 2)
    scaled = TanhConstants.of(F(1), F(2) * s, F(1), F(3), 1)
    e_base = e_tanh(p, base)
    e_scaled = substitute(e_tanh(p, scaled), {X: X * (1 / s),
                                              Y: Y * (1 / s)})
    assert is_zero(e_base - e_scaled, random.Random(8))


def test_tanh_constants_validation():
    with pytest.raises(ValueError):
        TanhConstants.of(F(1), F(1), F(0), F(0), 1)
    with pytest.raises(ValueError):
        TanhConstants.of(F(1), F(1), F(1), F(1), 4)


# -- characteristic-line families ---------------------------------------

def test_characteristic_line_is_annihilated():
    p = demo_params()
    for i in (1, 2, 3):
        line = characteristic_line(p, i)
        g1 = as_expr(p.gamma_entry(1, i))
        g2 = as_expr(p.gamma_entry(2, i))
        assert line == X * -p.gamma_entry(2, i) + Y * p.gamma_entry(1, i)
        from liehouse.fields import VectorField, apply_to_scalar
        d_i = VectorField(g1, g2, as_expr(0))
        assert apply_to_scalar(d_i, line) == as_expr(0)


def test_two_shape_family_kills_cross_delta(rng):
    p = demo_params()
    f1 = rand_univariate(rng, degree=5)
    f2 = rand_univariate(rng, degree=5)
    fam = CharacteristicFamily(f1=f1, f2=f2, i=1, j=2)
    e = e_characteristic(p, fam)
    assert delta_ij(p, e, 1, 2) == as_expr(0)
    assert delta_ij(p, e, 2, 1) == as_expr(0)


def test_diagonal_term_normalizes_delta_to_one(rng):
    p = demo_params()
    fam = CharacteristicFamily(f1=rand_univariate(rng),
                               f2=rand_univariate(rng),
                               i=1, j=2, diagonal_term=True)
    e = e_characteristic(p, fam)
    assert delta_ij(p, e, 1, 2) == as_expr(1)


def test_three_shape_family_kills_third_order(rng):
    p = demo_params()
    fam = CharacteristicFamily(f1=rand_univariate(rng, degree=5),
                               f2=rand_univariate(rng, degree=5),
                               f3=rand_univariate(rng, degree=5),
                               i=1, j=2, k=3)
    e = e_characteristic(p, fam)
    assert delta_ijk(p, e, 1, 2, 3) == as_expr(0)


def test_family_validation():
    quad = X * X
    with pytest.raises(ValueError):
        CharacteristicFamily(f1=quad, f2=quad, i=1, j=5)
    with pytest.raises(ValueError):
        CharacteristicFamily(f1=quad, f2=quad, i=1, j=2, f3=quad)
    with pytest.raises(ValueError):
        CharacteristicFamily(f1=quad, f2=quad, i=1, j=2, k=3,
                             diagonal_term=True)
    with pytest.raises(ValueError):
        CharacteristicFamily(f1=X * Y, f2=quad, i=1, j=2)


# -- descriptors --------------------------------------------------------

def test_descriptor_tanh():
    p = demo_params()
    spec = parse_descriptor("tanh:1,2,1,3,1")
    assert descriptor_to_expr(p, "tanh:1,2,1,3,1") == \
        e_tanh(p, TanhConstants.of(F(1), F(2), F(1), F(3), 1))
    assert spec is not None


def test_descriptor_char_variants():
    p = demo_params()
    e = descriptor_to_expr(p, "char:1,2:x^2;x^3")
    fam = CharacteristicFamily(f1=parse_poly("x^2"), f2=parse_poly("x^3"),
                               i=1, j=2)
    assert e == e_characteristic(p, fam)
    e_diag = descriptor_to_expr(p, "char:1,2,diag:x^2;x^3")
    assert e_diag != e
    e3 = descriptor_to_expr(p, "char:1,2,3:x^2;x^3;x^2+x")
    assert e3 is not None


def parse_poly(text):
    from liehouse.parsing import parse
    return parse(text)


def test_descriptor_expr_passthrough():
    p = demo_params()
    assert descriptor_to_expr(p, "expr:x*y + tanh(x)") is not None


@pytest.mark.parametrize("bad", [
    "", "tanh", "tanh:1,2", "tanh:1,2,0,0,1", "tanh:1,2,1,3,9",
    "char:1:x", "char:1,2:x^2", "char:1,2,9:x;x;x", "spline:1",
    "expr:", "char:1,2:x^2;x^(",
])
def test_descriptor_errors(bad):
    with pytest.raises(ValueError):
        parse_descriptor(bad) and descriptor_to_expr(demo_params(), bad)


# -- grids and verification ---------------------------------------------

def test_make_grid_inclusive_bounds():
    pts = make_grid(3, 2, 0.0, 1.0, 0.0, 1.0)
    assert len(pts) == 6
    xs = sorted({p[0] for p in pts})
    ys = sorted({p[1] for p in pts})
    assert xs == [0.0, 0.5, 1.0]
    assert ys == [0.0, 1.0]
    assert len(default_grid()) == 25


def test_verify_candidate_flags_tanh_tension():
    p = demo_params()
    e = e_tanh(p, TanhConstants.of(F(1), F(2), F(1), F(3), 1))
    rep = verify_candidate(p, e)
    assert not rep.passed
    assert rep.tension_indices == [1]
    assert rep.heisenberg_tension
    assert rep.delta[(1, 1)].max_abs <= 1e-9
    assert rep.delta[(1, 2)].max_abs <= 1e-9
    assert rep.grid_size == 25
    assert len(rep.delta3) == 27
    assert len(rep.lam) == 27
    d = rep.to_dict()
    assert d["delta"]["11"]["max_abs"] <= 1e-9
    assert d["seed"] == 0


def test_verify_candidate_pole_is_reported():
    p = demo_params()
    e = descriptor_to_expr(p, "expr:1/(x - 1/2)")
    grid = make_grid(3, 3, 0.0, 1.0, 0.0, 1.0)  # hits x = 0.5 exactly
    with pytest.raises(PoleError) as err:
        verify_candidate(p, e, grid=grid)
    assert "0.5" in str(err.value)


def test_verify_candidate_random_params(rng):
    for _ in range(2):
        p = rand_params(rng)
        e = e_tanh(p, TanhConstants.of(F(1), F(2), F(1), F(3), 2))
        rep = verify_candidate(p, e)
        assert 2 in rep.tension_indices
        assert rep.delta[(2, 2)].max_abs <= 1e-9
