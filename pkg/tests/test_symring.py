from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, strategies as st

from toricstack.errors import DivisionByNilpotent, HigherOrderPole, PoleAtEvaluationPoint
from toricstack.symring import (
    BaseAlgebra,
    LinearForm,
    canonicalize,
    cluster_residue,
    pole_inventory,
    render,
    residue_at,
    substitute_z,
    sym_ring,
    truncated_series,
)

R = sym_ring(1)
RH = sym_ring(1, BaseAlgebra.projective(1))
RH2 = sym_ring(1, BaseAlgebra.projective(2))
chi = LinearForm((1,))
rats = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def ex(ring, s):
    return ring.from_expr(sympy.sympify(s))


def test_basic_arithmetic():
    x = ex(R, "chi1")
    assert x / x == R.one()
    assert (ex(R, "1/(chi1 - z)") + ex(R, "1/(z - chi1)")).is_zero()
    inv = 1 / ex(RH, "chi1 + H")
    assert inv == ex(RH, "1/chi1 - H/chi1**2")
    with pytest.raises(DivisionByNilpotent):
        1 / RH.H()


def test_substitute_examples():
    assert substitute_z(ex(R, "z**2"), chi) == ex(R, "chi1**2")
    assert substitute_z(ex(RH, "1/z"), LinearForm((1,), 1)) == ex(RH, "1/chi1 - H/chi1**2")
    with pytest.raises(PoleAtEvaluationPoint):
        substitute_z(ex(R, "1/(z - chi1)"), chi)


def test_residue_examples():
    assert residue_at(ex(R, "1/(z*(chi1 - z))"), chi) == ex(R, "-1/chi1")
    assert residue_at(ex(R, "z/(chi1 + z)"), chi).is_zero()
    with pytest.raises(HigherOrderPole):
        residue_at(ex(R, "1/(z - chi1)**2"), chi)


def test_pole_inventory_examples():
    inv = pole_inventory(ex(R, "1/(z**2*(chi1 + 3*z))"))
    assert inv.poles == ((LinearForm((Fraction(-1, 3),)), 1),)
    assert inv.zero_order == 2
    assert pole_inventory(ex(R, "z**3 + chi1")).poles == ()
    inv = pole_inventory(ex(R, "1/((chi1 + z)*(chi1 + 2*z))"))
    assert sorted(p.chi for p, _ in inv.poles) == [(-1,), (Fraction(-1, 2),)]


def test_truncated_series_examples():
    assert truncated_series("exp", R.zero(), 4) == R.one()
    assert truncated_series("log", RH.one() + RH.H(), 2) == RH.H()
    U = sym_ring(0, extra=("U", "x"))
    got = truncated_series("power", ex(U, "U + x"), 3, var="x", exponent=-1)
    assert got == ex(U, "1/U - x/U**2 + x**2/U**3 - x**3/U**4")


def test_render_is_canonical():
    a = ex(RH, "1/((chi1 + z)*(2*chi1 + z)) + H/z")
    b = ex(RH, "H/z + 1/((2*chi1 + z)*(z + chi1))")
    assert render(a) == render(b)
    assert render(RH.zero()) == "0"


@given(st.lists(rats, min_size=2, max_size=4, unique=True), st.integers(0, 1))
def test_residues_sum_to_zero(locs, with_zero):
    assume(all(a != 0 for a in locs))
    # 1/prod(z - a_k chi) decays like z^-2 at infinity, so the finite residues cancel
    s = "1/(" + "*".join(f"(z - ({a})*chi1)" for a in locs) + ")"
    if with_zero:
        s = f"{s}/z"
    f = ex(R, s)
    total = R.zero()
    for a in locs:
        r = residue_at(f, chi.scale(a))
        assert r == cluster_residue(f, chi.scale(a))
        total = total + r
    if with_zero:
        total = total + residue_at(f, LinearForm((0,)))
    assert total.is_zero()


@given(st.lists(st.tuples(rats, st.sampled_from([-2, -1, 1, 2])), min_size=1, max_size=3), rats, rats)
def test_substitute_matches_taylor(factors, p, eps):
    assume(all(a != p for a, _ in factors))
    z, c, H = sympy.symbols("z chi1 H")
    F = sympy.Integer(1)
    for a, e in factors:
        F *= (z - sympy.Rational(a.numerator, a.denominator) * c) ** e
    pp = sympy.Rational(p.numerator, p.denominator)
    ee = sympy.Rational(eps.numerator, eps.denominator)
    taylor = sum(sympy.diff(F, z, k).subs(z, pp * c) * (ee * H) ** k / sympy.factorial(k) for k in range(3))
    got = substitute_z(RH2.from_expr(F), LinearForm((p,), eps))
    assert got == RH2.from_expr(taylor)


@given(st.lists(st.tuples(rats, st.integers(-2, 2)), min_size=1, max_size=3), rats)
def test_canonicalize_idempotent(factors, h):
    s = "*".join(f"(z - ({a})*chi1 + ({h})*H)**({e})" for a, e in factors)
    f = ex(RH2, s)
    once = canonicalize(f)
    twice = canonicalize(once)
    assert once == f and twice == once
    assert [(c.numer, c.denom) for c in twice.comps] == [(c.numer, c.denom) for c in once.comps]
    assert hash(once) == hash(f)
    assert render(once) == render(f)
