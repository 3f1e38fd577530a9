from fractions import Fraction
from math import floor

import pytest
import sympy

from toricstack.degrees import football_maps
from toricstack.errors import FractionalPartMismatch
from toricstack.ifunc import (
    BundleData,
    IContext,
    base_j,
    check_C1,
    check_C2,
    fixed_weights,
    hyper_factor,
    i_restriction,
    rec_coefficient,
    rec_coefficient_derived,
)
from toricstack.stackyfan import StackyFan
from toricstack.symring import BaseAlgebra, LinearForm, sym_ring

from conftest import fan_of

H = Fraction(1, 2)
P1_BASE = BaseAlgebra.projective(1)


def lf(*chi, h=0):
    return LinearForm(tuple(chi), h)


def test_fixed_weights_examples(p1, p121):
    assert fixed_weights(p1, BundleData(), (0,)).weights == (lf(1), lf(0))
    assert fixed_weights(p121, BundleData(), (0, 1)).weights == (lf(1, 0), lf(0, 1), lf(0, 0))
    w = fixed_weights(p1, BundleData(P1_BASE, (1, 0)), (0,)).weights
    assert w[0] == lf(1, h=-1)


def test_weights_are_dual_basis(p121):
    for sigma in p121.top_cones():
        U = fixed_weights(p121, BundleData(), sigma).weights
        for k in sigma:
            for l in sigma:
                pairing = sum(U[k].chi[t] * p121.rays[l][t] for t in range(2))
                assert pairing == (1 if k == l else 0)


def test_hyper_factor_examples():
    R = sym_ring(1)
    assert hyper_factor(R, lf(1), 0) == R.one()
    want = R.from_expr(sympy.sympify("1/((chi1 + z)*(chi1 + 2*z))"))
    assert hyper_factor(R, lf(1), 2) == want
    assert hyper_factor(R, lf(0), -1).is_zero()
    assert hyper_factor(R, lf(1), 3, 1) == want


def test_base_j():
    R = sym_ring(1, P1_BASE)
    assert base_j(P1_BASE, 0, R) == R.one()
    assert base_j(P1_BASE, 1, R) == R.from_expr(sympy.sympify("1/(H + z)**2"))
    # coefficient form of the quantum differential equation: (H + D z)^2 J_D = J_(D-1)
    for D in range(1, 4):
        lhs = (R.H() + R.zsym() * D) ** 2 * base_j(P1_BASE, D, R)
        assert lhs == base_j(P1_BASE, D - 1, R)
    assert base_j(BaseAlgebra.point(), 1).is_zero()


def test_p1_restriction(p1):
    ctx = IContext(p1)
    s = i_restriction(ctx, (0,), p1.zero_box(), 2)
    z, c = sympy.symbols("z chi1")
    for d in range(3):
        expected = 1 / (sympy.prod([(c + a * z) for a in range(1, d + 1)]) * sympy.factorial(d) * z**d)
        assert s[(0, (d, d))] == ctx.ring.from_expr(expected)


def test_twisted_sector_starts_half_integer(p121):
    ctx = IContext(p121)
    b = [x for x in p121.box_of_cone((0, 2)) if not x.is_zero()][0]
    s = i_restriction(ctx, (0, 2), b, 1).nonzero()
    assert min(lam for _, lam in s.keys()) == (H, 1, H)


@pytest.mark.parametrize("name", ["p1", "p121", "p1_ext", "c2z2", "f1_toric"])
def test_degree_zero_normalization(name):
    fan = fan_of(name)
    ctx = IContext(fan)
    zero = (0, tuple(Fraction(0) for _ in range(ctx.size)))
    for sigma in fan.top_cones():
        for b in fan.box_of_cone(sigma):
            s = i_restriction(ctx, sigma, b, 1)
            if b.is_zero():
                assert s[zero] == ctx.ring.one()
            else:
                assert zero not in s.terms or s[zero].is_zero()


def test_rec_examples(p1):
    ctx = IContext(p1)
    R = ctx.ring
    U = R.linear(lf(1))
    assert rec_coefficient(ctx, (0,), (1,), p1.zero_box(), 1).value == 1 / U
    assert rec_coefficient(ctx, (0,), (1,), p1.zero_box(), 2).value == 2 / U**3
    with pytest.raises(FractionalPartMismatch):
        rec_coefficient(ctx, (0,), (1,), p1.zero_box(), H)


def test_closed_and_derived_rec_differ_by_sign_parity(p1):
    ctx = IContext(p1)
    for c in (1, 2, 3):
        closed = rec_coefficient(ctx, (0,), (1,), p1.zero_box(), c).value
        derived = rec_coefficient_derived(ctx, (0,), (1,), p1.zero_box(), c).value
        assert derived == (-closed if c % 2 else closed)


CASES = [
    ("p1", BundleData()),
    ("p121", BundleData()),
    ("f1_toric", BundleData()),
    ("p1", BundleData(P1_BASE, (-1, 0))),
    ("p1", BundleData(P1_BASE, (1, 0))),
    ("p1", BundleData(P1_BASE, (2, -1))),
]


@pytest.mark.parametrize("name,bundle", CASES)
def test_adjacency_weight_identity(name, bundle):
    fan = fan_of(name)
    for pair in fan.adjacent_pairs():
        U = fixed_weights(fan, bundle, pair.sigma).weights
        Up = fixed_weights(fan, bundle, pair.sigma_prime).weights
        for b in fan.box_of_cone(pair.sigma):
            for fm in football_maps(fan, pair.sigma, pair.sigma_prime, b, 3):
                for i in range(fan.n):
                    assert U[i] == Up[i] + U[fm.j].scale(fm.degree[i] / fm.c)


def test_factorial_identity():
    Uj = sympy.Symbol("U")
    count = 0
    for f in (Fraction(0), H, Fraction(1, 3)):
        for c in [f + k for k in range(0 if f else 1, 4)]:
            for mu in [f + k for k in range(0, 6)]:
                if mu < c:
                    continue
                lhs = sympy.Integer(1)
                a = f if f else Fraction(1)
                while a <= mu:
                    if a != c:
                        lhs *= Uj - sympy.Rational(a.numerator, a.denominator) * Uj / sympy.Rational(c.numerator, c.denominator)
                    a += 1
                rhs = sympy.Integer(1)
                mu_p = mu - c
                for k in range(floor(-c) + 1, floor(mu_p) + 1):
                    if k != 0:
                        rhs *= -k * Uj / sympy.Rational(c.numerator, c.denominator)
                assert sympy.simplify(lhs - rhs) == 0
                count += 1
    assert count > 20


def test_c1_vacuous_and_p1(p1):
    ctx = IContext(p1)
    assert check_C1(ctx, (0,), p1.zero_box(), 0).passed
    rep = check_C1(ctx, (0,), p1.zero_box(), 2)
    assert rep.passed and len(rep.checks) == 3


def test_c2_examples(p1, p121):
    assert check_C2(IContext(p1), (0,), (1,), p1.zero_box(), 1, 3).passed
    rep = check_C2(IContext(p121), (0, 1), (0, 2), p121.zero_box(), 1, 2)
    assert rep.passed
    bundle = IContext(p1, BundleData(P1_BASE, (1, 0)))
    rep = check_C2(bundle, (0,), (1,), p1.zero_box(), 1, 2)
    assert rep.passed and any("H" in c.lhs for c in rep.checks)
