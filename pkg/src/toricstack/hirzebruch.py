"""Two routes to the same Hirzebruch surface.

A ``P^1``-bundle over ``P^1`` twisted by ``a = (a_1, a_2)`` is the toric surface
``F_k`` with ``k = a_2 - a_1``.  The bundle route restricts to a fixed section
and keeps the base class ``H``; the toric route computes over a point with a
two-dimensional torus and recovers the ``H``-expansion from the two fixed
points on that section, in the limit where the base character vanishes.

Dictionary (fiber rays ``f1, f2``, base rays ``b1, b2``):

* ``Q^D q^(l1, l2)``  <->  toric degree ``(l1 - a_1 D, l2 - a_2 D, D, D)``
* ``H``  <->  the class of the divisor of ``b2``, restricting to ``-chi1`` at
  the ``b2`` fixed points and to ``0`` at the ``b1`` fixed points
* fiber character ``chi``  <->  ``chi2``
"""
from __future__ import annotations

from fractions import Fraction

from .ifunc import BundleData, IContext, i_coefficient, i_restriction
from .report import Report
from .stackyfan import StackyFan
from .symring import BaseAlgebra, SymExpr, render


F1, F2, B1, B2 = 0, 1, 2, 3


def fiber_p1() -> StackyFan:
    return StackyFan.from_rays([[1], [-1]], [[0], [1]])


def hirzebruch_fan(k: int) -> StackyFan:
    """``F_k`` with rays ``f1=(0,1), f2=(0,-1), b1=(1,0), b2=(-1,-k)``."""
    rays = [[0, 1], [0, -1], [1, 0], [-1, -k]]
    cones = [[F1, B1], [B1, F2], [F2, B2], [B2, F1]]
    return StackyFan.from_rays(rays, cones)


def toric_degree(a: tuple, D: int, lam: tuple) -> tuple:
    return (Fraction(lam[0]) - a[0] * D, Fraction(lam[1]) - a[1] * D, Fraction(D), Fraction(D))


def _at_chi1_zero(ring, f):
    """Evaluate a toric-ring field element at ``chi1 = 0``; None on a pole."""
    x = ring.poly_ring.gens[0]
    zero = ring.poly_ring.zero
    den = f.denom.compose(x, zero)
    if not den:
        return None
    return ring.field(f.numer.compose(x, zero)) / ring.field(den)


def _to_bundle(bring, tring, f):
    """Rename ``chi2 -> chi1`` (the fiber character); ``f`` must be free of ``chi1``."""
    def conv(p):
        out = {}
        for (e1, e2, ez), c in p.terms():
            if e1:
                raise ValueError("toric expression still depends on chi1")
            out[(e2, ez)] = c
        return bring.poly_ring.from_dict(out) if out else bring.poly_ring.zero

    return bring.field(conv(f.numer)) / bring.field(conv(f.denom))


def toric_as_bundle(tctx: IContext, bctx: IContext, section: int, D: int, lam: tuple, a: tuple) -> SymExpr | None:
    """The bundle-side value ``A + B H`` reconstructed from the two toric fixed points."""
    tring, bring = tctx.ring, bctx.ring
    lam_t = toric_degree(a, D, lam)
    f_b1 = i_coefficient(tctx, (section, B1), 0, lam_t).comps[0]
    f_b2 = i_coefficient(tctx, (section, B2), 0, lam_t).comps[0]
    A = _at_chi1_zero(tring, f_b1)
    diff = (f_b2 - f_b1) / (-tring.gens[0]) if f_b2 != f_b1 else tring.field.zero
    B = _at_chi1_zero(tring, diff)
    if A is None or B is None:
        return None
    return SymExpr(bring, (_to_bundle(bring, tring, A), _to_bundle(bring, tring, B)))


def compare_bundle_with_toric(a: tuple = (-1, 0), truncation=3) -> Report:
    """Coefficientwise comparison of the two routes on both fiber sections."""
    a = tuple(int(x) for x in a)
    fiber = fiber_p1()
    bctx = IContext(fiber, BundleData(BaseAlgebra.projective(1), a))
    k = a[1] - a[0]
    tctx = IContext(hirzebruch_fan(k), BundleData())
    rep = Report(f"bundle over P^1 with a={list(a)} vs toric F_{k}")
    rep.info.update(a=list(a), k=k, truncation=Fraction(truncation),
                    dictionary="Q^D q^lam <-> (lam1 - a1 D, lam2 - a2 D, D, D); H <-> [D_b2]; chi <-> chi2")
    for section in (F1, F2):
        series = i_restriction(bctx, (section,), fiber.zero_box(), truncation)
        for (D, lam), val in series.items():
            got = toric_as_bundle(tctx, bctx, section, D, lam, a)
            label = f"section={section} D={D} lam=({','.join(map(str, lam))})"
            if got is None:
                rep.add(label, False, lhs=render(val), rhs="pole at chi1 = 0")
                continue
            rep.add(label, got == val, lhs=render(val), rhs=render(got))
    return rep
