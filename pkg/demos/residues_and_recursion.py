"""Residues of the I-function against the recursion coefficients.

For P^1 the restriction to the fixed point of the first cone has simple poles
at ``z = -chi/c``; each residue is the recursion coefficient times the
restriction at the other fixed point, shifted by the edge degree.
"""
from toricstack import IContext, StackyFan, check_C2, i_restriction, rec_coefficient, rec_coefficient_derived, render

p1 = StackyFan.from_rays([[1], [-1]], [[0], [1]])
ctx = IContext(p1)
b = p1.zero_box()

series = i_restriction(ctx, (0,), b, 2)
for (D, lam), value in series.items():
    print(f"q^{lam[1]}: {render(value)}")

print()
for c in (1, 2, 3):
    closed = rec_coefficient(ctx, (0,), (1,), b, c).value
    derived = rec_coefficient_derived(ctx, (0,), (1,), b, c).value
    rep = check_C2(ctx, (0,), (1,), b, c, 3)
    print(f"c={c}: derived Rec = {render(derived)}, closed form = {render(closed)}; "
          f"residue identity {'holds' if rep.passed else 'fails'} on {len(rep.checks)} degrees, "
          f"closed form with the minus sign {'holds' if rep.info['closed_form_holds'] else 'fails'}")
