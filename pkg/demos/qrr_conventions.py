"""G-functions and the two sign conventions for the quantum Riemann-Roch factor."""
from fractions import Fraction

from toricstack.gfunc import check_g_identities, g_function, qrr_factor_identity

G = g_function(Fraction(1, 3), 1, 1)
print("G_{1/3}(x, z) to x^1 z^1:", G.render())

for y in (Fraction(0), Fraction(1, 2), Fraction(1, 3)):
    rep = check_g_identities(y)
    print(f"y={y}: {len(rep.checks)} coefficient identities, {'all hold' if rep.passed else 'failures'}")

half = Fraction(1, 2)
for mu, b in [(1, 0), (2, 0), (half, half), (3 * half, half)]:
    for conv in ("paper", "alternate"):
        ok, lhs, rhs = qrr_factor_identity(mu, b, 4, conv)
        print(f"mu={mu} b={b} {conv:9s} {'holds' if ok else 'fails'}: hyper = {lhs}; exp(G-difference) = {rhs}")
