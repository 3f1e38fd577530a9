"""F_1 computed as a P^1-bundle over P^1 and as a toric surface.

The bundle route keeps the base class H; the toric route recovers it from the
two fixed points on each section.  Every coefficient agrees.
"""
from toricstack.hirzebruch import compare_bundle_with_toric

for a in [(-1, 0), (1, 0)]:
    rep = compare_bundle_with_toric(a, 2)
    print(rep.name, "->", "agree" if rep.passed else "DISAGREE", f"({len(rep.checks)} coefficients)")
    for c in rep.checks[:3]:
        print("   ", c.label, "|", c.lhs)
