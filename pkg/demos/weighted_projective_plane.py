"""P(1,2,1): twisted sectors, degrees and football maps.

Run with ``python3 demos/weighted_projective_plane.py``.
"""
from toricstack import StackyFan, enumerate_degrees, football_maps

fan = StackyFan.from_rays([[1, 0], [0, 1], [-1, -2]], [[0, 1], [1, 2], [0, 2]])
print("top cones:", fan.top_cones())
print("kernel of the fan sequence:", [row[0] for row in fan.gale.kernel_basis])

# the cone spanned by (1,0) and (-1,-2) has index 2, so it carries one twisted sector
for b in fan.box():
    inv = fan.box_involution(b)
    print(f"{b}  inverse {list(inv.element)}")

twisted = [b for b in fan.box() if not b.is_zero()][0]
print("\ndegrees up to 2 reducing to the twisted sector:")
for d in enumerate_degrees(fan, twisted, 2):
    print("  lambda =", "(" + ", ".join(map(str, d.coords)) + ")")

print("\nfootball maps leaving the orbifold chart through ray 2:")
for fm in football_maps(fan, (0, 2), (0, 1), twisted, 3):
    print(f"  c={fm.c}  c'={fm.c_prime}  b'={list(fm.b_prime.element)}  r1={fm.r1} r2={fm.r2}  D.d={[str(x) for x in fm.degree]}")
