import math
from fractions import Fraction
from itertools import product

from hypothesis import assume, given, strategies as st

from toricstack import intlin
from toricstack.stackyfan import StackyFan, check_sequences, validate


def parallelepiped_points(M):
    """Integer points sum c_k rho_k with 0 <= c_k < 1; ``M`` has the rays as columns."""
    r = len(M)
    lo = [sum(min(0, x) for x in row) for row in M]
    hi = [sum(max(0, x) for x in row) for row in M]
    inv = intlin.inverse_q(M)
    pts = []
    for v in product(*(range(l, h + 1) for l, h in zip(lo, hi))):
        c = [sum(inv[i][t] * v[t] for t in range(r)) for i in range(r)]
        if all(0 <= x < 1 for x in c):
            pts.append(tuple(v))
    return sorted(pts)


@st.composite
def complete_fans_2d(draw):
    vecs = draw(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=3, max_size=6, unique=True))
    vecs = [v for v in vecs if v != (0, 0)]
    angles = {}
    for v in vecs:
        angles.setdefault(round(math.atan2(v[1], v[0]), 12), v)
    rays = [angles[a] for a in sorted(angles)]
    assume(len(rays) >= 3)
    ang = sorted(angles)
    gaps = [ang[i + 1] - ang[i] for i in range(len(ang) - 1)] + [2 * math.pi - ang[-1] + ang[0]]
    assume(all(g < math.pi - 1e-9 for g in gaps))
    n = len(rays)
    return StackyFan.from_rays([list(v) for v in rays], [[i, (i + 1) % n] for i in range(n)])


def test_p121_box(p121):
    box = p121.box_of_cone((0, 2))
    assert len(box) == 2
    twisted = [b for b in box if not b.is_zero()][0]
    assert twisted.element == (0, -1)
    assert twisted.fracs == (Fraction(1, 2), 0, Fraction(1, 2))
    assert twisted.age == 1
    assert p121.box_involution(twisted).element == (0, -1)
    assert sorted(b.age for b in p121.box()) == [0, 1]


def test_involution_thirds():
    fan = StackyFan.from_rays([[1, 0], [1, 3]], [[0, 1]])
    b = [x for x in fan.box_of_cone((0, 1)) if x.fracs == (Fraction(2, 3), Fraction(1, 3))][0]
    assert fan.box_involution(b).fracs == (Fraction(1, 3), Fraction(2, 3))


def test_c2z2_extra_element():
    fan = StackyFan.from_rays([[1, 0], [1, 2]], [[0, 1]])
    box = fan.box_of_cone((0, 1))
    assert sorted(b.fracs for b in box) == [(0, 0), (Fraction(1, 2), Fraction(1, 2))]


def test_cones_and_adjacency(p121):
    assert p121.top_cones() == [(0, 1), (0, 2), (1, 2)]
    pair = p121.adjacent((0, 1), (0, 2))
    assert (pair.j, pair.j_prime) == (1, 2)
    assert p121.adjacent((0, 1), (0, 1)) is None
    assert sorted(p121.anticones()) == [(0,), (0, 1), (0, 1, 2), (0, 2), (1,), (1, 2), (2,)]


def test_validate_reports_violations():
    assert validate(StackyFan.from_rays([[1], [-1]], [[0], [1]])).ok
    bad = validate(StackyFan.from_rays([[1], [-1], [2]], [[0], [1]]))
    assert [v.kind for v in bad.violations] == ["unused_ray"]
    dep = validate(StackyFan.from_rays([[1, 0], [2, 0], [0, 1]], [[0, 1], [2]]))
    assert "non_simplicial" in [v.kind for v in dep.violations]


def test_quotient_fan(p121):
    q = p121.quotient_fan((2,))
    assert q.group.free_rank == 1 and q.group.torsion == ()
    assert q.parent_rays == (0, 1)
    assert q.rays[0] == tuple(-x for x in q.rays[1]) or q.rays[0][0] * q.rays[1][0] < 0


def test_extension_p1():
    fan = StackyFan.from_rays([[1], [-1]], [[0], [1]])
    ext = fan.extend([[1]])
    assert ext.gale.kernel_rank == 2
    assert all(2 in a for a in ext.anticones_s)


def test_extension_p121_twisted():
    ext = StackyFan.from_rays([[1, 0], [0, 1], [-1, -2]], [[0, 1], [1, 2], [0, 2]]).extend([[0, -1]])
    assert ext.gale.kernel_rank == 2 and len(ext.rho_s) == 2 and len(ext.rho_s[0]) == 4
    assert check_sequences(ext).passed


@given(complete_fans_2d())
def test_box_count_matches_parallelepiped(fan):
    for sigma in fan.top_cones():
        M = fan.cone_matrix(sigma)
        pts = parallelepiped_points(M)
        assert len(pts) == abs(intlin.det(M))
        assert sorted(b.element for b in fan.box_of_cone(sigma)) == pts


@given(complete_fans_2d())
def test_age_complement_and_involution(fan):
    for b in fan.box():
        bh = fan.box_involution(b)
        assert b.age + bh.age == sum(1 for f in b.fracs if f)
        assert fan.box_involution(bh) == b
        assert bh.minimal_cone == b.minimal_cone


@given(complete_fans_2d())
def test_anticone_duality(fan):
    full = set(range(fan.n))
    anti = fan.anticones()
    for a in anti:
        assert fan.has_cone(tuple(sorted(full - set(a))))
    for c in fan.cones:
        assert tuple(sorted(full - set(c))) in anti


@given(complete_fans_2d())
def test_complete_fans_validate(fan):
    assert validate(fan).ok
    assert check_sequences(fan).passed


def test_torsion_box_count():
    fan = StackyFan.from_rays([[1, 0], [-1, 1]], [[0], [1]], torsion=(2,))
    assert len(fan.box_of_cone((0,))) == 2
    assert check_sequences(fan).passed
