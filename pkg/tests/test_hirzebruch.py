import pytest

from toricstack.hirzebruch import compare_bundle_with_toric, hirzebruch_fan, toric_degree
from toricstack.stackyfan import validate


@pytest.mark.parametrize("a", [(-1, 0), (1, 0), (0, 0), (-2, 0), (0, 1)])
def test_bundle_matches_toric(a):
    rep = compare_bundle_with_toric(a, 2)
    assert rep.passed, [c.to_dict() for c in rep.failures]
    assert rep.info["k"] == a[1] - a[0]


def test_hirzebruch_fans_are_valid():
    for k in range(-2, 4):
        assert validate(hirzebruch_fan(k)).ok


def test_degree_dictionary():
    assert toric_degree((-1, 0), 2, (3, 1)) == (5, 1, 2, 2)
