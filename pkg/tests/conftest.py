import json

import pytest
from hypothesis import settings

from toricstack import fixture_path
from toricstack.stackyfan import StackyFan

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def load_fixture(name):
    return json.loads(fixture_path(name).read_text())


def fan_of(name):
    raw = load_fixture(name)
    g = raw["group"]
    return StackyFan.from_rays(raw["rays"], raw["max_cones"], torsion=g.get("torsion", []), rank=g["rank"])


@pytest.fixture
def p1():
    return StackyFan.from_rays([[1], [-1]], [[0], [1]])


@pytest.fixture
def p121():
    return StackyFan.from_rays([[1, 0], [0, 1], [-1, -2]], [[0, 1], [1, 2], [0, 2]])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
