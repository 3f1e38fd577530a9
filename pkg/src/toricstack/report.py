"""Machine-readable verification reports."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


def jsonable(x):
    """Plain JSON tree with rationals as ``"p/q"`` strings."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


@dataclass
class Check:
    label: str
    passed: bool
    lhs: str = ""
    rhs: str = ""
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"label": self.label, "passed": self.passed}
        if not self.passed or self.lhs or self.rhs:
            d["lhs"] = self.lhs
            d["rhs"] = self.rhs
        if self.detail:
            d["detail"] = jsonable(self.detail)
        return d


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def add(self, label: str, passed: bool, lhs="", rhs="", **detail) -> Check:
        c = Check(label, bool(passed), str(lhs), str(rhs), detail)
        self.checks.append(c)
        return c

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "count": len(self.checks),
            "failures": len(self.failures),
            "info": jsonable(self.info),
            "checks": [c.to_dict() for c in self.checks],
        }
