"""Stacky fans: validation, cones, anticones, box elements, quotients, S-extensions.

Ray indices are 0-based.  Cones are sorted tuples of ray indices; a fan is
given by its maximal cones and every face is generated automatically.

Elements of ``N = Z^r + Z/t_1 + ... + Z/t_s`` are integer tuples with the free
coordinates first and the torsion coordinates reduced modulo ``t_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

from . import intlin
from .errors import InvalidFan
from .intlin import FinAbGroup, GaleDualData, Quotient

Cone = tuple


def _cone(indices: Iterable[int]) -> Cone:
    return tuple(sorted(set(int(i) for i in indices)))


def frac(x: Fraction) -> Fraction:
    """Fractional part in [0, 1)."""
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class BoxElement:
    element: tuple
    minimal_cone: Cone
    fracs: tuple
    age: Fraction

    def frac(self, i: int) -> Fraction:
        return self.fracs[i] if i < len(self.fracs) else Fraction(0)

    def is_zero(self) -> bool:
        return not any(self.element)

    def __str__(self) -> str:
        fr = ",".join(str(f) for f in self.fracs)
        return f"Box[{','.join(map(str, self.element))}; fracs=({fr}); age={self.age}]"


@dataclass(frozen=True)
class AdjacentPair:
    sigma: Cone
    sigma_prime: Cone
    j: int
    j_prime: int


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    where: tuple = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, eq=False)
class StackyFan:
    """``(N, Sigma, rho)`` with ``Sigma`` generated from ``max_cones``.

    ``projection`` and ``parent_rays`` are set only on quotient fans: they
    record the map from the parent group and which parent ray each ray is.
    """

    group: FinAbGroup
    rays: tuple
    max_cones: tuple
    projection: Quotient | None = field(default=None, repr=False)
    parent_rays: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(self.group.reduce(r) if len(r) == self.group.dim else tuple(r) for r in self.rays))
        object.__setattr__(self, "max_cones", tuple(sorted({_cone(c) for c in self.max_cones})))

    @classmethod
    def from_rays(cls, rays, max_cones, torsion=(), rank=None) -> "StackyFan":
        rays = [tuple(int(x) for x in r) for r in rays]
        if rank is None:
            rank = (len(rays[0]) if rays else 0) - len(torsion)
        return cls(FinAbGroup(rank, tuple(torsion)), tuple(rays), tuple(max_cones))

    @property
    def n(self) -> int:
        return len(self.rays)

    @property
    def rank(self) -> int:
        return self.group.free_rank

    def ray_bar(self, i: int) -> tuple:
        """Image of ``rho_i`` in ``N (x) Q`` (the free coordinates)."""
        return self.rays[i][: self.rank]

    @cached_property
    def rho(self) -> list:
        """Ray matrix, one column per ray."""
        return intlin.transpose([list(r) for r in self.rays], self.group.dim)

    @cached_property
    def rho_bar(self) -> list:
        return self.rho[: self.rank]

    @cached_property
    def cones(self) -> tuple:
        out = {()}
        for c in self.max_cones:
            for k in range(1, len(c) + 1):
                out.update(combinations(c, k))
        return tuple(sorted(out, key=lambda c: (len(c), c)))

    @cached_property
    def _cone_set(self) -> frozenset:
        return frozenset(self.cones)

    def has_cone(self, cone: Iterable[int]) -> bool:
        return _cone(cone) in self._cone_set

    def cone_matrix(self, cone: Cone) -> list:
        """Free parts of the rays of ``cone``, as columns."""
        return [[self.rays[i][r] for i in cone] for r in range(self.rank)]

    @cached_property
    def gale(self) -> GaleDualData:
        return intlin.gale_dual(self.rho, self.group, self.n)

    def top_cones(self) -> list:
        return [c for c in self.cones if len(c) == self.rank]

    def anticones(self) -> frozenset:
        full = set(range(self.n))
        return frozenset(_cone(full - set(c)) for c in self.cones)

    def adjacent_pairs(self) -> list:
        tops = self.top_cones()
        out = []
        for s in tops:
            for t in tops:
                if s == t:
                    continue
                common = set(s) & set(t)
                if len(common) == self.rank - 1:
                    (j,) = set(s) - common
                    (jp,) = set(t) - common
                    out.append(AdjacentPair(s, t, j, jp))
        return out

    def adjacent(self, sigma: Cone, sigma_prime: Cone) -> AdjacentPair | None:
        sigma, sigma_prime = _cone(sigma), _cone(sigma_prime)
        if sigma == sigma_prime or not (self.has_cone(sigma) and self.has_cone(sigma_prime)):
            return None
        if len(sigma) != self.rank or len(sigma_prime) != self.rank:
            return None
        common = set(sigma) & set(sigma_prime)
        if len(common) != self.rank - 1:
            return None
        (j,) = set(sigma) - common
        (jp,) = set(sigma_prime) - common
        return AdjacentPair(sigma, sigma_prime, j, jp)

    def link(self, sigma: Cone) -> list:
        sigma = _cone(sigma)
        return [i for i in range(self.n) if i not in sigma and self.has_cone(sigma + (i,))]

    def coordinates_in_cone(self, vec_bar: Sequence, cone: Cone) -> list | None:
        """Rational ``c`` with ``sum c_i rho_bar_i = vec_bar`` over ``cone``, or None."""
        A = self.cone_matrix(cone)
        if not cone:
            return [] if not any(vec_bar) else None
        return intlin.solve_q(A, list(vec_bar))

    def minimal_cone_of(self, vec_bar: Sequence) -> tuple[Cone, list] | None:
        """Smallest cone whose relative interior contains ``vec_bar``."""
        for cone in self.cones:
            c = self.coordinates_in_cone(vec_bar, cone)
            if c is not None and all(x > 0 for x in c):
                return cone, c
        return None

    def add(self, *vs) -> tuple:
        out = [0] * self.group.dim
        for v in vs:
            out = [a + b for a, b in zip(out, v)]
        return self.group.reduce(out)

    def scale(self, k: int, v) -> tuple:
        return self.group.reduce([k * x for x in v])

    def box_element(self, element: Sequence[int], cone: Cone) -> BoxElement | None:
        """Canonical box element for ``element`` if its image lies in the box of ``cone``."""
        element = self.group.reduce(element)
        c = self.coordinates_in_cone(element[: self.rank], cone)
        if c is None or any(x < 0 or x >= 1 for x in c):
            return None
        fracs = [Fraction(0)] * self.n
        for i, x in zip(cone, c):
            fracs[i] = Fraction(x)
        minimal = tuple(i for i in cone if fracs[i] != 0)
        return BoxElement(element, minimal, tuple(fracs), sum(fracs, Fraction(0)))

    def box_of_cone(self, sigma: Cone) -> list:
        """All ``b in N`` whose image is ``sum c_i rho_bar_i`` with ``0 <= c_i < 1`` over ``sigma``."""
        sigma = _cone(sigma)
        k = len(sigma)
        reps_bar = []
        if k == 0:
            reps_bar.append(tuple([0] * self.rank))
        else:
            A = self.cone_matrix(sigma)
            snf = intlin.smith_normal_form(A)
            d = snf.invariant_factors
            if any(x == 0 for x in d):
                raise InvalidFan(f"cone {sigma} is not simplicial")
            seen = set()
            for ts in product(*(range(di) for di in d)):
                cp = [Fraction(t, di) for t, di in zip(ts, d)]
                c = [frac(sum(snf.right[i][l] * cp[l] for l in range(k))) for i in range(k)]
                y = [sum(A[r][i] * c[i] for i in range(k)) for r in range(self.rank)]
                yb = tuple(int(v) for v in y)
                if yb not in seen:
                    seen.add(yb)
                    reps_bar.append(yb)
        out = []
        for yb in reps_bar:
            for tors in product(*(range(t) for t in self.group.torsion)):
                be = self.box_element(yb + tuple(tors), sigma)
                assert be is not None
                out.append(be)
        out.sort(key=lambda b: (b.age, b.minimal_cone, b.element))
        return out

    def box(self) -> list:
        """``Box(Sigma)``: deduplicated union over all cones."""
        seen = {}
        for cone in self.cones:
            for b in self.box_of_cone(cone):
                seen.setdefault(b.element, b)
        return sorted(seen.values(), key=lambda b: (b.age, b.minimal_cone, b.element))

    def box_involution(self, b: BoxElement) -> BoxElement:
        """``inv(b) = sum_{k in sigma(b)} rho_k - b``."""
        elt = self.add(*(self.rays[k] for k in b.minimal_cone), self.scale(-1, b.element))
        out = self.box_element(elt, b.minimal_cone)
        assert out is not None
        return out

    def zero_box(self) -> BoxElement:
        return BoxElement(tuple([0] * self.group.dim), (), tuple([Fraction(0)] * self.n), Fraction(0))

    def in_cone_lattice(self, v: Sequence[int], sigma: Cone) -> bool:
        """Whether ``v`` lies in ``N_sigma``, the span of ``rho_i`` for ``i in sigma``."""
        v = self.group.reduce(v)
        c = self.coordinates_in_cone(v[: self.rank], sigma)
        if c is None or any(x.denominator != 1 for x in c):
            return False
        rest = self.add(v, *(self.scale(-int(ci), self.rays[i]) for i, ci in zip(sigma, c)))
        return not any(rest)

    def element_order(self, v: Sequence[int], sigma: Cone) -> int:
        """Order of ``v`` in ``N / N_sigma`` (finite for top-dimensional ``sigma``)."""
        bound = abs(intlin.det(self.cone_matrix(sigma))) * self.group.order_of_torsion if len(sigma) == self.rank else 10**6
        for k in range(1, bound + 1):
            if self.in_cone_lattice(self.scale(k, v), sigma):
                return k
        raise InvalidFan("element has infinite order modulo the cone lattice")

    @cached_property
    def trivial_extension(self) -> "SExtendedFan":
        return SExtendedFan(self, ())

    def validate(self) -> ValidationReport:
        return validate(self)

    def quotient_fan(self, sigma: Cone) -> "StackyFan":
        return quotient_fan(self, sigma)

    def extend(self, s_vectors) -> "SExtendedFan":
        return extend(self, s_vectors)


def validate(fan: StackyFan) -> ValidationReport:
    v: list = []
    for i, r in enumerate(fan.rays):
        if len(r) != fan.group.dim:
            v.append(Violation("ray_dimension", f"ray {i} has {len(r)} coordinates, expected {fan.group.dim}", (i,)))
    if v:
        return ValidationReport(tuple(v))
    for c in fan.max_cones:
        bad = [i for i in c if not 0 <= i < fan.n]
        if bad:
            v.append(Violation("cone_index", f"cone {c} references unknown rays {bad}", c))
    if v:
        return ValidationReport(tuple(v))
    for i in range(fan.n):
        if not any(fan.ray_bar(i)):
            v.append(Violation("torsion_ray", f"ray {i} has zero image in N (x) Q", (i,)))
    for c in fan.cones:
        if c and intlin.rank(fan.cone_matrix(c)) < len(c):
            v.append(Violation("non_simplicial", f"rays of cone {c} are linearly dependent", c))
    used = {i for c in fan.max_cones for i in c}
    for i in range(fan.n):
        if i not in used:
            v.append(Violation("unused_ray", f"ray {i} lies in no cone", (i,)))
    if fan.rank and intlin.rank(fan.rho_bar or [[]]) < fan.rank:
        v.append(Violation("infinite_cokernel", "rays do not span N (x) Q", ()))
    return ValidationReport(tuple(v))


def top_cones(fan: StackyFan) -> list:
    return fan.top_cones()


def anticones(fan: StackyFan) -> frozenset:
    return fan.anticones()


def adjacent_pairs(fan: StackyFan) -> list:
    return fan.adjacent_pairs()


def box_of_cone(fan: StackyFan, sigma: Cone) -> list:
    return fan.box_of_cone(sigma)


def box_involution(fan: StackyFan, b: BoxElement) -> BoxElement:
    return fan.box_involution(b)


def quotient_fan(fan: StackyFan, sigma: Cone) -> StackyFan:
    """``(N(sigma), Sigma/sigma, rho(sigma))`` with the projection ``N -> N(sigma)`` attached."""
    sigma = _cone(sigma)
    if not sigma:
        return fan
    rel = [list(fan.rays[i]) for i in sigma]
    rel = intlin.transpose(rel)
    rel = [row + list(tr) for row, tr in zip(rel, fan.group.relations())]
    proj = intlin.quotient(rel, fan.group.dim)
    lk = fan.link(sigma)
    index = {p: k for k, p in enumerate(lk)}
    rays = tuple(proj.project(fan.rays[i]) for i in lk)
    cones = [tuple(index[i] for i in c if i not in sigma) for c in fan.max_cones if set(sigma) <= set(c)]
    return StackyFan(proj.group, rays, tuple(cones), projection=proj, parent_rays=tuple(lk))


@dataclass(frozen=True, eq=False)
class SExtendedFan:
    """A stacky fan together with extra vectors ``s_1..s_m`` in ``N``."""

    base: StackyFan
    s_vectors: tuple

    def __post_init__(self):
        object.__setattr__(self, "s_vectors", tuple(self.base.group.reduce(s) for s in self.s_vectors))

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return len(self.s_vectors)

    @cached_property
    def columns(self) -> tuple:
        """``rho^S(e_i)`` for every extended index."""
        return tuple(self.base.rays) + self.s_vectors

    @cached_property
    def rho_s(self) -> list:
        return intlin.transpose([list(c) for c in self.columns], self.base.group.dim)

    @cached_property
    def gale(self) -> GaleDualData:
        return intlin.gale_dual(self.rho_s, self.base.group, self.n + self.m)

    @cached_property
    def anticones_s(self) -> frozenset:
        ext = set(range(self.n, self.n + self.m))
        return frozenset(_cone(set(a) | ext) for a in self.base.anticones())

    def column_bar(self, i: int) -> tuple:
        return self.columns[i][: self.base.rank]

    @cached_property
    def s_splittings(self) -> tuple:
        """For each ``s_j``: its minimal cone and the coefficients of ``s_bar_j`` there."""
        out = []
        for s in self.s_vectors:
            found = self.base.minimal_cone_of(s[: self.base.rank])
            if found is None:
                raise InvalidFan(f"extension vector {s} lies outside the fan support")
            out.append((found[0], tuple(Fraction(x) for x in found[1])))
        return tuple(out)


def extend(fan: StackyFan, s_vectors) -> SExtendedFan:
    return SExtendedFan(fan, tuple(tuple(int(x) for x in s) for s in s_vectors))


def check_sequences(fan_or_ext) -> "Report":
    """``rho . K = 0`` in ``N`` for the kernel basis ``K``, and ``rho^vee o rho^* = 0`` on ``N^vee``."""
    from .report import Report

    ext = fan_or_ext if isinstance(fan_or_ext, SExtendedFan) else fan_or_ext.trivial_extension
    fan = ext.base
    gale = ext.gale
    cols = ext.columns
    rep = Report("fan sequence exactness")
    rep.info.update(kernel_rank=gale.kernel_rank, kernel=[list(r) for r in gale.kernel_basis])
    for c in range(gale.kernel_rank):
        image = fan.add(*(fan.scale(gale.kernel_basis[i][c], cols[i]) for i in range(len(cols))))
        rep.add(f"rho(K_{c}) = 0", not any(image), lhs=list(image), rhs="0")
    for t in range(fan.rank):
        functional = [ext.column_bar(i)[t] for i in range(len(cols))]
        image = gale.dual_image(functional)
        rep.add(f"rho_vee(rho_star(e*_{t})) = 0", not any(image), lhs=list(image), rhs="0")
    return rep
