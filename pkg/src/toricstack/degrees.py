"""Extended degrees, the reduction map, and football data between adjacent cones.

An extended degree is a vector ``lam`` in ``Q^(n+m)`` with ``rho^S . lam = 0``.
Coordinates ``0..n-1`` pair with the ray divisors, ``n..n+m-1`` are the
extension exponents ``k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Sequence

from . import intlin
from .errors import NotAdjacent, NotInLambdaS, UnboundedCone, FractionalPartMismatch
from .stackyfan import BoxElement, SExtendedFan, StackyFan, frac, _cone


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def as_extended(fan_or_ext) -> SExtendedFan:
    if isinstance(fan_or_ext, SExtendedFan):
        return fan_or_ext
    return fan_or_ext.trivial_extension


@dataclass(frozen=True)
class ExtendedDegree:
    coords: tuple
    home_cone: tuple
    reduction: BoxElement

    @property
    def k(self) -> tuple:
        return self.coords[len(self.reduction.fracs):]


def is_in_kernel(ext: SExtendedFan, lam: Sequence) -> bool:
    r = ext.base.rank
    return all(sum(ext.columns[i][row] * lam[i] for i in range(len(lam))) == 0 for row in range(r))


def integral_witness(ext: SExtendedFan, lam: Sequence) -> tuple | None:
    """Minimal cone ``sigma`` with ``lam`` in ``Lambda^S_sigma``, or None."""
    n = ext.n
    if any(Fraction(x).denominator != 1 for x in lam[n:]):
        return None
    support = _cone(i for i in range(n) if Fraction(lam[i]).denominator != 1)
    return support if ext.base.has_cone(support) else None


def reduce(ext, lam: Sequence, cone: Sequence[int] | None = None) -> BoxElement:
    """``v^S(lam) = sum ceil(lam_i) rho_i + sum ceil(lam_(n+j)) s_j`` as a box element."""
    ext = as_extended(ext)
    lam = [Fraction(x) for x in lam]
    if len(lam) != ext.n + ext.m or not is_in_kernel(ext, lam):
        raise NotInLambdaS("degree is not in L^S (x) Q")
    sigma = integral_witness(ext, lam)
    if sigma is None:
        raise NotInLambdaS(f"no cone makes {tuple(map(str, lam))} integral off the cone")
    fan = ext.base
    v = fan.add(*(fan.scale(ceil_frac(x), c) for x, c in zip(lam, ext.columns)))
    b = fan.box_element(v, sigma if cone is None else _cone(cone))
    if b is None:
        raise NotInLambdaS("reduction does not land in the box of its cone")
    return b


def make_degree(ext, lam: Sequence, home_cone: Sequence[int] | None = None) -> ExtendedDegree:
    ext = as_extended(ext)
    lam = tuple(Fraction(x) for x in lam)
    b = reduce(ext, lam)
    home = _cone(home_cone) if home_cone is not None else b.minimal_cone
    return ExtendedDegree(lam, home, b)


@dataclass(frozen=True)
class DegreeFunctional:
    """A linear functional used to truncate degree enumerations.

    ``weights=None`` is the anticone default: at a top cone ``sigma`` the degree
    is ``sum_{i not in sigma} lam_i``, i.e. the coordinates dual to the anticone
    basis ``{D_i : i not in sigma}`` all get weight one.  An explicit weight
    vector ``w`` on ``Q^(n+m)`` gives ``deg(lam) = w . lam``.
    """

    weights: tuple | None = None

    def reduced(self, ext: SExtendedFan, sigma) -> dict:
        """Weights on the free coordinates ``i not in sigma`` after eliminating ``lam_sigma``."""
        chart = cone_chart(ext, _cone(sigma))
        if self.weights is None:
            return {i: Fraction(1) for i in chart.free}
        w = [Fraction(x) for x in self.weights]
        if len(w) != ext.n + ext.m:
            raise ValueError("degree functional has the wrong length")
        out = {}
        for i in chart.free:
            out[i] = w[i] - sum(w[k] * g for k, g in zip(chart.sigma, chart.g[i]))
            if out[i] <= 0:
                raise UnboundedCone(f"functional is not positive on direction {i} at cone {chart.sigma}")
        return out

    def degree(self, ext: SExtendedFan, sigma, lam: Sequence, lower: dict | None = None) -> Fraction:
        red = self.reduced(ext, sigma)
        lower = lower or {}
        return sum((red[i] * (Fraction(lam[i]) - lower.get(i, 0)) for i in red), Fraction(0))


@dataclass(frozen=True)
class ConeChart:
    """Solving ``lam_sigma`` from the coordinates off a top cone."""

    sigma: tuple
    free: tuple
    g: dict  # i -> M^{-1} rho_bar_i (coordinates over sigma)

    def complete(self, ext: SExtendedFan, values: dict) -> tuple:
        lam = [Fraction(0)] * (ext.n + ext.m)
        for i, x in values.items():
            lam[i] = Fraction(x)
        for pos, k in enumerate(self.sigma):
            lam[k] = -sum(lam[i] * self.g[i][pos] for i in self.free)
        return tuple(lam)


def cone_chart(ext: SExtendedFan, sigma: tuple) -> ConeChart:
    cache = ext.__dict__.setdefault("_charts", {})
    sigma = tuple(sigma)
    if sigma not in cache:
        cache[sigma] = _cone_chart(ext, sigma)
    return cache[sigma]


def _cone_chart(ext: SExtendedFan, sigma: tuple) -> ConeChart:
    fan = ext.base
    if len(sigma) != fan.rank:
        raise ValueError(f"{sigma} is not a top-dimensional cone")
    Minv = intlin.inverse_q(fan.cone_matrix(sigma)) if sigma else []
    free = tuple(i for i in range(ext.n + ext.m) if i not in sigma)
    g = {}
    for i in free:
        col = ext.column_bar(i)
        g[i] = tuple(sum(Minv[a][b] * col[b] for b in range(fan.rank)) for a in range(len(sigma)))
    return ConeChart(sigma, free, g)


def _bounded_vectors(weights: list, bound: Fraction):
    """Non-negative integer vectors ``mu`` with ``sum w_i mu_i <= bound``."""
    if not weights:
        yield ()
        return
    w0, rest = weights[0], weights[1:]
    k = 0
    while k * w0 <= bound:
        for tail in _bounded_vectors(rest, bound - k * w0):
            yield (k,) + tail
        k += 1


def degrees_at_cone(ext, sigma, bound, b: BoxElement | None = None, functional: DegreeFunctional | None = None,
                    lower: dict | None = None) -> list:
    """Extended degrees in ``Lambda^S_sigma`` with ``lam_i >= lower_i`` off ``sigma``.

    Only degrees of functional value ``<= bound`` are returned (measured from
    the lower corner), filtered to ``v^S(lam) == b`` when ``b`` is given.
    """
    ext = as_extended(ext)
    sigma = _cone(sigma)
    functional = functional or DegreeFunctional()
    lower = lower or {}
    bound = Fraction(bound)
    if bound < 0:
        return []
    chart = cone_chart(ext, sigma)
    red = functional.reduced(ext, sigma)
    free = list(chart.free)
    out = []
    for mu in _bounded_vectors([red[i] for i in free], bound):
        vals = {i: lower.get(i, 0) + x for i, x in zip(free, mu)}
        lam = chart.complete(ext, vals)
        v = reduce(ext, lam, sigma)
        if b is not None and v.element != b.element:
            continue
        out.append(ExtendedDegree(lam, sigma, v))
    out.sort(key=lambda d: (functional.degree(ext, sigma, d.coords, lower), d.coords))
    return out


def enumerate_degrees(ext, b: BoxElement, bound, functional: DegreeFunctional | None = None) -> list:
    """Effective extended degrees reducing to ``b`` with degree at most ``bound``.

    Effective means: ``lam`` lies in ``Lambda^S_sigma`` for some top cone with
    ``lam_i >= 0`` for every ``i`` off ``sigma`` (extension exponents included).
    """
    ext = as_extended(ext)
    seen: dict = {}
    for sigma in ext.base.top_cones():
        for d in degrees_at_cone(ext, sigma, bound, b, functional):
            seen.setdefault(d.coords, d)
    return [seen[k] for k in sorted(seen)]


def _adjacent_or_raise(fan: StackyFan, sigma, sigma_prime):
    pair = fan.adjacent(sigma, sigma_prime)
    if pair is None:
        raise NotAdjacent(f"cones {tuple(sigma)} and {tuple(sigma_prime)} are not adjacent top cones")
    return pair


@dataclass(frozen=True)
class EdgeDegree:
    degree: tuple  # D_i . d for every ray i
    c_prime: Fraction
    c_common: dict  # i in sigma ∩ sigma' -> c_i


def edge_degree_data(fan: StackyFan, sigma, sigma_prime, c) -> EdgeDegree:
    """Solve ``c rho_j + sum c_i rho_i + c' rho_j' = 0`` over ``sigma'``."""
    pair = _adjacent_or_raise(fan, sigma, sigma_prime)
    c = Fraction(c)
    rhs = [-c * x for x in fan.ray_bar(pair.j)]
    coeffs = fan.coordinates_in_cone(rhs, pair.sigma_prime)
    sol = dict(zip(pair.sigma_prime, coeffs))
    d = [Fraction(0)] * fan.n
    d[pair.j] = c
    for i, x in sol.items():
        d[i] = Fraction(x)
    common = {i: sol[i] for i in pair.sigma_prime if i != pair.j_prime}
    return EdgeDegree(tuple(d), Fraction(sol[pair.j_prime]), common)


def edge_degree(fan: StackyFan, sigma, sigma_prime, c) -> tuple:
    """``d_{c,sigma,j}`` as the vector of pairings ``D_i . d``."""
    return edge_degree_data(fan, sigma, sigma_prime, c).degree


@dataclass(frozen=True)
class FootballMap:
    sigma: tuple
    sigma_prime: tuple
    j: int
    j_prime: int
    b: BoxElement
    c: Fraction
    b_prime: BoxElement
    c_prime: Fraction
    r1: int
    r2: int
    q_prime: int
    degree: tuple
    c_common: tuple  # ((i, c_i), ...) over sigma ∩ sigma'


def football_map(fan: StackyFan, sigma, sigma_prime, b: BoxElement, c) -> FootballMap:
    pair = _adjacent_or_raise(fan, sigma, sigma_prime)
    c = Fraction(c)
    bhat = fan.box_involution(b)
    if c <= 0 or frac(c) != bhat.frac(pair.j):
        raise FractionalPartMismatch(f"<{c}> does not match the inverse box coordinate {bhat.frac(pair.j)} on ray {pair.j}")
    ed = edge_degree_data(fan, pair.sigma, pair.sigma_prime, c)
    fl = floor(c)
    y = fan.scale(-1, fan.add(bhat.element, fan.scale(fl, fan.rays[pair.j])))
    coords = fan.coordinates_in_cone(y[: fan.rank], pair.sigma_prime)
    shift = fan.add(*(fan.scale(-floor(x), fan.rays[i]) for i, x in zip(pair.sigma_prime, coords)))
    b_prime = fan.box_element(fan.add(y, shift), pair.sigma_prime)
    q_prime = floor(ed.c_prime)
    r1 = fan.element_order(bhat.element, pair.sigma)
    r2 = fan.element_order(b_prime.element, pair.sigma_prime)
    return FootballMap(pair.sigma, pair.sigma_prime, pair.j, pair.j_prime, b, c, b_prime, ed.c_prime,
                       r1, r2, q_prime, ed.degree, tuple(sorted(ed.c_common.items())))


def admissible_c(fan: StackyFan, sigma, sigma_prime, b: BoxElement, c_bound) -> list:
    pair = _adjacent_or_raise(fan, sigma, sigma_prime)
    start = fan.box_involution(b).frac(pair.j)
    c_bound = Fraction(c_bound)
    out = []
    c = start if start > 0 else Fraction(1)
    while c <= c_bound:
        out.append(c)
        c += 1
    return out


def football_maps(fan: StackyFan, sigma, sigma_prime, b: BoxElement, c_bound) -> list:
    """All football data with ``0 < c <= c_bound`` and ``<c> = inv(b)_j``."""
    return [football_map(fan, sigma, sigma_prime, b, c) for c in admissible_c(fan, sigma, sigma_prime, b, c_bound)]


def congruence_holds(fan: StackyFan, fm: FootballMap) -> bool:
    """``inv(b) + floor(c) rho_j + q' rho_j' + b'`` lies in the span of ``rho_i``, ``i`` in both cones."""
    bhat = fan.box_involution(fm.b)
    total = fan.add(bhat.element, fan.scale(floor(fm.c), fan.rays[fm.j]),
                    fan.scale(fm.q_prime, fan.rays[fm.j_prime]), fm.b_prime.element)
    common = tuple(i for i in fm.sigma if i in fm.sigma_prime)
    return fan.in_cone_lattice(total, common)


def pairings_hold(fan: StackyFan, fm: FootballMap) -> bool:
    """The four ``D_i . d`` conditions and ``rho_bar . d = 0``."""
    d = fm.degree
    common = dict(fm.c_common)
    for i in range(fan.n):
        if i == fm.j:
            ok = d[i] == fm.c
        elif i == fm.j_prime:
            ok = d[i] == fm.c_prime
        elif i in common:
            ok = d[i] == common[i]
        else:
            ok = d[i] == 0
        if not ok:
            return False
    return all(sum(fan.rays[i][r] * d[i] for i in range(fan.n)) == 0 for r in range(fan.rank))
