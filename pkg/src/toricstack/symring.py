"""Exact rational functions in torus characters and ``z`` over a nilpotent base.

A :class:`SymExpr` is a tuple ``(f_0, ..., f_N)`` meaning ``sum_k f_k H^k`` with
``H^(N+1) = 0``.  Each ``f_k`` is an element of the rational function field
``Q(chi_1, ..., chi_r, z)`` (a sympy ``FracElement``), so equality is exact and
every value is kept reduced.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

from sympy import QQ
from sympy.polys.fields import field as frac_field

from .errors import (
    DivisionByNilpotent,
    ExpansionVariableAmbiguous,
    HigherOrderPole,
    NonLinearFactor,
    PoleAtEvaluationPoint,
)


def qq(x) -> "QQ":
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


@dataclass(frozen=True)
class BaseAlgebra:
    """``Q[H]/(H^(N+1))``: the cohomology of a point (``N = 0``) or of ``P^N``."""

    kind: str = "point"
    dim: int = 0

    def __post_init__(self):
        if self.kind not in ("point", "projective"):
            raise ValueError(f"unknown base kind {self.kind!r}")
        if self.kind == "point" and self.dim != 0:
            raise ValueError("a point has dimension 0")

    @classmethod
    def point(cls) -> "BaseAlgebra":
        return cls("point", 0)

    @classmethod
    def projective(cls, n: int) -> "BaseAlgebra":
        return cls("projective", int(n))

    @property
    def nilpotent_order(self) -> int:
        return self.dim + 1

    def __str__(self) -> str:
        return "point" if self.kind == "point" else f"P^{self.dim}"


@dataclass(frozen=True)
class LinearForm:
    """``sum chi_coeffs[k] chi_(k+1) + h * H`` with rational coefficients."""

    chi: tuple
    h: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "chi", tuple(Fraction(x) for x in self.chi))
        object.__setattr__(self, "h", Fraction(self.h))

    @classmethod
    def zero(cls, r: int) -> "LinearForm":
        return cls((0,) * r)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(a + b for a, b in zip(self.chi, other.chi)), self.h + other.h)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + other.scale(-1)

    def __neg__(self) -> "LinearForm":
        return self.scale(-1)

    def scale(self, c) -> "LinearForm":
        c = Fraction(c)
        return LinearForm(tuple(c * a for a in self.chi), c * self.h)

    def chi_part(self) -> "LinearForm":
        return LinearForm(self.chi)

    def is_zero(self) -> bool:
        return not any(self.chi) and not self.h

    def __str__(self) -> str:
        parts = []
        for k, a in enumerate(self.chi):
            if a:
                parts.append(f"{a}*chi{k + 1}")
        if self.h:
            parts.append(f"{self.h}*H")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


class SymRing:
    """Rational functions in ``chi_1..chi_r``, optional extra symbols, and ``z``, over a base algebra."""

    def __init__(self, nchi: int, base: BaseAlgebra = BaseAlgebra(), extra: tuple = ()):
        self.nchi = nchi
        self.base = base
        self.extra = tuple(extra)
        self.names = tuple(f"chi{k + 1}" for k in range(nchi)) + self.extra + ("z",)
        K, *gens = frac_field(",".join(self.names), QQ)
        self.field = K
        self.poly_ring = K.ring
        self.gens = tuple(gens)
        self.z = gens[-1]
        self.z_index = len(gens) - 1
        self.z_poly = self.poly_ring.gens[-1]

    @property
    def order(self) -> int:
        return self.base.nilpotent_order

    def __repr__(self) -> str:
        return f"SymRing({self.names}, base={self.base})"

    def gen(self, name: str):
        return self.gens[self.names.index(name)]

    # constructors
    def scalar(self, f) -> "SymExpr":
        """Embed a field element (or rational) as ``f * H^0``."""
        if isinstance(f, (int, Fraction)):
            f = self.field(qq(f))
        return SymExpr(self, (f,) + (self.field.zero,) * (self.order - 1))

    def zero(self) -> "SymExpr":
        return self.scalar(0)

    def one(self) -> "SymExpr":
        return self.scalar(1)

    def H(self) -> "SymExpr":
        comps = [self.field.zero] * self.order
        if self.order > 1:
            comps[1] = self.field.one
        return SymExpr(self, tuple(comps))

    def zsym(self) -> "SymExpr":
        return self.scalar(self.z)

    def chi_poly(self, form: LinearForm):
        """The ``chi``-part of ``form`` as a polynomial."""
        p = self.poly_ring.zero
        for c, g in zip(form.chi, self.poly_ring.gens):
            if c:
                p += qq(c) * g
        return p

    def linear(self, form: LinearForm) -> "SymExpr":
        comps = [self.field.zero] * self.order
        comps[0] = self.field(self.chi_poly(form))
        if self.order > 1:
            comps[1] = self.field(qq(form.h))
        return SymExpr(self, tuple(comps))

    def linear_plus_z(self, form: LinearForm, a) -> "SymExpr":
        """``form + a z``."""
        return self.linear(form) + self.scalar(self.z * qq(a))

    def form_from_poly(self, p) -> LinearForm:
        """Inverse of :meth:`chi_poly`; raises if ``p`` is not a linear form in the ``chi``."""
        coeffs = [Fraction(0)] * self.nchi
        for monom, c in p.terms():
            deg = sum(monom)
            idx = [k for k, e in enumerate(monom) if e]
            if deg != 1 or idx[0] >= self.nchi:
                raise NonLinearFactor(f"{p} is not a linear form in the characters")
            coeffs[idx[0]] = to_fraction(c)
        return LinearForm(tuple(coeffs))

    def from_expr(self, expr) -> "SymExpr":
        """Build from a sympy expression in the ring's symbol names and ``H``."""
        import sympy

        Hs = sympy.Symbol("H")
        expr = sympy.sympify(expr)
        comps = []
        for k in range(self.order):
            ck = expr.diff(Hs, k).subs(Hs, 0) / factorial(k) if k else expr.subs(Hs, 0)
            comps.append(self.field.from_expr(sympy.together(ck)) if ck != 0 else self.field.zero)
        return SymExpr(self, tuple(comps))


@lru_cache(maxsize=None)
def sym_ring(nchi: int, base: BaseAlgebra = BaseAlgebra(), extra: tuple = ()) -> SymRing:
    return SymRing(nchi, base, extra)


@dataclass(frozen=True, eq=False)
class SymExpr:
    ring: SymRing = dc_field(repr=False)
    comps: tuple

    def _coerce(self, other) -> "SymExpr":
        if isinstance(other, SymExpr):
            if other.ring is not self.ring:
                raise ValueError("mixing expressions from different rings")
            return other
        if isinstance(other, LinearForm):
            return self.ring.linear(other)
        return self.ring.scalar(other)

    def __add__(self, other):
        o = self._coerce(other)
        return SymExpr(self.ring, tuple(a + b for a, b in zip(self.comps, o.comps)))

    __radd__ = __add__

    def __neg__(self):
        return SymExpr(self.ring, tuple(-a for a in self.comps))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        N = len(self.comps)
        out = [self.ring.field.zero] * N
        for i, a in enumerate(self.comps):
            if not a:
                continue
            for j in range(N - i):
                if o.comps[j]:
                    out[i + j] += a * o.comps[j]
        return SymExpr(self.ring, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> "SymExpr":
        """Geometric series ``b^{-1} = b_0^{-1} sum (-(b - b_0)/b_0)^k``; finite by nilpotency."""
        b0 = self.comps[0]
        if not b0:
            raise DivisionByNilpotent("divisor vanishes modulo nilpotents")
        N = len(self.comps)
        out = [self.ring.field.zero] * N
        out[0] = 1 / b0
        for k in range(1, N):
            acc = self.ring.field.zero
            for i in range(1, k + 1):
                if self.comps[i]:
                    acc += self.comps[i] * out[k - i]
            out[k] = -acc / b0
        return SymExpr(self.ring, tuple(out))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        out = self.ring.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except ValueError:
            return NotImplemented
        # FracElement equality is representational (sign of the denominator), so compare differences
        return all(a == b or not (a - b) for a, b in zip(self.comps, o.comps))

    def __hash__(self):
        return hash(tuple(str(c) for c in canonicalize(self).comps))

    def is_zero(self) -> bool:
        return not any(self.comps)

    def is_z_free(self) -> bool:
        zi = self.ring.z_index
        return all(c.numer.degree(zi) <= 0 and c.denom.degree(zi) <= 0 for c in self.comps)

    def map(self, fn) -> "SymExpr":
        return SymExpr(self.ring, tuple(fn(c) for c in self.comps))

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"SymExpr({render(self)})"


def arith(a: SymExpr, b: SymExpr, op: str) -> SymExpr:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "sub":
        return a - b
    raise ValueError(f"unknown operation {op!r}")


def canonicalize(f: SymExpr) -> SymExpr:
    """Reduced numerator and denominator, with the denominator's leading coefficient positive."""
    K = f.ring.field
    out = []
    for c in f.comps:
        if not c:
            out.append(K.zero)
            continue
        g = K(c.numer) / K(c.denom)
        if g.denom.LC < 0:
            g = g.new(-g.numer, -g.denom)
        out.append(g)
    return SymExpr(f.ring, tuple(out))


# --- evaluation in z -------------------------------------------------------


def _eval_z(ring: SymRing, c, w0poly):
    """Substitute ``z = w0`` into one field element; None if the denominator vanishes."""
    den = c.denom.compose(ring.z_poly, w0poly)
    if not den:
        return None
    num = c.numer.compose(ring.z_poly, w0poly)
    return ring.field(num) / ring.field(den)


def substitute_z(f: SymExpr, z0: LinearForm) -> SymExpr:
    """``f`` at ``z = z0``; the ``H``-part of ``z0`` is handled by a finite Taylor expansion."""
    ring = f.ring
    N = ring.order
    w0 = ring.chi_poly(z0)
    eps = qq(z0.h)
    out = [ring.field.zero] * N
    for k, fk in enumerate(f.comps):
        if not fk:
            continue
        deriv = fk
        for l in range(N - k):
            if l and not eps:
                break
            val = _eval_z(ring, deriv, w0)
            if val is None:
                raise PoleAtEvaluationPoint(f"pole at z = {z0}")
            if l:
                val = val * eps**l / factorial(l)
            out[k + l] += val
            deriv = deriv.diff(ring.z)
    return SymExpr(ring, tuple(out))


def z_minus(ring: SymRing, z0: LinearForm) -> SymExpr:
    return ring.zsym() - ring.linear(z0)


def residue_at(f: SymExpr, z0: LinearForm) -> SymExpr:
    """``Res_{z=z0} f dz = ((z - z0) f)|_{z=z0}`` for an at most simple pole."""
    g = z_minus(f.ring, z0) * f
    w0 = f.ring.chi_poly(z0)
    for c in g.comps:
        if c and not c.denom.compose(f.ring.z_poly, w0):
            raise HigherOrderPole(f"pole at z = {z0} is not simple")
    return substitute_z(g, z0)


def _pole_order_at(ring: SymRing, c, w0poly) -> int:
    lin = ring.z_poly - w0poly
    e = 0
    den = c.denom
    while not den.compose(ring.z_poly, w0poly):
        den = den.exquo(lin)
        e += 1
    return e


def cluster_residue(f: SymExpr, w0: LinearForm) -> SymExpr:
    """``sum_k H^k Res_{z=w0} f_k``: residue of each component at the ``chi``-point ``w0``.

    Uses derivatives of ``(z - w0)^e f_k``, independent of :func:`residue_at`.
    """
    ring = f.ring
    wp = ring.chi_poly(w0.chi_part())
    lin = ring.field(ring.z_poly - wp)
    out = []
    for c in f.comps:
        if not c:
            out.append(ring.field.zero)
            continue
        e = _pole_order_at(ring, c, wp)
        if e == 0:
            out.append(ring.field.zero)
            continue
        g = c * lin**e
        for _ in range(e - 1):
            g = g.diff(ring.z)
        val = _eval_z(ring, g, wp)
        out.append(val / factorial(e - 1))
    return SymExpr(ring, tuple(out))


@dataclass(frozen=True)
class PoleInventory:
    poles: tuple  # ((LinearForm chi-part, multiplicity), ...) away from 0 and infinity
    zero_order: int
    infinity_order: int


def pole_inventory(f: SymExpr) -> PoleInventory:
    """Finite nonzero ``z``-poles grouped by ``chi``-location.

    For the component ``f_k`` of ``H^k`` a pole of order ``e_k`` at the location
    counts as ``e_k - k``: a simple pole at ``w0 + eps*H`` expands into poles of
    order ``k + 1`` in ``f_k``.  Multiplicities are at least one.
    """
    ring = f.ring
    zi = ring.z_index
    found: dict = {}
    zero = 0
    inf = None
    for k, c in enumerate(f.comps):
        if not c:
            continue
        d_inf = c.numer.degree(zi) - c.denom.degree(zi)
        inf = d_inf if inf is None else max(inf, d_inf)
        _, factors = c.denom.factor_list()
        for p, e in factors:
            dz = p.degree(zi)
            if dz <= 0:
                continue
            if dz > 1:
                raise NonLinearFactor(f"denominator factor {p} is not linear in z")
            alpha = p.coeff_wrt(zi, 1)
            if not alpha.is_ground:
                raise NonLinearFactor(f"z-coefficient of {p} depends on the characters")
            beta = p.coeff_wrt(zi, 0)
            form = ring.form_from_poly(-beta * (1 / alpha.LC)) if beta else None
            mult = max(e - k, 1)
            if form is None:
                zero = max(zero, mult)
            else:
                found[form] = max(found.get(form, 0), mult)
    poles = tuple(sorted(found.items(), key=lambda kv: (kv[0].chi, kv[0].h)))
    return PoleInventory(poles, zero, inf if inf is not None else 0)


# --- truncated series ------------------------------------------------------


def _series_of(ring: SymRing, c, var_index: int, order: int) -> list:
    """Power series coefficients of ``c`` in the variable ``var_index`` up to ``order``."""
    num = [ring.field(c.numer.coeff_wrt(var_index, d)) for d in range(order + 1)]
    den = [ring.field(c.denom.coeff_wrt(var_index, d)) for d in range(order + 1)]
    if not den[0]:
        raise ExpansionVariableAmbiguous("expression has a pole at the expansion point")
    out = []
    for d in range(order + 1):
        acc = num[d] - sum((den[i] * out[d - i] for i in range(1, d + 1)), ring.field.zero)
        out.append(acc / den[0])
    return out


def _ser_mul(a: list, b: list, order: int, zero) -> list:
    return [sum((a[i] * b[d - i] for i in range(d + 1)), zero) for d in range(order + 1)]


def _ser_exp(a: list, order: int, one, zero) -> list:
    # e' = a' e
    e = [one] + [zero] * order
    for d in range(1, order + 1):
        e[d] = sum((k * a[k] * e[d - k] for k in range(1, d + 1)), zero) / d
    return e


def _ser_log(a: list, order: int, zero) -> list:
    # l' = a'/a with a_0 = 1
    l = [zero] * (order + 1)
    for d in range(1, order + 1):
        acc = d * a[d] - sum((k * l[k] * a[d - k] for k in range(1, d)), zero)
        l[d] = acc / d
    return l


def truncated_series(kind: str, arg: SymExpr, order: int, var: str | None = None, exponent=None) -> SymExpr:
    """Truncated ``exp``, ``log`` or ``power`` of ``arg``.

    With ``var=None`` the small part is the nilpotent ``H``-part: ``exp`` needs
    ``arg_0 = 0``, ``log`` needs ``arg_0 = 1``, ``power`` needs ``arg_0 = 1`` for
    non-integer exponents.  With ``var`` set, ``arg`` must be ``H``-free and is
    expanded as a power series in that ring variable up to ``var^order``.
    """
    ring = arg.ring
    K = ring.field
    if var is None:
        a0 = arg.comps[0]
        nil = SymExpr(ring, (K.zero,) + arg.comps[1:])
        N = ring.order
        if kind == "exp":
            if a0:
                raise ExpansionVariableAmbiguous("exp needs a nilpotent argument or a designated variable")
            out, term = ring.one(), ring.one()
            for k in range(1, N):
                term = term * nil / k
                out = out + term
            return out
        if kind == "log":
            if a0 != K.one:
                raise ExpansionVariableAmbiguous("log needs 1 + nilpotent or a designated variable")
            out, term = ring.zero(), ring.one()
            for k in range(1, N):
                term = term * nil
                out = out + term * Fraction((-1) ** (k + 1), k)
            return out
        if kind == "power":
            p = Fraction(exponent)
            if p.denominator == 1:
                return arg ** int(p)
            if a0 != K.one:
                raise ExpansionVariableAmbiguous("fractional power needs 1 + nilpotent or a designated variable")
            out, term, binom = ring.one(), ring.one(), Fraction(1)
            for k in range(1, N):
                binom = binom * (p - k + 1) / k
                term = term * nil
                out = out + term * binom
            return out
        raise ValueError(f"unknown series kind {kind!r}")

    if any(arg.comps[1:]):
        raise ExpansionVariableAmbiguous("series in a ring variable needs an H-free argument")
    vi = ring.names.index(var)
    ser = _series_of(ring, arg.comps[0], vi, order)
    zero, one = K.zero, K.one
    if kind == "exp":
        if ser[0]:
            raise ExpansionVariableAmbiguous("exp argument must vanish at the expansion point")
        res = _ser_exp(ser, order, one, zero)
    elif kind == "log":
        if ser[0] != one:
            raise ExpansionVariableAmbiguous("log argument must be 1 at the expansion point")
        res = _ser_log(ser, order, zero)
    elif kind == "power":
        p = Fraction(exponent)
        if p.denominator == 1 and p >= 0:
            res = [one] + [zero] * order
            for _ in range(int(p)):
                res = _ser_mul(res, ser, order, zero)
        else:
            a0 = ser[0]
            if not a0:
                raise ExpansionVariableAmbiguous("negative power of a series vanishing at the expansion point")
            if p.denominator != 1 and a0 != one:
                raise ExpansionVariableAmbiguous("fractional power needs leading coefficient 1")
            unit = [x / a0 for x in ser]
            lg = _ser_log(unit, order, zero)
            res = _ser_exp([x * qq(p) for x in lg], order, one, zero)
            if p.denominator == 1:
                res = [x * a0 ** int(p) for x in res]
    else:
        raise ValueError(f"unknown series kind {kind!r}")
    v = ring.gens[vi]
    total = sum((c * v**d for d, c in enumerate(res)), zero)
    return ring.scalar(total)


# --- rendering -------------------------------------------------------------


def _render_poly(p) -> str:
    return str(p.as_expr()).replace(" ", "")


def _atom(s: str) -> str:
    return f"({s})" if any(ch in s[1:] for ch in "+-*/") or s.startswith("-") else s


def render_component(c) -> str:
    if not c:
        return "0"
    coeff, factors = c.denom.factor_list()
    num = c.numer * (1 / coeff) if coeff != 1 else c.numer
    num_s = _render_poly(num)
    if not factors:
        return num_s
    fs = sorted((_render_poly(p), e) for p, e in factors)
    den = "*".join(_atom(p) + (f"^{e}" if e > 1 else "") for p, e in fs)
    if len(fs) > 1 or fs[0][1] > 1:
        den = f"({den})"
    return f"{_atom(num_s)}/{den}"


def render(f: SymExpr) -> str:
    """Deterministic text form ``c_0 + H*(c_1) + H^2*(c_2) ...`` with factored denominators."""
    parts = []
    for k, c in enumerate(f.comps):
        if not c:
            continue
        s = render_component(c)
        parts.append(s if k == 0 else (f"H*[{s}]" if k == 1 else f"H^{k}*[{s}]"))
    return " + ".join(parts) if parts else "0"


# --- series container --------------------------------------------------------


@dataclass
class ISeries:
    """A finite slice of a Novikov series: multidegree ``(D, lam)`` -> coefficient."""

    truncation: Fraction
    terms: dict = dc_field(default_factory=dict)
    sigma: tuple = ()
    b: object = None

    def __getitem__(self, key):
        return self.terms[key]

    def get(self, key, default=None):
        return self.terms.get(key, default)

    def keys(self):
        return sorted(self.terms)

    def items(self):
        return [(k, self.terms[k]) for k in self.keys()]

    def __len__(self):
        return len(self.terms)

    def nonzero(self) -> "ISeries":
        return ISeries(self.truncation, {k: v for k, v in self.terms.items() if not v.is_zero()}, self.sigma, self.b)
