"""Bernoulli G-functions, the quantum Riemann-Roch factor, and gerbe rescaling.

``G_y(x, z) = sum_{l,m} s_{l+m-1} B_m(y)/m! x^l/l! z^(m-1)`` is linear in the
formal indeterminates ``s_k``: the coefficient of ``x^l z^q`` is a rational
multiple of ``s_(l+q)``.  A :class:`GSeries` stores those multipliers.  The
specialization ``s_0 = -log U``, ``s_k = (-1)^k (k-1)! U^(-k)`` turns
``s_k z^k`` into ``(-1)^k (k-1)! w^k`` with ``w = z/U``, so every identity below
is checked exactly on rational coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .errors import FractionalPartMismatch, LogResidue, UnsupportedBase
from .report import Report
from .stackyfan import BoxElement, frac, _cone
from .symring import ISeries, sym_ring, truncated_series


@lru_cache(maxsize=None)
def bernoulli_numbers(m: int) -> tuple:
    """``B_0..B_m`` with ``B_1 = -1/2``."""
    B = [Fraction(1)]
    for n in range(1, m + 1):
        B.append(-sum(comb(n + 1, k) * B[k] for k in range(n)) / (n + 1))
    return tuple(B)


@lru_cache(maxsize=None)
def bernoulli_poly(m: int) -> tuple:
    """Coefficients (constant term first) of ``B_m(y) = sum_k C(m,k) B_k y^(m-k)``."""
    B = bernoulli_numbers(m)
    coeffs = [Fraction(0)] * (m + 1)
    for k in range(m + 1):
        coeffs[m - k] += comb(m, k) * B[k]
    return tuple(coeffs)


def bernoulli_eval(m: int, y) -> Fraction:
    y = Fraction(y)
    return sum((c * y**p for p, c in enumerate(bernoulli_poly(m))), Fraction(0))


def s_value(k: int) -> tuple:
    """``s_k z^k`` after specialization: ``("log", -1)`` for ``k = 0`` else ``("w", (-1)^k (k-1)!)``."""
    if k == 0:
        return ("log", Fraction(-1))
    return ("w", Fraction((-1) ** k * factorial(k - 1)))


@dataclass
class GSeries:
    """Truncated double series: ``(l, q) -> multiplier of s_(l+q)`` for ``x^l z^q``."""

    x_order: int
    z_order: int
    terms: dict = field(default_factory=dict)

    def coeff(self, l: int, q: int) -> Fraction:
        return self.terms.get((l, q), Fraction(0))

    def keys(self):
        return [(l, q) for l in range(self.x_order + 1) for q in range(-1, self.z_order + 1)]

    def render(self) -> str:
        parts = []
        for l, q in self.keys():
            c = self.coeff(l, q)
            if c:
                parts.append(f"{c}*s{l + q}*x^{l}*z^{q}")
        return " + ".join(parts) if parts else "0"


def g_coeff(y, l: int, q: int) -> Fraction:
    """Multiplier of ``s_(l+q)`` in the ``x^l z^q`` coefficient of ``G_y``; the ``(0,-1)`` term is absent."""
    if q < -1 or l < 0 or (l, q) == (0, -1):
        return Fraction(0)
    m = q + 1
    return bernoulli_eval(m, y) / (factorial(m) * factorial(l))


def g_function(y, x_order: int, z_order: int) -> GSeries:
    """``G_y(x, z)`` truncated to ``x^x_order`` and ``z^z_order``."""
    out = GSeries(x_order, z_order)
    for l in range(x_order + 1):
        for q in range(-1, z_order + 1):
            c = g_coeff(y, l, q)
            if c:
                out.terms[(l, q)] = c
    return out


def g_shifted(y_inner, alpha, l: int, q: int) -> Fraction:
    """Coefficient of ``x^l z^q`` in ``G_(y_inner)(x + alpha z, z)``, from the defining double sum."""
    alpha = Fraction(alpha)
    total = Fraction(0)
    for p in range(0, q + 2):
        total += g_coeff(y_inner, l + p, q - p) * comb(l + p, p) * alpha**p
    return total


def check_g_identities(y, x_order: int = 4, z_order: int = 4, exp_order: int = 8) -> Report:
    """``G_y(x,z) = G_0(x+yz,z)``, ``G_0(x+z,z) = G_0(x,z) + s(x)``, and ``exp(s(x)) = (U+x)^-1``."""
    y = Fraction(y)
    rep = Report(f"G identities y={y}")
    rep.info.update(y=y, x_order=x_order, z_order=z_order, exp_order=exp_order)
    for l in range(x_order + 1):
        for q in range(-1, z_order + 1):
            lhs = g_coeff(y, l, q)
            rhs = g_shifted(0, y, l, q)
            rep.add(f"shift x^{l} z^{q}", lhs == rhs, lhs=f"{lhs}*s{l + q}", rhs=f"{rhs}*s{l + q}")
    for l in range(x_order + 1):
        for q in range(-1, z_order + 1):
            lhs = g_shifted(0, 1, l, q) - g_coeff(0, l, q)
            rhs = Fraction(1, factorial(l)) if q == 0 else Fraction(0)
            rep.add(f"difference x^{l} z^{q}", lhs == rhs, lhs=f"{lhs}*s{l + q}", rhs=f"{rhs}*s{l + q}")
    ok, lhs, rhs = _exp_s_matches(exp_order)
    rep.add(f"exp(s(x)) = 1/(U+x) to order {exp_order}", ok, lhs=lhs, rhs=rhs)
    return rep


def _exp_s_matches(order: int):
    """Exponentiate the truncated ``s(x)`` in ``v = x/U`` and compare with the geometric series."""
    ring = sym_ring(0, extra=("v",))
    v = ring.gen("v")
    # s(x) = -log U + sum_{k>=1} s_k x^k/k!  with  s_k x^k = (-1)^k (k-1)! v^k
    tail = sum((s_value(k)[1] / factorial(k) * v**k for k in range(1, order + 1)), ring.field.zero)
    lhs = truncated_series("exp", ring.scalar(tail), order, var="v")
    rhs = ring.scalar(sum(((-v) ** k for k in range(order + 1)), ring.field.zero))
    # the s_0 term contributes exp(-log U) = U^-1 on both sides
    return lhs == rhs, f"U^-1*({lhs})", f"U^-1*({rhs})"


# --- the QRR factor --------------------------------------------------------


CONVENTIONS = ("paper", "alternate")


def _g_diff_series(b, mu, order: int, convention: str) -> tuple:
    """Exponent of the QRR factor as ``(log_coeff, [c_1..c_order])`` meaning ``log_coeff*s_0 + sum c_k w^k``.

    ``paper``:      ``-(G_b(0, z)  - G_0(-mu z, z))``
    ``alternate``:  ``+(G_b(0, -z) - G_0(mu z, -z))``
    Each ``G`` is summed from its defining double series.
    """
    b, mu = Fraction(b), Fraction(mu)
    if convention == "paper":
        sign, zs, alpha = -1, 1, -mu
    elif convention == "alternate":
        sign, zs, alpha = 1, -1, -mu  # x = mu z = (-mu)(-z)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    log_coeff = Fraction(0)
    series = [Fraction(0)] * (order + 1)
    for k in range(0, order + 1):
        # coefficient of z'^k (z' = zs*z) in G_b(0, z') and in G_0(alpha z', z')
        c = g_coeff(b, 0, k) - g_shifted(0, alpha, 0, k)
        c *= sign * Fraction(zs) ** k
        if k == 0:
            log_coeff += c
        else:
            series[k] += c * s_value(k)[1]
    return log_coeff, series


def hyper_in_w(mu, order: int) -> tuple:
    """``hyper(U, mu) = U^e * P(w)``; returns ``(e, [P_0..P_order])``."""
    mu = Fraction(mu)
    f = frac(mu)
    ring = sym_ring(0, extra=("w",))
    w = ring.gen("w")
    P = ring.field.one
    e = 0
    if mu >= 0:
        a = f if f > 0 else Fraction(1)
        while a <= mu:
            P = P / (1 + w * _q(a))
            e -= 1
            a += 1
    else:
        a = mu + 1
        while a <= 0:
            P = P * (1 + w * _q(a))
            e += 1
            a += 1
    ser = truncated_series("power", ring.scalar(P), order, var="w", exponent=1)
    poly = ser.comps[0].numer
    wi = ring.names.index("w")
    coeffs = [Fraction(0)] * (order + 1)
    den = ser.comps[0].denom
    for monom, cf in poly.terms():
        coeffs[monom[wi]] = Fraction(int(cf.numerator), int(cf.denominator))
    dc = den.LC
    coeffs = [c / Fraction(int(dc.numerator), int(dc.denominator)) for c in coeffs]
    return e, coeffs


def _q(x: Fraction):
    from .symring import qq

    return qq(x)


def _exp_series(series: list, order: int) -> list:
    e = [Fraction(1)] + [Fraction(0)] * order
    for d in range(1, order + 1):
        e[d] = sum((k * series[k] * e[d - k] for k in range(1, d + 1)), Fraction(0)) / d
    return e


def qrr_factor_identity(mu, b, order: int = 6, convention: str = "alternate") -> tuple:
    """Compare ``hyper(U, mu)`` with the exponentiated G-difference as series in ``w = z/U``.

    Returns ``(passed, lhs_text, rhs_text)``.  The ``s_0 = -log U`` part must
    come with an integer coefficient ``n`` and then contributes ``U^(-n)``;
    anything else raises :class:`LogResidue`.
    """
    log_coeff, series = _g_diff_series(b, mu, order, convention)
    if log_coeff.denominator != 1:
        raise LogResidue(f"log U survives with coefficient {log_coeff}")
    rhs_e = -int(log_coeff)
    rhs = _exp_series(series, order)
    lhs_e, lhs = hyper_in_w(mu, order)
    ok = lhs_e == rhs_e and lhs == rhs
    fmt = lambda e, cs: f"U^{e}*(" + " + ".join(f"{c}*w^{k}" for k, c in enumerate(cs) if c) + ")"
    return ok, fmt(lhs_e, lhs), fmt(rhs_e, rhs)


def _conventions(convention) -> tuple:
    if convention in (None, "both"):
        return CONVENTIONS
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    return (convention,)


def _tabulate(rep: Report, rows: list, conventions: tuple) -> Report:
    """Passes when at least one convention holds on every row."""
    holds = {c: all(ok for _, ok, _, _, conv in rows if conv == c) for c in conventions}
    holding = [c for c in conventions if holds[c]]
    for label, ok, lhs, rhs, conv in rows:
        rep.add(label, bool(holding), lhs=lhs, rhs=rhs, convention=conv, identity_holds=ok)
    rep.info.update(conventions=holds, holding=holding)
    return rep


def _run_identity(mu, b, order, conv):
    try:
        return qrr_factor_identity(mu, b, order, conv)
    except LogResidue as exc:
        return False, "log U residue", str(exc)


def check_qrr_factor(ctx, sigma, b: BoxElement, lam, D: int = 0, order: int = 6, convention="both") -> Report:
    """For each ``i`` in ``sigma``: the hypergeometric factor at ``U_i(sigma)`` against the exponentiated G-difference."""
    sigma = _cone(sigma)
    conventions = _conventions(convention)
    rep = Report(f"QRR factor sigma={list(sigma)} b={list(b.element)} lam=({','.join(map(str, lam))}) D={D}")
    rows = []
    for i in sigma:
        mu = Fraction(lam[i]) - ctx.bundle.pairing(i, D)
        bi = b.frac(i)
        if frac(-mu) != bi:
            raise FractionalPartMismatch(f"<-(lam_{i} - Lambda_{i}(D))> = {frac(-mu)} but b_{i} = {bi}")
        for conv in conventions:
            ok, lhs, rhs = _run_identity(mu, bi, order, conv)
            rows.append((f"{conv} i={i} mu={mu} U={ctx.U(sigma, i)}", ok, lhs, rhs, conv))
    rep.info["order"] = order
    return _tabulate(rep, rows, conventions)


def qrr_report(pairs, order: int = 6, convention="both") -> Report:
    """Run :func:`qrr_factor_identity` over ``(mu, b)`` pairs."""
    conventions = _conventions(convention)
    rep = Report("QRR factor identity")
    rows = []
    for mu, b in pairs:
        for conv in conventions:
            ok, lhs, rhs = _run_identity(mu, b, order, conv)
            rows.append((f"{conv} mu={Fraction(mu)} b={Fraction(b)}", ok, lhs, rhs, conv))
    rep.info["order"] = order
    return _tabulate(rep, rows, conventions)


# --- gerbe rescaling -------------------------------------------------------


def gerbe_rescale(ctx, sigma, truncation) -> ISeries:
    """``sum_b sum_D prod_i Q_i^(-Lambda_i(D)) prod_{i not in sigma} q_i^(Lambda_i(D)) J_D 1_b``.

    Keys are ``(b.element, D, Q_exponents, q_exponents)`` with ``Q`` indexed by
    rays and ``q`` by the indices off ``sigma``.
    """
    from .ifunc import base_j

    base = ctx.bundle.base
    if base.kind not in ("point", "projective"):
        raise UnsupportedBase(f"no built-in J-function for base {base}")
    sigma = _cone(sigma)
    out = ISeries(truncation, {}, sigma, None)
    off = [i for i in range(ctx.size) if i not in sigma]
    for b in ctx.fan.box_of_cone(sigma):
        for D in ctx.bundle.base_degrees(truncation):
            J = base_j(base, D, ctx.ring)
            if J.is_zero():
                continue
            Qexp = tuple(-ctx.bundle.pairing(i, D) for i in range(ctx.ext.n))
            qexp = tuple(ctx.bundle.pairing(i, D) for i in off)
            out.terms[(b.element, D, Qexp, qexp)] = J
    return out
