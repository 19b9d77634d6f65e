"""q-Pochhammer products, theta and eta functions, and character series.

These are the reference evaluators the continued fractions are checked
against.  Infinite products and series stop on a term-magnitude threshold
backed by an explicit tail bound, so the truncation error is always below
2^-(internal precision).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .numerics import (
    DomainError,
    PrecisionContext,
    Real,
    divisor_sum_table,
    rational_power,
    to_mpf,
)

INF = math.inf


def _check_nome(q, *, allow_zero=True):
    if not (q >= 0 if allow_zero else q > 0) or not q < 1:
        raise DomainError(f"nome must lie in {'[0,1)' if allow_zero else '(0,1)'}, got {mpmath.nstr(q, 10)}")


def _eps():
    return mpmath.ldexp(mpf(1), -mp.prec)


def _pochhammer_inf(a, q):
    """(a; q)_inf at the current precision; caller has validated q."""
    if a == 0 or q == 0:
        return 1 - a
    eps = _eps()
    one_minus_q = 1 - q
    prod = mpf(1)
    t = a
    while True:
        # |log prod_{k>=K} (1 - t q^k)| <= 2|t|/(1-q) once |t| <= 1/2
        if abs(t) <= 0.5 and 2 * abs(t) < eps * one_minus_q:
            return prod
        factor = 1 - t
        if factor == 0:
            raise DomainError("(a; q)_inf has a vanishing factor a q^k = 1")
        prod *= factor
        t *= q


def pochhammer(a: Real, q: Real, n, ctx: PrecisionContext) -> mpf:
    """(a; q)_n = prod_{k<n} (1 - a q^k); pass ``n=math.inf`` for the infinite product."""
    with ctx.workprec():
        a, q = to_mpf(a), to_mpf(q)
        _check_nome(q)
        if n == INF:
            return ctx.round(_pochhammer_inf(a, q))
        if n < 0 or int(n) != n:
            raise DomainError("n must be a non-negative integer or inf")
        prod = mpf(1)
        t = a
        for _ in range(int(n)):
            prod *= 1 - t
            t *= q
        return ctx.round(prod)


def euler_f(q: Real, ctx: PrecisionContext) -> mpf:
    """Ramanujan's f(-q) = (q; q)_inf."""
    with ctx.workprec():
        q = to_mpf(q)
        _check_nome(q)
        return ctx.round(_pochhammer_inf(q, q))


def euler_f_log_bound(q) -> mpf:
    """A lower bound L with (q; q)_inf <= exp(-L), cheap for q near 1.

    Uses -log (q;q)_inf = sum_m q^m / (m (1 - q^m)) with all terms positive,
    keeping the first 24 of them.
    """
    if q <= 0:
        return mpf(0)
    if q >= 1:
        return mpmath.inf
    total = mpf(0)
    qm = mpf(1)
    for m in range(1, 25):
        qm *= q
        total += qm / (m * (1 - qm))
    return total


@dataclass(frozen=True)
class ProductSpec:
    """q^alpha * prod_j (q^p_j; q^a_j)_inf ^ e_j."""

    prefactor_exponent: Fraction = Fraction(0)
    terms: tuple = field(default_factory=tuple)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "prefactor_exponent", Fraction(self.prefactor_exponent))
        norm = []
        for p, a, e in self.terms:
            p, a = Fraction(p), Fraction(a)
            if p <= 0 or a <= 0:
                raise DomainError(f"product term ({p}, {a}, {e}) needs positive offset and modulus")
            if int(e) != e:
                raise DomainError("product exponents must be integers")
            norm.append((p, a, int(e)))
        object.__setattr__(self, "terms", tuple(norm))


RR_SPEC = ProductSpec(Fraction(1, 5), ((1, 5, 1), (4, 5, 1), (2, 5, -1), (3, 5, -1)), "rogers-ramanujan")
RSTAR_SPEC = ProductSpec(0, RR_SPEC.terms, "rogers-ramanujan-star")
CUBIC_SPEC = ProductSpec(Fraction(1, 3), ((1, 6, 1), (5, 6, 1), (3, 6, -2)), "cubic")
CUBIC_ALT_SPEC = ProductSpec(Fraction(1, 3), ((1, 2, 1), (3, 6, -3)), "cubic-alt")
OCTIC_SPEC = ProductSpec(Fraction(1, 2), ((1, 8, 1), (7, 8, 1), (3, 8, -1), (5, 8, -1)), "octic")
VI_SPEC = ProductSpec(Fraction(1, 2), ((4, 4, 2), (2, 4, -2)), "vi")


def _product_form(spec, q):
    value = rational_power(q, spec.prefactor_exponent) if spec.prefactor_exponent else mpf(1)
    for p, a, e in spec.terms:
        value *= _pochhammer_inf(rational_power(q, p), rational_power(q, a)) ** e
    return value


def product_form(spec: ProductSpec, q: Real, ctx: PrecisionContext) -> mpf:
    with ctx.workprec():
        q = to_mpf(q)
        _check_nome(q, allow_zero=False)
        return ctx.round(_product_form(spec, q))


# ---------------------------------------------------------------------------
# Theta functions
# ---------------------------------------------------------------------------

def _theta3(q):
    if q == 0:
        return mpf(1)
    eps = _eps()
    total = mpf(0)
    term = q          # q^{k^2}
    ratio = q ** 3    # q^{(k+1)^2 - k^2}
    while term > eps:
        total += term
        term *= ratio
        ratio *= q * q
    return 1 + 2 * total


def _theta4(q):
    if q == 0:
        return mpf(1)
    eps = _eps()
    total = mpf(0)
    term = q
    ratio = q ** 3
    sign = -1
    while term > eps:
        total += sign * term
        sign = -sign
        term *= ratio
        ratio *= q * q
    return 1 + 2 * total


def _theta2(q):
    if q == 0:
        return mpf(0)
    eps = _eps()
    # 2 q^{1/4} sum_{k>=0} q^{k(k+1)}
    total = mpf(0)
    term = mpf(1)
    ratio = q * q
    while term > eps:
        total += term
        term *= ratio
        ratio *= q * q
    return 2 * mpmath.root(q, 4) * total


def theta2(q: Real, ctx: PrecisionContext) -> mpf:
    with ctx.workprec():
        q = to_mpf(q)
        _check_nome(q)
        return ctx.round(_theta2(q))


def theta3(q: Real, ctx: PrecisionContext) -> mpf:
    with ctx.workprec():
        q = to_mpf(q)
        _check_nome(q)
        return ctx.round(_theta3(q))


def theta4(q: Real, ctx: PrecisionContext) -> mpf:
    with ctx.workprec():
        q = to_mpf(q)
        _check_nome(q)
        return ctx.round(_theta4(q))


def _bilateral_quadratic(coef_a: Fraction, coef_b: Fraction, coef_c: Fraction, q, weight=None):
    """sum_{v in Z} w^v q^{a v^2 + b v + c} with a > 0, summed outward from the vertex.

    ``weight`` (w) defaults to 1.  Terms beyond the vertex shrink at least
    geometrically, so each direction stops once a term is below eps times the
    running total and the next term ratio is below 1/2.
    """
    logq = mpmath.log(q)
    logw = None
    if weight is not None:
        if weight == 0:
            raise DomainError("bilateral sum needs a non-zero weight")
        logw = mpmath.log(abs(weight))
    la = to_mpf(coef_a) * logq
    lb = to_mpf(coef_b) * logq

    def log_mag(v):
        s = la * v * v + lb * v
        if logw is not None:
            s += logw * v
        return s

    # continuous vertex of the (negative-definite in v) log magnitude
    shift = lb + (logw if logw is not None else 0)
    center = int(mpmath.nint(-shift / (2 * la)))
    eps = _eps()

    def term(v):
        t = mpmath.exp(log_mag(v))
        if weight is not None and weight < 0 and v % 2:
            t = -t
        return t

    total = term(center)
    scale = abs(total)
    for step in (1, -1):
        v = center + step
        while True:
            t = term(v)
            total += t
            scale = max(scale, abs(t))
            ratio = mpmath.exp(log_mag(v + step) - log_mag(v))
            if abs(t) < eps * scale and ratio < 0.5:
                break
            v += step
    return total * mpmath.exp(to_mpf(coef_c) * logq)


def theta_sum(a: Real, b: Real, c: Real, q: Real, ctx: PrecisionContext) -> mpf:
    """sum_{v in Z} q^(a v^2 + b v + c) for rational a > 0."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a <= 0:
        raise DomainError("theta_sum diverges unless a > 0")
    with ctx.workprec():
        q = to_mpf(q)
        _check_nome(q)
        if q == 0:
            raise DomainError("theta_sum needs q > 0")
        return ctx.round(_bilateral_quadratic(a, b, c, q))


def _theta4_shift(y, q):
    if q == 0:
        return mpf(1)
    y = abs(y)
    L = -mpmath.log(q)
    peak_n = y / L
    # largest term is about exp(y^2 / L); carry that many extra bits
    extra = int(y * y / L / math.log(2)) + 16 if y else 0
    with mp.workprec(mp.prec + extra):
        eps = mpmath.ldexp(mpf(1), -(mp.prec))
        total = mpf(0)
        prev = mpmath.inf
        n = 1
        while True:
            mag = mpmath.exp(-n * n * L) * mpmath.cosh(2 * n * y)
            total += mag if n % 2 == 0 else -mag
            if n > peak_n:
                if mag > prev:
                    raise DomainError("theta4_shift terms are not decreasing; series diverges")
                if mag < eps:
                    break
            prev = mag
            n += 1
        result = 1 + 2 * total
    return +result


def theta4_shift(y: Real, q: Real, ctx: PrecisionContext) -> mpf:
    """Real value of theta_4(i y, q) = 1 + 2 sum_{n>=1} (-1)^n q^(n^2) cosh(2 n y)."""
    with ctx.workprec():
        y, q = to_mpf(y), to_mpf(q)
        _check_nome(q)
        if not mpmath.isfinite(y):
            raise DomainError("theta4_shift needs finite y")
        return ctx.round(_theta4_shift(y, q))


# ---------------------------------------------------------------------------
# Dedekind eta
# ---------------------------------------------------------------------------

def _eta(t):
    Q = mpmath.exp(-2 * mpmath.pi * t)
    return mpmath.exp(-mpmath.pi * t / 12) * _pochhammer_inf(Q, Q)


def dedekind_eta(t: Real, ctx: PrecisionContext) -> mpf:
    """eta(i t) = e^(-pi t/12) (e^(-2 pi t); e^(-2 pi t))_inf for t > 0."""
    with ctx.workprec():
        t = to_mpf(t)
        if not t > 0:
            raise DomainError("dedekind_eta needs t > 0")
        return ctx.round(_eta(t))


# ---------------------------------------------------------------------------
# Character series
# ---------------------------------------------------------------------------

def _character_log_series(x, modulus):
    """-sum_{n>=1} (x^n/n) sum_{d|n} chi(d) d.

    |sum_{d|n} chi(d) d| <= sigma(n) <= 2 n sqrt(n) <= 2 n^2, so the tail after
    N is at most 2 sum_{n>N} n x^n; the loop stops once that bound is below eps.
    """
    eps = _eps()
    one_minus = 1 - x
    # size the sieve from the tail bound, growing it if the estimate is short
    limit = max(16, int(mp.prec * math.log(2) / max(float(-mpmath.log(x)), 1e-300)) + 16)
    while True:
        table = divisor_sum_table(limit, modulus)
        total = mpf(0)
        xn = mpf(1)
        for n in range(1, limit + 1):
            xn *= x
            if table[n]:
                total += xn * table[n] / n
            tail = 2 * xn * x * ((n + 1) - n * x) / one_minus ** 2
            if tail < eps:
                return -total
        limit *= 2


def log_rstar_series(x: Real, ctx: PrecisionContext) -> mpf:
    """log R*(x) via the mod-5 divisor-sum series."""
    with ctx.workprec():
        x = to_mpf(x)
        if not 0 < x < 1:
            raise DomainError("log_rstar_series needs 0 < x < 1")
        return ctx.round(_character_log_series(x, 5))


def log_rstar_coefficients(n_max: int) -> list[Fraction]:
    """Exact Taylor coefficients c_1..c_{n_max} of log R*(x) = sum c_n x^n."""
    table = divisor_sum_table(n_max, 5)
    return [Fraction(-table[n], n) for n in range(1, n_max + 1)]


def _rational_fraction_series(x_step, numerator_exps, modulus):
    """sum_{n>=1} (1/n) sum_i s_i e^{e_i n x} / (e^{modulus n x} - 1), in the form
    sum_n (1/n) P(u)/(1 - u^modulus) with u = e^{-n x}; numerator_exps holds
    (sign, power of u) after multiplying through by u^modulus."""
    eps = _eps()
    total = mpf(0)
    base = mpmath.exp(-x_step)
    u = mpf(1)
    n = 0
    while True:
        n += 1
        u *= base
        num = sum(s * u ** k for s, k in numerator_exps)
        term = num / (1 - u ** modulus) / n
        total += term
        # |P(u)| <= len * u and terms decay geometrically in n
        bound = len(numerator_exps) * u / ((1 - u) * (1 - base)) / n
        if bound < eps:
            return total


def rr_rational_series(x: Real, ctx: PrecisionContext) -> mpf:
    """R(e^-x) = exp(-x/5 - sum_n (1/n)(e^{4nx} - e^{3nx} - e^{2nx} + e^{nx})/(e^{5nx} - 1))."""
    with ctx.workprec():
        x = to_mpf(x)
        if not x > 0:
            raise DomainError("rr_rational_series needs x > 0")
        # times u^5: u - u^2 - u^3 + u^4
        s = _rational_fraction_series(x, ((1, 1), (-1, 2), (-1, 3), (1, 4)), 5)
        return ctx.round(mpmath.exp(-x / 5 - s))


def octic_rational_series(x: Real, ctx: PrecisionContext) -> mpf:
    """H(x) = exp(-x/2 - sum_n (1/n)(e^{7nx} - e^{5nx} - e^{3nx} + e^{nx})/(e^{8nx} - 1))."""
    with ctx.workprec():
        x = to_mpf(x)
        if not x > 0:
            raise DomainError("octic_rational_series needs x > 0")
        s = _rational_fraction_series(x, ((1, 1), (-1, 3), (-1, 5), (1, 7)), 8)
        return ctx.round(mpmath.exp(-x / 2 - s))


def y2_log_series(x_step: Real, ctx: PrecisionContext) -> mpf:
    """exp(-sum_n (e^{-n x}/n) sum_{d|n} Y2(d) d), the mod-3 analogue of R*."""
    with ctx.workprec():
        x = to_mpf(x_step)
        if not x > 0:
            raise DomainError("y2_log_series needs x_step > 0")
        return ctx.round(mpmath.exp(_character_log_series(mpmath.exp(-x), 3)))


def y2_product(x_step: Real, ctx: PrecisionContext) -> mpf:
    """prod_{n>=1} (1 - e^{-n x})^Y2(n) = (q; q^3)_inf / (q^2; q^3)_inf."""
    with ctx.workprec():
        x = to_mpf(x_step)
        if not x > 0:
            raise DomainError("y2_product needs x_step > 0")
        q = mpmath.exp(-x)
        q3 = q ** 3
        return ctx.round(_pochhammer_inf(q, q3) / _pochhammer_inf(q * q, q3))


def y2_rational_series(x_step: Real, ctx: PrecisionContext, *, swapped_sign: bool = False) -> mpf:
    """exp(-sum_n (1/n) (e^{2nx} - e^{nx})/(e^{3nx} - 1)).

    With ``swapped_sign=True`` the numerator is e^{nx} - e^{2nx}; that
    variant evaluates to the reciprocal.
    """
    with ctx.workprec():
        x = to_mpf(x_step)
        if not x > 0:
            raise DomainError("y2_rational_series needs x_step > 0")
        # times u^3: e^{2nx} - e^{nx} -> u - u^2
        sign = -1 if swapped_sign else 1
        s = _rational_fraction_series(x, ((sign, 1), (-sign, 2)), 3)
        return ctx.round(mpmath.exp(-s))


# ---------------------------------------------------------------------------
# Partial theta M(c, q) and its bilateral completion
# ---------------------------------------------------------------------------

def _m_series(c, q):
    eps = _eps()
    total = mpf(0)
    term = mpf(1)   # c^k q^{k(k+1)/2}
    k = 0
    while True:
        total += term
        k += 1
        term *= c * q ** k
        if abs(term) < eps * max(abs(total), 1) and abs(c) * q ** (k + 1) < 0.5:
            # remaining terms shrink by at least half each step
            return total + term


def m_series(c: Real, q: Real, ctx: PrecisionContext) -> mpf:
    """M(c, q) = sum_{k>=0} c^k q^(k(k+1)/2)."""
    with ctx.workprec():
        c, q = to_mpf(c), to_mpf(q)
        _check_nome(q)
        return ctx.round(_m_series(c, q))


def signed_m_series(c: Real, q: Real, ctx: PrecisionContext) -> mpf:
    """sum_{k>=0} (-c)^k q^(k(k+1)/2)."""
    with ctx.workprec():
        c, q = to_mpf(c), to_mpf(q)
        _check_nome(q)
        return ctx.round(_m_series(-c, q))


def bilateral_theta(c: Real, q: Real, ctx: PrecisionContext) -> mpf:
    """sum_{k in Z} c^k q^(k(k+1)/2), summed directly over both tails."""
    with ctx.workprec():
        c, q = to_mpf(c), to_mpf(q)
        _check_nome(q)
        if c == 0:
            raise DomainError("bilateral_theta needs c != 0")
        if q == 0:
            raise DomainError("bilateral_theta needs q > 0")
        half = Fraction(1, 2)
        return ctx.round(_bilateral_quadratic(half, half, Fraction(0), q, weight=c))
