"""Continued-fraction evaluation and the catalog of q-continued fractions.

A continued fraction b0 + a1/(b1 + a2/(b2 + ...)) is described by a
:class:`CFSpec` whose ``partial_terms(n)`` returns ``(a_n, b_n)`` for n >= 1.
Leading fractional powers such as q^(1/5) live in ``prefactor`` and are
multiplied in after the recurrence.

Signed forms like ``1/(1 - x/(1 + y/(1 - ...)))`` are stored with the sign
folded into the numerator, so every CFSpec uses ``+`` between levels.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Tuple

import mpmath
from mpmath import mp, mpf

from .numerics import ConvergenceError, DomainError, PrecisionContext, Real, rational_power, to_mpf

START_DEPTH = 32
MAX_DEPTH = 2 ** 20


@dataclass(frozen=True)
class CFSpec:
    b0: mpf
    partial_terms: Callable[[int], Tuple[mpf, mpf]]
    name: str = ""
    prefactor: Optional[mpf] = None


@dataclass(frozen=True)
class CFEvaluation:
    value: mpf
    depth: int
    exact: bool = False       # finite fraction, terminated on a zero numerator
    perturbed: bool = False   # a vanishing denominator was nudged by one ulp


def _backward(terms, depth):
    """Tail-zero backward recurrence over terms[0:depth]."""
    v = mpf(0)
    perturbed = False
    for a, b in reversed(terms[:depth]):
        d = b + v
        if d == 0:
            d = mpmath.ldexp(mpf(1), -mp.prec) * (abs(b) or 1)
            perturbed = True
        v = a / d
    return v, perturbed


def evaluate(spec: CFSpec, ctx: PrecisionContext) -> CFEvaluation:
    """Evaluate with depth doubling until depths N and 2N agree.

    Raises ConvergenceError if no agreement is reached by depth 2^20.
    """
    with ctx.workprec():
        tol = ctx.target_tolerance
        terms = []

        def extend(n):
            while len(terms) < n:
                a, b = spec.partial_terms(len(terms) + 1)
                a, b = to_mpf(a), to_mpf(b)
                if a == 0:
                    return len(terms)
                terms.append((a, b))
            return None

        def finish(v, depth, **flags):
            if spec.prefactor is not None:
                v *= spec.prefactor
            return CFEvaluation(ctx.round(v), depth, **flags)

        stop = extend(START_DEPTH)
        if stop is not None:
            tail, pert = _backward(terms, stop)
            return finish(spec.b0 + tail, stop, exact=True, perturbed=pert)
        prev, pert = _backward(terms, START_DEPTH)
        depth = START_DEPTH
        while depth < MAX_DEPTH:
            depth *= 2
            stop = extend(depth)
            if stop is not None:
                tail, p2 = _backward(terms, stop)
                return finish(spec.b0 + tail, stop, exact=True, perturbed=pert or p2)
            cur, p2 = _backward(terms, depth)
            pert = pert or p2
            if abs(cur - prev) < tol * max(1, abs(cur)):
                return finish(spec.b0 + cur, depth, perturbed=pert)
            prev = cur
    raise ConvergenceError(f"continued fraction {spec.name!r} did not stabilise by depth {MAX_DEPTH}")


def eval_cf(spec: CFSpec, ctx: PrecisionContext) -> mpf:
    return evaluate(spec, ctx).value


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def _nome(q: Real, ctx: PrecisionContext):
    with ctx.internal().workprec():
        q = to_mpf(q)
    if not 0 < q < 1:
        raise DomainError(f"nome must lie in (0, 1), got {mpmath.nstr(q, 10)}")
    return q


def _prefactor(q, exponent: Fraction, ctx):
    with ctx.internal().workprec():
        return rational_power(q, Fraction(exponent))


def golden(ctx: PrecisionContext = None) -> CFSpec:
    """1 + 1/(1 + 1/(1 + ...)) = (sqrt 5 + 1)/2."""
    return CFSpec(mpf(1), lambda n: (1, 1), "golden")


def rr(q: Real, ctx: PrecisionContext) -> CFSpec:
    """q^(1/5)/(1 + q/(1 + q^2/(1 + ...)))."""
    q = _nome(q, ctx)
    return CFSpec(mpf(0), lambda n: (1 if n == 1 else q ** (n - 1), 1), "rr", _prefactor(q, Fraction(1, 5), ctx))


def rstar(q: Real, ctx: PrecisionContext) -> CFSpec:
    q = _nome(q, ctx)
    return CFSpec(mpf(0), lambda n: (1 if n == 1 else q ** (n - 1), 1), "rstar")


def cubic(q: Real, ctx: PrecisionContext) -> CFSpec:
    """q^(1/3)/(1 + (q+q^2)/(1 + (q^2+q^4)/(1 + ...)))."""
    q = _nome(q, ctx)

    def terms(n):
        if n == 1:
            return 1, 1
        m = n - 1
        return q ** m + q ** (2 * m), 1

    return CFSpec(mpf(0), terms, "cubic", _prefactor(q, Fraction(1, 3), ctx))


def octic(q: Real, ctx: PrecisionContext) -> CFSpec:
    """q^(1/2)/((1+q) + q^2/((1+q^3) + q^4/((1+q^5) + ...)))."""
    q = _nome(q, ctx)

    def terms(n):
        num = 1 if n == 1 else q ** (2 * (n - 1))
        return num, 1 + q ** (2 * n - 1)

    return CFSpec(mpf(0), terms, "octic", _prefactor(q, Fraction(1, 2), ctx))


def h_cf(x: Real, ctx: PrecisionContext) -> CFSpec:
    """H(x): the octic fraction at q = e^-x."""
    with ctx.internal().workprec():
        x = to_mpf(x)
        if not x > 0:
            raise DomainError("H(x) needs x > 0")
        q = mpmath.exp(-x)
    spec = octic(q, ctx)
    return CFSpec(spec.b0, spec.partial_terms, "H", spec.prefactor)


def m_cf_plus(c: Real, q: Real, ctx: PrecisionContext) -> CFSpec:
    """1/(1 + cq/(1 + c(q^2-q)/(1 + cq^3/(1 + c(q^4-q^2)/...)))) = sum (-c)^k q^(k(k+1)/2)."""
    q = _nome(q, ctx)
    with ctx.internal().workprec():
        c = to_mpf(c)

    def terms(n):
        if n == 1:
            return 1, 1
        m = n - 1
        if m % 2:
            return c * q ** m, 1
        return c * (q ** m - q ** (m // 2)), 1

    return CFSpec(mpf(0), terms, "m_cf_plus")


def m_cf_alt(c: Real, q: Real, ctx: PrecisionContext) -> CFSpec:
    """M(c,q) = 1/(1 - cq/(1 + c(q-q^2)/(1 - cq^3/(1 + c(q^2-q^4)/(1 - ...)))))."""
    q = _nome(q, ctx)
    with ctx.internal().workprec():
        c = to_mpf(c)

    def terms(n):
        if n == 1:
            return 1, 1
        m = n - 1
        if m % 2:
            return -c * q ** m, 1
        return c * (q ** (m // 2) - q ** m), 1

    return CFSpec(mpf(0), terms, "m_cf_alt")


def odd_a_cf(a: int, q: Real, ctx: PrecisionContext) -> CFSpec:
    """q^((a+1)^2/4)/(1 - q^(a+2)/(1 - q^a(q^4-q^2)/(1 - q^(a+6)/(1 - ...)))) for odd a."""
    if int(a) != a or a < 1 or a % 2 == 0:
        raise DomainError(f"odd_a_cf needs a positive odd integer, got {a}")
    a = int(a)
    q = _nome(q, ctx)

    def terms(n):
        if n == 1:
            return 1, 1
        m = n - 1
        if m % 2:
            return -(q ** (a + 2 * m)), 1
        return -(q ** a) * (q ** (2 * m) - q ** m), 1

    return CFSpec(mpf(0), terms, "odd_a_cf", _prefactor(q, Fraction((a + 1) ** 2, 4), ctx))


def vi_cf(q: Real, ctx: PrecisionContext) -> CFSpec:
    """Fraction with numerators q^(2n) and denominators (1-q)(q^(2n)+1):
    q^(1/2)/((1-q) + q^2/((1-q)(q^2+1) + q^4/((1-q)(q^4+1) + ...))).

    It does not reproduce q^(1/2) (q^4;q^4)^2/(q^2;q^4)^2; see :func:`vi_cf_classical`.
    """
    q = _nome(q, ctx)

    def terms(n):
        if n == 1:
            return 1, 1 - q
        m = n - 1
        return q ** (2 * m), (1 - q) * (q ** (2 * m) + 1)

    return CFSpec(mpf(0), terms, "vi_cf", _prefactor(q, Fraction(1, 2), ctx))


def vi_cf_classical(q: Real, ctx: PrecisionContext) -> CFSpec:
    """q^(1/2)/((1-q) + q(1-q)^2/((1-q^3) + q^2(1-q^2)^2/((1-q^5) + ...))),
    which does equal q^(1/2) (q^4;q^4)^2/(q^2;q^4)^2."""
    q = _nome(q, ctx)

    def terms(n):
        if n == 1:
            return 1, 1 - q
        m = n - 1
        return q ** m * (1 - q ** m) ** 2, 1 - q ** (2 * n - 1)

    return CFSpec(mpf(0), terms, "vi_cf_classical", _prefactor(q, Fraction(1, 2), ctx))


def ratio8(q: Real, ctx: PrecisionContext) -> CFSpec:
    """1/(1 + q/(1 + (q^2+q)/(1 + q^3/(1 + (q^4+q^2)/(1 + ...))))).

    The numerator pattern is continued as a_(2k+1) = q^(2k+1),
    a_(2k) = q^(2k) + q^k (indexing the q-dependent numerators from 1).
    """
    q = _nome(q, ctx)

    def terms(n):
        if n == 1:
            return 1, 1
        m = n - 1
        if m % 2:
            return q ** m, 1
        return q ** m + q ** (m // 2), 1

    return CFSpec(mpf(0), terms, "ratio8")


CATALOG = {
    "golden": golden,
    "rr": rr,
    "rstar": rstar,
    "cubic": cubic,
    "octic": octic,
    "H": h_cf,
    "m_cf_plus": m_cf_plus,
    "m_cf_alt": m_cf_alt,
    "odd_a_cf": odd_a_cf,
    "vi_cf": vi_cf,
    "vi_cf_classical": vi_cf_classical,
    "ratio8": ratio8,
}


def cf_catalog(name: str, ctx: PrecisionContext, **params) -> CFSpec:
    try:
        ctor = CATALOG[name]
    except KeyError:
        raise DomainError(f"unknown continued fraction {name!r}") from None
    return ctor(ctx=ctx, **params)
