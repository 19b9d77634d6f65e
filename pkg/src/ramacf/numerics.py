"""Precision policy and the numerical substrate shared by every other module.

All evaluation is done with mpmath ``mpf`` values.  A :class:`PrecisionContext`
says how many bits the caller wants to be able to trust; operations compute at
``working_bits + guard_bits`` and round once on the way out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Union

import mpmath
from mpmath import mp, mpf


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceError(ArithmeticError):
    """A truncated process failed to stabilise within its iteration cap."""


class PrecisionError(ValueError):
    """The caller supplied too little precision for the requested operation."""


@dataclass(frozen=True)
class PrecisionContext:
    working_bits: int = 256
    guard_bits: int = 64

    def __post_init__(self):
        if self.working_bits < 64:
            raise ValueError(f"working_bits must be >= 64, got {self.working_bits}")
        if self.guard_bits < 0:
            raise ValueError("guard_bits must be non-negative")

    @property
    def prec(self) -> int:
        """Internal binary precision."""
        return self.working_bits + self.guard_bits

    @property
    def target_tolerance(self) -> mpf:
        return mpmath.ldexp(mpf(1), -self.working_bits)

    def workprec(self):
        return mp.workprec(self.prec)

    def internal(self) -> "PrecisionContext":
        # Context for nested calls: their rounded output keeps our guard bits.
        return replace(self, working_bits=self.prec)

    def with_bits(self, working_bits: int) -> "PrecisionContext":
        return replace(self, working_bits=working_bits)

    def doubled(self) -> "PrecisionContext":
        return self.with_bits(2 * self.working_bits)

    def round(self, x):
        """Round a value computed at internal precision to ``working_bits``."""
        with mp.workprec(self.working_bits):
            return +x


@dataclass(frozen=True)
class BigReal:
    """A value tagged with the precision it was computed at."""

    value: mpf
    bits: int

    def __float__(self):
        return float(self.value)

    def close_to(self, other, tol) -> bool:
        other = other.value if isinstance(other, BigReal) else other
        with mp.workprec(self.bits + 16):
            return abs(self.value - mpmath.mpmathify(other)) < tol

    def __str__(self):
        digits = max(15, int(self.bits * math.log10(2)))
        return mpmath.nstr(self.value, digits)


Real = Union[int, float, str, Fraction, mpf, BigReal]
Evaluator = Callable[[mpf, PrecisionContext], mpf]


def to_mpf(x: Real) -> mpf:
    """Convert at the current mpmath precision.  Strings are parsed exactly
    (``"0.1"`` is the decimal 1/10 to full precision, not the binary double)."""
    if isinstance(x, BigReal):
        return +x.value
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpmath.mpmathify(x)


def evaluate(fn: Callable[..., mpf], ctx: PrecisionContext, *args) -> BigReal:
    """Run ``fn(*args, ctx)`` and tag the result with its precision."""
    return BigReal(fn(*args, ctx), ctx.working_bits)


def rational_power(x: mpf, p: Fraction) -> mpf:
    """``x**p`` for x > 0 computed as exp(p log x) at the current precision."""
    if p == 0:
        return mpf(1)
    if p.denominator == 1 and abs(p.numerator) < 64:
        return x ** int(p)
    return mpmath.exp(to_mpf(p) * mpmath.log(x))


# ---------------------------------------------------------------------------
# Arithmetic kernels
# ---------------------------------------------------------------------------

_CHARACTERS = {
    5: (0, 1, -1, -1, 1),
    3: (0, 1, -1),
}


def character(n: int, modulus: int) -> int:
    """Quadratic character mod 5 (Legendre symbol (n/5)) or mod 3."""
    if n < 0:
        raise DomainError("character is defined for n >= 0")
    try:
        table = _CHARACTERS[modulus]
    except KeyError:
        raise DomainError(f"unsupported modulus {modulus}; expected 3 or 5") from None
    return table[n % modulus]


def divisor_sum_chi(n: int, modulus: int) -> int:
    """Sum of character(d) * d over the divisors d of n."""
    if n < 1:
        raise DomainError("divisor_sum_chi needs n >= 1")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += character(d, modulus) * d
            e = n // d
            if e != d:
                total += character(e, modulus) * e
        d += 1
    return total


def divisor_sum_table(limit: int, modulus: int) -> list[int]:
    """``table[n] == divisor_sum_chi(n, modulus)`` for 1 <= n <= limit, by sieving."""
    table = [0] * (limit + 1)
    for d in range(1, limit + 1):
        w = character(d, modulus) * d
        if w:
            for m in range(d, limit + 1, d):
                table[m] += w
    return table


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def num_derivative(f: Evaluator, x: Real, ctx: PrecisionContext) -> mpf:
    """Central difference with step 2^(-working_bits/3).

    ``f`` is called as ``f(t, inner_ctx)`` with ``inner_ctx`` carrying three
    times the working precision, so the subtraction is cancellation-free and
    the result is good to roughly two thirds of ``working_bits``.
    """
    inner = PrecisionContext(3 * ctx.working_bits, ctx.guard_bits)
    with inner.workprec():
        x = to_mpf(x)
        h = mpmath.ldexp(mpf(1), -(ctx.working_bits // 3))
        d = (f(x + h, inner) - f(x - h, inner)) / (2 * h)
    return ctx.round(d)


# ---------------------------------------------------------------------------
# Double-exponential quadrature
# ---------------------------------------------------------------------------

def _tanh_sinh_node(t, h, a, b):
    """Distance from the nearer endpoint and weight for abscissa parameter t >= 0."""
    u = mpmath.pi / 2 * mpmath.sinh(t)
    e = mpmath.exp(2 * u)
    dist = (b - a) / (1 + e)
    # (b - a)/2 * h * (pi/2) cosh t / cosh(u)^2, with cosh(u)^2 = (e + 2 + 1/e)/4
    w = (b - a) * h * mpmath.pi * mpmath.cosh(t) * e / (1 + e) ** 2
    return dist, w


def _ts_half_sum(f, a, b, h, k_start, k_step, eps, ctx):
    """Sum w*(f(a+d) + f(b-d)) over t = k*h, k = k_start, k_start+k_step, ...

    The outward sweep stops once two consecutive contributions fall below
    ``eps`` (the double-exponential decay makes the rest negligible).
    """
    total = mpf(0)
    small = 0
    k = k_start
    while True:
        t = k * h
        if t > 12:
            break
        dist, w = _tanh_sinh_node(t, h, a, b)
        if dist == 0:
            break
        contrib = w * (f(a + dist, ctx) + f(b - dist, ctx))
        total += contrib
        if abs(contrib) < eps:
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        k += k_step
    return total


def integrate(f: Evaluator, a: Real, b: Real, ctx: PrecisionContext,
              max_levels: int = 12) -> mpf:
    """Tanh-sinh quadrature of ``f`` over the finite interval [a, b].

    Abscissae are generated as distances from the endpoints, so integrable
    algebraic singularities at ``a`` (such as q^(-5/6) at 0) are sampled
    without cancellation.  The step is halved until two successive levels
    agree to ``ctx.target_tolerance``.

    Raises
    ------
    ConvergenceError
        If ``max_levels`` halvings do not produce agreement.
    """
    inner = ctx.internal()
    with ctx.workprec():
        a, b = to_mpf(a), to_mpf(b)
        if not a < b:
            raise DomainError("integrate requires a < b")
        tol = ctx.target_tolerance
        eps = mpmath.ldexp(tol, -16)
        h = mpf(1)
        mid_w = (b - a) * h * mpmath.pi / 4
        s = mid_w * f((a + b) / 2, inner) + _ts_half_sum(f, a, b, h, 1, 1, eps, inner)
        prev = s
        for _ in range(max_levels):
            h /= 2
            s = s / 2 + _ts_half_sum(f, a, b, h, 1, 2, eps, inner)
            if abs(s - prev) < tol:
                return ctx.round(s)
            prev = s
    raise ConvergenceError(
        f"tanh-sinh did not converge in {max_levels} levels (last change {mpmath.nstr(abs(s - prev), 5)})"
    )
