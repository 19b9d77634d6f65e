"""Minimal-polynomial recognition by lattice reduction.

A value x is tested for an integer relation c0 + c1 x + ... + cd x^d = 0 by
reducing the lattice spanned by the rows [e_i | round(2^s x^i)].  A short
vector whose residual is below 2^(-0.6 working_bits) is only accepted after
the same polynomial annihilates x recomputed at twice the precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import flint
import mpmath
from mpmath import mp, mpf

from .numerics import BigReal, PrecisionContext, PrecisionError, Real, to_mpf
from .qseries import (
    CUBIC_SPEC,
    OCTIC_SPEC,
    RR_SPEC,
    VI_SPEC,
    ProductSpec,
    _bilateral_quadratic,
    _pochhammer_inf,
    _product_form,
    _theta3,
)
from .report import FLAGGED, NOT_FOUND, PASS, Report, fmt

MIN_BITS = 256
MAX_HEIGHT = 10 ** 30
DISCOVERY_EXPONENT = 0.6
CONFIRM_EXPONENT = 1.2      # relative to the discovery working_bits, checked at doubled precision
DEFAULT_MAX_DEGREE = 16
SUITE_BITS = 512


@dataclass(frozen=True)
class AlgebraicCandidate:
    coefficients: tuple[int, ...]    # ascending: c0 + c1 x + ...
    degree: int
    height: int
    residual: mpf                    # |P(x)| at discovery precision
    confirmed: bool
    confirm_residual: Optional[mpf] = None

    def __str__(self):
        return format_poly(self.coefficients)


def format_poly(coefficients: Sequence[int], var: str = "t") -> str:
    parts = []
    for i in range(len(coefficients) - 1, -1, -1):
        c = coefficients[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            power = var if i == 1 else f"{var}^{i}"
            body = power if mag == 1 else f"{mag}*{power}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    head_sign, head = parts[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _horner(coefficients, x):
    acc = mpf(0)
    for c in reversed(coefficients):
        acc = acc * x + c
    return acc


def eval_poly(coefficients: Sequence[int], x: Real, ctx: PrecisionContext) -> mpf:
    """Horner evaluation of c0 + c1 x + ... at the context's internal precision."""
    with ctx.workprec():
        return ctx.round(_horner(coefficients, to_mpf(x)))


def _normalize(vec):
    while vec and vec[-1] == 0:
        vec = vec[:-1]
    if len(vec) < 2:
        return None
    g = 0
    for v in vec:
        g = math.gcd(g, v)
    vec = [v // g for v in vec]
    if vec[-1] < 0:
        vec = [-v for v in vec]
    return tuple(vec)


def _relations(x, d, bits):
    """Short integer vectors from the reduced lattice for powers 0..d of x."""
    with mp.workprec(bits + 32):
        powers = [mpf(1)]
        for _ in range(d):
            powers.append(powers[-1] * x)
        top = max(abs(p) for p in powers)
        shift = bits - 8 - max(0, int(mpmath.ceil(mpmath.log(top, 2))))
        rows = []
        for i, p in enumerate(powers):
            row = [0] * (d + 1)
            row[i] = 1
            row.append(int(mpmath.nint(mpmath.ldexp(p, shift))))
            rows.append(row)
    reduced = flint.fmpz_mat(rows).lll()
    for r in range(reduced.nrows()):
        yield [int(reduced[r, j]) for j in range(d + 1)]


Source = Union[Callable[[PrecisionContext], mpf], BigReal, Real]


def _values(x: Source, ctx: PrecisionContext):
    """(value at discovery precision, thunk for the value at doubled precision)."""
    if callable(x):
        with ctx.workprec():
            lo = x(ctx.internal())

        def hi():
            with ctx.doubled().workprec():
                return x(ctx.doubled().internal())
        return lo, hi
    if isinstance(x, BigReal):
        if x.bits < 2 * ctx.working_bits:
            raise PrecisionError(f"value carries {x.bits} bits; confirmation needs {2 * ctx.working_bits}")
        return x.value, lambda: x.value
    # exact inputs (integers, fractions, decimal strings) are read at whatever precision is asked for
    hi_ctx = ctx.doubled()
    with ctx.workprec():
        lo = to_mpf(x)

    def hi():
        with hi_ctx.workprec():
            return to_mpf(x)
    return lo, hi


def min_poly(x: Source, max_degree: int, ctx: PrecisionContext) -> Optional[AlgebraicCandidate]:
    """Smallest-degree integer polynomial annihilating x, or None if none is confirmed.

    ``x`` may be a callable ``f(ctx) -> mpf`` (re-evaluated at doubled
    precision for confirmation), a BigReal carrying at least twice the working
    bits, or an exact number.  Working precision below 256 bits raises
    PrecisionError.
    """
    if ctx.working_bits < MIN_BITS:
        raise PrecisionError(f"min_poly needs at least {MIN_BITS} working bits, got {ctx.working_bits}")
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    bits = ctx.working_bits
    lo, hi_thunk = _values(x, ctx)
    hi_value = None
    seen = set()
    discover = mpmath.ldexp(mpf(1), -int(DISCOVERY_EXPONENT * bits))
    confirm = mpmath.ldexp(mpf(1), -int(CONFIRM_EXPONENT * bits))
    for d in range(1, max_degree + 1):
        for vec in _relations(lo, d, bits):
            poly = _normalize(vec)
            if poly is None or poly in seen:
                continue
            seen.add(poly)
            height = max(abs(c) for c in poly)
            if height >= MAX_HEIGHT:
                continue
            with mp.workprec(ctx.prec):
                residual = abs(_horner(poly, lo))
            if not residual < discover:
                continue
            if hi_value is None:
                hi_value = hi_thunk()
            with mp.workprec(2 * ctx.prec):
                hi_residual = abs(_horner(poly, hi_value))
            if hi_residual < confirm:
                return AlgebraicCandidate(poly, len(poly) - 1, height, residual, True, hi_residual)
    return None


# ---------------------------------------------------------------------------
# The algebraicity suite
# ---------------------------------------------------------------------------

def _nome(r):
    return mpmath.exp(-mpmath.pi * mpmath.sqrt(to_mpf(r)))


def _K_over_pi(q):
    return _theta3(q) ** 2 / 2


def pochhammer_pair_value(a: int, p: int, r: Real, ctx: PrecisionContext) -> mpf:
    """q^(2a/3 - 4p + 4p^2/a) (q^(a-p); q^a)^8 (q^p; q^a)^8 at q = e^(-pi sqrt r)."""
    alpha = Fraction(2 * a, 3) - 4 * p + Fraction(4 * p * p, a)
    spec = ProductSpec(alpha, ((a - p, a, 8), (p, a, 8)), f"pochhammer-pair-{a}-{p}")
    with ctx.workprec():
        return ctx.round(_product_form(spec, _nome(r)))


def theta_sum_value(a, b, c, r, ctx: PrecisionContext) -> mpf:
    """(q^((b^2-4ac)/(4a)) sqrt(pi/K) sum_v q^(a v^2 + b v + c))^8 at q = e^(-pi sqrt r)."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    with ctx.workprec():
        q = _nome(r)
        s = _bilateral_quadratic(a, b, c, q)
        base = q ** to_mpf((b * b - 4 * a * c) / (4 * a)) * s / mpmath.sqrt(_K_over_pi(q))
        return ctx.round(base ** 8)


def spec_value(spec: ProductSpec, r: Real, ctx: PrecisionContext) -> mpf:
    with ctx.workprec():
        return ctx.round(_product_form(spec, _nome(r)))


def minus_q2_eighth(r: Real, ctx: PrecisionContext) -> mpf:
    """q^(2/3) (-q^2; q^2)^8."""
    with ctx.workprec():
        q = _nome(r)
        return ctx.round(mpmath.cbrt(q * q) * _pochhammer_inf(-q * q, q * q) ** 8)


def minus_q_odd_eighth(r: Real, ctx: PrecisionContext) -> mpf:
    """q^(-1/3) (-q; q^2)^8."""
    with ctx.workprec():
        q = _nome(r)
        return ctx.round(_pochhammer_inf(-q, q * q) ** 8 / mpmath.cbrt(q))


def ratio8_value(r: Real, ctx: PrecisionContext) -> mpf:
    """q ((-q^2; q^2) / (-q; q^2))^8."""
    with ctx.workprec():
        q = _nome(r)
        return ctx.round(q * (_pochhammer_inf(-q * q, q * q) / _pochhammer_inf(-q, q * q)) ** 8)


def vi_over_k(r: Real, ctx: PrecisionContext, *, sqrt: bool = False) -> mpf:
    """q^(1/2) (q^4;q^4)^2/(q^2;q^4)^2 divided by K/pi (or by sqrt(K/pi))."""
    with ctx.workprec():
        q = _nome(r)
        scale = _K_over_pi(q)
        if sqrt:
            scale = mpmath.sqrt(scale)
        return ctx.round(_product_form(VI_SPEC, q) / scale)


def bilateral_normalized(r: Real, ctx: PrecisionContext) -> mpf:
    """sum_k q^(k(k+1)/2) divided by q^(-1/8) sqrt(K/pi)."""
    with ctx.workprec():
        q = _nome(r)
        half = Fraction(1, 2)
        s = _bilateral_quadratic(half, half, Fraction(0), q)
        return ctx.round(s * mpmath.root(q, 8) / mpmath.sqrt(_K_over_pi(q)))


@dataclass(frozen=True)
class AlgebraicInstance:
    name: str
    value: Callable[[PrecisionContext], mpf]
    description: str
    required: bool = True     # False for readings that are expected to be transcendental


def _instances() -> list[AlgebraicInstance]:
    out = []
    for a, p, r in ((5, 1, 1), (5, 2, 1), (6, 1, 2)):
        out.append(AlgebraicInstance(
            f"alg-pochhammer-pair-a{a}-p{p}-r{r}", lambda ctx, a=a, p=p, r=r: pochhammer_pair_value(a, p, r, ctx),
            f"q^(2a/3-4p+4p^2/a) (q^(a-p);q^a)^8 (q^p;q^a)^8, a={a}, p={p}, q=e^(-pi sqrt {r}); "
            "exponent is 8 times a/12 - p/2 + p^2/(2a)"))
    for a, b, c, r, tag in ((Fraction(3, 2), Fraction(-1, 2), 0, 1, "pentagonal"),
                            (1, 0, 0, 1, "theta3"),
                            (1, Fraction(1, 2), 0, 2, "half-shift")):
        out.append(AlgebraicInstance(
            f"alg-theta-sum-{tag}-r{r}", lambda ctx, a=a, b=b, c=c, r=r: theta_sum_value(a, b, c, r, ctx),
            f"(q^((b^2-4ac)/(4a)) sqrt(pi/K) theta_sum)^8, (a,b,c)=({a},{b},{c}), q=e^(-pi sqrt {r})"))
    for r in (1, 2):
        out.append(AlgebraicInstance(f"alg-rr-r{r}", lambda ctx, r=r: spec_value(RR_SPEC, r, ctx),
                                     f"R(q), q=e^(-pi sqrt {r})"))
    out.append(AlgebraicInstance("alg-cubic-r1", lambda ctx: spec_value(CUBIC_SPEC, 1, ctx),
                                 "cubic fraction at q=e^(-pi)"))
    out.append(AlgebraicInstance("alg-octic-r1", lambda ctx: spec_value(OCTIC_SPEC, 1, ctx),
                                 "octic fraction at q=e^(-pi)"))
    out.append(AlgebraicInstance("alg-minus-q2-eighth-r1", lambda ctx: minus_q2_eighth(1, ctx),
                                 "q^(2/3) (-q^2;q^2)^8 at q=e^(-pi)"))
    out.append(AlgebraicInstance("alg-minus-q-odd-eighth-r1", lambda ctx: minus_q_odd_eighth(1, ctx),
                                 "q^(-1/3) (-q;q^2)^8 at q=e^(-pi)"))
    out.append(AlgebraicInstance("alg-vi-k-over-pi-r1", lambda ctx: vi_over_k(1, ctx),
                                 "q^(1/2) (q^4;q^4)^2/(q^2;q^4)^2 / (K/pi) at q=e^(-pi)"))
    out.append(AlgebraicInstance("alg-vi-sqrt-k-over-pi-r1", lambda ctx: vi_over_k(1, ctx, sqrt=True),
                                 "q^(1/2) (q^4;q^4)^2/(q^2;q^4)^2 / sqrt(K/pi) at q=e^(-pi); "
                                 "alternative reading, not expected to be algebraic", required=False))
    out.append(AlgebraicInstance("alg-ratio8-r1", lambda ctx: ratio8_value(1, ctx),
                                 "q ((-q^2;q^2)/(-q;q^2))^8 at q=e^(-pi)"))
    out.append(AlgebraicInstance("alg-bilateral-a0-r1", lambda ctx: bilateral_normalized(1, ctx),
                                 "sum q^(k(k+1)/2) / (q^(-1/8) sqrt(K/pi)) at q=e^(-pi)"))
    return out


INSTANCES = _instances()


def algebraic_report(case: str, value_fn, ctx: PrecisionContext, max_degree: int = DEFAULT_MAX_DEGREE,
                     description: str = "", required: bool = True) -> Report:
    with ctx.workprec():
        value = value_fn(ctx.internal())
    cand = min_poly(value_fn, max_degree, ctx)
    if cand is not None:
        notes = (f"coefficients={list(cand.coefficients)}; degree={cand.degree}; height={cand.height}; "
                 f"confirmed at {2 * ctx.working_bits} bits")
        if description:
            notes = description + "; " + notes
        return Report(case, "algebraicity", fmt(value), format_poly(cand.coefficients),
                      fmt(cand.confirm_residual, 8), fmt(cand.residual, 8), ctx.working_bits, PASS, notes)
    status = NOT_FOUND if required else FLAGGED
    notes = f"no confirmed polynomial of degree <= {max_degree} and height < 10^30"
    if description:
        notes = description + "; " + notes
    return Report(case, "algebraicity", fmt(value), "", "", "", ctx.working_bits, status, notes)


def algebraicity_suite(ctx: Optional[PrecisionContext] = None,
                       max_degree: int = DEFAULT_MAX_DEGREE) -> list[Report]:
    """Run min_poly on every configured normalized quantity; one report each."""
    ctx = ctx or PrecisionContext(SUITE_BITS)
    return [algebraic_report(inst.name, inst.value, ctx, max_degree, inst.description, inst.required)
            for inst in INSTANCES]
