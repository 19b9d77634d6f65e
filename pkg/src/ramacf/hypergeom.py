"""Gauss 2F1 and Appell F1 series, and the eta-quartic integral identities.

The integral identities are checked by computing left sides with tanh-sinh
quadrature and right sides with the hypergeometric series below.  The
2F1 right sides are given without their lower parameter; :func:`glasser_suite`
recovers it by scanning candidates against the quadrature values.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .numerics import DomainError, PrecisionContext, Real, integrate, num_derivative, to_mpf
from .qseries import RR_SPEC, _eps, _eta, _pochhammer_inf, _product_form, euler_f_log_bound
from .report import FLAGGED, PASS, FAIL, Report, compare, fmt

C_CANDIDATES = (Fraction(1, 2), Fraction(5, 6), Fraction(1), Fraction(7, 6), Fraction(3, 2), Fraction(11, 6))
MATCH_DIGITS = 20


def _is_nonpositive_int(x):
    return x <= 0 and x == int(x)


def _ratio_bound(a, b, c, z_abs, n):
    """Uniform bound on |t_{k+1}/t_k| for k >= n in sum (a)_k (b)_k/((c)_k k!) z^k."""
    if c + n <= 0:
        return mpmath.inf
    return z_abs * (1 + abs(a - 1) / (n + 1)) * (1 + abs(b - c) / (c + n))


def _hyp2f1(a, b, c, z):
    eps = _eps()
    total = mpf(1)
    term = mpf(1)
    z_abs = abs(z)
    n = 0
    while True:
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        n += 1
        total += term
        if term == 0:
            return total
        rho = _ratio_bound(a, b, c, z_abs, n)
        if rho < 1 and abs(term) * rho / (1 - rho) < eps * max(1, abs(total)):
            return total


def gauss_2f1(a: Real, b: Real, c: Real, z: Real, ctx: PrecisionContext) -> mpf:
    """Sum of (a)_n (b)_n / ((c)_n n!) z^n for |z| < 1."""
    with ctx.workprec():
        a, b, c, z = (to_mpf(v) for v in (a, b, c, z))
        if _is_nonpositive_int(c):
            raise DomainError("2F1 lower parameter must not be a non-positive integer")
        if not abs(z) < 1:
            raise DomainError("2F1 series needs |z| < 1")
        return ctx.round(_hyp2f1(a, b, c, z))


def _appell_f1(a, b1, b2, c, x, y):
    eps = _eps()
    x_abs, y_abs = abs(x), abs(y)
    total = mpf(0)
    row_head = mpf(1)   # T(m, 0)
    m = 0
    while True:
        # inner sum over n of T(m, n)
        row = row_head
        term = row_head
        n = 0
        while term != 0:
            term *= (a + m + n) * (b2 + n) / ((c + m + n) * (n + 1)) * y
            n += 1
            row += term
            rho = _ratio_bound(a + m, b2, c + m, y_abs, n)
            if rho < 1 and abs(term) * rho / (1 - rho) < eps * max(1, abs(total + row)):
                break
        total += row
        # remaining rows: |T(j,0)| shrinks by rho_x, each row sum is at most
        # |T(j,0)| / (1 - rho_y) with rho_y uniform over the inner index
        row_head *= (a + m) * (b1 + m) / ((c + m) * (m + 1)) * x
        m += 1
        if row_head == 0:
            return total
        rho_x = _ratio_bound(a, b1, c, x_abs, m)
        rho_y = y_abs * (1 + abs(a - c) / (c + m)) * (1 + abs(b2 - 1)) if c + m > 0 else mpmath.inf
        if rho_x < 1 and rho_y < 1:
            tail = abs(row_head) / ((1 - rho_x) * (1 - rho_y))
            if tail < eps * max(1, abs(total)):
                return total


def appell_f1(a: Real, b1: Real, b2: Real, c: Real, x: Real, y: Real, ctx: PrecisionContext) -> mpf:
    """Appell F1 double series, for |x| < 1 and |y| < 1."""
    with ctx.workprec():
        a, b1, b2, c, x, y = (to_mpf(v) for v in (a, b1, b2, c, x, y))
        if _is_nonpositive_int(c):
            raise DomainError("F1 lower parameter must not be a non-positive integer")
        if not (abs(x) < 1 and abs(y) < 1):
            raise DomainError("F1 series needs |x| < 1 and |y| < 1")
        return ctx.round(_appell_f1(a, b1, b2, c, x, y))


def _eta4_antiderivative(y):
    R = _product_form(RR_SPEC, mpmath.exp(-2 * mpmath.pi * y))
    R5 = R ** 5
    s5 = mpmath.sqrt(5)
    sixth = mpf(1) / 6
    f1 = _appell_f1(sixth, sixth, sixth, mpf(7) / 6, (11 - 5 * s5) * R5 / 2, (11 + 5 * s5) * R5 / 2)
    return -6 * R ** (mpf(5) / 6) * f1


def eta4_antiderivative(y: Real, ctx: PrecisionContext) -> mpf:
    """-6 R^(5/6) F1(1/6, 1/6, 1/6, 7/6; (11-5 sqrt5) R^5/2, (11+5 sqrt5) R^5/2), R = R(e^(-2 pi y)).

    Its derivative in y is 2 pi eta(i y)^4.
    """
    with ctx.workprec():
        y = to_mpf(y)
        if not y > 0:
            raise DomainError("eta4_antiderivative needs y > 0")
        return ctx.round(_eta4_antiderivative(y))


# ---------------------------------------------------------------------------
# Integrands
# ---------------------------------------------------------------------------

def _negligible_quartic(Q):
    """True when (Q;Q)_inf^4 is provably below 2^-(prec+16)."""
    return 4 * euler_f_log_bound(Q) > (mp.prec + 16) * math.log(2)


def f4_integrand(q, ctx):
    """f(-q)^4 q^(-5/6) on (0, 1]."""
    with ctx.workprec():
        if q >= 1 or _negligible_quartic(q):
            return mpf(0)
        return +(_pochhammer_inf(q, q) ** 4 / mpmath.root(q, 6) ** 5)


def f4_quintic_integrand(q, ctx):
    """f(-q^5)^4 q^(-1/6) on (0, 1]."""
    with ctx.workprec():
        if q >= 1:
            return mpf(0)
        Q = q ** 5
        if _negligible_quartic(Q):
            return mpf(0)
        return +(_pochhammer_inf(Q, Q) ** 4 / mpmath.root(q, 6))


def eta4_integrand(x, ctx):
    """eta(i x)^4 for x > 0."""
    with ctx.workprec():
        if x <= 0:
            return mpf(0)
        Q = mpmath.exp(-2 * mpmath.pi * x)
        if _negligible_quartic(Q):
            return mpf(0)
        return +(_eta(x) ** 4)


def eta4_inverted_integrand(u, ctx):
    """eta(i/u)^4 / u^2, so that its integral over (0,1] is that of eta(ix)^4 over [1, inf)."""
    with ctx.workprec():
        if u <= 0:
            return mpf(0)
        t = 1 / u
        # eta(it)^4 < e^(-pi t/3)
        if mpmath.pi * t / 3 > (mp.prec + 16) * math.log(2) + 2 * abs(mpmath.log(u)):
            return mpf(0)
        return +(_eta(t) ** 4 / (u * u))


INTEGRANDS = {
    "f4": f4_integrand,
    "f4-quintic": f4_quintic_integrand,
    "eta4": eta4_integrand,
    "eta4-inverted": eta4_inverted_integrand,
}


# ---------------------------------------------------------------------------
# The identity suite
# ---------------------------------------------------------------------------

def _z_star():
    return (-123 + 55 * mpmath.sqrt(5)) / 2


def f4_integral_rhs(c, ctx):
    with ctx.workprec():
        s5 = mpmath.sqrt(5)
        h = _hyp2f1(mpf(1) / 6, mpf(1) / 6, to_mpf(c), _z_star())
        return ctx.round(mpmath.pi * mpmath.root(2, 6) * (s5 - 1) ** (mpf(5) / 6) * h)


def f4_quintic_integral_rhs(c, ctx):
    with ctx.workprec():
        s5 = mpmath.sqrt(5)
        h = _hyp2f1(mpf(5) / 6, mpf(5) / 6, to_mpf(c), _z_star())
        return ctx.round(mpmath.pi * (s5 - 1) ** (mpf(25) / 6) / (8 * mpmath.root(2, 6)) * h)


def eta4_integral_rhs(c, ctx):
    with ctx.workprec():
        s5 = mpmath.sqrt(5)
        h = _hyp2f1(mpf(1) / 6, mpf(1) / 6, to_mpf(c), _z_star())
        return ctx.round(((s5 - 1) / 2) ** (mpf(5) / 6) / 2 * h)


def transformation_sides(c, ctx):
    """(2F1(5/6,5/6;c;z*), (1/5) ((sqrt5+1)/2)^(10/3) 2F1(1/6,1/6;c;z*))."""
    with ctx.workprec():
        z = _z_star()
        cc = to_mpf(c)
        lhs = _hyp2f1(mpf(5) / 6, mpf(5) / 6, cc, z)
        rhs = ((mpmath.sqrt(5) + 1) / 2) ** (mpf(10) / 3) / 5 * _hyp2f1(mpf(1) / 6, mpf(1) / 6, cc, z)
        return ctx.round(lhs), ctx.round(rhs)


def recover_parameter(value, rhs_of_c, ctx, candidates=C_CANDIDATES):
    """Candidates c whose right side matches ``value`` to MATCH_DIGITS significant digits."""
    hits = []
    with ctx.workprec():
        for c in candidates:
            r = rhs_of_c(c, ctx)
            if abs(r - value) < mpf(10) ** (-MATCH_DIGITS) * abs(value):
                hits.append(c)
    return hits


def eta4_integral(a, b, ctx):
    return integrate(eta4_integrand, a, b, ctx)


def eta4_integral_to_infinity(ctx):
    """integral of eta(ix)^4 over (0, inf), split at 1 with x -> 1/u on the upper part."""
    inner = ctx.internal()
    lower = integrate(eta4_integrand, 0, 1, inner)
    upper = integrate(eta4_inverted_integrand, 0, 1, inner)
    with ctx.workprec():
        return ctx.round(lower + upper)


def antiderivative_bracket_sides(a, b, ctx):
    """(antiderivative(b) - antiderivative(a), 2 pi * quadrature of eta(i tau)^4 on [a, b])."""
    inner = ctx.internal()
    with ctx.workprec():
        lhs = eta4_antiderivative(b, inner) - eta4_antiderivative(a, inner)
        rhs = 2 * mpmath.pi * integrate(eta4_integrand, a, b, inner)
        return ctx.round(lhs), ctx.round(rhs)


def antiderivative_ftc_sides(y, ctx):
    """(d/dy antiderivative by central differences, 2 pi eta(iy)^4)."""
    lhs = num_derivative(eta4_antiderivative, y, ctx)
    with ctx.workprec():
        rhs = 2 * mpmath.pi * _eta(to_mpf(y)) ** 4
        return lhs, ctx.round(rhs)


def _scan_report(case, value, rhs_of_c, ctx, tol):
    hits = recover_parameter(value, rhs_of_c, ctx)
    if len(hits) == 1:
        c = hits[0]
        rep = compare(case, "integral", value, rhs_of_c(c, ctx), ctx, tol=tol, relative=True,
                      notes=f"recovered lower parameter c = {c}")
        return rep, c
    note = "no candidate lower parameter matched" if not hits else f"ambiguous candidates {hits}"
    return Report(case, "integral", fmt(value), "", "", "", ctx.working_bits, FAIL, note), None


def glasser_suite(ctx: PrecisionContext, tol="1e-20") -> list[Report]:
    """Quadrature vs 2F1 checks of the Glasser integrals and the 2F1 transformation.

    Reports, in order: the f(-q)^4, f(-q^5)^4 and eta^4 integrals, parameter consistency, transformation,
    and the q = e^(-2 pi x) substitution check.
    """
    reports = []
    inner = ctx.internal()
    I_f4 = integrate(f4_integrand, 0, 1, inner)
    I_f4q = integrate(f4_quintic_integrand, 0, 1, inner)
    J01 = integrate(eta4_integrand, 0, 1, inner)
    J1inf = integrate(eta4_inverted_integrand, 0, 1, inner)
    with inner.workprec():
        J0inf = J01 + J1inf

    rep_f4, c_f4 = _scan_report("glasser-f4", I_f4, f4_integral_rhs, ctx, tol)
    rep_f4q, c_f4q = _scan_report("glasser-f4-quintic", I_f4q, f4_quintic_integral_rhs, ctx, tol)
    reports += [rep_f4, rep_f4q]

    hits_unit = recover_parameter(J01, eta4_integral_rhs, ctx)
    hits_half_line = recover_parameter(J0inf, eta4_integral_rhs, ctx)
    if len(hits_unit) == 1:
        c_eta4 = hits_unit[0]
        rep_eta4 = compare("glasser-eta4", "integral", J01, eta4_integral_rhs(c_eta4, ctx), ctx, tol=tol, relative=True,
                        notes=f"recovered lower parameter c = {c_eta4}; matches integral over [0, 1]"
                              + ("" if hits_half_line else ", not over [0, inf)"))
    elif len(hits_half_line) == 1:
        c_eta4 = hits_half_line[0]
        rep_eta4 = compare("glasser-eta4", "integral", J0inf, eta4_integral_rhs(c_eta4, ctx), ctx, tol=tol, relative=True,
                        notes=f"recovered lower parameter c = {c_eta4}; matches integral over [0, inf)")
    else:
        c_eta4 = None
        rep_eta4 = Report("glasser-eta4", "integral", fmt(J01), "", "", "", ctx.working_bits, FAIL,
                       "no candidate lower parameter matched either normalization")
    reports.append(rep_eta4)

    params = {c_f4, c_f4q, c_eta4}
    same = len(params) == 1 and None not in params
    c_star = c_f4 if same else None
    reports.append(Report("glasser-parameter", "integral", str(c_f4), str(c_eta4), "", "", ctx.working_bits,
                          PASS if same else FAIL,
                          f"f4 c = {c_f4}, f4-quintic c = {c_f4q}, eta4 c = {c_eta4}"))

    lhs, rhs = transformation_sides(c_star if c_star is not None else 1, ctx)
    reports.append(compare("glasser-transformation", "integral", lhs, rhs, ctx,
                           notes=f"c = {c_star if c_star is not None else 1}"))

    with ctx.workprec():
        reports.append(compare("glasser-substitution", "integral", I_f4, 2 * mpmath.pi * J0inf, ctx,
                               notes="integral of f(-q)^4 q^(-5/6) over [0,1] vs 2 pi * integral of eta(ix)^4 over [0, inf)"))
    return reports
