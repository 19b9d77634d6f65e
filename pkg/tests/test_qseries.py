import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from ramacf.numerics import DomainError, PrecisionContext, character
from ramacf import qseries
from ramacf.qseries import (
    CUBIC_ALT_SPEC,
    CUBIC_SPEC,
    RR_SPEC,
    RSTAR_SPEC,
    ProductSpec,
    bilateral_theta,
    dedekind_eta,
    euler_f,
    log_rstar_coefficients,
    log_rstar_series,
    m_series,
    pochhammer,
    product_form,
    signed_m_series,
    theta2,
    theta3,
    theta4,
    theta4_shift,
    theta_sum,
    y2_log_series,
    y2_product,
    y2_rational_series,
)

TOL = mpmath.ldexp(1, -250)


def close(a, b, tol=TOL):
    with mp.workprec(400):
        return abs(a - b) <= tol * max(1, abs(b))


def test_pochhammer_finite(ctx):
    assert pochhammer("0.3", "0.7", 0, ctx) == 1
    with ctx.workprec():
        assert close(pochhammer("0.5", "0.5", 2, ctx), mpf(3) / 8)


def test_pochhammer_infinite_against_log_sum(ctx):
    value = pochhammer("0.1", "0.1", math.inf, ctx)
    with mp.workprec(400):
        a = mpf("0.1")
        oracle = mpmath.exp(mpmath.nsum(lambda k: mpmath.log(1 - a * a ** k), [0, mpmath.inf]))
    assert close(value, oracle)


def test_pochhammer_against_mpmath_qp(ctx):
    value = pochhammer("-0.4", "0.3", math.inf, ctx)
    with mp.workprec(400):
        assert close(value, mpmath.qp(mpf("-0.4"), mpf("0.3")))


def test_pochhammer_domain(ctx):
    with pytest.raises(DomainError):
        pochhammer("0.5", "1.5", 3, ctx)
    with pytest.raises(DomainError):
        pochhammer(1, "0.5", math.inf, ctx)


def pentagonal_oracle(q, K=60):
    return sum((-1) ** k * q ** (k * (3 * k - 1) // 2) for k in range(-K, K + 1))


@pytest.mark.parametrize("q", ["0.1", "0.5", "exp(-pi)"])
def test_pentagonal_number_theorem(ctx, q):
    with mp.workprec(400):
        qq = mpmath.exp(-mpmath.pi) if q == "exp(-pi)" else mpf(q)
        oracle = pentagonal_oracle(qq)
    assert close(euler_f(qq, ctx), oracle)


def test_euler_f_small_q(ctx):
    with ctx.workprec():
        assert abs(euler_f(mpmath.ldexp(1, -300), ctx) - 1) < mpmath.ldexp(1, -299)


def test_rr_product_closed_form(ctx):
    with mp.workprec(400):
        q = mpmath.exp(-2 * mpmath.pi)
        s5 = mpmath.sqrt(5)
        closed = mpmath.sqrt((5 + s5) / 2) - (s5 + 1) / 2
    assert close(product_form(RR_SPEC, q, ctx), closed)


def test_empty_product(ctx):
    assert product_form(ProductSpec(0, ()), "0.3", ctx) == 1


@pytest.mark.parametrize("q", ["0.05", "0.1", "exp(-pi)"])
def test_cubic_product_forms_agree(ctx, q):
    with mp.workprec(400):
        qq = mpmath.exp(-mpmath.pi) if q == "exp(-pi)" else mpf(q)
    assert close(product_form(CUBIC_SPEC, qq, ctx), product_form(CUBIC_ALT_SPEC, qq, ctx))


def test_product_spec_validation():
    with pytest.raises(DomainError):
        ProductSpec(0, ((0, 5, 1),))
    with pytest.raises(DomainError):
        ProductSpec(0, ((1, -5, 1),))


def test_thetas_against_mpmath(ctx):
    with mp.workprec(400):
        q = mpf("0.3")
        for mine, n in ((theta2, 2), (theta3, 3), (theta4, 4)):
            assert close(mine(q, ctx), mpmath.jtheta(n, 0, q))


def test_jacobi_quartic(ctx):
    q = "0.3"
    with ctx.workprec():
        lhs = theta3(q, ctx) ** 4
        rhs = theta2(q, ctx) ** 4 + theta4(q, ctx) ** 4
    assert close(lhs, rhs)


def test_theta3_at_zero(ctx):
    assert theta3(0, ctx) == 1


def test_theta_sum_reductions(ctx):
    assert close(theta_sum(1, 0, 0, "0.3", ctx), theta3("0.3", ctx))
    assert close(theta_sum(Fraction(1, 2), Fraction(1, 2), 0, "0.3", ctx), bilateral_theta(1, "0.3", ctx))
    with pytest.raises(DomainError):
        theta_sum(0, 1, 0, "0.3", ctx)
    with pytest.raises(DomainError):
        theta_sum(-1, 0, 0, "0.3", ctx)


def test_theta4_shift(ctx):
    assert close(theta4_shift(0, "0.3", ctx), theta4("0.3", ctx))
    # q -> 0 with y fixed
    with ctx.workprec():
        assert abs(theta4_shift(1, mpmath.ldexp(1, -400), ctx) - 1) < TOL
    # cosh form against mpmath's jtheta at an imaginary argument
    with mp.workprec(400):
        y, q = mpf("0.4"), mpf("0.2")
        oracle = mpmath.re(mpmath.jtheta(4, 1j * y, q))
    assert close(theta4_shift(y, q, ctx), oracle)


def test_theta4_shift_domain(ctx):
    with pytest.raises(DomainError):
        theta4_shift(1, "1.5", ctx)


def test_eta_at_i(ctx):
    with mp.workprec(400):
        closed = mpmath.gamma(mpf(1) / 4) / (2 * mpmath.pi ** (mpf(3) / 4))
    assert close(dedekind_eta(1, ctx), closed)


@pytest.mark.parametrize("t", ["1/2", "2", "5"])
def test_eta_functional_equation(ctx, t):
    with mp.workprec(400):
        tt = mpmath.mpmathify(Fraction(t))
        lhs = dedekind_eta(1 / tt, ctx)
        rhs = mpmath.sqrt(tt) * dedekind_eta(tt, ctx)
    assert close(lhs, rhs)


def test_eta_domain(ctx):
    with pytest.raises(DomainError):
        dedekind_eta(0, ctx)


@pytest.mark.parametrize("x", ["0.05", "0.2", "exp(-pi)"])
def test_log_series_matches_product(ctx, x):
    with mp.workprec(400):
        xx = mpmath.exp(-mpmath.pi) if x == "exp(-pi)" else mpf(x)
        lhs = mpmath.exp(log_rstar_series(xx, ctx)) * mpmath.root(xx, 5)
    assert close(lhs, product_form(RR_SPEC, xx, ctx))


def test_log_series_zero_limit(ctx):
    with ctx.workprec():
        assert abs(log_rstar_series(mpmath.ldexp(1, -300), ctx)) < mpmath.ldexp(1, -290)


def product_log_coefficients(n_max):
    """Coefficients of log prod (1 - x^n)^chi(n), expanded as -sum chi(n) x^(nk)/k."""
    c = [Fraction(0)] * (n_max + 1)
    for n in range(1, n_max + 1):
        chi = character(n, 5)
        if chi:
            for k in range(1, n_max // n + 1):
                c[n * k] -= Fraction(chi, k)
    return c[1:]


def test_log_series_coefficients():
    assert log_rstar_coefficients(50) == product_log_coefficients(50)


@pytest.mark.parametrize("x", ["1", "1/2"])
def test_mod3_forms_agree(ctx, x):
    xx = Fraction(x)
    prod = y2_product(xx, ctx)
    assert close(y2_log_series(xx, ctx), prod)
    assert close(y2_rational_series(xx, ctx), prod)
    with ctx.workprec():
        assert close(y2_rational_series(xx, ctx, swapped_sign=True), 1 / prod)


def test_mod3_large_step(ctx):
    with ctx.workprec():
        assert abs(y2_log_series(400, ctx) - 1) < mpmath.ldexp(1, -250)


def test_m_series_basics(ctx):
    assert m_series(0, "0.3", ctx) == 1
    with pytest.raises(DomainError):
        bilateral_theta(0, "0.3", ctx)


@pytest.mark.parametrize("c", ["1/2", "1", "2"])
@pytest.mark.parametrize("q", ["0.1", "0.3", "0.5"])
def test_bilateral_identity(ctx, c, q):
    with mp.workprec(400):
        cc, qq = mpmath.mpmathify(Fraction(c)), mpf(q)
        lhs = m_series(cc, qq, ctx) + m_series(1 / cc, qq, ctx) / cc
    assert close(lhs, bilateral_theta(cc, qq, ctx))


def test_shifted_bilateral(ctx):
    with mp.workprec(400):
        q = mpf("0.2")
        a = 1
        lhs = m_series(q ** a, q, ctx) + m_series(q ** -a, q, ctx) / q ** a
    assert close(lhs, theta_sum(Fraction(1, 2), Fraction(3, 2), 0, q, ctx))


def test_signed_m_series(ctx):
    with mp.workprec(400):
        q = mpf("0.3")
        oracle = mpmath.nsum(lambda k: (-2) ** k * q ** (k * (k + 1) / 2), [0, mpmath.inf])
    assert close(signed_m_series(2, q, ctx), oracle)


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(9, 10)))
def test_rr_product_is_log_series_exp(q):
    ctx = PrecisionContext(128)
    with mp.workprec(300):
        lhs = mpmath.exp(log_rstar_series(q, ctx))
        rhs = product_form(RSTAR_SPEC, q, ctx)
        assert abs(lhs - rhs) < mpmath.ldexp(1, -120) * max(1, abs(rhs))


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(9, 10)))
def test_bilateral_symmetry_property(c):
    # sum c^k q^(k(k+1)/2) is invariant under c -> 1/(c q)
    ctx = PrecisionContext(128)
    with mp.workprec(300):
        q = mpf("0.4")
        cc = mpmath.mpmathify(c)
        lhs = bilateral_theta(cc, q, ctx)
        rhs = bilateral_theta(1 / (cc * q), q, ctx)
        assert abs(lhs - rhs) < mpmath.ldexp(1, -120) * max(1, abs(lhs))
