from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpf

from ramacf import cfrac, modular
from ramacf.modular import (
    eq11_sides,
    modular_point,
    product_log_derivative,
    rr_derivative_formula,
    rr_eta_quotient,
    rr_theta_quotient,
    weight_F,
)
from ramacf.numerics import DomainError, PrecisionContext
from ramacf.qseries import RR_SPEC, ProductSpec, product_form

TOL = mpmath.ldexp(1, -250)
ORACLE_BITS = 400


def close(a, b, tol=TOL):
    with mp.workprec(ORACLE_BITS):
        return abs(a - b) <= tol * max(1, abs(b))


def rr_oracle(q):
    qp = mpmath.qp
    with mp.workprec(ORACLE_BITS):
        return mpmath.root(q, 5) * qp(q, q ** 5) * qp(q ** 4, q ** 5) / (qp(q ** 2, q ** 5) * qp(q ** 3, q ** 5))


def rr_closed_2pi():
    with mp.workprec(ORACLE_BITS):
        s5 = mpmath.sqrt(5)
        return mpmath.sqrt((5 + s5) / 2) - (s5 + 1) / 2


def test_modular_point_r1(ctx):
    pt = modular_point(1, ctx)
    with mp.workprec(ORACLE_BITS):
        K = mpmath.gamma(mpf(1) / 4) ** 2 / (4 * mpmath.sqrt(mpmath.pi))
        half = 1 / mpmath.sqrt(2)
    assert close(pt.K, K)
    assert close(pt.k, half) and close(pt.k_prime, half)


@pytest.mark.parametrize("r", [1, 2, 3, 4, "1/3"])
def test_jacobi_modulus_identity(ctx, r):
    pt = modular_point(r, ctx)
    with mp.workprec(ORACLE_BITS):
        assert abs(pt.k ** 2 + pt.k_prime ** 2 - 1) < TOL
        # K against the AGM form of the complete elliptic integral
        assert close(pt.K, mpmath.ellipk(pt.k ** 2), mpmath.ldexp(1, -240))


def test_modular_point_domain(ctx):
    with pytest.raises(DomainError):
        modular_point(0, ctx)


def test_theta_quotient(ctx):
    with mp.workprec(ORACLE_BITS):
        two_pi = 2 * mpmath.pi
    assert close(rr_theta_quotient(two_pi, PrecisionContext(300)), rr_closed_2pi())
    with mp.workprec(ORACLE_BITS):
        q = mpmath.exp(-1)
    assert close(rr_theta_quotient(1, ctx), rr_oracle(q))
    # both thetas tend to 1 for large x
    x = mpf(200)
    with mp.workprec(ORACLE_BITS):
        lead = mpmath.exp(-x / 5)
    assert abs(rr_theta_quotient(x, ctx) / lead - 1) < mpf("1e-80")
    with pytest.raises(DomainError):
        rr_theta_quotient(0, ctx)


def test_eta_quotient(ctx):
    assert close(rr_eta_quotient(1, ctx), rr_closed_2pi())
    with mp.workprec(ORACLE_BITS):
        q = mpmath.exp(-mpmath.pi)
    assert close(rr_eta_quotient(mpf(1) / 2, ctx), rr_oracle(q))
    # large tau: x1 grows, R decays towards 0 from above
    big = rr_eta_quotient(8, ctx)
    with mp.workprec(ORACLE_BITS):
        lead = mpmath.exp(-16 * mpmath.pi / 5)
    assert big > 0 and abs(big / lead - 1) < mpf("1e-20")
    with pytest.raises(DomainError):
        rr_eta_quotient(-1, ctx)


@pytest.mark.parametrize("x", ["1", "pi", "2*pi"])
def test_four_routes_agree(ctx, x):
    with mp.workprec(ORACLE_BITS):
        x = eval(x, {"pi": mpmath.pi})
        q = mpmath.exp(-x)
        tau = x / (2 * mpmath.pi)
    values = [
        rr_theta_quotient(x, ctx),
        rr_eta_quotient(tau, ctx),
        product_form(RR_SPEC, q, ctx),
        cfrac.eval_cf(cfrac.rr(q, ctx), ctx),
    ]
    for v in values:
        assert close(v, rr_oracle(q))


def numeric_oracle_derivative(spec, q):
    qp = mpmath.qp
    with mp.workprec(ORACLE_BITS):
        def f(t):
            out = mpmath.power(t, mpf(spec.prefactor_exponent.numerator) / spec.prefactor_exponent.denominator)
            for p, a, e in spec.terms:
                out *= qp(t ** p, t ** a) ** e
            return out
        return mpmath.diff(f, q)


@pytest.mark.parametrize("qt", ["0.1", "exp(-pi)"])
def test_log_derivative_vs_numeric(ctx, qt):
    with mp.workprec(ORACLE_BITS):
        q = mpmath.exp(-mpmath.pi) if qt == "exp(-pi)" else mpf(qt)
    analytic = product_log_derivative(RR_SPEC, q, ctx)
    assert close(analytic, numeric_oracle_derivative(RR_SPEC, q), mpmath.ldexp(1, -128))


def test_rr_derivative_at_exp_minus_2pi(ctx):
    with mp.workprec(ORACLE_BITS):
        s5 = mpmath.sqrt(5)
        pi = mpmath.pi
        closed = (8 * mpmath.sqrt(mpf(2) / 5 * (9 + 5 * s5 - 2 * mpmath.sqrt(50 + 22 * s5)))
                  * mpmath.exp(2 * pi) * mpmath.gamma(mpf(5) / 4) ** 4 / pi ** 3)
        q = mpmath.exp(-2 * pi)
    assert close(product_log_derivative(RR_SPEC, q, ctx), closed)
    assert close(rr_derivative_formula(q, 4, ctx), closed)


def test_derivative_formula_r1(ctx):
    with mp.workprec(ORACLE_BITS):
        q = mpmath.exp(-mpmath.pi)
    assert close(rr_derivative_formula(q, 1, ctx), product_log_derivative(RR_SPEC, q, ctx))
    with pytest.raises(DomainError):
        rr_derivative_formula(q, 2, ctx)


def test_explicit_derivative_constants(ctx):
    with mp.workprec(ORACLE_BITS):
        pi = mpmath.pi
        q = mpmath.exp(-pi)
        g = mpmath.exp(pi) * mpmath.gamma(mpf(1) / 4) ** 4 / pi ** 3
        c1 = g / (64 * mpmath.power(2, mpf(5) / 8))
        c2 = -g / (32 * mpmath.power(2, mpf(7) / 8))
    s1 = ProductSpec(Fraction(1, 8), ((3, 4, 1), (1, 4, 1), (2, 4, -2)))
    s2 = ProductSpec(Fraction(-1, 24), ((3, 4, 1), (1, 4, 1)))
    assert close(product_log_derivative(s1, q, ctx), c1)
    assert close(product_log_derivative(s2, q, ctx), c2)


@pytest.mark.parametrize("qt", ["0.05", "0.1", "exp(-pi)", "exp(-2*pi)"])
def test_quotient_identities(ctx, qt):
    qp = mpmath.qp
    with mp.workprec(ORACLE_BITS):
        q = eval(qt, {"exp": mpmath.exp, "pi": mpmath.pi}) if "exp" in qt else mpf(qt)
        q5 = mpmath.root(q, 5)
        rhs1 = qp(q5, q5) / (q5 * qp(q ** 5, q ** 5))
        rhs2 = qp(q, q) ** 6 / (q * qp(q ** 5, q ** 5) ** 6)
    R = product_form(RR_SPEC, q, ctx)
    with mp.workprec(ORACLE_BITS):
        assert close(1 / R - 1 - R, rhs1)
        assert close(1 / R ** 5 - 11 - R ** 5, rhs2, TOL * 4)


@pytest.mark.parametrize("tau", ["1", "1/2"])
def test_x1_log_derivative_sides(ctx, tau):
    lhs, rhs = eq11_sides(Fraction(tau), ctx)
    assert close(lhs, rhs, mpmath.ldexp(1, -150))


@pytest.mark.parametrize("tau", ["1", "0.7"])
def test_weight_F_substitution(ctx, tau):
    with mp.workprec(ORACLE_BITS):
        q = mpmath.exp(-2 * mpmath.pi * mpf(tau))
    R = product_form(RR_SPEC, q, ctx)
    with mp.workprec(ORACLE_BITS):
        lhs = 10 / weight_F(2 * R)
        rhs = mpmath.root(1 / R ** 5 - 11 - R ** 5, 6)
        assert close(lhs, rhs)


def test_pure_reentrant(ctx):
    a = modular_point(2, ctx)
    b = modular_point(2, ctx)
    assert a == b
    with pytest.raises(Exception):
        a.k = 0
    assert modular.ModularPoint is type(a)
