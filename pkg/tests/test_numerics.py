from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from ramacf.numerics import (
    BigReal,
    ConvergenceError,
    PrecisionContext,
    character,
    divisor_sum_chi,
    divisor_sum_table,
    evaluate,
    integrate,
    num_derivative,
    rational_power,
    to_mpf,
)


def brute_divisor_sum(n, modulus):
    return sum(character(d, modulus) * d for d in range(1, n + 1) if n % d == 0)


def test_context_fields():
    c = PrecisionContext(256, 64)
    assert c.prec == 320
    assert c.target_tolerance == mpmath.ldexp(1, -256)
    assert c.internal().working_bits == 320
    assert c.doubled().working_bits == 512
    with pytest.raises(ValueError):
        PrecisionContext(32)


def test_round_drops_to_working_bits():
    c = PrecisionContext(64, 64)
    with c.workprec():
        x = mpf(1) / 3
    y = c.round(x)
    assert y != x
    with mp.workprec(64):
        assert y == +x


def test_decimal_strings_are_exact():
    with mp.workprec(400):
        x = to_mpf("0.1")
        assert abs(x * 10 - 1) < mpmath.ldexp(1, -395)
        assert abs(to_mpf(Fraction(1, 3)) * 3 - 1) < mpmath.ldexp(1, -395)


def test_bigreal_and_evaluate(ctx):
    b = evaluate(lambda c: mpmath.sqrt(2), ctx)
    assert isinstance(b, BigReal) and b.bits == 256
    assert b.close_to(mpmath.sqrt(2), mpmath.ldexp(1, -250))
    assert abs(float(b) - 2 ** 0.5) < 1e-15


def test_rational_power():
    with mp.workprec(300):
        x = mpf(7)
        assert abs(rational_power(x, Fraction(1, 5)) ** 5 - 7) < mpmath.ldexp(1, -290)
        assert rational_power(x, Fraction(0)) == 1
        assert rational_power(x, Fraction(3)) == 343


def test_character_tables():
    assert [character(n, 5) for n in range(1, 6)] == [1, -1, -1, 1, 0]
    assert [character(n, 3) for n in range(1, 4)] == [1, -1, 0]
    with pytest.raises(ValueError):
        character(1, 7)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=1000), st.sampled_from([3, 5]))
def test_divisor_sum_matches_brute_force(n, modulus):
    assert divisor_sum_chi(n, modulus) == brute_divisor_sum(n, modulus)


@pytest.mark.parametrize("modulus", [3, 5])
def test_divisor_sum_table_all_n(modulus):
    table = divisor_sum_table(1000, modulus)
    assert all(table[n] == brute_divisor_sum(n, modulus) for n in range(1, 1001))


def test_num_derivative_of_exp(ctx):
    d = num_derivative(lambda x, c: mpmath.exp(x), 1, ctx)
    with ctx.workprec():
        assert abs(d - mpmath.e) < mpmath.ldexp(1, -160)


@pytest.mark.parametrize("power, exact", [("-1/2", 2), ("-5/6", 6), ("10", "1/11")])
def test_integrate_powers(ctx, power, exact):
    p = Fraction(power)

    def f(x, c):
        with c.workprec():
            return x ** to_mpf(p)

    value = integrate(f, 0, 1, ctx)
    with ctx.workprec():
        assert abs(value - to_mpf(Fraction(exact))) < mpmath.ldexp(1, -250)


def test_integrate_smooth_against_closed_form(ctx):
    value = integrate(lambda x, c: mpmath.exp(-x * x), 0, 2, ctx)
    with ctx.workprec():
        assert abs(value - mpmath.sqrt(mpmath.pi) / 2 * mpmath.erf(2)) < mpmath.ldexp(1, -250)


def test_integrate_reports_nonconvergence(ctx):
    # an oscillation the step never resolves within two levels
    with pytest.raises(ConvergenceError):
        integrate(lambda x, c: mpmath.sin(1000 * x), 0, 1, ctx, max_levels=2)
