"""Elliptic-modular quantities and closed forms of R(q).

k, k' and K are read off theta null values at q = e^(-pi sqrt r).  Derivatives
of q-products are computed analytically by logarithmic differentiation; the
finite-difference routine in :mod:`ramacf.numerics` is only a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .numerics import DomainError, PrecisionContext, Real, num_derivative, rational_power, to_mpf
from .qseries import (
    RR_SPEC,
    ProductSpec,
    _check_nome,
    _eps,
    _eta,
    _pochhammer_inf,
    _product_form,
    _theta2,
    _theta3,
    _theta4,
    _theta4_shift,
)


@dataclass(frozen=True)
class ModularPoint:
    r: Fraction
    q: mpf
    k: mpf
    k_prime: mpf
    K: mpf


def _nome_of(r):
    return mpmath.exp(-mpmath.pi * mpmath.sqrt(to_mpf(r)))


def _modular_point(r):
    q = _nome_of(r)
    t2, t3, t4 = _theta2(q), _theta3(q), _theta4(q)
    t3sq = t3 * t3
    return q, t2 * t2 / t3sq, t4 * t4 / t3sq, mpmath.pi / 2 * t3sq


def modular_point(r: Real, ctx: PrecisionContext) -> ModularPoint:
    r = Fraction(r) if not isinstance(r, (mpf, str)) else r
    with ctx.workprec():
        if not to_mpf(r) > 0:
            raise DomainError("modular_point needs r > 0")
        q, k, kp, K = _modular_point(r)
        return ModularPoint(r, ctx.round(q), ctx.round(k), ctx.round(kp), ctx.round(K))


def rr_theta_quotient(x: Real, ctx: PrecisionContext) -> mpf:
    """R(e^-x) = e^(-x/5) theta4(3ix/4, e^(-5x/2)) / theta4(ix/4, e^(-5x/2))."""
    with ctx.workprec():
        x = to_mpf(x)
        if not x > 0:
            raise DomainError("rr_theta_quotient needs x > 0")
        Q = mpmath.exp(-5 * x / 2)
        value = mpmath.exp(-x / 5) * _theta4_shift(3 * x / 4, Q) / _theta4_shift(x / 4, Q)
        return ctx.round(value)


def _x1(tau):
    return _eta(tau / 5) / _eta(5 * tau)


def rr_eta_quotient(tau: Real, ctx: PrecisionContext) -> mpf:
    """R(e^(-2 pi tau)) = (sqrt(x^2 + 2x + 5) - x - 1)/2 with x = eta(i tau/5)/eta(5 i tau)."""
    with ctx.workprec():
        tau = to_mpf(tau)
        if not tau > 0:
            raise DomainError("rr_eta_quotient needs tau > 0")
        x = _x1(tau)
        # (s - x - 1)/2 == 2/(s + x + 1): no cancellation for large x
        s = mpmath.sqrt(x * x + 2 * x + 5)
        return ctx.round(2 / (s + x + 1))


def _log_derivative(spec: ProductSpec, q):
    """d/dq log(product) = alpha/q - sum_j e_j sum_k n_k q^(n_k - 1)/(1 - q^n_k)."""
    eps = _eps()
    total = to_mpf(spec.prefactor_exponent) / q
    for p, a, e in spec.terms:
        qa = rational_power(q, a)
        t = rational_power(q, p)      # q^(p + k a)
        n = to_mpf(p)                 # p + k a
        step = to_mpf(a)
        inner = mpf(0)
        while True:
            term = n * t / (1 - t)
            inner += term
            # successive terms shrink by at most rho = qa (1 + a/n) / (1 - t) for all later k
            rho = qa * (1 + step / n) / (1 - t)
            if rho < 1 and term * rho / (1 - rho) < eps * max(abs(inner), 1):
                break
            t *= qa
            n += step
        total -= e * inner / q
    return total


def product_log_derivative(spec: ProductSpec, q: Real, ctx: PrecisionContext) -> mpf:
    """d/dq of product_form(spec, q), via logarithmic differentiation."""
    with ctx.workprec():
        q = to_mpf(q)
        _check_nome(q)
        if q == 0:
            raise DomainError("product_log_derivative needs q > 0")
        return ctx.round(_product_form(spec, q) * _log_derivative(spec, q))


def rr_derivative_formula(q: Real, r: Real, ctx: PrecisionContext) -> mpf:
    """R'(q) = 2 2^(1/3) k^(1/3) k'^(4/3) K^2 / (5 pi^2 q) R(q) (1/R^5 - 11 - R^5)^(1/6).

    ``r`` must be the value with q = e^(-pi sqrt r); it is checked, never inferred.
    """
    with ctx.workprec():
        q = to_mpf(q)
        nome, k, kp, K = _modular_point(r)
        if abs(q - nome) > mpmath.ldexp(abs(nome), -ctx.working_bits + 8):
            raise DomainError(f"q does not equal e^(-pi sqrt r) for r = {r}")
        R = _product_form(RR_SPEC, nome)
        R5 = R ** 5
        value = (2 * mpmath.cbrt(2) * mpmath.cbrt(k) * kp ** (mpf(4) / 3) * K ** 2
                 / (5 * mpmath.pi ** 2 * nome) * R * mpmath.root(1 / R5 - 11 - R5, 6))
        return ctx.round(value)


def _log_x1(tau, ctx):
    with ctx.workprec():
        return ctx.round(mpmath.log(_x1(to_mpf(tau))))


def weight_F(w):
    """F(w) = 10 / (-11 + 32/w^5 - w^5/32)^(1/6)."""
    w5 = w ** 5
    return 10 / mpmath.root(-11 + 32 / w5 - w5 / 32, 6)


def eq11_sides(tau: Real, ctx: PrecisionContext) -> tuple[mpf, mpf]:
    """Both sides of (1/pi) d/dtau log x1 = 4 eta^4 s / (x1 F(s - x1 - 1)), s = sqrt(x1^2+2x1+5).

    The left side comes from a numerical derivative, so it is accurate to
    about two thirds of ``ctx.working_bits``.
    """
    lhs = num_derivative(_log_x1, tau, ctx)
    with ctx.workprec():
        lhs = lhs / mpmath.pi
        tau = to_mpf(tau)
        x = _x1(tau)
        s = mpmath.sqrt(x * x + 2 * x + 5)
        w = 4 / (s + x + 1)   # s - x - 1, written without cancellation
        rhs = 4 * _eta(tau) ** 4 * s / (x * weight_F(w))
        return ctx.round(lhs), ctx.round(rhs)
