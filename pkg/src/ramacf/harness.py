"""Named quantities, identity cases and the suite runner.

A route is a named evaluator ``route(params, ctx) -> mpf``; an identity case
pairs two routes with a parameter map.  Parameters are kept as strings or
fractions and parsed at the precision of the run, so ``"exp(-pi)"`` and
``"0.1"`` are exact to the last bit.
"""

from __future__ import annotations

import ast
import json
import math
import operator
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Optional, Union

import mpmath
from mpmath import mp, mpf

from . import algid, cfrac, hypergeom, modular, qseries
from .numerics import DomainError, PrecisionContext, integrate, num_derivative, to_mpf
from .report import FAIL, FLAGGED, NOT_FOUND, PASS, Report, compare, fmt

CATEGORIES = ("cf-product", "functional-equation", "derivative", "integral", "algebraicity", "closed-form")


class UnknownCaseError(KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown case"


# ---------------------------------------------------------------------------
# Parameter expressions
# ---------------------------------------------------------------------------

_FUNCS = {
    "sqrt": mpmath.sqrt,
    "exp": mpmath.exp,
    "log": mpmath.log,
    "cbrt": mpmath.cbrt,
    "gamma": mpmath.gamma,
    "cos": mpmath.cos,
    "sin": mpmath.sin,
}
_CONSTS = {"pi": lambda: +mpmath.pi, "e": lambda: +mpmath.e}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_real(text, ctx: Optional[PrecisionContext] = None) -> mpf:
    """Evaluate a small arithmetic expression at the current (or ctx's) precision.

    Allowed: decimal literals (read exactly), + - * / ** ^, pi, e, and
    sqrt, exp, log, cbrt, gamma, cos, sin.
    """
    if isinstance(text, (int, Fraction, mpf)):
        if ctx is None:
            return to_mpf(text)
        with ctx.workprec():
            return to_mpf(text)
    if not isinstance(text, str):
        raise TypeError(f"parameter must be a string or number, got {type(text).__name__}")
    src = text.strip().replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError:
        raise DomainError(f"cannot parse {text!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return mpf(ast.get_source_segment(src, node))
        if isinstance(node, ast.Name) and node.id in _CONSTS:
            return _CONSTS[node.id]()
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise DomainError(f"unsupported expression element in {text!r}")

    if ctx is None:
        return ev(tree)
    with ctx.workprec():
        return ev(tree)


def _get(p, key, default=None):
    if key in p:
        return parse_real(p[key])
    if default is None:
        raise DomainError(f"missing parameter {key!r}")
    return parse_real(default)


def _nome(p):
    """q from q=..., x=... (q = e^-x), tau=... (q = e^(-2 pi tau)) or r=... (q = e^(-pi sqrt r))."""
    if "q" in p:
        return _get(p, "q")
    if "x" in p:
        return mpmath.exp(-_get(p, "x"))
    if "tau" in p:
        return mpmath.exp(-2 * mpmath.pi * _get(p, "tau"))
    if "r" in p:
        return mpmath.exp(-mpmath.pi * mpmath.sqrt(_get(p, "r")))
    raise DomainError("expected one of q, x, tau, r")


def _step(p):
    """x with q = e^-x, from the same parameter forms as _nome."""
    if "x" in p:
        return _get(p, "x")
    return -mpmath.log(_nome(p))


# ---------------------------------------------------------------------------
# Routes
# ---------------------------------------------------------------------------

Route = Callable[[Mapping, PrecisionContext], object]
ROUTES: dict[str, Route] = {}


def route(name):
    def deco(fn):
        ROUTES[name] = fn
        return fn
    return deco


def _const(name, expr):
    ROUTES[name] = lambda p, ctx: parse_real(expr)


# closed forms
_const("rr-closed-2pi", "sqrt((5 + sqrt(5))/2) - (sqrt(5) + 1)/2")
_const("rr-derivative-closed-2pi",
       "8*sqrt(2/5*(9 + 5*sqrt(5) - 2*sqrt(50 + 22*sqrt(5)))) * exp(2*pi)/pi^3 * gamma(5/4)^4")
_const("h-closed-pi-half", "sqrt(1 + 2*sqrt(2) - 2*sqrt(2 + sqrt(2)))")
_const("h-closed-pi-sqrt2-half", "sqrt(3 + 2*sqrt(2) - 2*sqrt(4 + 3*sqrt(2)))")
_const("h-functional-closed", "2*(2 + sqrt(2))")
_const("golden-closed", "(sqrt(5) + 1)/2")
_const("K1-closed", "gamma(1/4)^2/(4*sqrt(pi))")
_const("eta-i-closed", "gamma(1/4)/(2*pi^(3/4))")
_const("pentagonal-theta-closed", "14/27 + 8/(3*sqrt(3)) + sqrt(2048/243 + 3584/(243*sqrt(3)))/2")
_const("deriv-1-8-closed", "exp(pi)*gamma(1/4)^4/(64*2^(5/8)*pi^3)")
_const("deriv-minus-1-24-closed", "-exp(pi)*gamma(1/4)^4/(32*2^(7/8)*pi^3)")
_const("zero", "0")
_const("one", "1")

RHO_POLY = (16, 0, -240, 800, -2900, -6000, -6500, 17500, 625)
DERIV_1_8_SPEC = qseries.ProductSpec(Fraction(1, 8), ((3, 4, 1), (1, 4, 1), (2, 4, -2)), "deriv-1-8")
DERIV_MINUS_1_24_SPEC = qseries.ProductSpec(Fraction(-1, 24), ((3, 4, 1), (1, 4, 1)), "deriv-minus-1-24")


@route("expr")
def _expr(p, ctx):
    return _get(p, "value")


@route("golden-cf")
def _golden_cf(p, ctx):
    return cfrac.eval_cf(cfrac.golden(ctx), ctx)


# R(q) by five routes
@route("rr")
@route("rr-product")
def _rr_product(p, ctx):
    return qseries.product_form(qseries.RR_SPEC, _nome(p), ctx)


@route("rr-cf")
def _rr_cf(p, ctx):
    return cfrac.eval_cf(cfrac.rr(_nome(p), ctx), ctx)


@route("rr-log-series")
def _rr_log_series(p, ctx):
    q = _nome(p)
    return mpmath.exp(qseries.log_rstar_series(q, ctx)) * mpmath.root(q, 5)


@route("rr-rational-series")
def _rr_rational(p, ctx):
    return qseries.rr_rational_series(_step(p), ctx)


@route("rr-theta-quotient")
def _rr_theta(p, ctx):
    return modular.rr_theta_quotient(_step(p), ctx)


@route("rr-eta-quotient")
def _rr_eta(p, ctx):
    return modular.rr_eta_quotient(_step(p) / (2 * mpmath.pi), ctx)


@route("rstar-product")
def _rstar_product(p, ctx):
    return qseries.product_form(qseries.RSTAR_SPEC, _nome(p), ctx)


@route("rstar-exp-log-series")
def _rstar_exp_log(p, ctx):
    return mpmath.exp(qseries.log_rstar_series(_nome(p), ctx))


# quotient identities for R
def _f_minus(q, ctx):
    return qseries.euler_f(q, ctx)


@route("rr-quotient-f-lhs")
def _quotient_f_lhs(p, ctx):
    R = _rr_product(p, ctx)
    return 1 / R - 1 - R


@route("rr-quotient-f-rhs")
def _quotient_f_rhs(p, ctx):
    q = _nome(p)
    q5 = mpmath.root(q, 5)
    return _f_minus(q5, ctx) / (q5 * _f_minus(q ** 5, ctx))


@route("rr-quotient-f6-lhs")
def _quotient_f6_lhs(p, ctx):
    R5 = _rr_product(p, ctx) ** 5
    return 1 / R5 - 11 - R5


@route("rr-quotient-f6-rhs")
def _quotient_f6_rhs(p, ctx):
    q = _nome(p)
    return _f_minus(q, ctx) ** 6 / (q * _f_minus(q ** 5, ctx) ** 6)


# other product-backed fractions
@route("cubic-product")
def _cubic_product(p, ctx):
    return qseries.product_form(qseries.CUBIC_SPEC, _nome(p), ctx)


@route("cubic-alt-product")
def _cubic_alt_product(p, ctx):
    return qseries.product_form(qseries.CUBIC_ALT_SPEC, _nome(p), ctx)


@route("cubic-cf")
def _cubic_cf(p, ctx):
    return cfrac.eval_cf(cfrac.cubic(_nome(p), ctx), ctx)


@route("octic-product")
def _octic_product(p, ctx):
    return qseries.product_form(qseries.OCTIC_SPEC, _nome(p), ctx)


@route("octic-cf")
@route("H")
def _octic_cf(p, ctx):
    return cfrac.eval_cf(cfrac.octic(_nome(p), ctx), ctx)


@route("octic-rational-series")
def _octic_rational(p, ctx):
    return qseries.octic_rational_series(_step(p), ctx)


@route("h-functional-lhs")
def _h_functional_lhs(p, ctx):
    a = _get(p, "a")
    b = _get(p, "b") if "b" in p else mpmath.pi ** 2 / a
    s2 = mpmath.sqrt(2)
    Ha = cfrac.eval_cf(cfrac.h_cf(a, ctx), ctx)
    Hb = cfrac.eval_cf(cfrac.h_cf(b, ctx), ctx)
    return (1 + s2 + Ha) * (1 + s2 + Hb)


@route("vi-product")
def _vi_product(p, ctx):
    return qseries.product_form(qseries.VI_SPEC, _nome(p), ctx)


@route("vi-cf")
def _vi_cf(p, ctx):
    return cfrac.eval_cf(cfrac.vi_cf(_nome(p), ctx), ctx)


@route("vi-cf-classical")
def _vi_cf_classical(p, ctx):
    return cfrac.eval_cf(cfrac.vi_cf_classical(_nome(p), ctx), ctx)


@route("ratio8-cf")
def _ratio8_cf(p, ctx):
    q = _nome(p)
    return q * cfrac.eval_cf(cfrac.ratio8(q, ctx), ctx) ** 8


@route("ratio8-product")
def _ratio8_product(p, ctx):
    q = _nome(p)
    return q * (qseries._pochhammer_inf(-q * q, q * q) / qseries._pochhammer_inf(-q, q * q)) ** 8


# partial theta family
@route("m-cf-plus")
def _m_cf_plus(p, ctx):
    return cfrac.eval_cf(cfrac.m_cf_plus(_get(p, "c"), _nome(p), ctx), ctx)


@route("signed-m-series")
def _signed_m(p, ctx):
    return qseries.signed_m_series(_get(p, "c"), _nome(p), ctx)


@route("m-cf-alt")
def _m_cf_alt(p, ctx):
    return cfrac.eval_cf(cfrac.m_cf_alt(_get(p, "c"), _nome(p), ctx), ctx)


@route("m-series")
def _m_series(p, ctx):
    return qseries.m_series(_get(p, "c"), _nome(p), ctx)


@route("m-bilateral-sum")
def _m_bilateral_sum(p, ctx):
    c, q = _get(p, "c"), _nome(p)
    return qseries.m_series(c, q, ctx) + qseries.m_series(1 / c, q, ctx) / c


@route("bilateral-theta")
def _bilateral(p, ctx):
    return qseries.bilateral_theta(_get(p, "c"), _nome(p), ctx)


@route("m-shift-sum")
def _m_shift_sum(p, ctx):
    a, q = _get(p, "a"), _nome(p)
    qa = q ** a
    return qseries.m_series(qa, q, ctx) + qseries.m_series(1 / qa, q, ctx) / qa


@route("theta-sum-shift")
def _theta_sum_shift(p, ctx):
    a = Fraction(str(p["a"]))
    return qseries.theta_sum(Fraction(1, 2), a + Fraction(1, 2), 0, _nome(p), ctx)


@route("odd-a-cf")
def _odd_a_cf(p, ctx):
    return cfrac.eval_cf(cfrac.odd_a_cf(int(_get(p, "a")), _nome(p), ctx), ctx)


@route("odd-a-theta")
def _odd_a_theta(p, ctx):
    a, q = int(_get(p, "a")), _nome(p)
    head = sum(q ** (k * k) for k in range((a - 1) // 2 + 1))
    return mpf(1) / 2 - head + qseries.theta3(q, ctx) / 2


# mod-3 analogue
@route("y2-log-series")
def _y2_log(p, ctx):
    return qseries.y2_log_series(_step(p), ctx)


@route("y2-product")
def _y2_product(p, ctx):
    return qseries.y2_product(_step(p), ctx)


@route("y2-rational-series")
def _y2_rational(p, ctx):
    return qseries.y2_rational_series(_step(p), ctx)


@route("y2-rational-swapped")
def _y2_rational_swapped(p, ctx):
    return qseries.y2_rational_series(_step(p), ctx, swapped_sign=True)


# q-series ground truths
@route("euler-f")
def _euler(p, ctx):
    return qseries.euler_f(_nome(p), ctx)


@route("pentagonal-sum")
def _pentagonal(p, ctx):
    return qseries._bilateral_quadratic(Fraction(3, 2), Fraction(-1, 2), Fraction(0), _nome(p), weight=mpf(-1))


@route("theta2")
def _theta2(p, ctx):
    return qseries.theta2(_nome(p), ctx)


@route("theta3")
def _theta3(p, ctx):
    return qseries.theta3(_nome(p), ctx)


@route("theta4")
def _theta4(p, ctx):
    return qseries.theta4(_nome(p), ctx)


@route("theta3-fourth")
def _theta3_fourth(p, ctx):
    return qseries.theta3(_nome(p), ctx) ** 4


@route("theta2-theta4-fourth")
def _theta24_fourth(p, ctx):
    q = _nome(p)
    return qseries.theta2(q, ctx) ** 4 + qseries.theta4(q, ctx) ** 4


@route("theta-sum-1-0-0")
def _theta_sum_100(p, ctx):
    return qseries.theta_sum(1, 0, 0, _nome(p), ctx)


@route("theta4-shift-0")
def _theta4_shift0(p, ctx):
    return qseries.theta4_shift(0, _nome(p), ctx)


@route("eta")
def _eta(p, ctx):
    return qseries.dedekind_eta(_get(p, "t"), ctx)


@route("eta-inverse")
def _eta_inverse(p, ctx):
    return qseries.dedekind_eta(1 / _get(p, "t"), ctx)


@route("eta-scaled")
def _eta_scaled(p, ctx):
    t = _get(p, "t")
    return mpmath.sqrt(t) * qseries.dedekind_eta(t, ctx)


# modular
@route("modular-K")
def _modular_K(p, ctx):
    return modular.modular_point(_get(p, "r"), ctx).K


@route("modulus-sum")
def _modulus_sum(p, ctx):
    pt = modular.modular_point(_get(p, "r"), ctx)
    return pt.k ** 2 + pt.k_prime ** 2


@route("theta-sum-value")
def _theta_sum_value(p, ctx):
    return algid.theta_sum_value(Fraction(str(p["a"])), Fraction(str(p["b"])), Fraction(str(p["c"])),
                            _get(p, "r"), ctx)


# derivatives
@route("rr-log-derivative")
def _rr_log_derivative(p, ctx):
    return modular.product_log_derivative(qseries.RR_SPEC, _nome(p), ctx)


@route("rr-numeric-derivative")
def _rr_numeric_derivative(p, ctx):
    return num_derivative(lambda t, c: qseries.product_form(qseries.RR_SPEC, t, c), _nome(p), ctx)


@route("rr-derivative-formula")
def _rr_derivative_formula(p, ctx):
    r = _get(p, "r")
    return modular.rr_derivative_formula(mpmath.exp(-mpmath.pi * mpmath.sqrt(r)), r, ctx)


@route("deriv-1-8")
def _deriv_1_8(p, ctx):
    return modular.product_log_derivative(DERIV_1_8_SPEC, _nome(p), ctx)


@route("deriv-minus-1-24")
def _deriv_minus_1_24(p, ctx):
    return modular.product_log_derivative(DERIV_MINUS_1_24_SPEC, _nome(p), ctx)


def rho_value(ctx):
    """R'(e^-pi) / (e^pi Gamma(1/4)^4 / (16 pi^3))."""
    with ctx.workprec():
        q = mpmath.exp(-mpmath.pi)
        d = modular.product_log_derivative(qseries.RR_SPEC, q, ctx.internal())
        scale = mpmath.exp(mpmath.pi) * mpmath.gamma(mpf(1) / 4) ** 4 / (16 * mpmath.pi ** 3)
        return ctx.round(d / scale)


@route("rho")
def _rho(p, ctx):
    return rho_value(ctx)


@route("rho-poly-residual")
def _rho_poly(p, ctx):
    return algid.eval_poly(RHO_POLY, rho_value(ctx), ctx)


@route("x1-log-derivative")
def _x1_log_derivative(p, ctx):
    return modular.eq11_sides(_get(p, "tau"), ctx)[0]


@route("x1-eta-form")
def _x1_eta_form(p, ctx):
    return modular.eq11_sides(_get(p, "tau"), ctx)[1]


@route("weight-F-at-2R")
def _weight_F_2R(p, ctx):
    R = modular.rr_eta_quotient(_get(p, "tau"), ctx)
    return 10 / modular.weight_F(2 * R)


@route("rr-sixth-root-form")
def _rr_sixth_root(p, ctx):
    R5 = modular.rr_eta_quotient(_get(p, "tau"), ctx) ** 5
    return mpmath.root(1 / R5 - 11 - R5, 6)


# hypergeometric and integrals
@route("2f1")
def _2f1(p, ctx):
    return hypergeom.gauss_2f1(_get(p, "a"), _get(p, "b"), _get(p, "c"), _get(p, "z"), ctx)


@route("log-over-z")
def _log_over_z(p, ctx):
    z = _get(p, "z")
    return -mpmath.log(1 - z) / z


@route("appell-f1")
def _f1(p, ctx):
    return hypergeom.appell_f1(_get(p, "a"), _get(p, "b1"), _get(p, "b2"), _get(p, "c"),
                               _get(p, "x"), _get(p, "y"), ctx)


@route("eta4-antiderivative")
def _eta4_anti(p, ctx):
    return hypergeom.eta4_antiderivative(_get(p, "y"), ctx)


@route("antiderivative-bracket")
def _antiderivative_bracket(p, ctx):
    a, b = _get(p, "a"), _get(p, "b")
    return hypergeom.eta4_antiderivative(b, ctx) - hypergeom.eta4_antiderivative(a, ctx)


@route("eta4-quadrature")
def _eta4_quadrature(p, ctx):
    return 2 * mpmath.pi * integrate(hypergeom.eta4_integrand, _get(p, "a"), _get(p, "b"), ctx)


@route("antiderivative-derivative")
def _antiderivative_derivative(p, ctx):
    return num_derivative(hypergeom.eta4_antiderivative, _get(p, "y"), ctx)


@route("eta4-scaled")
def _eta4_scaled(p, ctx):
    return 2 * mpmath.pi * qseries.dedekind_eta(_get(p, "y"), ctx) ** 4


# ---------------------------------------------------------------------------
# Identity cases
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityCase:
    name: str
    category: str
    lhs_route: str
    rhs_route: str
    parameters: Mapping = field(default_factory=dict)
    tol: Optional[str] = None           # absolute tolerance; default 2^-working_bits
    tol_bits_fraction: Optional[float] = None   # tolerance 2^-(f * working_bits)
    relative: bool = False
    on_mismatch: str = FAIL
    max_bits: Optional[int] = None      # precision cap for quadrature-heavy cases
    min_bits: Optional[int] = None
    notes: str = ""

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")


# case kinds that are not a plain two-route comparison
MINPOLY = "minpoly"
GLASSER = "glasser-suite"

DEFAULT_CONFIG = {
    "precision_bits": 256,
    "guard_bits": 64,
    "max_degree": 16,
    "grids": {
        "cf_q": ["0.05", "0.1", "0.3", "exp(-pi)"],
        "rr_quotient_q": ["0.05", "0.1", "exp(-pi)", "exp(-2*pi)"],
        "rr_x": ["1", "pi", "2*pi"],
        "h_functional_a": ["pi", "pi/2", "pi/3"],
        "m_c": ["1/2", "1", "2"],
        "m_q": ["0.1", "0.3", "0.5"],
        "odd_a": [1, 3, 5],
        "odd_a_q": ["0.2", "0.4"],
        "pentagonal_q": ["0.1", "0.5", "exp(-pi)"],
        "log_series_x": ["0.05", "0.2", "exp(-pi)"],
        "product_i_iv_q": ["0.1", "exp(-pi)"],
        "eta_t": ["1/2", "2", "5"],
        "modulus_r": [1, 2, 3, 4],
        "y2_x": ["1", "1/2"],
        "x1_tau": ["1", "1/2"],
        "antiderivative_intervals": [["1/2", "1"], ["1", "2"]],
        "antiderivative_y": ["0.7", "1.0"],
        "derivative_q": ["0.1", "exp(-pi)"],
    },
}


def load_config(path: Optional[str] = None) -> dict:
    """Defaults overlaid with a JSON file from ``path`` or $RAMACF_CONFIG."""
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))
    path = path or os.environ.get("RAMACF_CONFIG")
    if path:
        with open(path) as fh:
            user = json.load(fh)
        grids = user.pop("grids", {})
        unknown = set(user) - set(cfg)
        if unknown:
            raise DomainError(f"unknown config keys {sorted(unknown)}")
        cfg.update(user)
        cfg["grids"].update(grids)
    return cfg


def _tag(**kw):
    return "[" + ",".join(f"{k}={v}" for k, v in kw.items()) + "]"


def build_cases(config: Optional[dict] = None) -> dict[str, IdentityCase]:
    cfg = config or DEFAULT_CONFIG
    g = cfg["grids"]
    cases: list[IdentityCase] = []
    add = cases.append

    # closed forms of R(e^-2pi) and R'(e^-2pi)
    two_pi = {"q": "exp(-2*pi)"}
    add(IdentityCase("rr-closed-form-2pi", "closed-form", "rr-product", "rr-closed-2pi", two_pi))
    for r in ("cf", "log-series", "rational-series", "theta-quotient", "eta-quotient"):
        add(IdentityCase(f"rr-closed-form-2pi-{r}", "closed-form", f"rr-{r}", "rr-closed-2pi", two_pi))
    add(IdentityCase("rr-derivative-2pi", "closed-form", "rr-log-derivative", "rr-derivative-closed-2pi",
                     two_pi, relative=True))
    add(IdentityCase("rr-derivative-2pi-formula", "closed-form", "rr-derivative-formula",
                     "rr-derivative-closed-2pi", {"r": 4}, relative=True))
    add(IdentityCase("golden-ratio", "closed-form", "golden-cf", "golden-closed"))
    add(IdentityCase("h-pi-half", "closed-form", "octic-cf", "h-closed-pi-half", {"x": "pi/2"}))
    add(IdentityCase("h-pi-sqrt2-half", "closed-form", "octic-cf", "h-closed-pi-sqrt2-half",
                     {"x": "pi*sqrt(2)/2"}))
    add(IdentityCase("K-r1", "closed-form", "modular-K", "K1-closed", {"r": 1}))
    add(IdentityCase("eta-i", "closed-form", "eta", "eta-i-closed", {"t": 1}))
    add(IdentityCase("pentagonal-theta-r1", "closed-form", "theta-sum-value", "pentagonal-theta-closed",
                     {"a": "3/2", "b": "-1/2", "c": "0", "r": 1}))
    for r in g["modulus_r"]:
        add(IdentityCase(f"modulus-sum{_tag(r=r)}", "closed-form", "modulus-sum", "one", {"r": r}))

    # four routes to R(e^-x)
    for x in g["rr_x"]:
        for r in ("cf", "theta-quotient", "eta-quotient", "log-series"):
            add(IdentityCase(f"rr-{r}{_tag(x=x)}", "cf-product" if r == "cf" else "functional-equation",
                             f"rr-{r}", "rr-product", {"x": x}))

    # continued fractions against products and series
    for q in g["cf_q"]:
        for name in ("rr", "cubic", "octic"):
            add(IdentityCase(f"{name}-cf{_tag(q=q)}", "cf-product", f"{name}-cf", f"{name}-product", {"q": q}))
    for c in g["m_c"]:
        for q in g["m_q"]:
            t = _tag(c=c, q=q)
            add(IdentityCase(f"m-cf-plus{t}", "cf-product", "m-cf-plus", "signed-m-series", {"c": c, "q": q}))
            add(IdentityCase(f"m-cf-alt{t}", "cf-product", "m-cf-alt", "m-series", {"c": c, "q": q}))
            add(IdentityCase(f"m-bilateral{t}", "functional-equation", "m-bilateral-sum", "bilateral-theta",
                             {"c": c, "q": q}))
    add(IdentityCase("m-shift[a=1,q=0.2]", "functional-equation", "m-shift-sum", "theta-sum-shift",
                     {"a": 1, "q": "0.2"}))
    for a in g["odd_a"]:
        for q in g["odd_a_q"]:
            add(IdentityCase(f"odd-a-cf{_tag(a=a, q=q)}", "cf-product", "odd-a-cf", "odd-a-theta",
                             {"a": a, "q": q}))
    add(IdentityCase("vi-cf-literal[q=0.3]", "cf-product", "vi-cf", "vi-product", {"q": "0.3"},
                     on_mismatch=FLAGGED,
                     notes="numerators q^(2n), denominators (1-q)(q^(2n)+1)"))
    for q in ("0.3", "exp(-pi)"):
        add(IdentityCase(f"vi-cf-classical{_tag(q=q)}", "cf-product", "vi-cf-classical", "vi-product", {"q": q},
                         notes="numerators q^n (1-q^n)^2, denominators 1-q^(2n+1)"))
        add(IdentityCase(f"ratio8-cf{_tag(q=q)}", "cf-product", "ratio8-cf", "ratio8-product", {"q": q},
                         on_mismatch=FLAGGED, notes="numerator pattern extrapolated beyond the first four terms"))
    add(IdentityCase("cubic-product-forms[q=0.05]", "functional-equation", "cubic-product", "cubic-alt-product",
                     {"q": "0.05"}))

    # functional equations and series/product identities
    for q in g["rr_quotient_q"]:
        add(IdentityCase(f"rr-quotient-f{_tag(q=q)}", "functional-equation", "rr-quotient-f-lhs", "rr-quotient-f-rhs", {"q": q}, relative=True))
        add(IdentityCase(f"rr-quotient-f6{_tag(q=q)}", "functional-equation", "rr-quotient-f6-lhs", "rr-quotient-f6-rhs", {"q": q}, relative=True))
    for i, a in enumerate(g["h_functional_a"]):
        name = "eq4-functional" if i == 0 else f"eq4-functional{_tag(a=a)}"
        add(IdentityCase(name, "functional-equation", "h-functional-lhs", "h-functional-closed", {"a": a}, relative=True,
                         notes="b = pi^2/a"))
    for x in ("pi/2", "1"):
        add(IdentityCase(f"h-rational-series{_tag(x=x)}", "functional-equation", "octic-cf",
                         "octic-rational-series", {"x": x}))
    for q in g["pentagonal_q"]:
        add(IdentityCase(f"pentagonal{_tag(q=q)}", "functional-equation", "euler-f", "pentagonal-sum", {"q": q}))
    for x in g["log_series_x"]:
        add(IdentityCase(f"log-series-product{_tag(x=x)}", "functional-equation", "rr-log-series",
                         "rr-product", {"q": x}))
    for q in g["product_i_iv_q"]:
        add(IdentityCase(f"product-i-iv{_tag(q=q)}", "functional-equation", "cubic-product",
                         "cubic-alt-product", {"q": q}))
    for t in g["eta_t"]:
        add(IdentityCase(f"eta-functional{_tag(t=t)}", "functional-equation", "eta-inverse", "eta-scaled",
                         {"t": t}))
    add(IdentityCase("jacobi-quartic[q=0.3]", "functional-equation", "theta3-fourth", "theta2-theta4-fourth",
                     {"q": "0.3"}))
    add(IdentityCase("theta-sum-reduction[q=0.3]", "functional-equation", "theta-sum-1-0-0", "theta3",
                     {"q": "0.3"}))
    add(IdentityCase("theta4-shift-reduction[q=0.3]", "functional-equation", "theta4-shift-0", "theta4",
                     {"q": "0.3"}))
    for x in g["y2_x"]:
        t = _tag(x=x)
        add(IdentityCase(f"y2-series-product{t}", "functional-equation", "y2-log-series", "y2-product", {"x": x}))
        add(IdentityCase(f"y2-rational-product{t}", "functional-equation", "y2-rational-series", "y2-product",
                         {"x": x}, notes="numerator e^(2nx) - e^(nx)"))
        add(IdentityCase(f"y2-rational-swapped{t}", "functional-equation", "y2-rational-swapped", "y2-product",
                         {"x": x}, on_mismatch=FLAGGED,
                         notes="numerator e^(nx) - e^(2nx); evaluates to the reciprocal"))

    # derivatives
    pi_q = {"q": "exp(-pi)"}
    add(IdentityCase("deriv-example-1-8", "derivative", "deriv-1-8", "deriv-1-8-closed", pi_q, relative=True))
    add(IdentityCase("deriv-example-minus-1-24", "derivative", "deriv-minus-1-24", "deriv-minus-1-24-closed",
                     pi_q, relative=True))
    add(IdentityCase("rho-polynomial", "derivative", "rho-poly-residual", "zero", tol="1e-30",
                     on_mismatch=FLAGGED,
                     notes="P(t) = 16 - 240t^2 + 800t^3 - 2900t^4 - 6000t^5 - 6500t^6 + 17500t^7 + 625t^8"))
    add(IdentityCase("rr-derivative-formula[r=1]", "derivative", "rr-derivative-formula", "rr-log-derivative",
                     {"r": 1}, relative=True))
    for q in g["derivative_q"]:
        add(IdentityCase(f"rr-derivative-numeric{_tag(q=q)}", "derivative", "rr-numeric-derivative",
                         "rr-log-derivative", {"q": q}, tol_bits_fraction=0.5, relative=True,
                         notes="central difference cross-check"))
    for tau in g["x1_tau"]:
        add(IdentityCase(f"x1-log-derivative{_tag(tau=tau)}", "derivative", "x1-log-derivative", "x1-eta-form", {"tau": tau},
                         tol_bits_fraction=0.5, relative=True, notes="left side by central differences"))
        add(IdentityCase(f"weight-F-substitution{_tag(tau=tau)}", "derivative", "weight-F-at-2R",
                         "rr-sixth-root-form", {"tau": tau}, relative=True, notes="w = 2R"))

    # integrals
    for name in ("glasser-f4", "glasser-f4-quintic", "glasser-eta4", "glasser-parameter",
                 "glasser-transformation", "glasser-substitution"):
        add(IdentityCase(name, "integral", GLASSER, GLASSER, max_bits=128,
                         notes="quadrature vs 2F1 at 128 bits; tolerance 1e-20"))
    for a, b in g["antiderivative_intervals"]:
        add(IdentityCase(f"eta4-antiderivative-bracket{_tag(a=a, b=b)}", "integral", "antiderivative-bracket", "eta4-quadrature",
                         {"a": a, "b": b}, tol="1e-25", max_bits=256, relative=True))
    for y in g["antiderivative_y"]:
        add(IdentityCase(f"eta4-antiderivative-ftc{_tag(y=y)}", "integral", "antiderivative-derivative", "eta4-scaled",
                         {"y": y}, tol_bits_fraction=0.5, max_bits=256, relative=True,
                         notes="left side by central differences"))
    add(IdentityCase("2f1-log-reduction[z=1/2]", "integral", "2f1", "log-over-z",
                     {"a": 1, "b": 1, "c": 2, "z": "1/2"}))
    add(IdentityCase("appell-axis[x=0.1]", "integral", "appell-f1", "2f1",
                     {"a": "1/6", "b1": "1/6", "b2": "1/6", "c": "7/6", "x": "0.1", "y": "0",
                      "b": "1/6", "z": "0.1"}))

    # algebraicity
    for inst in algid.INSTANCES:
        add(IdentityCase(inst.name, "algebraicity", inst.name, MINPOLY, min_bits=algid.SUITE_BITS,
                         on_mismatch=NOT_FOUND if inst.required else FLAGGED, notes=inst.description))
    add(IdentityCase("alg-rr-2pi", "algebraicity", "rr-product", MINPOLY, two_pi, min_bits=algid.SUITE_BITS,
                     notes="R(e^(-2 pi))"))
    add(IdentityCase("alg-rho", "algebraicity", "rho", MINPOLY, min_bits=algid.SUITE_BITS,
                     notes="rho = R'(e^-pi) / (e^pi Gamma(1/4)^4 / (16 pi^3))"))

    out = {}
    for c in cases:
        if c.name in out:
            raise ValueError(f"duplicate case name {c.name!r}")
        out[c.name] = c
    return out


for _inst in algid.INSTANCES:
    ROUTES[_inst.name] = (lambda fn: (lambda p, ctx: fn(ctx)))(_inst.value)

CASES = build_cases()


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

def _call(route_name, params, ctx):
    """Evaluate a route at ctx's internal precision, keeping the guard bits."""
    inner = ctx.internal()
    with inner.workprec():
        out = ROUTES[route_name](params, inner)
        return +mpmath.mpmathify(out)


def _case_ctx(case: IdentityCase, ctx: PrecisionContext) -> PrecisionContext:
    bits = ctx.working_bits
    if case.max_bits is not None:
        bits = min(bits, case.max_bits)
    if case.min_bits is not None:
        bits = max(bits, case.min_bits)
    return ctx.with_bits(bits)


@lru_cache(maxsize=4)
def _glasser_reports(ctx: PrecisionContext) -> dict:
    return {r.case: r for r in hypergeom.glasser_suite(ctx)}


def _validate_overrides(case: IdentityCase, overrides: Optional[Mapping]) -> dict:
    params = dict(case.parameters)
    for k, v in (overrides or {}).items():
        if not isinstance(v, (str, int, Fraction)) or isinstance(v, bool):
            raise TypeError(f"override {k}={v!r}: expected a string, int or Fraction")
        params[k] = v
    return params


def _run_minpoly(case, params, ctx, max_degree):
    report = algid.algebraic_report(case.name, lambda c: _call(case.lhs_route, params, c), ctx,
                                    max_degree, case.notes, case.on_mismatch != FLAGGED)
    return report


def run_identity(name: str, overrides: Optional[Mapping] = None, ctx: Optional[PrecisionContext] = None,
                 *, cases: Optional[Mapping[str, IdentityCase]] = None,
                 max_degree: int = algid.DEFAULT_MAX_DEGREE) -> Report:
    """Evaluate both routes of a registered case and report the comparison.

    Mathematical mismatches are encoded in the report status; only an unknown
    case name, a bad override, or a domain violation raises.
    """
    cases = CASES if cases is None else cases
    if name not in cases:
        raise UnknownCaseError(f"unknown identity case {name!r}; try 'ramacf identity --list'")
    case = cases[name]
    ctx = ctx or PrecisionContext()
    params = _validate_overrides(case, overrides)
    cctx = _case_ctx(case, ctx)

    if case.lhs_route == GLASSER:
        return _glasser_reports(cctx)[name]
    if case.rhs_route == MINPOLY:
        return _run_minpoly(case, params, cctx, max_degree)

    for r in (case.lhs_route, case.rhs_route):
        if r not in ROUTES:
            raise UnknownCaseError(f"case {name!r} names unknown route {r!r}")
    lhs = _call(case.lhs_route, params, cctx)
    rhs = _call(case.rhs_route, params, cctx)
    tol = case.tol
    if case.tol_bits_fraction is not None:
        with cctx.workprec():
            tol = mpmath.ldexp(mpf(1), -int(case.tol_bits_fraction * cctx.working_bits))
    notes = case.notes
    if case.max_bits is not None and cctx.working_bits != ctx.working_bits:
        notes = (notes + "; " if notes else "") + f"run at {cctx.working_bits} bits"
    report = compare(name, case.category, lhs, rhs, cctx, tol=tol, relative=case.relative,
                     notes=notes, on_mismatch=case.on_mismatch)
    if name == "rho-polynomial" and report.status != PASS:
        cand = algid.min_poly(lambda c: rho_value(c), max_degree, cctx.with_bits(max(cctx.working_bits, 512)))
        found = list(cand.coefficients) if cand else "not found"
        report = Report(**{**report.to_dict(), "notes": report.notes + f"; recovered polynomial {found}"})
    return report


def select_cases(filter: str = "all", cases: Optional[Mapping[str, IdentityCase]] = None) -> list[str]:
    cases = CASES if cases is None else cases
    if filter in (None, "all"):
        names = list(cases)
    elif filter in CATEGORIES:
        names = [n for n, c in cases.items() if c.category == filter]
    else:
        raise DomainError(f"unknown category {filter!r}; expected one of {CATEGORIES} or 'all'")
    return sorted(names)


def _worker(args):
    names, ctx, config, max_degree = args
    cases = build_cases(config) if config is not None else None
    return [run_identity(n, None, ctx, cases=cases, max_degree=max_degree) for n in names]


def run_suite(filter: str = "all", ctx: Optional[PrecisionContext] = None, workers: int = 1,
              config: Optional[dict] = None) -> list[Report]:
    """Run every case in a category (or all), ordered by case name.

    With ``workers > 1`` cases run in separate processes; mpmath's precision
    is process-global, so threads would interfere.  Cases sharing one
    quadrature suite are kept in the same job.
    """
    ctx = ctx or PrecisionContext()
    cases = build_cases(config) if config is not None else CASES
    max_degree = (config or DEFAULT_CONFIG).get("max_degree", algid.DEFAULT_MAX_DEGREE)
    names = select_cases(filter, cases)
    shared = [n for n in names if cases[n].lhs_route == GLASSER]
    groups = ([shared] if shared else []) + [[n] for n in names if n not in shared]
    jobs = [(g, ctx, config, max_degree) for g in groups]
    if workers <= 1:
        results = [_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs))
    by_name = {r.case: r for batch in results for r in batch}
    return [by_name[n] for n in names]


def failing(reports) -> list[Report]:
    return [r for r in reports if r.status in (FAIL, NOT_FOUND)]
