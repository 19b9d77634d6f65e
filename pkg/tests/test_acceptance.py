"""One test per acceptance criterion, each at its stated tolerance.

Every test records a "criterion N: PASS/FAIL ..." line that the terminal
summary prints in criterion order.
"""

from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpf

from conftest import ACCEPTANCE_LINES
from ramacf import algid, harness, hypergeom, modular
from ramacf.numerics import PrecisionContext, character, divisor_sum_table
from ramacf.report import reports_to_json

REF_BITS = 1200
CTX256 = PrecisionContext(256)
CTX512 = PrecisionContext(512)


def ref(expr):
    """Reference value of a closed-form expression at REF_BITS."""
    with mp.workprec(REF_BITS):
        return harness.parse_real(expr)


def err(a, b):
    with mp.workprec(REF_BITS):
        return abs(mpmath.mpmathify(a) - mpmath.mpmathify(b))


def record(n, checks):
    """checks: list of (label, ok, detail)."""
    bad = [f"{label} ({detail})" for label, ok, detail in checks if not ok]
    worst = ", ".join(f"{label}: {detail}" for label, ok, detail in checks[:3])
    if bad:
        line = f"criterion {n}: FAIL {'; '.join(bad)}"
    else:
        line = f"criterion {n}: PASS {len(checks)} checks; {worst}{' ...' if len(checks) > 3 else ''}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not bad, line


def below(label, e, tol):
    tol = mpf(tol) if isinstance(tol, str) else tol
    return label, e < tol, mpmath.nstr(e, 3)


def route(name, ctx, **params):
    return harness._call(name, params, ctx)


def test_criterion_01_rr_closed_form_routes():
    closed = ref("sqrt((5 + sqrt(5))/2) - (sqrt(5) + 1)/2")
    checks = []
    for r in ("rr-cf", "rr-product", "rr-log-series", "rr-rational-series", "rr-theta-quotient", "rr-eta-quotient"):
        checks.append(below(r, err(route(r, CTX512, x="2*pi"), closed), "1e-60"))
    record(1, checks)


def test_criterion_02_quotient_identities():
    checks = []
    for q in ("0.05", "0.1", "exp(-pi)", "exp(-2*pi)"):
        for lhs, rhs in (("rr-quotient-f-lhs", "rr-quotient-f-rhs"), ("rr-quotient-f6-lhs", "rr-quotient-f6-rhs")):
            e = err(route(lhs, CTX256, q=q), route(rhs, CTX256, q=q))
            checks.append(below(f"{lhs[:-4]}[q={q}]", e, "1e-60"))
    record(2, checks)


def test_criterion_03_h_functional_equation():
    target = ref("2*(2 + sqrt(2))")
    checks = []
    for a, b in (("pi", "pi"), ("pi/2", "2*pi"), ("pi/3", "3*pi")):
        lhs = route("h-functional-lhs", CTX256, a=a, b=b)
        checks.append(below(f"H({a}),H({b})", err(lhs, target), "1e-50"))
    checks.append(below("H(pi/2)", err(route("H", CTX256, x="pi/2"),
                                       ref("sqrt(1 + 2*sqrt(2) - 2*sqrt(2 + sqrt(2)))")), "1e-60"))
    checks.append(below("H(pi sqrt2/2)", err(route("H", CTX256, x="pi*sqrt(2)/2"),
                                            ref("sqrt(3 + 2*sqrt(2) - 2*sqrt(4 + 3*sqrt(2)))")), "1e-60"))
    record(3, checks)


def test_criterion_04_rr_derivative():
    closed = ref("8*sqrt(2/5*(9 + 5*sqrt(5) - 2*sqrt(50 + 22*sqrt(5)))) * exp(2*pi) * gamma(5/4)^4/pi^3")
    analytic = route("rr-log-derivative", CTX256, q="exp(-2*pi)")
    formula = route("rr-derivative-formula", CTX256, r="4")
    record(4, [below("product derivative", err(analytic, closed), "1e-40"),
               below("k,k',K formula", err(formula, closed), "1e-40"),
               below("routes agree", err(formula, analytic), "1e-40")])


def test_criterion_05_modular_point():
    K1 = ref("gamma(1/4)^2/(4*sqrt(pi))")
    checks = [below("K(k_1)", err(modular.modular_point(1, CTX256).K, K1), "1e-60")]
    for r in (1, 2, 3, 4):
        pt = modular.modular_point(r, CTX256)
        with mp.workprec(REF_BITS):
            e = abs(pt.k ** 2 + pt.k_prime ** 2 - 1)
        checks.append(below(f"k^2+k'^2 r={r}", e, CTX256.target_tolerance))
    record(5, checks)


def test_criterion_06_pentagonal_example():
    closed = ref("14/27 + 8/(3*sqrt(3)) + sqrt(2048/243 + 3584/(243*sqrt(3)))/2")
    value_fn = lambda c: algid.theta_sum_value(Fraction(3, 2), Fraction(-1, 2), 0, 1, c)
    with CTX256.workprec():
        value = value_fn(CTX256.internal())
    cand = algid.min_poly(value_fn, 4, CTX512)
    found = cand is not None and cand.confirmed and cand.degree <= 4
    with mp.workprec(REF_BITS):
        on_closed = abs(algid._horner(cand.coefficients, closed)) if found else mpf(1)
    record(6, [below("8th power vs radical", err(value, closed), "1e-60"),
               ("min_poly degree <= 4, confirmed", found, str(cand) if cand else "not found"),
               below("polynomial at the radical", on_closed, "1e-300")])


def test_criterion_07_derivative_examples():
    c1 = route("deriv-1-8", CTX256, r="1")
    c2 = route("deriv-minus-1-24", CTX256, r="1")
    checks = [below("e^pi G^4/(64 2^(5/8) pi^3)", err(c1, ref("exp(pi)*gamma(1/4)^4/(64*2^(5/8)*pi^3)")), "1e-40"),
              below("-e^pi G^4/(32 2^(7/8) pi^3)", err(c2, ref("-exp(pi)*gamma(1/4)^4/(32*2^(7/8)*pi^3)")), "1e-40")]
    rep = harness.run_identity("rho-polynomial", None, CTX256)
    residual = mpf(rep.abs_error)
    if rep.status == "pass":
        checks.append(below("|P(rho)| stated polynomial", residual, "1e-30"))
    else:
        checks.append(("rho flagged with recovered polynomial",
                       rep.status == "flagged" and "recovered polynomial [" in rep.notes, rep.notes))
    record(7, checks)


@pytest.fixture(scope="module")
def glasser():
    return {r.case: r for r in hypergeom.glasser_suite(PrecisionContext(128))}


def test_criterion_08_glasser(glasser):
    f4, f4q, eta4 = glasser["glasser-f4"], glasser["glasser-f4-quintic"], glasser["glasser-eta4"]
    par, tr = glasser["glasser-parameter"], glasser["glasser-transformation"]
    checks = [below("f(-q)^4 integral vs 2F1", mpf(f4.abs_error or 1), "1e-20"),
              below("f(-q^5)^4 integral vs 2F1", mpf(f4q.abs_error or 1), "1e-20"),
              below("eta^4 integral vs 2F1", mpf(eta4.abs_error or 1), "1e-20"),
              ("same recovered parameter", par.status == "pass", par.notes),
              below("transformation residual", mpf(tr.abs_error or 1), "1e-30")]
    record(8, checks)


def test_criterion_09_antiderivative():
    checks = []
    for a, b in ((Fraction(1, 2), 1), (1, 2)):
        lhs, rhs = hypergeom.antiderivative_bracket_sides(a, b, CTX256)
        checks.append(below(f"bracket [{a},{b}]", err(lhs, rhs), "1e-25"))
    for y in ("0.7", "1.0"):
        rep = harness.run_identity(f"eta4-antiderivative-ftc[y={y}]", None, CTX256)
        checks.append((f"d/dy at {y}", rep.status == "pass", rep.abs_error))
    record(9, checks)


def test_criterion_10_m_family():
    checks = []
    for c in ("1/2", "1", "2"):
        for q in ("0.1", "0.3", "0.5"):
            checks.append(below(f"plus[{c},{q}]", err(route("m-cf-plus", CTX256, c=c, q=q),
                                                      route("signed-m-series", CTX256, c=c, q=q)), "1e-50"))
            checks.append(below(f"alt[{c},{q}]", err(route("m-cf-alt", CTX256, c=c, q=q),
                                                     route("m-series", CTX256, c=c, q=q)), "1e-50"))
            e = err(route("m-bilateral-sum", CTX256, c=c, q=q), route("bilateral-theta", CTX256, c=c, q=q))
            checks.append(below(f"bilateral[{c},{q}]", e, CTX256.target_tolerance * 8))
    for a in (1, 3, 5):
        for q in ("0.2", "0.4"):
            e = err(route("odd-a-cf", CTX256, a=str(a), q=q), route("odd-a-theta", CTX256, a=str(a), q=q))
            checks.append(below(f"odd a={a},q={q}", e, CTX256.target_tolerance))
    cand = algid.min_poly(lambda c: algid.bilateral_normalized(1, c), 16, CTX512)
    checks.append(("a=0 bilateral / (q^(-1/8) sqrt(K/pi)) algebraic",
                   cand is not None and cand.confirmed, str(cand) if cand else "not found"))
    record(10, checks)


def test_criterion_11_property_suite():
    checks = []
    for q in ("0.1", "0.5", "exp(-pi)"):
        checks.append(below(f"pentagonal q={q}", err(route("euler-f", CTX256, q=q),
                                                     route("pentagonal-sum", CTX256, q=q)), CTX256.target_tolerance))
    for x in ("0.05", "0.2", "exp(-pi)"):
        checks.append(below(f"log series x={x}", err(route("rr-log-series", CTX256, q=x),
                                                     route("rr-product", CTX256, q=x)), CTX256.target_tolerance))
    for q in ("0.1", "exp(-pi)"):
        checks.append(below(f"i) = iv) q={q}", err(route("cubic-product", CTX256, q=q),
                                                   route("cubic-alt-product", CTX256, q=q)), CTX256.target_tolerance))
    for m in (3, 5):
        table = divisor_sum_table(1000, m)
        brute = [sum(character(d, m) * d for d in range(1, n + 1) if n % d == 0) for n in range(1, 1001)]
        checks.append((f"divisor sums mod {m}, n <= 1000", table[1:] == brute, "exact"))
    for a, b1, b2, c, x in (("1/6", "1/6", "1/6", "7/6", "0.1"), ("1/3", "1/2", "2", "5/2", "-0.6")):
        on_x = hypergeom.appell_f1(a, b1, b2, c, x, 0, CTX256)
        on_y = hypergeom.appell_f1(a, b1, b2, c, 0, x, CTX256)
        checks.append(below(f"F1 x-axis {a},{b1},{c}", err(on_x, hypergeom.gauss_2f1(a, b1, c, x, CTX256)),
                            CTX256.target_tolerance * 4))
        checks.append(below(f"F1 y-axis {a},{b2},{c}", err(on_y, hypergeom.gauss_2f1(a, b2, c, x, CTX256)),
                            CTX256.target_tolerance * 4))
    checks.append(below("2F1(1,1;2;1/2) = 2 log 2", err(hypergeom.gauss_2f1(1, 1, 2, "1/2", CTX256),
                                                       ref("2*log(2)")), CTX256.target_tolerance))
    for t in ("1/2", "2", "5"):
        e = err(route("eta-inverse", CTX256, t=t), route("eta-scaled", CTX256, t=t))
        checks.append(below(f"eta(i/t) = sqrt(t) eta(it), t={t}", e, CTX256.target_tolerance))
    record(11, checks)


def test_criterion_12_algebraicity_sweep():
    reports = algid.algebraicity_suite(CTX512)
    checks = []
    for inst, rep in zip(algid.INSTANCES, reports):
        if inst.required:
            checks.append((rep.case, rep.status == "pass",
                           f"degree {rep.notes.split('degree=')[1].split(';')[0]}" if rep.status == "pass"
                           else f"not found, value {rep.lhs}"))
        else:
            # alternative reading of an ambiguous normalization: reported, not claimed
            checks.append((rep.case, rep.status in ("pass", "flagged"), rep.status))
    for rep in reports:
        if rep.status == "pass":
            height = int(rep.notes.split("height=")[1].split(";")[0])
            degree = int(rep.notes.split("degree=")[1].split(";")[0])
            checks.append((f"{rep.case} bounds", height < 10 ** 30 and degree <= 16, f"h={height}"))
    print(reports_to_json(reports))
    record(12, checks)
