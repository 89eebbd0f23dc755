import cmath
import math
import random

import pytest

from qlog.compositions import composition_sum
from qlog.lnq import CoeffList, lnq_coefficients, lnq_eval, lnq_qderivative_coeffs, polynomial_eval
from qlog.qnum import Convention, Family, FunctionSpec, QParam, bracket, bracket_factorial, eval_series

JAC = Convention.JACKSON


@pytest.mark.parametrize("qp", [QParam(0.5), QParam(0.22), QParam(1.09, JAC)])
def test_leading_coefficients(qp):
    c = lnq_coefficients(4, qp).coeffs
    b2 = bracket_factorial(2, qp)
    b3 = bracket_factorial(3, qp)
    assert c[0] == 1.0
    assert c[1] == pytest.approx(-1.0 / b2, rel=1e-14)
    assert c[2] == pytest.approx(-(1.0 / b3 - 2.0 / b2**2), rel=1e-13)


def test_classical_logarithm_coefficients():
    c = lnq_coefficients(12, QParam(1.0)).coeffs
    for n in range(1, 13):
        assert c[n - 1] == pytest.approx((-1) ** (n + 1) / n, rel=1e-13)


def test_small_q_coefficients_vanish():
    # the inverse series degenerates to w - 1 shifted, i.e. c_n -> 0 for n >= 2
    mags = [abs(lnq_coefficients(3, QParam(q)).coeffs[1]) for q in (1e-2, 1e-4, 1e-8)]
    assert mags[0] > mags[1] > mags[2]
    assert mags[2] < 1e-3


@pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("conv", [Convention.SYMMETRIC, JAC])
def test_method_agreement(q, conv):
    qp = QParam(q, conv)
    rec = lnq_coefficients(20, qp, "recursive").coeffs
    rev = lnq_coefficients(20, qp, "reversion").coeffs
    for a, b in zip(rec, rev):
        assert a == pytest.approx(b, rel=1e-12)


def test_matches_streaming_composition_recursion():
    """Float re-derivation through the explicit composition enumeration."""
    qp = QParam(0.45)
    want = lnq_coefficients(10, qp).coeffs
    c = [0.0] * 11
    c[1] = 1.0
    inv_fact = [1.0 / bracket_factorial(k, qp) for k in range(11)]

    def weight(parts):
        w = 1.0
        for k in parts:
            w *= c[k]
        return w

    for n in range(2, 11):
        c[n] = -math.fsum(inv_fact[l] * composition_sum(n, l, weight) for l in range(2, n + 1))
    for n in range(1, 11):
        assert c[n] == pytest.approx(want[n - 1], rel=1e-11)


def test_method_caps():
    with pytest.raises(ValueError):
        lnq_coefficients(25, QParam(0.5), "recursive")
    with pytest.raises(ValueError):
        lnq_coefficients(201, QParam(0.5), "reversion")
    with pytest.raises(ValueError):
        lnq_coefficients(10, QParam(0.5), "lagrange")


class TestEval:
    def test_zero(self):
        ev = lnq_eval(0.0, lnq_coefficients(10, QParam(0.5)))
        assert ev.value == 0.0 and ev.certified

    def test_classical_log(self):
        ev = lnq_eval(0.1, lnq_coefficients(50, QParam(1.0)))
        assert ev.value == pytest.approx(math.log(1.1), abs=1e-10)
        assert ev.certified

    def test_uncertified_outside_radius(self):
        ev = lnq_eval(2.0, lnq_coefficients(30, QParam(0.5)))
        assert not ev.certified
        assert ev.last_term > 0

    def test_round_trip_disk(self):
        rng = random.Random(20125)
        for qp in (QParam(0.22), QParam(0.5), QParam(0.9), QParam(1.09, JAC)):
            coeffs = lnq_coefficients(30, qp)
            worst = 0.0
            for _ in range(100):
                rad = 0.1 * math.sqrt(rng.random())
                ang = rng.uniform(0.0, 2.0 * math.pi)
                w = cmath.rect(rad, ang)
                z = lnq_eval(w, coeffs).value
                back = eval_series(FunctionSpec(Family.EXP, qp), z).value
                worst = max(worst, abs(back - (1.0 + w)))
            assert worst < 1e-10, (qp, worst)

    def test_kind_guard(self):
        cl = CoeffList((1.0, 2.0), QParam(0.5), kind="b_series")
        with pytest.raises(ValueError):
            lnq_eval(0.1, cl)


class TestQDerivative:
    def test_leading_terms(self):
        qp = QParam(0.5)
        d = lnq_qderivative_coeffs(lnq_coefficients(6, qp))
        assert d.min_degree == 0
        assert d.coeffs[0] == pytest.approx(1.0, abs=1e-15)  # [1] c_1
        assert d.coeffs[1] == pytest.approx(-1.0, abs=1e-14)  # [2] c_2 = -[2]/[2]!

    def test_cubic_term_closed_form(self):
        qp = QParam(0.5)
        d = lnq_qderivative_coeffs(lnq_coefficients(6, qp))
        b2 = bracket_factorial(2, qp)
        want = -(1.0 / b2 - 2.0 * bracket(3, qp) / b2**2)
        assert d.coeffs[2] == pytest.approx(want, rel=1e-13)

    def test_matches_difference_quotient(self):
        # the deformed derivative maps w^n -> [n] w^(n-1); cross-check by
        # evaluating (f(u w) - f(w/u))/((u - 1/u) w) with u = sqrt(q)
        qp = QParam(0.6)
        coeffs = lnq_coefficients(40, qp)
        d = lnq_qderivative_coeffs(coeffs)
        w = 0.05 + 0.02j
        u = math.sqrt(qp.q)
        num = lnq_eval(u * w, coeffs).value - lnq_eval(w / u, coeffs).value
        quotient = num / ((u - 1.0 / u) * w)
        assert polynomial_eval(d, w).value == pytest.approx(quotient, rel=1e-11)

    def test_kind_guard(self):
        d = lnq_qderivative_coeffs(lnq_coefficients(5, QParam(0.5)))
        with pytest.raises(ValueError):
            lnq_qderivative_coeffs(d)
