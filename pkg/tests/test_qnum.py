import math
import random

import pytest

from qlog.qnum import (
    Convention,
    DomainError,
    Family,
    FunctionSpec,
    NoConvergence,
    QParam,
    bracket,
    bracket_factorial,
    degree_for_radius,
    eval_exp_continued,
    eval_series,
    inverse_bracket_factorials,
    series_coefficients,
)

from conftest import oracle_bracket, oracle_sum

SYM = Convention.SYMMETRIC
JAC = Convention.JACKSON


class TestBracket:
    def test_quarter_symmetric(self):
        assert bracket(2, QParam(0.25)) == pytest.approx(2.5, abs=1e-15)

    def test_classical(self):
        assert bracket(3, QParam(1.0)) == 3.0
        assert bracket(3, QParam(1.0, JAC)) == 3.0

    def test_jackson_q2(self):
        assert bracket(3, QParam(2.0, JAC)) == pytest.approx(7.0, rel=1e-15)

    def test_base_values(self):
        for qp in (QParam(0.3), QParam(1.7, JAC)):
            assert bracket(0, qp) == 0.0
            assert bracket(1, qp) == 1.0

    @pytest.mark.parametrize("q", [0.1, 0.35, 0.9])
    def test_symmetric_inversion_invariance(self, q):
        lo, hi = QParam(q), QParam(1.0 / q)
        for n in range(31):
            assert bracket(n, lo) == pytest.approx(bracket(n, hi), rel=1e-13)

    @pytest.mark.parametrize("q", [0.1, 0.35, 0.9, 1.09, 2.0])
    def test_jackson_relation(self, q):
        sym, jac = QParam(min(q, 1 / q)), QParam(q, JAC)
        for n in range(1, 31):
            assert bracket(n, jac) == pytest.approx(q ** ((n - 1) / 2) * bracket(n, sym), rel=1e-13)

    def test_classical_limit(self):
        qp = QParam(1.0 - 1e-8)
        for n in range(1, 21):
            assert abs(bracket(n, qp) - n) < 1e-6

    def test_matches_naive_formula(self):
        for qp in (QParam(0.35), QParam(0.8, JAC), QParam(1.3, JAC)):
            for n in range(25):
                assert bracket(n, qp) == pytest.approx(oracle_bracket(n, qp), rel=1e-13)

    def test_overflow(self):
        with pytest.raises(OverflowError):
            bracket(5000, QParam(1e-200))


class TestBracketFactorial:
    def test_empty_product(self):
        assert bracket_factorial(0, QParam(0.77, JAC)) == 1.0

    def test_classical(self):
        assert bracket_factorial(3, QParam(1.0)) == 6.0

    def test_quarter(self):
        # [2] = 2.5 and [3] = q + 1 + 1/q = 5.25 by the closed forms
        assert bracket_factorial(3, QParam(0.25)) == pytest.approx(2.5 * 5.25, rel=1e-15)

    def test_cached_consistency(self):
        qp = QParam(0.6)
        hi = bracket_factorial(12, qp)
        assert bracket_factorial(11, qp) * bracket(12, qp) == pytest.approx(hi, rel=1e-15)

    def test_inverse_table(self):
        qp = QParam(0.4)
        inv = inverse_bracket_factorials(10, qp)
        for k in range(11):
            assert inv[k] == pytest.approx(1.0 / bracket_factorial(k, qp), rel=1e-14)


class TestQParam:
    def test_normalises_symmetric(self):
        assert QParam(4.0).q == 0.25

    def test_jackson_not_normalised(self):
        assert QParam(4.0, JAC).q == 4.0

    @pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            QParam(bad)

    def test_spec_order_validation(self):
        with pytest.raises(ValueError):
            FunctionSpec(Family.EXP_DERIVATIVE, QParam(0.5), 0)
        with pytest.raises(ValueError):
            FunctionSpec(Family.COS, QParam(0.5), 2)


class TestEvalSeries:
    def test_exp_at_zero(self):
        tv = eval_series(FunctionSpec(Family.EXP, QParam(0.31)), 0.0)
        assert tv.value == 1.0 and tv.tail_bound == 0.0

    def test_jackson_zero_fixture(self):
        tv = eval_series(FunctionSpec(Family.EXP, QParam(1.09, JAC)), -12.1111)
        assert abs(tv.value) < 1e-4

    def test_symmetric_zero_fixture(self):
        tv = eval_series(FunctionSpec(Family.EXP, QParam(0.35)), -5.19755)
        assert abs(tv.value) < 1e-4

    def test_parity_split(self):
        qp, z = QParam(0.5), 0.7
        e = eval_series(FunctionSpec(Family.EXP, qp), 1j * z)
        c = eval_series(FunctionSpec(Family.COS, qp), z)
        s = eval_series(FunctionSpec(Family.SIN, qp), z)
        budget = e.tail_bound + c.tail_bound + s.tail_bound + 1e-14
        assert abs(e.value - (c.value + 1j * s.value)) <= budget
        # and each agrees with the brute-force partial sum (oracle itself
        # carries naive-power rounding, hence the looser bound)
        assert e.value == pytest.approx(oracle_sum(FunctionSpec(Family.EXP, qp), 1j * z, 40), abs=5e-12)
        assert c.value == pytest.approx(oracle_sum(FunctionSpec(Family.COS, qp), z, 25), abs=5e-12)

    @pytest.mark.parametrize("x", [0.2, 1.0, 3.0])
    def test_reflection_identity(self, x):
        a = eval_series(FunctionSpec(Family.EXP, QParam(2.0, JAC)), x)
        b = eval_exp_continued(QParam(0.5, JAC), -x)
        assert abs(a.value * b.value - 1.0) < 1e-10

    def test_reflection_against_product_oracle(self):
        # E_q(z) for q < 1 equals 1 / prod (1 - (1-q) z q^k), continued
        q, z = 0.5, -3.0
        prod = 1.0
        for k in range(200):
            prod *= 1.0 - (1.0 - q) * z * q**k
        want = 1.0 / prod
        got = eval_exp_continued(QParam(q, JAC), z)
        assert got.value == pytest.approx(want, rel=1e-12)

    def test_domain_error_outside_radius(self):
        with pytest.raises(DomainError):
            eval_series(FunctionSpec(Family.EXP, QParam(0.5, JAC)), 2.5)

    def test_no_convergence_with_tiny_cap(self):
        with pytest.raises(NoConvergence):
            eval_series(FunctionSpec(Family.EXP, QParam(0.5, JAC)), 1.95, term_cap=40)

    def test_term_cap_env(self, monkeypatch):
        monkeypatch.setenv("QLOG_TERM_CAP", "3")
        with pytest.raises(NoConvergence):
            eval_series(FunctionSpec(Family.EXP, QParam(0.5)), -8.0)

    def test_classical_limit_branch(self):
        tv = eval_series(FunctionSpec(Family.SIN, QParam(1.0)), 3.14159265)
        assert abs(tv.value) < 1e-8
        big = eval_series(FunctionSpec(Family.SIN, QParam(1.0)), 60.0)
        assert big.value == pytest.approx(math.sin(60.0), abs=1e-12)

    def test_integral_family_small_q_matches_oracle(self):
        spec = FunctionSpec(Family.EXP_INTEGRAL, QParam(0.45), 2)
        tv = eval_series(spec, -1.3)
        assert tv.value == pytest.approx(oracle_sum(spec, -1.3, 40), abs=5e-12)

    def test_derivative_prefactor(self):
        spec = FunctionSpec(Family.EXP_DERIVATIVE, QParam(0.45), 3)
        tv = eval_series(spec, 0.0)
        assert tv.value == pytest.approx(math.factorial(3) / bracket_factorial(3, QParam(0.45)), rel=1e-14)


def _random_spec(rng: random.Random):
    fam = rng.choice(list(Family))
    r = rng.randint(1, 4) if fam in (Family.EXP_DERIVATIVE, Family.EXP_INTEGRAL) else 0
    if rng.random() < 0.5:
        qp = QParam(rng.uniform(0.15, 0.95))
        zmax = 5.0
    else:
        q = rng.uniform(1.05, 2.2)
        qp = QParam(q, JAC)
        zmax = 5.0
    ang = rng.uniform(0, 2 * math.pi)
    rad = zmax * math.sqrt(rng.random())
    return FunctionSpec(fam, qp, r), complex(rad * math.cos(ang), rad * math.sin(ang))


def test_tail_bound_dominates_true_error():
    """Reported tail bound covers the gap to a 4x-more-terms reference."""
    rng = random.Random(47)
    checked = 0
    while checked < 100:
        spec, z = _random_spec(rng)
        tv = eval_series(spec, z, tol=1e-12)
        ref = oracle_sum(spec, z, 4 * max(tv.terms_used, 8))
        assert abs(ref - tv.value) <= tv.tail_bound + 1e-13 * max(1.0, abs(tv.value)), (spec, z)
        checked += 1


def test_degree_for_radius_certifies_tail():
    for spec in (FunctionSpec(Family.EXP, QParam(0.4)), FunctionSpec(Family.COS, QParam(1.2, JAC))):
        deg = degree_for_radius(spec, 6.0, tol=1e-16)
        c = series_coefficients(spec, deg + 30)
        # the dropped coefficients are negligible at the radius
        tail = sum(abs(c[k]) * 6.0**k for k in range(deg + 1, deg + 31))
        head = sum(abs(c[k]) * 6.0**k for k in range(deg + 1))
        assert tail < 1e-12 * head


def test_series_coefficients_match_eval():
    spec = FunctionSpec(Family.SIN, QParam(0.7))
    c = series_coefficients(spec, 25)
    z = 0.9 + 0.2j
    poly = sum(c[k] * z**k for k in range(26))
    assert poly == pytest.approx(eval_series(spec, z).value, abs=1e-13)
