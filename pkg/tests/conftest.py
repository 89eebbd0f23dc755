"""Shared test oracles: independent, deliberately naive implementations."""

from __future__ import annotations

import math

import pytest

from qlog.qnum import Convention, Family, FunctionSpec, QParam


def oracle_bracket(n: int, qp: QParam) -> float:
    """Direct textbook formulas, no expm1 stabilisation."""
    q = qp.q
    if q == 1.0:
        return float(n)
    if qp.convention is Convention.SYMMETRIC:
        return (q ** (n / 2) - q ** (-n / 2)) / (q**0.5 - q**-0.5)
    return (1.0 - q**n) / (1.0 - q)


def oracle_terms(spec: FunctionSpec, z: complex, n_terms: int) -> list[complex]:
    """First n_terms series terms by brute-force coefficient products."""
    qp = spec.qp

    def bfact(k: int) -> float:
        out = 1.0
        for j in range(1, k + 1):
            out *= oracle_bracket(j, qp)
        return out

    out = []
    fam = spec.family
    for k in range(n_terms):
        if fam is Family.EXP:
            out.append(z**k / bfact(k))
        elif fam is Family.COS:
            out.append((-1) ** k * z ** (2 * k) / bfact(2 * k))
        elif fam is Family.SIN:
            out.append((-1) ** k * z ** (2 * k + 1) / bfact(2 * k + 1))
        elif fam is Family.EXP_DERIVATIVE:
            r = spec.r
            out.append(math.factorial(k + r) / math.factorial(k) * z**k / bfact(k + r))
        else:
            r = spec.r
            out.append(math.factorial(k) / math.factorial(k + r) * z ** (k + r) / bfact(k))
    return out


def oracle_sum(spec: FunctionSpec, z: complex, n_terms: int) -> complex:
    terms = oracle_terms(spec, z, n_terms)
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


@pytest.fixture
def qp_half() -> QParam:
    return QParam(0.5)
