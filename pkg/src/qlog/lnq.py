"""Power-series inverse of the deformed exponential: log_q(1 + w).

The coefficients c_n of log_q(1+w) = sum c_n w^n are fixed by requiring
the deformed exponential of the series to equal 1 + w.  Two routes are
implemented:

  * ``reversion``  - degree-by-degree elimination in the functional
    equation (the production path, O(N^2) per degree via convolutions);
  * ``recursive``  - the composition-sum recursion, kept as the
    correctness oracle (exponential cost, capped at degree 24).
"""

from __future__ import annotations

from dataclasses import dataclass

from .compositions import MAX_COMPOSITION_DEGREE
from .qnum import Convention, QParam, bracket

MAX_REVERSION_DEGREE = 200

# A truncated-series value is "certified" when its last retained term is
# this small relative to the sum.
CERT_LAST_TERM_REL = 1e-14

# The coefficient eliminations cancel a few orders below double precision
# for geometric brackets at small q, so both routes run in extended
# precision and are rounded once at the end.
_MP_DPS = 40


@dataclass(frozen=True)
class CoeffList:
    """Ordered coefficient sequence of a single power series.

    ``coeffs[i]`` multiplies u^(min_degree + i) where u = z**power_step;
    ``kind`` names which series this is and ``family`` tags the generating
    function for the b-series kind.
    """

    coeffs: tuple[float, ...]
    qp: QParam
    kind: str
    min_degree: int = 1
    power_step: int = 1
    family: str | None = None

    def __len__(self) -> int:
        return len(self.coeffs)

    def degree(self, i: int) -> int:
        return (self.min_degree + i) * self.power_step


@dataclass(frozen=True)
class SeriesEval:
    """Truncated-polynomial value plus the certification flag."""

    value: complex
    certified: bool
    last_term: float


def _mp_inverse_factorials(n: int, qp: QParam):
    import mpmath as mp

    q = mp.mpf(qp.q)
    lq = mp.log(q)
    inv = [mp.mpf(1)]
    for k in range(1, n + 1):
        if lq == 0:
            br = mp.mpf(k)
        else:
            br = mp.expm1(k * lq) / mp.expm1(lq)
            if qp.convention is Convention.SYMMETRIC:
                br *= mp.exp(-mp.mpf(k - 1) / 2 * lq)
        inv.append(inv[-1] / br)
    return inv


def _coefficients(n_coeffs: int, qp: QParam, grouped_by_length: bool) -> list[float]:
    """Shared elimination core: forces the deformed exponential of the
    series back to 1 + w degree by degree.

    powers[m][n] is the coefficient of w^n in the m-th power of the series,
    i.e. exactly the sum over m-part compositions of n of the coefficient
    products; filling it column by column touches only already-known
    coefficients.  ``grouped_by_length`` reproduces the recursion that
    collects those composition sums length by length; the plain path folds
    them as the functional-equation residual.  Same sums either way, kept
    as separately exercised code paths.
    """
    import mpmath as mp

    with mp.workdps(_MP_DPS):
        inv_fact = _mp_inverse_factorials(n_coeffs, qp)
        c = [mp.mpf(0)] * (n_coeffs + 1)
        c[1] = mp.mpf(1)
        powers = [[mp.mpf(0)] * (n_coeffs + 1) for _ in range(n_coeffs + 1)]
        powers[1][1] = c[1]
        for n in range(2, n_coeffs + 1):
            if grouped_by_length:
                total = mp.mpf(0)
                for l in range(2, n + 1):
                    powers[l][n] = sum(powers[l - 1][j] * c[n - j] for j in range(l - 1, n))
                    total += inv_fact[l] * powers[l][n]
                c[n] = -total
            else:
                for m in range(2, n + 1):
                    powers[m][n] = sum(powers[m - 1][j] * c[n - j] for j in range(m - 1, n))
                c[n] = -sum(inv_fact[m] * powers[m][n] for m in range(2, n + 1))
            powers[1][n] = c[n]
        return [float(v) for v in c[1:]]


def lnq_coefficients(n_coeffs: int, qp: QParam, method: str = "reversion") -> CoeffList:
    """Coefficients c_1..c_N of log_q(1 + w).

    ``method="reversion"`` allows N <= 200; ``method="recursive"`` is the
    composition-sum oracle and allows N <= 24.  Both agree to relative
    1e-12 on their overlap.
    """
    if n_coeffs < 1:
        raise ValueError(f"need at least one coefficient, got {n_coeffs}")
    if method == "reversion":
        if n_coeffs > MAX_REVERSION_DEGREE:
            raise ValueError(f"reversion is capped at degree {MAX_REVERSION_DEGREE}")
        coeffs = _coefficients(n_coeffs, qp, grouped_by_length=False)
    elif method == "recursive":
        if n_coeffs > MAX_COMPOSITION_DEGREE:
            raise ValueError(f"the recursive method is capped at degree {MAX_COMPOSITION_DEGREE}")
        coeffs = _coefficients(n_coeffs, qp, grouped_by_length=True)
    else:
        raise ValueError(f"unknown method {method!r}; expected 'reversion' or 'recursive'")
    return CoeffList(tuple(coeffs), qp, kind="lnq")


def polynomial_eval(coeffs: CoeffList, z: complex) -> SeriesEval:
    """Horner evaluation of a CoeffList at z, with last-term certification.

    The value is flagged non-certified (but still returned) when the last
    retained term is not below CERT_LAST_TERM_REL relative to the result.
    """
    z = complex(z)
    u = z**coeffs.power_step if coeffs.power_step != 1 else z
    acc = 0.0 + 0.0j
    for ck in reversed(coeffs.coeffs):
        acc = acc * u + ck
    value = acc * u**coeffs.min_degree if coeffs.min_degree else acc
    top = coeffs.degree(len(coeffs.coeffs) - 1)
    last_term = abs(coeffs.coeffs[-1]) * abs(z) ** top
    certified = last_term <= CERT_LAST_TERM_REL * abs(value) or last_term == 0.0
    return SeriesEval(value, certified, last_term)


def lnq_eval(w: complex, coeffs: CoeffList) -> SeriesEval:
    """log_q(1 + w) from a truncated coefficient list."""
    if coeffs.kind != "lnq":
        raise ValueError(f"expected lnq coefficients, got kind {coeffs.kind!r}")
    return polynomial_eval(coeffs, w)


def lnq_qderivative_coeffs(coeffs: CoeffList) -> CoeffList:
    """q-derivative of the log_q(1+w) series: c_n w^n maps to [n] c_n w^(n-1).

    The result starts at degree zero and is not any standard q-special
    function; it is exposed purely as a coefficient list.
    """
    if coeffs.kind != "lnq":
        raise ValueError(f"expected lnq coefficients, got kind {coeffs.kind!r}")
    derived = tuple(
        bracket(n, coeffs.qp) * cn for n, cn in enumerate(coeffs.coeffs, start=coeffs.min_degree)
    )
    return CoeffList(derived, coeffs.qp, kind="lnq_qderivative", min_degree=0)
