"""Zero sum rules, series logarithms, and the Bernoulli/zeta/dilog family.

For each generating function f (exponential under either bracket
convention, its derivatives and repeated integrals, cosine and sine) the
sums sigma_n over reciprocal powers of its zeros are the coefficients of
the ordinary natural logarithm b(z) = log f(z) = -sum sigma_n z^n / n
inside the disk bounded by the first zero.

Three independent computational routes are kept deliberately:

  * ``recursive`` - the composition-sum recursion obtained by matching
    f = exp(b) coefficient by coefficient (degree <= 24);
  * ``direct``    - the composition sum over products of f's normalised
    Maclaurin coefficients (degree <= 24);
  * the O(N^2) power-series logarithm (production path, degree <= 200),
    which backs the b-series, Bernoulli and dilogarithm operations.

A fourth route, ``zeros``, sums over numerically located zeros and
reports a tail estimate; it ties this module to the zero landscape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import zeroscape
from .compositions import MAX_COMPOSITION_DEGREE
from .lnq import CoeffList, SeriesEval, polynomial_eval
from .qnum import Convention, Family, FunctionSpec, QParam, bracket, bracket_factorial

MAX_SERIES_DEGREE = 200

METHODS = ("recursive", "direct", "closed", "zeros")


class SumFamily(Enum):
    E_EXP = "e"  # zeros of the symmetric-bracket exponential
    JACKSON = "E"  # zeros of the Jackson-bracket exponential
    DERIVATIVE = "d"  # zeros of the r-th derivative
    INTEGRAL = "i"  # zeros of the r-th repeated integral
    COS = "c"  # squared reciprocals of the cosine zeros
    SIN = "s"  # squared reciprocals of the sine zeros


@dataclass(frozen=True)
class SumRule:
    family: SumFamily
    n: int
    value: float
    method: str
    qp: QParam
    r: int = 0
    tail_estimate: float | None = None


@dataclass(frozen=True)
class TailedValue:
    value: float
    tail_estimate: float
    zeros_used: int


def _validate(family: SumFamily, n: int, qp: QParam, r: int) -> int:
    """Check family/index/convention consistency; return the internal index
    m (series degree in the relevant variable: z, or z^2 for trig)."""
    if family is SumFamily.E_EXP and qp.convention is not Convention.SYMMETRIC:
        raise ValueError("the e-family sums use the symmetric convention")
    if family is SumFamily.JACKSON and qp.convention is not Convention.JACKSON:
        raise ValueError("the E-family sums use the Jackson convention")
    if family in (SumFamily.DERIVATIVE, SumFamily.INTEGRAL):
        if r < 0:
            raise ValueError(f"order r must be >= 0, got {r}")
    elif r:
        raise ValueError(f"family {family.value!r} takes no order r")
    if family is SumFamily.COS:
        if n < 2 or n % 2:
            raise ValueError(f"cosine sums have even index >= 2, got {n}")
        return n // 2
    if family is SumFamily.SIN:
        if n < 3 or n % 2 == 0:
            raise ValueError(f"sine sums have odd index >= 3, got {n}")
        return (n - 1) // 2
    if n < 1:
        raise ValueError(f"index must be >= 1, got {n}")
    return n


def l_coefficients(family: SumFamily, m_max: int, qp: QParam, r: int = 0) -> np.ndarray:
    """Normalised Maclaurin coefficients L_0..L_m of the generating function
    (after dividing out its prefactor), in the family's series variable."""
    L = np.ones(m_max + 1)
    if family in (SumFamily.E_EXP, SumFamily.JACKSON):
        for m in range(1, m_max + 1):
            L[m] = L[m - 1] / bracket(m, qp)
    elif family is SumFamily.DERIVATIVE:
        for m in range(1, m_max + 1):
            L[m] = L[m - 1] * (r + m) / (m * bracket(r + m, qp))
    elif family is SumFamily.INTEGRAL:
        for m in range(1, m_max + 1):
            L[m] = L[m - 1] * m / ((r + m) * bracket(m, qp))
    elif family is SumFamily.COS:
        for m in range(1, m_max + 1):
            L[m] = -L[m - 1] / (bracket(2 * m - 1, qp) * bracket(2 * m, qp))
    else:
        for m in range(1, m_max + 1):
            L[m] = -L[m - 1] / (bracket(2 * m, qp) * bracket(2 * m + 1, qp))
    return L


def l_coefficient(family: SumFamily, k: int, qp: QParam, r: int = 0) -> float:
    """Single L coefficient at internal index k."""
    return float(l_coefficients(family, k, qp, r)[k])


# --- power-series exp/log kernels -----------------------------------------


def series_log(f: np.ndarray) -> np.ndarray:
    """b with exp(b) = f as formal power series; f[0] must be 1, b[0] = 0."""
    if f[0] != 1.0:
        raise ValueError("series_log needs a unit constant term")
    n_max = len(f) - 1
    b = np.zeros(n_max + 1)
    for n in range(1, n_max + 1):
        b[n] = f[n] - math.fsum(k * b[k] * f[n - k] for k in range(1, n)) / n
    return b


def series_exp(b: np.ndarray) -> np.ndarray:
    """f = exp(b) as formal power series; b[0] must be 0, f[0] = 1."""
    if b[0] != 0.0:
        raise ValueError("series_exp needs a zero constant term")
    n_max = len(b) - 1
    f = np.zeros(n_max + 1)
    f[0] = 1.0
    for n in range(1, n_max + 1):
        f[n] = math.fsum(k * b[k] * f[n - k] for k in range(1, n + 1)) / n
    return f


def _sigma_serieslog(family: SumFamily, m_max: int, qp: QParam, r: int) -> np.ndarray:
    """sigma_1..sigma_m by the power-series logarithm (production path)."""
    b = series_log(l_coefficients(family, m_max, qp, r))
    m = np.arange(m_max + 1)
    return -(m * b)


# --- composition-sum routes (oracles) ---------------------------------------
#
# The sums over "all compositions of m into l parts" cancel catastrophically:
# at q = 0.9 the degree-12 sum is ~1e-16 while its individual terms are ~1e-6,
# and the degree-20 reconstruction cancels through seventeen orders.  Double
# precision cannot reach the required relative accuracy, so these routes run
# in extended precision.  The composition sum itself is evaluated through a
# power table P_l[m] = coefficient of x^m in (sum_k w_k x^k)^l, filled column
# by column so the still-unknown weights are never touched - the exact same
# real-number sum, term for term, as the streaming enumerator (which remains
# the small-degree cross-check in the tests).

_MP_DPS = 50


def _mp_bracket(n: int, qp: QParam):
    import mpmath as mp

    q = mp.mpf(qp.q)
    if q == 1:
        return mp.mpf(n)
    lq = mp.log(q)
    v = mp.expm1(n * lq) / mp.expm1(lq)
    if qp.convention is Convention.SYMMETRIC:
        v *= mp.exp(-mp.mpf(n - 1) / 2 * lq)
    return v


def _mp_l_coefficients(family: SumFamily, m_max: int, qp: QParam, r: int):
    import mpmath as mp

    L = [mp.mpf(1)]
    for m in range(1, m_max + 1):
        if family in (SumFamily.E_EXP, SumFamily.JACKSON):
            L.append(L[-1] / _mp_bracket(m, qp))
        elif family is SumFamily.DERIVATIVE:
            L.append(L[-1] * (r + m) / (m * _mp_bracket(r + m, qp)))
        elif family is SumFamily.INTEGRAL:
            L.append(L[-1] * m / ((r + m) * _mp_bracket(m, qp)))
        elif family is SumFamily.COS:
            L.append(-L[-1] / (_mp_bracket(2 * m - 1, qp) * _mp_bracket(2 * m, qp)))
        else:
            L.append(-L[-1] / (_mp_bracket(2 * m, qp) * _mp_bracket(2 * m + 1, qp)))
    return L


def _power_table_column(powers, weights, l: int, m: int):
    """Coefficient of x^m in (sum_k weights[k] x^k)^l, given the filled
    lower-power columns; uses weights[1..m-l+1] only."""
    return sum(powers[l - 1][j] * weights[m - j] for j in range(l - 1, m))


def _mp_sigma_recursive(family: SumFamily, m_max: int, qp: QParam, r: int, dps: int = _MP_DPS):
    import mpmath as mp

    with mp.workdps(dps):
        L = _mp_l_coefficients(family, m_max, qp, r)
        sig = [mp.mpf(0)] * (m_max + 1)
        sig[1] = -L[1]
        w = [mp.mpf(0)] * (m_max + 1)  # weights sigma_k / k, learned in order
        w[1] = sig[1]
        powers = [[mp.mpf(0)] * (m_max + 1) for _ in range(m_max + 1)]
        powers[1][1] = w[1]
        inv_lfact = [mp.mpf(0)] * (m_max + 1)
        for l in range(2, m_max + 1):
            inv_lfact[l] = mp.mpf((-1) ** l) / mp.factorial(l)
        for m in range(2, m_max + 1):
            inner = mp.mpf(0)
            for l in range(2, m + 1):
                powers[l][m] = _power_table_column(powers, w, l, m)
                inner += inv_lfact[l] * powers[l][m]
            sig[m] = m * (inner - L[m])
            w[m] = sig[m] / m
            powers[1][m] = w[m]
        return sig


def _mp_sigma_direct(family: SumFamily, m_max: int, qp: QParam, r: int):
    import mpmath as mp

    with mp.workdps(_MP_DPS):
        L = _mp_l_coefficients(family, m_max, qp, r)
        powers = [[mp.mpf(0)] * (m_max + 1) for _ in range(m_max + 1)]
        for m in range(1, m_max + 1):
            powers[1][m] = L[m]
        for l in range(2, m_max + 1):
            for m in range(l, m_max + 1):
                powers[l][m] = _power_table_column(powers, L, l, m)
        sig = [mp.mpf(0)] * (m_max + 1)
        for m in range(1, m_max + 1):
            sig[m] = m * sum(mp.mpf((-1) ** l) / l * powers[l][m] for l in range(1, m + 1))
        return sig


_SIGMA_CACHE: dict = {}


def _sigma_table(family: SumFamily, method: str, m_max: int, qp: QParam, r: int):
    key = (family, method, qp.q, qp.convention, r)
    cached = _SIGMA_CACHE.get(key)
    if cached is not None and len(cached) > m_max:
        return cached
    fn = _mp_sigma_recursive if method == "recursive" else _mp_sigma_direct
    table = fn(family, m_max, qp, r)
    _SIGMA_CACHE[key] = table
    return table


# --- zero-backed partial sums ----------------------------------------------


def _function_spec(family: SumFamily, qp: QParam, r: int) -> FunctionSpec:
    if family in (SumFamily.E_EXP, SumFamily.JACKSON):
        return FunctionSpec(Family.EXP, qp)
    if family is SumFamily.DERIVATIVE:
        return FunctionSpec(Family.EXP, qp) if r == 0 else FunctionSpec(Family.EXP_DERIVATIVE, qp, r)
    if family is SumFamily.INTEGRAL:
        return FunctionSpec(Family.EXP, qp) if r == 0 else FunctionSpec(Family.EXP_INTEGRAL, qp, r)
    return FunctionSpec(Family.COS if family is SumFamily.COS else Family.SIN, qp)


def _reciprocal_power_tail(moduli: list[float], power: float, qp: QParam, exact_geometric: bool) -> float:
    """Upper estimate of sum |z|^-power over the zeros beyond the last one.

    Jackson q > 1 zeros grow by exactly the factor q, so the tail is the
    geometric sum; otherwise a monotone-decay integral bound on the last
    inter-zero spacing is used (spacings of these zero sets grow, so
    continuing the last spacing arithmetically overestimates the tail).
    """
    rho = moduli[-1]
    if exact_geometric:
        ratio = qp.q ** (-power)
        est = rho ** (-power) * ratio / (1.0 - ratio)
    else:
        if power <= 1.0:
            raise ValueError("tail estimate needs power > 1 for non-geometric zero sets")
        spacing = rho - moduli[-2]
        if spacing <= 0:
            raise ArithmeticError("zero moduli are not increasing")
        est = rho ** (1.0 - power) / (spacing * (power - 1.0))
    return est * (1.0 + 1e-6) + 1e-15


def _sigma_from_zeros(family: SumFamily, n: int, m: int, qp: QParam, r: int, count: int) -> tuple[float, float]:
    spec = _function_spec(family, qp, r)
    records = zeroscape.enumerate_zeros(spec, count)
    if family in (SumFamily.COS, SumFamily.SIN):
        # one representative per +/- pair; the sums run over 1/z^2
        vals = [(1.0 / rec.location.real**2) ** m for rec in records]
        power = 2.0 * m
    else:
        vals = [(1.0 / rec.location) ** n for rec in records]
        power = float(n)
    total = complex(math.fsum(v.real if isinstance(v, complex) else v for v in vals),
                    math.fsum(v.imag if isinstance(v, complex) else 0.0 for v in vals))
    moduli = [abs(rec.location) for rec in records]
    exact = qp.convention is Convention.JACKSON and qp.q > 1.0 and family is SumFamily.JACKSON
    tail = _reciprocal_power_tail(moduli, power, qp, exact)
    if abs(total.imag) > 1e-9 * (1.0 + abs(total.real)):
        raise ArithmeticError(f"zero partial sum has a non-real residue {total.imag}")
    return total.real, tail


# --- public operations ------------------------------------------------------


def sigma(
    family: SumFamily,
    n: int,
    qp: QParam,
    method: str = "recursive",
    r: int = 0,
    zero_count: int = 20,
) -> SumRule:
    """One zero sum rule sigma_n for the family, by the chosen method.

    ``recursive`` and ``direct`` are the composition-sum routes (n <= 24);
    ``closed`` is the exact Jackson q > 1 expression; ``zeros`` sums over
    the first zero_count numerically located zeros and carries a tail
    estimate.
    """
    m = _validate(family, n, qp, r)
    if method in ("recursive", "direct"):
        if m > MAX_COMPOSITION_DEGREE:
            raise ValueError(f"{method} method capped at internal degree {MAX_COMPOSITION_DEGREE}")
        value = float(_sigma_table(family, method, m, qp, r)[m])
        return SumRule(family, n, value, method, qp, r)
    if method == "closed":
        if family is not SumFamily.JACKSON:
            raise ValueError("the closed form applies to the Jackson exponential family only")
        if qp.q <= 1.0:
            raise ValueError("the closed form needs q > 1")
        q = qp.q
        value = -((1.0 - q) ** n) / (1.0 - q**n)
        return SumRule(family, n, value, method, qp, r)
    if method == "zeros":
        value, tail = _sigma_from_zeros(family, n, m, qp, r, zero_count)
        return SumRule(family, n, value, method, qp, r, tail_estimate=tail)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def sigma_production(family: SumFamily, n: int, qp: QParam, r: int = 0) -> float:
    """sigma_n by the O(N^2) series-logarithm fast path (degree <= 200)."""
    m = _validate(family, n, qp, r)
    if m > MAX_SERIES_DEGREE:
        raise ValueError(f"series-log path capped at internal degree {MAX_SERIES_DEGREE}")
    return float(_sigma_serieslog(family, m, qp, r)[m])


_POWER_STEP = {
    SumFamily.E_EXP: 1,
    SumFamily.JACKSON: 1,
    SumFamily.DERIVATIVE: 1,
    SumFamily.INTEGRAL: 1,
    SumFamily.COS: 2,
    SumFamily.SIN: 2,
}


def b_series_coeffs(family: SumFamily, n_coeffs: int, qp: QParam, r: int = 0) -> CoeffList:
    """Coefficients of the natural logarithm b of the generating function
    (prefactor divided out), indexed in the family's series variable:
    b = sum_m coeffs[m-1] * u^m with u = z (exp families) or z^2 (trig).

    Computed by the series-logarithm fast path; equals -sigma_n / n.
    """
    if n_coeffs < 1:
        raise ValueError("need at least one coefficient")
    if n_coeffs > MAX_SERIES_DEGREE:
        raise ValueError(f"b-series capped at degree {MAX_SERIES_DEGREE}")
    _validate(family, {SumFamily.COS: 2, SumFamily.SIN: 3}.get(family, 1), qp, r)
    b = series_log(l_coefficients(family, n_coeffs, qp, r))
    return CoeffList(
        tuple(float(v) for v in b[1:]),
        qp,
        kind="b_series",
        min_degree=1,
        power_step=_POWER_STEP[family],
        family=family.value,
    )


_B_FAMILY = {f.value: f for f in SumFamily}


def b_series_eval(family: SumFamily, z: complex, n_coeffs: int, qp: QParam, r: int = 0) -> SeriesEval:
    """Truncated evaluation of b(z) itself (the log, without prefactor)."""
    return polynomial_eval(b_series_coeffs(family, n_coeffs, qp, r), z)


def exp_b_eval(family: SumFamily, z: complex, n_coeffs: int, qp: QParam, r: int = 0) -> SeriesEval:
    """prefactor(z) * exp(b(z)): reconstructs the generating function from
    its logarithm.  Valid inside the disk bounded by the family's first
    zero; outside it the certification flag drops, as in the truncated
    log evaluation."""
    s = b_series_eval(family, z, n_coeffs, qp, r)
    import cmath

    value = cmath.exp(s.value)
    if family is SumFamily.DERIVATIVE:
        value *= math.factorial(r) / bracket_factorial(r, qp)
    elif family is SumFamily.INTEGRAL:
        value *= complex(z) ** r / math.factorial(r)
    elif family is SumFamily.SIN:
        value *= z
    return SeriesEval(value, s.certified, s.last_term)


def bracket_reciprocal_from_sigma(n: int, qp: QParam) -> float:
    """1/[n]! rebuilt from the exponential-family sums sigma_2..sigma_n.

    Exponentiating b = -sum sigma_k z^k / k degree by degree reproduces the
    reciprocal bracket factorials; the sigmas come from the composition
    recursion so the two sides are computed along independent routes.  The
    exponentiation cancels far below double resolution at higher degrees,
    hence extended precision inside.
    """
    if not 2 <= n <= MAX_COMPOSITION_DEGREE:
        raise ValueError(f"degree must be within [2, {MAX_COMPOSITION_DEGREE}], got {n}")
    family = SumFamily.E_EXP if qp.convention is Convention.SYMMETRIC else SumFamily.JACKSON
    return float(reconstruct_coefficients(family, n, qp)[n])


def reconstruct_coefficients(family: SumFamily, n_max: int, qp: QParam, r: int = 0) -> np.ndarray:
    """Maclaurin coefficients of the generating function recovered by
    exponentiating b = -sum sigma_k u^k / k, sigma taken from the
    composition recursion.

    An independent route to the same numbers as the bracket products; the
    agreement of the two is the strongest internal consistency check in
    this module.  Runs in extended precision throughout (the cancellation
    in exp reaches ~1e-17 of the largest term by degree 20).
    """
    import mpmath as mp

    if not 1 <= n_max <= MAX_COMPOSITION_DEGREE:
        raise ValueError(f"degree must be within [1, {MAX_COMPOSITION_DEGREE}], got {n_max}")
    # the cancellation depth grows with the bracket factorials being
    # reconstructed (twice as fast in the squared variable of the trig
    # families), so the whole chain runs at degree-scaled precision
    dps = 40 + (12 if family in (SumFamily.COS, SumFamily.SIN) else 6) * n_max
    sig = _mp_sigma_recursive(family, n_max, qp, r, dps=dps)
    with mp.workdps(dps):
        b = [mp.mpf(0)] + [-sig[k] / k for k in range(1, n_max + 1)]
        f = [mp.mpf(1)] + [mp.mpf(0)] * n_max
        for m in range(1, n_max + 1):
            f[m] = sum(k * b[k] * f[m - k] for k in range(1, m + 1)) / m
        return np.array([float(v) for v in f])


def q_bernoulli(n: int, qp: QParam, variant: str = "plain") -> float:
    """Deformed Bernoulli numbers from the trigonometric sum rules.

    plain: (2n)!/2^(2n-1) * sigma^s_(2n+1);
    tilde: (2n)!/2^(2n-1) * sigma^c_(2n) / (2^(2n) - 1).
    Both reduce to the same classical value at q = 1.
    """
    if n < 1:
        raise ValueError(f"index must be >= 1, got {n}")
    scale = math.factorial(2 * n) / 2 ** (2 * n - 1)
    if variant == "plain":
        return scale * sigma_production(SumFamily.SIN, 2 * n + 1, qp)
    if variant == "tilde":
        return scale * sigma_production(SumFamily.COS, 2 * n, qp) / (2 ** (2 * n) - 1)
    raise ValueError(f"variant must be 'plain' or 'tilde', got {variant!r}")


def q_zeta(
    p: float,
    qp: QParam,
    variant: str = "plain",
    zero_count: int = 40,
    tail_target: float | None = None,
) -> TailedValue:
    """Normalised deformed zeta value: sum over reciprocal p-th powers of
    the sine zeros (plain) or cosine zeros divided by 2^p - 1 (tilde).

    Real p > 1 only; the tail beyond the computed zeros is estimated by a
    monotone-decay integral bound on the last inter-zero spacing and
    reported, never hidden.
    """
    if not p > 1.0:
        raise ValueError(f"p must be a real number > 1, got {p}")
    if variant not in ("plain", "tilde"):
        raise ValueError(f"variant must be 'plain' or 'tilde', got {variant!r}")
    fam = Family.SIN if variant == "plain" else Family.COS
    records = zeroscape.enumerate_zeros(FunctionSpec(fam, qp), zero_count)
    zeros = [rec.location.real for rec in records]
    if any(abs(rec.location.imag) > 1e-12 * abs(rec.location) for rec in records):
        raise ArithmeticError("complex trigonometric zeros: real-p zeta sum not defined")
    total = math.fsum(z ** (-p) for z in zeros)
    tail = _reciprocal_power_tail([abs(z) for z in zeros], p, qp, exact_geometric=False)
    if variant == "tilde":
        total /= 2.0**p - 1.0
        tail /= 2.0**p - 1.0
    if tail_target is not None and tail > tail_target:
        raise ArithmeticError(
            f"tail estimate {tail:.3g} exceeds the requested {tail_target:.3g}; "
            f"increase zero_count (used {zero_count})"
        )
    return TailedValue(total, tail, len(zeros))


def q_dilog(z: complex, qp: QParam, n_terms: int = 200) -> SeriesEval:
    """Deformed dilogarithm sum z^n / (n (1 - q^n)) for 0 < q < 1 (Jackson
    convention); identical to the log of the Jackson exponential at
    z/(1-q).  Certification follows the truncated-series rule."""
    if qp.convention is not Convention.JACKSON or not 0.0 < qp.q < 1.0:
        raise ValueError("the deformed dilogarithm needs the Jackson convention with 0 < q < 1")
    z = complex(z)
    q = qp.q
    parts_re: list[float] = []
    parts_im: list[float] = []
    qn = 1.0
    zn = 1.0 + 0.0j
    last = 0.0
    for n in range(1, n_terms + 1):
        qn *= q
        zn *= z
        t = zn / (n * (1.0 - qn))
        parts_re.append(t.real)
        parts_im.append(t.imag)
        last = abs(t)
    value = complex(math.fsum(parts_re), math.fsum(parts_im))
    certified = last <= 1e-14 * abs(value) or last == 0.0
    return SeriesEval(value, certified, last)
