"""Bracket numbers, bracket factorials, and adaptive series evaluation.

Two bracket conventions are supported for the deformed integer [n]:

    symmetric:  [n] = (q^(n/2) - q^(-n/2)) / (q^(1/2) - q^(-1/2))
    Jackson:    [n] = (1 - q^n) / (1 - q)

Both reduce to n as q -> 1.  The symmetric bracket is invariant under
q -> 1/q, so symmetric parameters are normalised to 0 < q <= 1.

On top of the brackets sits an adaptive, tail-certified evaluator for the
deformed exponential, its derivatives and repeated integrals, and the
associated cosine/sine series.
"""

from __future__ import annotations

import cmath
import math
import os
import threading
from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_TERM_CAP = 10_000
DEFAULT_RATIO_THRESHOLD = 0.9
TERM_CAP_ENV = "QLOG_TERM_CAP"


class Convention(Enum):
    SYMMETRIC = "symmetric"
    JACKSON = "jackson"


class DomainError(ValueError):
    """Argument lies outside the series' convergence domain."""


class NoConvergence(ArithmeticError):
    """The geometric-tail certificate was not reached within the term cap."""


@dataclass(frozen=True)
class QParam:
    """Deformation parameter q > 0 together with the bracket convention.

    Symmetric brackets are invariant under q -> 1/q, so q > 1 is mapped to
    1/q on construction (value-preserving).  q = 1 is the classical limit.
    """

    q: float
    convention: Convention = Convention.SYMMETRIC

    def __post_init__(self) -> None:
        q = float(self.q)
        if not math.isfinite(q) or q <= 0.0:
            raise ValueError(f"deformation parameter must be positive and finite, got {self.q!r}")
        if self.convention is Convention.SYMMETRIC and q > 1.0:
            q = 1.0 / q
        object.__setattr__(self, "q", q)

    @property
    def is_classical(self) -> bool:
        return self.q == 1.0


class Family(Enum):
    EXP = "exp"
    COS = "cos"
    SIN = "sin"
    EXP_DERIVATIVE = "dexp"
    EXP_INTEGRAL = "iexp"


@dataclass(frozen=True)
class FunctionSpec:
    """Which entire function is meant: family + convention + (for the
    derivative/integral families) the order r."""

    family: Family
    qp: QParam
    r: int = 0

    def __post_init__(self) -> None:
        if self.family in (Family.EXP_DERIVATIVE, Family.EXP_INTEGRAL):
            if self.r < 1:
                raise ValueError(f"{self.family.value} requires order r >= 1, got {self.r}")
        elif self.r != 0:
            raise ValueError(f"{self.family.value} takes no order parameter")


@dataclass(frozen=True)
class TruncatedValue:
    """A partial-sum value plus a rigorous bound on the dropped tail."""

    value: complex
    tail_bound: float
    terms_used: int


def bracket(n: int, qp: QParam) -> float:
    """The deformed integer [n] under qp's convention.

    Evaluated through expm1/log so the classical limit q -> 1 stays
    accurate; q = 1 returns n exactly.
    """
    if n < 0:
        raise ValueError(f"bracket index must be >= 0, got {n}")
    if n == 0:
        return 0.0
    lq = math.log(qp.q)
    if lq == 0.0:
        return float(n)
    value = math.expm1(n * lq) / math.expm1(lq)  # (1 - q^n) / (1 - q)
    if qp.convention is Convention.SYMMETRIC:
        value *= math.exp(-0.5 * (n - 1) * lq)
    if not math.isfinite(value):
        raise OverflowError(f"bracket overflow for n={n} at q={qp.q}")
    return value


_FACT_LOCK = threading.Lock()
_FACT_TABLES: dict[tuple[float, Convention], list[float]] = {}


def bracket_factorial(n: int, qp: QParam) -> float:
    """[n]! = [n][n-1]...[1], with [0]! = 1.  Cached per (q, convention)."""
    if n < 0:
        raise ValueError(f"factorial index must be >= 0, got {n}")
    key = (qp.q, qp.convention)
    table = _FACT_TABLES.get(key)
    if table is None or len(table) <= n:
        with _FACT_LOCK:
            table = _FACT_TABLES.setdefault(key, [1.0])
            while len(table) <= n:
                k = len(table)
                table.append(table[k - 1] * bracket(k, qp))
    value = table[n]
    if not math.isfinite(value):
        raise OverflowError(f"bracket factorial overflow for n={n} at q={qp.q}")
    return value


def inverse_bracket_factorials(n: int, qp: QParam) -> np.ndarray:
    """Array of 1/[k]! for k = 0..n, built by division so large-k entries
    underflow to zero instead of overflowing."""
    out = np.ones(n + 1)
    for k in range(1, n + 1):
        out[k] = out[k - 1] / bracket(k, qp)
    return out


def _resolve_term_cap(term_cap: int | None) -> int:
    if term_cap is not None:
        return int(term_cap)
    env = os.environ.get(TERM_CAP_ENV)
    if env:
        return int(env)
    return DEFAULT_TERM_CAP


def _check_radius(spec: FunctionSpec, z: complex) -> None:
    qp = spec.qp
    if qp.convention is Convention.JACKSON and qp.q < 1.0:
        radius = 1.0 / (1.0 - qp.q)
        if abs(z) >= radius:
            raise DomainError(
                f"series for q={qp.q} (Jackson) converges only for |z| < {radius:.6g}; got |z| = {abs(z):.6g}"
            )


def _terms(spec: FunctionSpec, z: complex):
    """Yield (term, ratio_bound) pairs for the defining series.

    ratio_bound is a proven upper bound on |t_{k+1}/t_k| for the yielded
    term and every later one; it is non-increasing along the stream because
    the brackets grow with their index.
    """
    qp = spec.qp
    az = abs(z)
    fam = spec.family
    if fam is Family.EXP:
        t: complex = 1.0 + 0.0j
        n = 0
        while True:
            yield t, az / bracket(n + 1, qp)
            n += 1
            t = t * z / bracket(n, qp)
    elif fam is Family.COS:
        t = 1.0 + 0.0j
        z2 = z * z
        az2 = az * az
        m = 0
        while True:
            yield t, az2 / (bracket(2 * m + 1, qp) * bracket(2 * m + 2, qp))
            m += 1
            t = -t * z2 / (bracket(2 * m - 1, qp) * bracket(2 * m, qp))
    elif fam is Family.SIN:
        t = complex(z)
        z2 = z * z
        az2 = az * az
        m = 0
        while True:
            yield t, az2 / (bracket(2 * m + 2, qp) * bracket(2 * m + 3, qp))
            m += 1
            t = -t * z2 / (bracket(2 * m, qp) * bracket(2 * m + 1, qp))
    elif fam is Family.EXP_DERIVATIVE:
        r = spec.r
        t = complex(math.factorial(r) / bracket_factorial(r, qp))
        m = 0
        while True:
            yield t, ((m + 1 + r) / (m + 1)) * az / bracket(m + 1 + r, qp)
            m += 1
            t = t * z * (m + r) / (m * bracket(m + r, qp))
    elif fam is Family.EXP_INTEGRAL:
        r = spec.r
        t = z**r / math.factorial(r)
        n = 0
        while True:
            yield t, az / bracket(n + 1, qp)  # (n+1)/(n+1+r) < 1 absorbed
            n += 1
            t = t * z * n / ((n + r) * bracket(n, qp))
    else:  # pragma: no cover
        raise ValueError(f"unknown family {fam}")


def _eval_classical(spec: FunctionSpec, z: complex) -> TruncatedValue:
    """q = 1 limit: closed forms instead of the (numerically hostile for
    large |z|) classical Taylor sums."""
    fam = spec.family
    if fam in (Family.EXP, Family.EXP_DERIVATIVE):
        v = cmath.exp(z)
        scale = abs(v) + 1.0
    elif fam is Family.COS:
        v = cmath.cos(z)
        scale = abs(v) + abs(z) + 1.0
    elif fam is Family.SIN:
        v = cmath.sin(z)
        scale = abs(v) + abs(z) + 1.0
    else:  # repeated integral with integration constants fixed to zero
        head = 0.0 + 0.0j
        scale = 1.0
        zk = 1.0 + 0.0j
        for m in range(spec.r):
            head += zk
            scale = max(scale, abs(zk))
            zk = zk * z / (m + 1)
        v = cmath.exp(z) - head
        scale += abs(cmath.exp(z))
    return TruncatedValue(v, 4e-16 * scale, 0)


def eval_series(
    spec: FunctionSpec,
    z: complex,
    tol: float = 1e-12,
    *,
    term_cap: int | None = None,
    ratio_threshold: float = DEFAULT_RATIO_THRESHOLD,
) -> TruncatedValue:
    """Adaptively summed value of the defining series at z.

    Summation stops at the first omitted term whose modulus is below
    tol * max(1, |partial sum|) *and* whose onward term-ratio bound is
    below ratio_threshold; the reported tail_bound is then the geometric
    bound |t_omitted| / (1 - ratio).  Partial sums are accumulated with
    exact (compensated) summation because terms alternate in sign on the
    negative real axis.

    Raises DomainError outside the Jackson q < 1 convergence disk and
    NoConvergence if the certificate is not reached within the term cap.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    z = complex(z)
    _check_radius(spec, z)
    if spec.qp.is_classical:
        return _eval_classical(spec, z)
    cap = _resolve_term_cap(term_cap)
    re_parts: list[float] = []
    im_parts: list[float] = []
    running = 0.0 + 0.0j
    stream = _terms(spec, z)
    for k in range(cap + 1):
        t, ratio_bound = next(stream)
        if abs(t) <= tol * max(1.0, abs(running)) and ratio_bound < ratio_threshold:
            tail = abs(t) / (1.0 - ratio_bound)
            value = complex(math.fsum(re_parts), math.fsum(im_parts))
            return TruncatedValue(value, tail, k)
        re_parts.append(t.real)
        im_parts.append(t.imag)
        running += t
    raise NoConvergence(
        f"no geometric-tail certificate within {cap} terms for {spec.family.value} at z={z} (q={spec.qp.q})"
    )


def eval_exp_continued(qp: QParam, z: complex, tol: float = 1e-12, **kwargs) -> TruncatedValue:
    """Exponential value for the Jackson convention at any z.

    Inside the q < 1 convergence disk this is the plain series; outside it
    the value is continued through the reflection identity
    E_q(z) * E_{1/q}(-z) = 1, whose right-hand series converges everywhere.
    """
    if qp.convention is not Convention.JACKSON:
        raise ValueError("continued evaluation applies to the Jackson convention only")
    z = complex(z)
    spec = FunctionSpec(Family.EXP, qp)
    if qp.q >= 1.0 or abs(z) < 0.75 / (1.0 - qp.q):
        return eval_series(spec, z, tol, **kwargs)
    mirror = QParam(1.0 / qp.q, Convention.JACKSON)
    tv = eval_series(FunctionSpec(Family.EXP, mirror), -z, tol, **kwargs)
    if tv.value == 0:
        raise DomainError(f"reflection evaluation hit a zero of the mirror series at z={z}")
    value = 1.0 / tv.value
    av = abs(tv.value)
    tail = tv.tail_bound / (av * av) + 4e-16 * abs(value)
    return TruncatedValue(value, tail, tv.terms_used)


def series_coefficients(spec: FunctionSpec, degree: int) -> np.ndarray:
    """Maclaurin coefficients c[0..degree] of the family's series.

    Built multiplicatively, so entries beyond the float range underflow to
    zero rather than overflow.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    qp = spec.qp
    c = np.zeros(degree + 1)
    fam = spec.family
    if fam is Family.EXP:
        c[0] = 1.0
        for n in range(1, degree + 1):
            c[n] = c[n - 1] / bracket(n, qp)
    elif fam is Family.COS:
        c[0] = 1.0
        prev = 1.0
        for m in range(1, degree // 2 + 1):
            prev = -prev / (bracket(2 * m - 1, qp) * bracket(2 * m, qp))
            c[2 * m] = prev
    elif fam is Family.SIN:
        if degree >= 1:
            c[1] = 1.0
            prev = 1.0
            for m in range(1, (degree - 1) // 2 + 1):
                prev = -prev / (bracket(2 * m, qp) * bracket(2 * m + 1, qp))
                c[2 * m + 1] = prev
    elif fam is Family.EXP_DERIVATIVE:
        r = spec.r
        c[0] = math.factorial(r) / bracket_factorial(r, qp)
        for m in range(1, degree + 1):
            c[m] = c[m - 1] * (m + r) / (m * bracket(m + r, qp))
    else:
        r = spec.r
        if degree >= r:
            c[r] = 1.0 / math.factorial(r)
            for n in range(1, degree - r + 1):
                c[n + r] = c[n + r - 1] * n / ((n + r) * bracket(n, qp))
    return c


def degree_for_radius(
    spec: FunctionSpec,
    radius: float,
    tol: float = 1e-16,
    *,
    term_cap: int | None = None,
    ratio_threshold: float = DEFAULT_RATIO_THRESHOLD,
) -> int:
    """Truncation degree whose tail is certified below tol (relative to the
    all-positive-term sum) everywhere on |z| <= radius."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    _check_radius(spec, complex(radius))
    cap = _resolve_term_cap(term_cap)
    degree = 0
    total = 0.0
    for k, (t, ratio_bound) in enumerate(_terms(spec, abs(radius))):
        at = abs(t)
        if at <= tol * max(1.0, total) and ratio_bound < ratio_threshold:
            return degree + 6  # small safety margin over the certified stop
        total += at
        degree = _degree_of_term(spec, k)
        if k > cap:
            raise NoConvergence(
                f"no truncation certificate within {cap} terms at radius {radius} (q={spec.qp.q})"
            )
    raise AssertionError("unreachable")  # pragma: no cover


def _degree_of_term(spec: FunctionSpec, k: int) -> int:
    fam = spec.family
    if fam is Family.COS:
        return 2 * k
    if fam is Family.SIN:
        return 2 * k + 1
    if fam is Family.EXP_INTEGRAL:
        return k + spec.r
    return k
