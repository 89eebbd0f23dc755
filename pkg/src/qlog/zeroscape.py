"""Numerical zero/turning-point landscape of the deformed exponential family.

Real-axis zeros are located by adaptive sign scanning plus safeguarded
root polishing; complex conjugate pairs are isolated by argument-principle
winding counts on subdivided rectangles and polished by Newton iteration.
Every reported root carries a residual and a winding-number certificate.

Also here: collision-point detection in q (two real roots merging and
moving off as a conjugate pair), predictor-corrector continuation of root
trajectories in q, and marching-squares extraction of Re/Im zero contours
together with their images under the function (the data from which branch
points of the inverse map are read off).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .qnum import (
    Convention,
    Family,
    FunctionSpec,
    QParam,
    degree_for_radius,
    eval_series,
    series_coefficients,
)

RESIDUAL_REL = 1e-10  # residual must be below this times the local scale


class RootKind(Enum):
    REAL = "real"
    PAIR_UPPER = "pair-upper"
    PAIR_LOWER = "pair-lower"


@dataclass(frozen=True)
class ZeroRecord:
    index: int
    location: complex
    kind: RootKind
    residual: float
    spec: FunctionSpec
    certified: bool = True


@dataclass(frozen=True)
class TurningPointRecord:
    index: int
    location: complex
    kind: RootKind
    residual: float
    spec: FunctionSpec
    branch_value: complex
    certified: bool = True


@dataclass(frozen=True)
class CollisionResult:
    q_star: float
    location: float
    kind: str  # "zero-pair" | "turning-pair"
    pair_index: int
    bracket_width: float


@dataclass
class ZeroScan:
    records: list
    truncated: bool = False
    near_degenerate: list = field(default_factory=list)


@dataclass
class TrajectoryPoint:
    q: float
    locations: tuple
    kinds: tuple
    annotation: str | None = None


@dataclass
class Trajectory:
    points: list
    annotations: list
    truncated: bool = False


@dataclass
class ContourSet:
    polylines: list  # each an (k, 2) array of z-plane vertices
    w_images: list  # matching (k, 2) arrays of (u, v) images under f
    field: str  # "re" | "im"
    spec: FunctionSpec
    window: tuple
    grid_n: int
    vertex_residuals: list  # |selected field| at each vertex
    vertex_tolerances: list  # per-vertex interpolation tolerance


# --------------------------------------------------------------------------
# evaluation backend
# --------------------------------------------------------------------------

_POLY_CACHE: dict = {}


def _poly_coeffs(spec: FunctionSpec, order: int, radius: float) -> np.ndarray:
    """Coefficients of the order-th derivative of spec's function, truncated
    so the tail is negligible on |z| <= radius."""
    key = (spec, order)
    cached = _POLY_CACHE.get(key)
    if cached is not None and cached[0] >= radius:
        return cached[1]
    radius = max(radius * 1.25, 1.0)
    deg = degree_for_radius(spec, radius, tol=1e-18) + order
    c = series_coefficients(spec, deg)
    for _ in range(order):
        c = c[1:] * np.arange(1, len(c))
    _POLY_CACHE[key] = (radius, c)
    return c


def _horner(c: np.ndarray, z):
    if np.isscalar(z) or isinstance(z, complex):
        acc = 0j
        for ck in c[::-1]:
            acc = acc * z + ck
        return acc
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for ck in c[::-1]:
        acc = acc * z + ck
    return acc


def _classical_value(spec: FunctionSpec, order: int, z):
    """Closed forms for q = 1 (the Taylor sums are unusable at large |z|)."""
    fam = spec.family
    is_arr = isinstance(z, np.ndarray)
    exp_like = np.exp if is_arr else cmath.exp
    if fam in (Family.EXP, Family.EXP_DERIVATIVE):
        return exp_like(z)
    if fam is Family.COS or fam is Family.SIN:
        # derivative cycle of cos: cos, -sin, -cos, sin; sin sits 3 ahead
        idx = (order + (0 if fam is Family.COS else 3)) % 4
        if is_arr:
            fns = [np.cos, lambda u: -np.sin(u), lambda u: -np.cos(u), np.sin]
        else:
            fns = [cmath.cos, lambda u: -cmath.sin(u), lambda u: -cmath.cos(u), cmath.sin]
        return fns[idx](z)
    # repeated integral: exp minus the Taylor head of degree r-1-order
    k = spec.r - order
    head = 0.0
    if k > 0:
        zk = np.ones_like(z) if isinstance(z, np.ndarray) else 1.0 + 0j
        for m in range(k):
            head = head + zk
            zk = zk * z / (m + 1)
    return exp_like(z) - head


def evaluate(spec: FunctionSpec, z, order: int = 0):
    """Value of the order-th derivative of spec's function at z (scalar or
    ndarray).  q = 1 uses closed forms; the Jackson q > 1 exponential its
    product form (the series cancels below float noise near its zeros);
    otherwise a cached truncated polynomial sized for max |z|."""
    if spec.qp.is_classical:
        return _classical_value(spec, order, z)
    if _use_product_form(spec, order):
        return _jackson_product(spec.qp, z)
    radius = float(np.max(np.abs(z))) if not np.isscalar(z) else abs(z)
    c = _poly_coeffs(spec, order, max(radius, 1e-6))
    return _horner(c, z)


def _jackson_exact_zero(qp: QParam, i: int) -> float:
    return qp.q**i / (1.0 - qp.q)


def _jackson_product(qp: QParam, z, rel: float = 1e-16):
    """Product-form value of the Jackson exponential for q > 1 (scalar or
    array).  Factors (1 - z/z_i) with z_i = q^i/(1-q); this form stays
    accurate near the zeros, where the series cancels catastrophically."""
    q = qp.q
    zmax = float(np.max(np.abs(z))) if isinstance(z, np.ndarray) else abs(z)
    n = max(8, int(math.log(max(zmax * (q - 1.0), 1.0) / rel) / math.log(q)) + 4)
    val = np.ones_like(z, dtype=complex) if isinstance(z, np.ndarray) else 1.0 + 0j
    coef = (1.0 - q) / q
    for i in range(n):
        val = val * (1.0 - z * coef)
        coef /= q
    return val


def _jackson_newton_step(qp: QParam, z: complex) -> complex:
    # f'/f = sum over zeros of 1/(z - z_i)
    q = qp.q
    n = max(8, int(math.log(max(abs(z) * (q - 1.0), 1.0) / 1e-16) / math.log(q)) + 4)
    s = 0j
    for i in range(1, n + 1):
        d = z - _jackson_exact_zero(qp, i)
        if d == 0:
            return 0j  # sitting exactly on a zero: converged
        s += 1.0 / d
    return -1.0 / s


def _use_product_form(spec: FunctionSpec, order: int) -> bool:
    return (
        spec.family is Family.EXP
        and order == 0
        and spec.qp.convention is Convention.JACKSON
        and spec.qp.q > 1.0
    )


def accurate_value(spec: FunctionSpec, z: complex, order: int = 0) -> complex:
    """Best available evaluation for residual purposes (product form for the
    Jackson q > 1 exponential, adaptive series otherwise)."""
    if _use_product_form(spec, order):
        return _jackson_product(spec.qp, z)
    if order == 0 and not spec.qp.is_classical:
        return eval_series(spec, z, tol=1e-15).value
    return evaluate(spec, z, order)


def local_scale(spec: FunctionSpec, z: complex, order: int = 0) -> float:
    """max |f| over a sample of the unit circle around z; the reference
    magnitude against which residuals are certified."""
    pts = z + np.exp(2j * np.pi * np.arange(8) / 8)
    if _use_product_form(spec, order):
        return max(abs(_jackson_product(spec.qp, complex(p))) for p in pts)
    return float(np.max(np.abs(evaluate(spec, pts, order))))


# --- extended-precision refinement ------------------------------------------
#
# Far-out zeros cancel the series down to ~1e-16 of its largest term, which
# leaves double-precision residuals one order above the certification line.
# A short high-precision Newton polish (and residual measurement at the
# rounded double location) restores the full certificate.

_MP_COEFF_CACHE: dict = {}


def _mp_coeffs(spec: FunctionSpec, order: int, degree: int):
    import mpmath as mp

    key = (spec, order, degree)
    cached = _MP_COEFF_CACHE.get(key)
    if cached is not None:
        return cached
    q = mp.mpf(spec.qp.q)
    lq = mp.log(q)

    def br(n: int):
        if lq == 0:
            return mp.mpf(n)
        v = mp.expm1(n * lq) / mp.expm1(lq)
        if spec.qp.convention is Convention.SYMMETRIC:
            v *= mp.exp(-mp.mpf(n - 1) / 2 * lq)
        return v

    c = [mp.mpf(0)] * (degree + 1)
    fam, r = spec.family, spec.r
    if fam is Family.EXP:
        c[0] = mp.mpf(1)
        for n in range(1, degree + 1):
            c[n] = c[n - 1] / br(n)
    elif fam is Family.COS:
        c[0] = mp.mpf(1)
        prev = mp.mpf(1)
        for m in range(1, degree // 2 + 1):
            prev = -prev / (br(2 * m - 1) * br(2 * m))
            c[2 * m] = prev
    elif fam is Family.SIN:
        if degree >= 1:
            c[1] = mp.mpf(1)
            prev = mp.mpf(1)
            for m in range(1, (degree - 1) // 2 + 1):
                prev = -prev / (br(2 * m) * br(2 * m + 1))
                c[2 * m + 1] = prev
    elif fam is Family.EXP_DERIVATIVE:
        bf = mp.mpf(1)
        for k in range(1, r + 1):
            bf *= br(k)
        c[0] = mp.factorial(r) / bf
        for m in range(1, degree + 1):
            c[m] = c[m - 1] * (m + r) / (m * br(m + r))
    else:
        if degree >= r:
            c[r] = 1 / mp.factorial(r)
            for n in range(1, degree - r + 1):
                c[n + r] = c[n + r - 1] * n / ((n + r) * br(n))
    for _ in range(order):
        c = [c[k] * k for k in range(1, len(c))]
    _MP_COEFF_CACHE[key] = c
    return c


def _mp_eval(c, z):
    acc = 0
    for ck in reversed(c):
        acc = acc * z + ck
    return acc


def _mp_refine(spec: FunctionSpec, order: int, z0: complex, real_root: bool) -> tuple[complex, float]:
    """High-precision Newton polish of z0; returns the double-rounded root
    and the residual measured at that rounded location."""
    import mpmath as mp

    degree = len(_poly_coeffs(spec, order, abs(z0) + 1.0)) + 16
    with mp.workdps(45):
        c = _mp_coeffs(spec, order, degree)
        dc = [c[k] * k for k in range(1, len(c))]
        z = mp.mpc(z0)
        for _ in range(5):
            dv = _mp_eval(dc, z)
            if dv == 0:
                break
            step = _mp_eval(c, z) / dv
            z -= step
            if abs(step) < mp.mpf("1e-30") * max(1, abs(z)):
                break
        rounded = complex(z)
        if real_root:
            rounded = complex(rounded.real)
        residual = abs(_mp_eval(c, mp.mpc(rounded)))
    return rounded, float(residual)


# --------------------------------------------------------------------------
# winding numbers
# --------------------------------------------------------------------------


def _winding_adaptive(spec, order, param_fn, t_end, label, n0=128, max_points=400_000) -> int:
    """Argument-principle winding count along a closed contour.

    The contour is sampled adaptively until no phase step reaches pi/2 and
    no step moves the function value by a large fraction of its magnitude
    (the second condition defeats phase aliasing on long smooth arcs where
    the argument rotates through full turns between samples).  A zero
    sitting on the contour raises instead of returning garbage.
    """
    t = np.linspace(0.0, t_end, n0, endpoint=False)
    vals = evaluate(spec, param_fn(t), order)
    for _ in range(48):
        if np.any(vals == 0):
            raise ArithmeticError(f"zero on winding contour for {label}")
        ph = np.angle(vals)
        d = np.diff(ph, append=ph[:1])
        d = (d + np.pi) % (2 * np.pi) - np.pi
        nxt = np.roll(vals, -1)
        jump = np.abs(nxt - vals) >= 0.8 * (np.abs(vals) + np.abs(nxt))
        bad = (np.abs(d) >= 0.5 * np.pi) | jump
        if not np.any(bad):
            total = float(d.sum() / (2 * np.pi))
            w = round(total)
            if abs(total - w) > 1e-3:
                raise ArithmeticError(f"non-integer winding {total} on {label}")
            return int(w)
        if len(t) > max_points:
            raise ArithmeticError(f"winding refinement exhausted on {label}")
        idx = np.where(bad)[0]
        t_next = np.where(idx + 1 < len(t), t[(idx + 1) % len(t)], t_end)
        mid = 0.5 * (t[idx] + t_next)
        t = np.sort(np.concatenate([t, mid]))
        vals = evaluate(spec, param_fn(t), order)
    raise ArithmeticError(f"winding refinement did not settle on {label}")


def _initial_samples(perimeter: float) -> int:
    # sample spacing <= 0.5 from the start; zero spacings of the functions
    # here grow with |z|, so this keeps the phase resolvable everywhere
    return min(60_000, max(128, int(2.0 * perimeter)))


def winding_number(spec: FunctionSpec, box: tuple, order: int = 0, n0: int | None = None) -> int:
    """Zeros of the order-th derivative inside the rectangle."""
    x0, x1, y0, y1 = box
    if n0 is None:
        n0 = _initial_samples(2.0 * ((x1 - x0) + (y1 - y0)))
    return _winding_adaptive(spec, order, lambda t: _box_points(box, t), 4.0, f"box {box}", n0=n0)


def winding_number_circle(spec: FunctionSpec, radius: float, order: int = 0, center: complex = 0j) -> int:
    """Zeros of the order-th derivative with |z - center| < radius."""
    fn = lambda t: center + radius * np.exp(2j * np.pi * t)
    return _winding_adaptive(
        spec, order, fn, 1.0, f"circle r={radius:.6g}", n0=_initial_samples(2 * math.pi * radius)
    )


def _box_points(box: tuple, t: np.ndarray) -> np.ndarray:
    """Map t in [0, 4) to the rectangle boundary, counterclockwise."""
    x0, x1, y0, y1 = box
    side = np.floor(t).astype(int)
    frac = t - side
    zs = np.empty(len(t), dtype=complex)
    m = side == 0
    zs[m] = x0 + (x1 - x0) * frac[m] + 1j * y0
    m = side == 1
    zs[m] = x1 + 1j * (y0 + (y1 - y0) * frac[m])
    m = side == 2
    zs[m] = x1 - (x1 - x0) * frac[m] + 1j * y1
    m = side == 3
    zs[m] = x0 + 1j * (y1 - (y1 - y0) * frac[m])
    return zs


def certify_simple(spec: FunctionSpec, z: complex, order: int = 0, h: float | None = None) -> bool:
    """True when a winding count of exactly 1 surrounds z."""
    if h is None:
        h = 0.02 * (1.0 + abs(z))
    box = (z.real - h, z.real + h, z.imag - h, z.imag + h)
    try:
        return winding_number(spec, box, order) == 1
    except ArithmeticError:
        return False


# --------------------------------------------------------------------------
# real-axis zeros
# --------------------------------------------------------------------------


def _scan_grid(x_min: float, x_max: float) -> np.ndarray:
    """Adaptive scan abscissas: step min(0.25, |x|/50), floored so the scan
    terminates, denser near the origin where roots cluster pre-collision."""
    floor = max((x_max - x_min) / 400_000, 1e-4)
    pts = [x_min]
    x = x_min
    while x < x_max:
        x += max(floor, min(0.25, abs(x) / 50.0))
        pts.append(min(x, x_max))
    return np.asarray(pts)


def _polish_real(spec: FunctionSpec, order: int, a: float, b: float) -> float:
    g = lambda x: float(np.real(evaluate(spec, complex(x), order)))
    root = brentq(g, a, b, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)
    if _use_product_form(spec, order):
        z = complex(root)
        for _ in range(8):
            step = _jackson_newton_step(spec.qp, z)
            z += step
            if abs(step) < 1e-15 * max(1.0, abs(z)):
                break
        return z.real
    if spec.qp.is_classical:
        fv = lambda x: float(np.real(evaluate(spec, complex(x), order)))
        dv = lambda x: float(np.real(evaluate(spec, complex(x), order + 1)))
    else:
        c = _poly_coeffs(spec, order, abs(root) + 1.0)
        dc = c[1:] * np.arange(1, len(c))
        fv = lambda x: _horner(c, complex(x)).real
        dv = lambda x: _horner(dc, complex(x)).real
    x = root
    for _ in range(4):
        d = dv(x)
        if d == 0:
            break
        step = fv(x) / d
        x -= step
        if abs(step) < 1e-15 * max(1.0, abs(x)):
            break
    return x


def find_real_zeros(
    spec: FunctionSpec,
    x_min: float,
    x_max: float,
    max_count: int | None = None,
    order: int = 0,
) -> ZeroScan:
    """All real zeros of the order-th derivative on [x_min, x_max].

    Sign changes on the adaptive grid are bracketed and polished; grid
    cells where |f| dips near zero without a sign change are refined, and
    if the dip persists it is reported as a near-degenerate bracket
    (a nearly-double root) rather than silently dropped.
    """
    if x_min >= x_max:
        raise ValueError(f"empty window [{x_min}, {x_max}]")
    xs = _scan_grid(x_min, x_max)
    vals = np.real(evaluate(spec, xs.astype(complex), order))
    roots: list[float] = []
    near_degenerate: list[float] = []
    signs = np.where(vals >= 0.0, 1, -1)  # grid point exactly on a zero counts once
    sign_change = signs[:-1] != signs[1:]
    for i in np.where(sign_change)[0]:
        root = _polish_real(spec, order, xs[i], xs[i + 1])
        if not roots or abs(root - roots[-1]) > 1e-9 * (1.0 + abs(root)):
            roots.append(root)
    # dip refinement: local |f| minima well below their neighbourhood scale
    # hide either a close real pair (refinement recovers the sign changes)
    # or a just-collided pair with small imaginary parts (reported)
    av = np.abs(vals)
    for i in range(1, len(xs) - 1):
        if sign_change[i - 1] or sign_change[i]:
            continue
        if av[i] < av[i - 1] and av[i] < av[i + 1]:
            nbhd = max(av[max(0, i - 8) : i + 9].max(), 1e-300)
            if av[i] < 0.05 * nbhd:
                lo = xs[max(0, i - 2)]
                hi = xs[min(len(xs) - 1, i + 2)]
                found = _refine_dip(spec, order, lo, hi, xs[min(i + 1, len(xs) - 1)] - xs[i])
                if found is None:
                    near_degenerate.append(float(xs[i]))
                elif found:
                    roots.extend(found)
    roots.sort(key=abs)
    truncated = False
    if max_count is not None and len(roots) > max_count:
        roots = roots[:max_count]
        truncated = True
    records = [_real_record(spec, order, i, x, roots) for i, x in enumerate(roots, start=1)]
    return ZeroScan(records, truncated, near_degenerate)


def _refine_dip(spec, order, a, b, step):
    """Zoom into a sign-free |f| dip.

    Returns bracketed roots if the finer grid reveals sign changes (a close
    real pair the scan stepped over), None if the dip behaves like a
    conjugate pair closer to the axis than the scan resolution (a
    near-degenerate bracket, reported rather than failed), or [] for a
    benign minimum.
    """
    xs = np.linspace(a, b, 257)
    vals = np.real(evaluate(spec, xs.astype(complex), order))
    signs = np.where(vals >= 0.0, 1, -1)
    flips = np.where(signs[:-1] != signs[1:])[0]
    if len(flips):
        return [_polish_real(spec, order, xs[i], xs[i + 1]) for i in flips]
    av = np.abs(vals)
    i = int(np.argmin(av))
    dip = av[i]
    # local quadratic shape: dip ~ C y^2 for a pair at distance y off-axis
    curv = 0.0
    for j in (0, len(xs) - 1):
        d = abs(xs[j] - xs[i])
        if d > 0:
            curv = max(curv, (av[j] - dip) / d**2)
    if curv <= 0:
        return []
    implied_offset = math.sqrt(dip / curv)
    return None if implied_offset < 2.0 * step else []


def _real_record(spec, order, index, x, all_roots):
    z = complex(x)
    residual = abs(accurate_value(spec, z, order))
    scale = local_scale(spec, z, order)
    if residual > 0.2 * RESIDUAL_REL * scale and not _use_product_form(spec, order) and not spec.qp.is_classical:
        z2, r2 = _mp_refine(spec, order, z, real_root=True)
        if r2 < residual:
            z, residual = z2, r2
    gap = min((abs(x - o) for o in all_roots if o != x), default=1.0)
    h = min(0.45 * gap, 0.05 * (1.0 + abs(x)))
    certified = certify_simple(spec, z, order, h=max(h, 1e-6)) and residual < RESIDUAL_REL * scale
    if order == 0:
        return ZeroRecord(index, z, RootKind.REAL, residual, spec, certified)
    branch = complex(accurate_value(spec, z, 0))
    return TurningPointRecord(index, z, RootKind.REAL, residual, spec, branch, certified)


# --------------------------------------------------------------------------
# complex zeros
# --------------------------------------------------------------------------


def _newton_complex(spec: FunctionSpec, order: int, z: complex, radius: float) -> complex | None:
    if _use_product_form(spec, order):
        for _ in range(80):
            step = _jackson_newton_step(spec.qp, z)
            z += step
            if abs(step) < 1e-14 * max(1.0, abs(z)):
                return z
        return None
    if spec.qp.is_classical:
        fv = lambda u: complex(evaluate(spec, u, order))
        dv = lambda u: complex(evaluate(spec, u, order + 1))
    else:
        c = _poly_coeffs(spec, order, radius)
        dc = c[1:] * np.arange(1, len(c))
        fv = lambda u: _horner(c, u)
        dv = lambda u: _horner(dc, u)
    for _ in range(60):
        d = dv(z)
        if d == 0:
            return None
        step = fv(z) / d
        z -= step
        if abs(step) < 1e-14 * max(1.0, abs(z)):
            return z
    return None


def _split_box(box):
    x0, x1, y0, y1 = box
    if (x1 - x0) >= (y1 - y0):
        xm = x0 + 0.50001 * (x1 - x0)  # slightly off-centre to dodge roots on the cut
        return (x0, xm, y0, y1), (xm, x1, y0, y1)
    ym = y0 + 0.50001 * (y1 - y0)
    return (x0, x1, y0, ym), (x0, x1, ym, y1)


def _zeros_in_box(spec: FunctionSpec, order: int, box: tuple, radius: float, depth: int = 0) -> list[complex]:
    """Recursively isolate all zeros inside the box via winding counts."""
    try:
        count = winding_number(spec, box, order)
    except ArithmeticError:
        # a root (nearly) on the boundary: nudge the box outward slightly
        x0, x1, y0, y1 = box
        pad = 1e-3 * max(x1 - x0, y1 - y0)
        count = winding_number(spec, order=order, box=(x0 - pad, x1 + pad, y0 - pad, y1 + pad))
    if count == 0:
        return []
    x0, x1, y0, y1 = box
    centre = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    small = max(x1 - x0, y1 - y0) < 1e-6 * (1.0 + abs(centre))
    if count == 1 or small:
        root = _newton_complex(spec, order, centre, radius)
        if root is not None and (x0 - 1e-9 <= root.real <= x1 + 1e-9) and (y0 - 1e-9 <= root.imag <= y1 + 1e-9):
            if count == 1:
                return [root]
        if small:  # cluster tighter than the resolution floor (collision zone)
            return [centre] * count
    if depth > 60:
        raise ArithmeticError(f"box subdivision exhausted near {centre}")
    b1, b2 = _split_box(box)
    return _zeros_in_box(spec, order, b1, radius, depth + 1) + _zeros_in_box(spec, order, b2, radius, depth + 1)


def find_complex_zeros(
    spec: FunctionSpec,
    count: int | None = None,
    seeds: list | None = None,
    box: tuple | None = None,
    order: int = 0,
) -> list:
    """Strictly-complex conjugate zero pairs of the order-th derivative.

    Seeds (from q-continuation or a caller) are polished directly; without
    seeds an upper-half-plane box is searched by winding subdivision.  Each
    upper root is paired with an independently polished conjugate partner,
    and every record is certified by a winding count of one.
    """
    uppers: list[complex] = []
    if seeds:
        radius = max(abs(complex(s)) for s in seeds) + 2.0
        for s in seeds:
            z = complex(s)
            if z.imag < 0:
                z = z.conjugate()
            root = _newton_complex(spec, order, z, radius)
            if root is None:
                raise ArithmeticError(f"Newton diverged from seed {s}")
            uppers.append(root)
    else:
        if box is None:
            box = _default_upper_box(spec, order, count or 1)
        radius = math.hypot(max(abs(box[0]), abs(box[1])), max(abs(box[2]), abs(box[3]))) + 1.0
        uppers = _zeros_in_box(spec, order, box, radius)
    uppers.sort(key=lambda z: (abs(z), z.real))
    deduped: list[complex] = []
    for z in uppers:  # adjacent subdivision boxes can re-find a shared root
        if not deduped or abs(z - deduped[-1]) > 1e-8 * (1.0 + abs(z)):
            deduped.append(z)
    uppers = deduped
    if count is not None:
        uppers = uppers[:count]
    records: list = []
    for i, up in enumerate(uppers, start=1):
        low = _newton_complex(spec, order, up.conjugate(), abs(up) + 2.0) or up.conjugate()
        records.append(_complex_record(spec, order, 2 * i - 1, up, RootKind.PAIR_UPPER))
        records.append(_complex_record(spec, order, 2 * i, low, RootKind.PAIR_LOWER))
    return records


def _complex_record(spec, order, index, z, kind):
    residual = abs(accurate_value(spec, z, order))
    scale = local_scale(spec, z, order)
    if residual > 0.2 * RESIDUAL_REL * scale and not _use_product_form(spec, order) and not spec.qp.is_classical:
        z2, r2 = _mp_refine(spec, order, z, real_root=False)
        if r2 < residual:
            z, residual = z2, r2
    certified = certify_simple(spec, z, order) and residual < RESIDUAL_REL * scale
    if order == 0:
        return ZeroRecord(index, z, kind, residual, spec, certified)
    branch = complex(accurate_value(spec, z, 0))
    return TurningPointRecord(index, z, kind, residual, spec, branch, certified)


def _default_upper_box(spec: FunctionSpec, order: int, count: int) -> tuple:
    """Upper-half-plane search box wide enough for `count` pairs, grown
    until the winding census stops changing."""
    R = 12.0
    for _ in range(10):
        box = (-R, 0.4, 1e-4, 0.75 * R)
        inner = (-R / 2, 0.4, 1e-4, 0.375 * R)
        try:
            n_outer = winding_number(spec, box, order)
            n_inner = winding_number(spec, inner, order)
        except ArithmeticError:
            R *= 1.37
            continue
        if n_outer >= count and n_outer == n_inner:
            return box
        if n_outer >= count:
            return box
        R *= 2.0
    return (-R, 0.4, 1e-4, 0.75 * R)


# --------------------------------------------------------------------------
# sorted enumeration (real + complex), used by the sum-rule partial sums
# --------------------------------------------------------------------------


def _origin_multiplicity(spec: FunctionSpec, order: int) -> int:
    c = _poly_coeffs(spec, order, 1.0)
    nz = np.nonzero(c)[0]
    return int(nz[0]) if len(nz) else 0


def _census_matches(spec, order, found, cut_index, trig) -> tuple[bool, float]:
    """Certify that `found[:cut_index]` is every zero of modulus below a
    circle threaded between consecutive zero moduli."""
    lo = abs(found[cut_index - 1].location)
    hi = abs(found[cut_index].location) if cut_index < len(found) else 1.3 * lo + 1.0
    expected = cut_index * (2 if trig else 1) + _origin_multiplicity(spec, order)
    for frac in (0.5, 0.43, 0.57):
        rho = lo + frac * (hi - lo)
        try:
            return winding_number_circle(spec, rho, order) == expected, rho
        except ArithmeticError:
            continue
    return False, 0.5 * (lo + hi)


def enumerate_zeros(spec: FunctionSpec, count: int, order: int = 0) -> list:
    """First `count` zeros of the order-th derivative ordered by modulus.

    Conjugate pairs contribute two entries.  Completeness is certified by
    an argument-principle census on a circle threaded between zero moduli:
    the count inside must equal the roots found, so the ordering cannot
    silently skip a zero.  Trig zeros are searched on the positive axis
    (one representative per +/- pair); origin zeros (the repeated
    integral's z^r factor, the sine's z) are excluded but counted in the
    census.
    """
    trig = spec.family in (Family.COS, Family.SIN)
    eps = 1e-3
    R = 16.0
    for _ in range(18):
        pair_caps = [0.0] if trig else [min(R, 64.0)] + ([R] if R > 64.0 else [])
        for pair_cap in pair_caps:
            if trig:
                found = list(find_real_zeros(spec, eps, R, order=order).records)
            else:
                found = list(find_real_zeros(spec, -R, -eps, order=order).records)
                found.extend(
                    find_complex_zeros(spec, box=(-pair_cap, -eps / 2, eps, 0.75 * pair_cap), order=order)
                )
            # quantised modulus so conjugate partners tie exactly, upper first
            found.sort(key=lambda rec: (float(f"{abs(rec.location):.12g}"), -rec.location.imag))
            if len(found) < count:
                break
            cut = count
            while cut < len(found) and abs(found[cut].location) - abs(found[cut - 1].location) <= 1e-9 * (
                1.0 + abs(found[cut].location)
            ):
                cut += 1  # never cut between the halves of a conjugate pair
            ok, _rho = _census_matches(spec, order, found, cut, trig)
            if ok:
                return [_reindex(rec, i) for i, rec in enumerate(found[:count], start=1)]
        R *= 2.0
    raise ArithmeticError(f"could not enumerate {count} zeros for {spec.family.value} (q={spec.qp.q})")


def _reindex(rec, index):
    if isinstance(rec, TurningPointRecord):
        return TurningPointRecord(index, rec.location, rec.kind, rec.residual, rec.spec, rec.branch_value, rec.certified)
    return ZeroRecord(index, rec.location, rec.kind, rec.residual, rec.spec, rec.certified)


def find_turning_points(
    spec: FunctionSpec,
    x_min: float | None = None,
    x_max: float | None = None,
    count: int | None = None,
    seeds: list | None = None,
) -> list:
    """Zeros of the first derivative, each carrying its branch value f(tau).

    Give a real window for an axis scan, seeds for complex pairs, or just
    a count for the modulus-ordered enumeration.
    """
    if seeds is not None:
        return find_complex_zeros(spec, count=count, seeds=seeds, order=1)
    if x_min is not None and x_max is not None:
        scan = find_real_zeros(spec, x_min, x_max, max_count=count, order=1)
        return scan.records
    if count is None:
        raise ValueError("need a window, seeds, or a count")
    return enumerate_zeros(spec, count, order=1)


# --------------------------------------------------------------------------
# collisions
# --------------------------------------------------------------------------


def _real_roots_fast(spec: FunctionSpec, order: int, lo: float, hi: float) -> list[float]:
    """Bracketed real roots without records or certification (predicate use)."""
    xs = _scan_grid(lo, hi)
    vals = np.real(evaluate(spec, xs.astype(complex), order))
    out = []
    signs = np.where(vals >= 0.0, 1, -1)
    for i in np.where(signs[:-1] != signs[1:])[0]:
        g = lambda x: float(np.real(evaluate(spec, complex(x), order)))
        root = brentq(g, xs[i], xs[i + 1], xtol=1e-12, rtol=1e-14, maxiter=200)
        if not out or abs(root - out[-1]) > 1e-9 * (1.0 + abs(root)):
            out.append(root)
    return sorted(out, key=abs)


def _pair_positions(spec_q: FunctionSpec, order: int, pair_index: int, window: tuple | None):
    lo, hi = window if window else (-40.0, -1e-3)
    roots = _real_roots_fast(spec_q, order, lo, hi)  # modulus order
    want = 2 * pair_index
    if len(roots) < want:
        return None
    a, b = roots[want - 2], roots[want - 1]
    return min(a, b), max(a, b)


def collision_point(
    spec: FunctionSpec,
    kind: str = "zero",
    pair_index: int = 1,
    q_lo: float = 0.05,
    q_hi: float | None = None,
) -> CollisionResult | None:
    """Deformation value q* at which the pair_index-th pair of real roots
    (of f for kind="zero", of f' for kind="turning") merges.

    Bisection on the "pair still real" predicate in a window tracked around
    the pair, then a Newton polish on the double-root system (g, g') = 0 in
    (x, q).  Jackson-convention roots never collide for q > 1; a probe over
    (1, 10] confirms the pair stays real and None is returned.
    """
    if kind not in ("zero", "turning"):
        raise ValueError(f"kind must be 'zero' or 'turning', got {kind!r}")
    order = 0 if kind == "zero" else 1
    if spec.qp.convention is Convention.JACKSON:
        for q in np.linspace(1.05, 10.0, 12):
            probe = FunctionSpec(spec.family, QParam(float(q), Convention.JACKSON), spec.r)
            if _pair_positions(probe, order, pair_index, None) is None:
                raise ArithmeticError(f"lost track of pair {pair_index} at q={q}")
        return None

    def at(q: float) -> FunctionSpec:
        return FunctionSpec(spec.family, QParam(q, spec.qp.convention), spec.r)

    pos = _pair_positions(at(q_lo), order, pair_index, None)
    if pos is None:
        raise ValueError(f"pair {pair_index} is not real at q={q_lo}; start lower")
    window = _pair_window(pos)
    if q_hi is None:
        q_hi = q_lo
        while q_hi < 0.98:
            q_hi = min(q_hi + 0.05, 0.98)
            if _pair_positions(at(q_hi), order, pair_index, window) is None:
                break
        else:
            raise ArithmeticError(f"no collision found for pair {pair_index} below q=0.98")
    lo, hi = q_lo, q_hi
    for attempt in range(2):
        ok_lo = _pair_positions(at(lo), order, pair_index, window) is not None
        ok_hi = _pair_positions(at(hi), order, pair_index, window) is None
        if ok_lo and ok_hi:
            break
        lo = max(0.01, lo - 0.04)
        hi = min(0.98, hi + 0.04)
        if attempt == 1:
            raise ArithmeticError(f"collision predicate not bracketed on [{lo}, {hi}]")
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        pos_mid = _pair_positions(at(mid), order, pair_index, window)
        if pos_mid is not None:
            lo = mid
            window = _pair_window(pos_mid)
        else:
            hi = mid
    x_star = 0.5 * (window[0] + window[1])
    q_star = 0.5 * (lo + hi)
    polished = _polish_collision(spec, order, x_star, q_star)
    if polished is not None and lo - 1e-4 <= polished[1] <= hi + 1e-4:
        x_star, q_star = polished
    return CollisionResult(q_star, x_star, f"{kind}-pair", pair_index, hi - lo)


def _pair_window(pos: tuple) -> tuple:
    a, b = pos
    pad = max(0.35 * (b - a), 0.15)
    return (a - pad, b + pad)


def _polish_collision(spec, order, x, q, iters=6):
    """Newton on (g, g_x) = 0 in (x, q); q-derivatives by central
    differences across rebuilt coefficient tables."""
    hq = 1e-7
    for _ in range(iters):
        def tables(qv):
            sp = FunctionSpec(spec.family, QParam(qv, spec.qp.convention), spec.r)
            c = _poly_coeffs(sp, order, abs(x) + 2.0)
            dc = c[1:] * np.arange(1, len(c))
            d2c = dc[1:] * np.arange(1, len(dc))
            return c, dc, d2c

        c, dc, d2c = tables(q)
        cp, dcp, _ = tables(q + hq)
        cm, dcm, _ = tables(q - hq)
        g = _horner(c, complex(x)).real
        gx = _horner(dc, complex(x)).real
        gxx = _horner(d2c, complex(x)).real
        gq = (_horner(cp, complex(x)).real - _horner(cm, complex(x)).real) / (2 * hq)
        gxq = (_horner(dcp, complex(x)).real - _horner(dcm, complex(x)).real) / (2 * hq)
        # solve [[gx, gq], [gxx, gxq]] . [dx, dq] = -[g, gx]
        det = gx * gxq - gq * gxx
        if det == 0:
            return None
        dx = (-g * gxq + gq * gx) / det
        dq = (g * gxx - gx * gx) / det
        x, q = x + dx, q + dq
        if abs(dx) + abs(dq) < 1e-12:
            break
    return (x, q) if math.isfinite(x) and math.isfinite(q) else None


# --------------------------------------------------------------------------
# continuation in q
# --------------------------------------------------------------------------


def continue_in_q(
    spec: FunctionSpec,
    q_from: float,
    q_to: float,
    steps: int,
    tracked: list,
) -> Trajectory:
    """Track root locations as q moves from q_from to q_to.

    Each step re-polishes every root by Newton from its previous location;
    consecutive real roots are treated as a pair, and when the pair's
    brackets disappear the step is annotated as a collision passage and
    tracking switches to the emerging conjugate pair (both halves polished
    independently; Schwarz symmetry is observed, not imposed).  Failed
    steps are retried at half the step down to a floor, then the
    trajectory is truncated with a flag.
    """
    locs = [complex(getattr(r, "location", r)) for r in tracked]
    kinds = [RootKind.REAL if abs(z.imag) < 1e-12 else (RootKind.PAIR_UPPER if z.imag > 0 else RootKind.PAIR_LOWER) for z in locs]
    points = [TrajectoryPoint(q_from, tuple(locs), tuple(kinds))]
    annotations: list[str] = []
    dq_full = (q_to - q_from) / steps
    dq_min = abs(dq_full) / 64.0
    q = q_from
    dq = dq_full
    truncated = False
    while (dq_full > 0 and q < q_to - 1e-15) or (dq_full < 0 and q > q_to + 1e-15):
        q_next = q + dq
        if (dq_full > 0 and q_next > q_to) or (dq_full < 0 and q_next < q_to):
            q_next = q_to
        sp = FunctionSpec(spec.family, QParam(q_next, spec.qp.convention), spec.r)
        new_locs, note = _advance_roots(sp, locs, kinds)
        if new_locs is None:
            if abs(dq) / 2 < dq_min:
                truncated = True
                break
            dq /= 2
            continue
        locs = new_locs
        kinds = [
            RootKind.REAL if abs(z.imag) < 1e-10 * (1 + abs(z)) else (RootKind.PAIR_UPPER if z.imag > 0 else RootKind.PAIR_LOWER)
            for z in locs
        ]
        ann = None
        if note:
            ann = f"{note} in q-interval ({q:.6g}, {q_next:.6g})"
            annotations.append(ann)
        points.append(TrajectoryPoint(q_next, tuple(locs), tuple(kinds), ann))
        q = q_next
        dq = min(abs(dq * 2), abs(dq_full)) * (1 if dq_full > 0 else -1)
    return Trajectory(points, annotations, truncated)


def _advance_roots(sp: FunctionSpec, locs: list, kinds: list):
    radius = max(abs(z) for z in locs) + 3.0
    out = list(locs)
    note = None
    i = 0
    while i < len(locs):
        if kinds[i] is RootKind.REAL and i + 1 < len(locs) and kinds[i + 1] is RootKind.REAL:
            a = _newton_complex(sp, 0, complex(locs[i].real), radius)
            b = _newton_complex(sp, 0, complex(locs[i + 1].real), radius)
            sep0 = locs[i].real - locs[i + 1].real
            ok = (
                a is not None
                and b is not None
                and abs(a.imag) < 1e-9
                and abs(b.imag) < 1e-9
                and (a.real - b.real) * sep0 > 1e-12  # distinct, not crossed
            )
            if ok:
                out[i], out[i + 1] = complex(a.real), complex(b.real)
            else:
                mid = 0.5 * (locs[i].real + locs[i + 1].real)
                gap = max(abs(locs[i + 1].real - locs[i].real), 1e-3)
                up = _newton_complex(sp, 0, complex(mid, gap), radius)
                if up is None or abs(up.imag) < 1e-12:
                    return None, None
                if up.imag < 0:
                    up = up.conjugate()
                low = _newton_complex(sp, 0, up.conjugate(), radius) or up.conjugate()
                out[i], out[i + 1] = up, low
                note = f"pair ({i + 1},{i + 2}) collision: real roots became a conjugate pair"
            i += 2
        else:
            z = _newton_complex(sp, 0, locs[i], radius)
            if z is None:
                return None, None
            if kinds[i] is RootKind.REAL:
                z = complex(z.real)
            out[i] = z
            i += 1
    return out, note


# --------------------------------------------------------------------------
# contours
# --------------------------------------------------------------------------

# marching-squares segment table: case -> list of (edge_a, edge_b) pairs;
# edges are 0=bottom 1=right 2=top 3=left, corners counted bl,br,tr,tl.
_MS_SEGMENTS = {
    0: [],
    1: [(3, 0)],
    2: [(0, 1)],
    3: [(3, 1)],
    4: [(1, 2)],
    5: None,  # ambiguous: resolved by the cell-centre sign
    6: [(0, 2)],
    7: [(3, 2)],
    8: [(2, 3)],
    9: [(0, 2)],
    10: None,
    11: [(1, 2)],
    12: [(1, 3)],
    13: [(0, 1)],
    14: [(3, 0)],
    15: [],
}


def extract_contours(spec: FunctionSpec, window: tuple, grid_n: int, field: str) -> ContourSet:
    """Zero set of Re f or Im f over a rectangular window, as polylines.

    Marching squares with linear edge interpolation; saddle cells are
    disambiguated with the true centre value.  Every vertex is mapped
    through f so the w-plane image (where the inverse map's branch points
    live) comes out alongside.
    """
    if field not in ("re", "im"):
        raise ValueError(f"field must be 're' or 'im', got {field!r}")
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, grid_n + 1)
    ys = np.linspace(y0, y1, grid_n + 1)
    Z = xs[None, :] + 1j * ys[:, None]
    V = evaluate(spec, Z)
    F = V.real if field == "re" else V.imag
    centres = evaluate(spec, 0.25 * (Z[:-1, :-1] + Z[:-1, 1:] + Z[1:, 1:] + Z[1:, :-1]))
    FC = centres.real if field == "re" else centres.imag

    segments = []  # (vertex_a, vertex_b, tol_a, tol_b)
    for j in range(grid_n):
        for i in range(grid_n):
            corners = (F[j, i], F[j, i + 1], F[j + 1, i + 1], F[j + 1, i])
            case = sum(1 << k for k, v in enumerate(corners) if v >= 0.0)
            segs = _MS_SEGMENTS[case]
            if segs is None:
                # saddle: a positive centre joins the positive corners, so
                # the contours hug the two negative corners (and vice versa)
                if case == 5:  # bl, tr positive
                    segs = [(0, 1), (2, 3)] if FC[j, i] >= 0.0 else [(3, 0), (1, 2)]
                else:  # case 10: br, tl positive
                    segs = [(3, 0), (1, 2)] if FC[j, i] >= 0.0 else [(0, 1), (2, 3)]
            for ea, eb in segs or []:
                va, ta = _edge_vertex(ea, i, j, xs, ys, corners)
                vb, tb = _edge_vertex(eb, i, j, xs, ys, corners)
                if va != vb:
                    segments.append((va, vb, ta, tb))

    polylines = _chain_segments(segments)
    out_lines, out_w, out_res, out_tol = [], [], [], []
    for line in sorted(polylines, key=lambda L: (L[0][0].real, L[0][0].imag)):
        pts = np.array([p for p, _ in line])
        tols = np.array([t for _, t in line])
        wvals = evaluate(spec, pts)
        res = np.abs(wvals.real if field == "re" else wvals.imag)
        out_lines.append(np.column_stack([pts.real, pts.imag]))
        out_w.append(np.column_stack([wvals.real, wvals.imag]))
        out_res.append(res)
        out_tol.append(tols)
    return ContourSet(out_lines, out_w, field, spec, tuple(window), grid_n, out_res, out_tol)


def _edge_vertex(edge, i, j, xs, ys, corners):
    bl, br, tr, tl = corners
    if edge == 0:
        a, b = bl, br
        pa, pb = complex(xs[i], ys[j]), complex(xs[i + 1], ys[j])
    elif edge == 1:
        a, b = br, tr
        pa, pb = complex(xs[i + 1], ys[j]), complex(xs[i + 1], ys[j + 1])
    elif edge == 2:
        a, b = tl, tr
        pa, pb = complex(xs[i], ys[j + 1]), complex(xs[i + 1], ys[j + 1])
    else:
        a, b = bl, tl
        pa, pb = complex(xs[i], ys[j]), complex(xs[i], ys[j + 1])
    denom = a - b
    t = 0.5 if denom == 0 else min(max(a / denom, 0.0), 1.0)
    vertex = pa + t * (pb - pa)
    return vertex, max(abs(a), abs(b))


def _chain_segments(segments):
    """Join segments sharing endpoints into polylines (open chains first)."""
    def key(p: complex):
        return (round(p.real, 12), round(p.imag, 12))

    adj: dict = {}
    seg_set = []
    for a, b, ta, tb in segments:
        ka, kb = key(a), key(b)
        if ka == kb:
            continue
        seg_set.append((ka, kb))
        adj.setdefault(ka, []).append((kb, b, tb, a, ta))
        adj.setdefault(kb, []).append((ka, a, ta, b, tb))
    coords = {}
    for a, b, ta, tb in segments:
        coords.setdefault(key(a), (a, ta))
        coords.setdefault(key(b), (b, tb))
    used = set()
    lines = []
    starts = [k for k, v in adj.items() if len(v) == 1] + list(adj.keys())
    for start in starts:
        if all((min(start, nb), max(start, nb)) in used for nb, *_ in adj[start]):
            continue
        chain = [coords[start]]
        cur = start
        while True:
            nxt = None
            for nb, *_ in adj[cur]:
                ek = (min(cur, nb), max(cur, nb))
                if ek not in used:
                    used.add(ek)
                    nxt = nb
                    break
            if nxt is None:
                break
            chain.append(coords[nxt])
            cur = nxt
        if len(chain) > 1:
            lines.append(chain)
    return lines
