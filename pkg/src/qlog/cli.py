"""Command-line front end.

Every subcommand maps onto one library operation and emits a single
machine-readable result object: JSON (17 significant digits) or CSV
(12 significant digits).  Result objects always carry the same keys
(op, inputs, value(s), error_estimate, certified, method), identical
flags produce byte-identical output, and files are written atomically.

Exit codes: 0 success (non-certified results still exit 0 and say so),
2 domain/usage errors, 1 internal failures.
"""

from __future__ import annotations

import math
import os
import sys
import tempfile

import click

from . import sumrules as sr
from . import verification
from . import zeroscape as zs
from .lnq import lnq_coefficients, lnq_eval, lnq_qderivative_coeffs
from .qnum import (
    Convention,
    DomainError,
    Family,
    FunctionSpec,
    QParam,
    eval_series,
)

JSON_DIGITS = 17
CSV_DIGITS = 12

_FAMILIES = {
    "exp": Family.EXP,
    "cos": Family.COS,
    "sin": Family.SIN,
    "dexp": Family.EXP_DERIVATIVE,
    "iexp": Family.EXP_INTEGRAL,
}

_SUM_FAMILIES = {
    "e": sr.SumFamily.E_EXP,
    "E": sr.SumFamily.JACKSON,
    "jackson": sr.SumFamily.JACKSON,
    "d": sr.SumFamily.DERIVATIVE,
    "i": sr.SumFamily.INTEGRAL,
    "c": sr.SumFamily.COS,
    "s": sr.SumFamily.SIN,
}


def _fnum(v: float, digits: int) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    return format(float(v), f".{digits}g")


def _json(obj, digits: int = JSON_DIGITS) -> str:
    """Deterministic JSON with controlled float precision (insertion order
    preserved, no whitespace surprises)."""
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fnum(obj, digits)
    if isinstance(obj, complex):
        return _json({"re": obj.real, "im": obj.imag}, digits)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_json(str(k), digits)}: {_json(v, digits)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v, digits) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj)!r}")


def _csv_scalar(payload: dict) -> str:
    lines = ["key,value"]

    def flatten(prefix: str, v):
        if isinstance(v, dict):
            for k, vv in v.items():
                flatten(f"{prefix}.{k}" if prefix else str(k), vv)
        elif isinstance(v, (list, tuple)):
            for i, vv in enumerate(v):
                flatten(f"{prefix}[{i}]", vv)
        elif isinstance(v, complex):
            flatten(f"{prefix}.re", v.real)
            flatten(f"{prefix}.im", v.imag)
        elif isinstance(v, float):
            lines.append(f"{prefix},{format(v, f'.{CSV_DIGITS}g')}")
        else:
            lines.append(f"{prefix},{v}")

    flatten("", payload)
    return "\n".join(lines) + "\n"


def _write_output(text: str, output: str | None) -> None:
    if output is None:
        click.echo(text, nl=not text.endswith("\n"))
        return
    directory = os.path.dirname(os.path.abspath(output)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qlog-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
        os.replace(tmp, output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(payload: dict, fmt: str, output: str | None) -> None:
    text = _json(payload) if fmt == "json" else _csv_scalar(payload)
    _write_output(text, output)


def _qparam(q: float, convention: str) -> QParam:
    return QParam(q, Convention.SYMMETRIC if convention == "symmetric" else Convention.JACKSON)


def _run(fn):
    """Map library errors onto the exit-code contract."""
    try:
        fn()
    except (DomainError, OverflowError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except click.exceptions.Exit:
        raise
    except ArithmeticError as exc:
        click.echo(f"failure: {exc}", err=True)
        sys.exit(1)


_common = [
    click.option("--q", type=float, required=True, help="deformation parameter"),
    click.option(
        "--convention",
        type=click.Choice(["symmetric", "jackson"]),
        default="symmetric",
        show_default=True,
    ),
    click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True),
    click.option("--output", type=click.Path(dir_okay=False), default=None, help="write atomically to a file"),
]


def _with_common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(package_name="qlog")
def main() -> None:
    """Deformed exponential/logarithm family: series, sum rules, zeros."""


@main.command("eval")
@click.option("--family", type=click.Choice(list(_FAMILIES)), default="exp", show_default=True)
@click.option("--r", type=int, default=0, help="order for dexp/iexp")
@click.option("--re", type=float, required=True, help="real part of the argument")
@click.option("--im", type=float, default=0.0, show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True)
@click.option("--term-cap", type=int, default=None, help="override the series term cap")
@_with_common
def cmd_eval(family, r, re, im, tol, term_cap, q, convention, fmt, output):
    """Adaptive truncated evaluation of a family series at a point."""

    def body():
        spec = FunctionSpec(_FAMILIES[family], _qparam(q, convention), r)
        tv = eval_series(spec, complex(re, im), tol, term_cap=term_cap)
        _emit(
            {
                "op": "eval",
                "inputs": {"family": family, "r": r, "q": q, "convention": convention, "re": re, "im": im, "tol": tol},
                "value": tv.value,
                "error_estimate": tv.tail_bound,
                "certified": True,
                "method": "series",
                "terms_used": tv.terms_used,
            },
            fmt,
            output,
        )

    _run(body)


@main.command("lnq")
@click.option("--n-coeffs", type=int, default=30, show_default=True)
@click.option("--method", type=click.Choice(["reversion", "recursive"]), default="reversion", show_default=True)
@click.option("--w-re", type=float, default=None, help="evaluate the series at w (real part)")
@click.option("--w-im", type=float, default=0.0, show_default=True)
@click.option("--qderiv", is_flag=True, help="emit the q-derivative series instead")
@_with_common
def cmd_lnq(n_coeffs, method, w_re, w_im, qderiv, q, convention, fmt, output):
    """Inverse-series coefficients of log_q(1+w), optionally evaluated."""

    def body():
        coeffs = lnq_coefficients(n_coeffs, _qparam(q, convention), method)
        inputs = {"n_coeffs": n_coeffs, "q": q, "convention": convention, "qderiv": qderiv}
        if qderiv:
            coeffs = lnq_qderivative_coeffs(coeffs)
        payload = {
            "op": "lnq",
            "inputs": inputs,
            "values": list(coeffs.coeffs),
            "error_estimate": None,
            "certified": True,
            "method": method,
            "min_degree": coeffs.min_degree,
        }
        if w_re is not None:
            ev = lnq_eval(complex(w_re, w_im), coeffs) if not qderiv else None
            if ev is None:
                raise ValueError("--w-re evaluation applies to the plain series, not --qderiv")
            inputs["w_re"], inputs["w_im"] = w_re, w_im
            payload["value"] = ev.value
            payload["error_estimate"] = ev.last_term
            payload["certified"] = ev.certified
        _emit(payload, fmt, output)

    _run(body)


@main.command("sumrules")
@click.option("--family", type=click.Choice(list(_SUM_FAMILIES)), required=True)
@click.option("--n", type=int, required=True, help="sum-rule index (paper convention)")
@click.option("--r", type=int, default=0)
@click.option(
    "--method",
    type=click.Choice(["recursive", "direct", "closed", "zeros"]),
    default="recursive",
    show_default=True,
)
@click.option("--zero-count", type=int, default=20, show_default=True)
@_with_common
def cmd_sumrules(family, n, r, method, zero_count, q, convention, fmt, output):
    """One zero sum rule sigma_n by the chosen computation route."""

    def body():
        rule = sr.sigma(_SUM_FAMILIES[family], n, _qparam(q, convention), method, r=r, zero_count=zero_count)
        _emit(
            {
                "op": "sumrules",
                "inputs": {"family": family, "n": n, "r": r, "q": q, "convention": convention, "zero_count": zero_count},
                "value": rule.value,
                "error_estimate": rule.tail_estimate,
                "certified": True,
                "method": method,
            },
            fmt,
            output,
        )

    _run(body)


@main.command("bseries")
@click.option("--family", type=click.Choice(list(_SUM_FAMILIES)), required=True)
@click.option("--n-coeffs", type=int, default=30, show_default=True)
@click.option("--r", type=int, default=0)
@click.option("--z-re", type=float, default=None, help="also evaluate prefactor*exp(b) at z")
@click.option("--z-im", type=float, default=0.0, show_default=True)
@_with_common
def cmd_bseries(family, n_coeffs, r, z_re, z_im, q, convention, fmt, output):
    """Natural-log series of a family function (and optional exp(b) value)."""

    def body():
        fam = _SUM_FAMILIES[family]
        qp = _qparam(q, convention)
        coeffs = sr.b_series_coeffs(fam, n_coeffs, qp, r=r)
        payload = {
            "op": "bseries",
            "inputs": {"family": family, "n_coeffs": n_coeffs, "r": r, "q": q, "convention": convention},
            "values": list(coeffs.coeffs),
            "error_estimate": None,
            "certified": True,
            "method": "series-log",
            "power_step": coeffs.power_step,
        }
        if z_re is not None:
            ev = sr.exp_b_eval(fam, complex(z_re, z_im), n_coeffs, qp, r=r)
            payload["inputs"]["z_re"], payload["inputs"]["z_im"] = z_re, z_im
            payload["value"] = ev.value
            payload["error_estimate"] = ev.last_term
            payload["certified"] = ev.certified
        _emit(payload, fmt, output)

    _run(body)


@main.command("zeros")
@click.option("--family", type=click.Choice(list(_FAMILIES)), default="exp", show_default=True)
@click.option("--r", type=int, default=0)
@click.option("--window", nargs=2, type=float, default=None, help="real-axis window x_min x_max")
@click.option("--count", type=int, default=None, help="enumerate this many zeros by modulus")
@click.option("--plane", type=click.Choice(["real", "complex", "all"]), default="all", show_default=True)
@click.option("--max-count", type=int, default=None)
@_with_common
def cmd_zeros(family, r, window, count, plane, max_count, q, convention, fmt, output):
    """Zeros on a real window, complex pairs, or the modulus-ordered list."""

    def body():
        spec = FunctionSpec(_FAMILIES[family], _qparam(q, convention), r)
        truncated = False
        if plane == "real":
            if window is None:
                raise ValueError("--plane real needs --window")
            scan = zs.find_real_zeros(spec, window[0], window[1], max_count=max_count)
            records, truncated = scan.records, scan.truncated
        elif plane == "complex":
            records = zs.find_complex_zeros(spec, count=count)
        else:
            if count is None:
                raise ValueError("--plane all needs --count")
            records = zs.enumerate_zeros(spec, count)
        _emit(
            {
                "op": "zeros",
                "inputs": {"family": family, "r": r, "q": q, "convention": convention, "plane": plane,
                           "window": list(window) if window else None, "count": count},
                "values": [
                    {"index": rec.index, "location": rec.location, "kind": rec.kind.value,
                     "residual": rec.residual, "certified": rec.certified}
                    for rec in records
                ],
                "error_estimate": None,
                "certified": all(rec.certified for rec in records),
                "method": "scan+newton" if plane == "real" else "winding+newton",
                "truncated": truncated,
            },
            fmt,
            output,
        )

    _run(body)


@main.command("turning")
@click.option("--family", type=click.Choice(list(_FAMILIES)), default="exp", show_default=True)
@click.option("--r", type=int, default=0)
@click.option("--window", nargs=2, type=float, default=None)
@click.option("--count", type=int, default=None)
@_with_common
def cmd_turning(family, r, window, count, q, convention, fmt, output):
    """Turning points (zeros of f') with their branch values f(tau)."""

    def body():
        spec = FunctionSpec(_FAMILIES[family], _qparam(q, convention), r)
        if window is not None:
            records = zs.find_turning_points(spec, x_min=window[0], x_max=window[1], count=count)
        else:
            records = zs.find_turning_points(spec, count=count)
        _emit(
            {
                "op": "turning",
                "inputs": {"family": family, "r": r, "q": q, "convention": convention,
                           "window": list(window) if window else None, "count": count},
                "values": [
                    {"index": rec.index, "location": rec.location, "branch_value": rec.branch_value,
                     "kind": rec.kind.value, "residual": rec.residual, "certified": rec.certified}
                    for rec in records
                ],
                "error_estimate": None,
                "certified": all(rec.certified for rec in records),
                "method": "scan+newton",
            },
            fmt,
            output,
        )

    _run(body)


@main.command("collide")
@click.option("--kind", type=click.Choice(["zero", "turning"]), default="zero", show_default=True)
@click.option("--pair", type=int, default=1, show_default=True)
@click.option("--q-start", type=float, default=0.05, show_default=True, help="deformation from which to track")
@click.option("--convention", type=click.Choice(["symmetric", "jackson"]), default="symmetric", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def cmd_collide(kind, pair, q_start, convention, fmt, output):
    """Deformation value at which a pair of real roots merges."""

    def body():
        spec = FunctionSpec(Family.EXP, _qparam(max(q_start, 1.5) if convention == "jackson" else q_start, convention))
        res = zs.collision_point(spec, kind=kind, pair_index=pair, q_lo=q_start)
        payload = {
            "op": "collide",
            "inputs": {"kind": kind, "pair": pair, "q_start": q_start, "convention": convention},
            "value": None if res is None else {"q_star": res.q_star, "location": res.location,
                                               "bracket_width": res.bracket_width},
            "error_estimate": None if res is None else res.bracket_width,
            "certified": res is not None,
            "method": "bisection+newton",
        }
        if res is None:
            payload["note"] = "no collision: the pair stays real over the probed range"
        _emit(payload, fmt, output)

    _run(body)


@main.command("continue")
@click.option("--q-from", type=float, required=True)
@click.option("--q-to", type=float, required=True)
@click.option("--steps", type=int, default=25, show_default=True)
@click.option("--track", type=int, default=2, show_default=True, help="how many leading zeros to track")
@click.option("--window", nargs=2, type=float, default=(-40.0, -1e-3), show_default=True)
@click.option("--convention", type=click.Choice(["symmetric", "jackson"]), default="symmetric", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
def cmd_continue(q_from, q_to, steps, track, window, convention, fmt, output):
    """Track zero trajectories in q (predictor-corrector with collision notes)."""

    def body():
        spec = FunctionSpec(Family.EXP, _qparam(q_from, convention))
        scan = zs.find_real_zeros(spec, window[0], window[1], max_count=track)
        traj = zs.continue_in_q(spec, q_from, q_to, steps, scan.records[:track])
        _emit(
            {
                "op": "continue",
                "inputs": {"q_from": q_from, "q_to": q_to, "steps": steps, "track": track, "convention": convention},
                "values": [
                    {"q": p.q, "locations": list(p.locations), "kinds": [k.value for k in p.kinds],
                     "annotation": p.annotation}
                    for p in traj.points
                ],
                "error_estimate": None,
                "certified": not traj.truncated,
                "method": "predictor-corrector",
                "annotations": traj.annotations,
                "truncated": traj.truncated,
            },
            fmt,
            output,
        )

    _run(body)


@main.command("contour")
@click.option("--family", type=click.Choice(list(_FAMILIES)), default="exp", show_default=True)
@click.option("--r", type=int, default=0)
@click.option("--field", type=click.Choice(["re", "im"]), required=True)
@click.option("--window", nargs=4, type=float, required=True, help="x0 x1 y0 y1")
@click.option("--grid-n", type=int, default=64, show_default=True)
@_with_common
def cmd_contour(family, r, field, window, grid_n, q, convention, fmt, output):
    """Zero contours of Re f or Im f, with w-plane images (CSV: x,y,u,v)."""

    def body():
        spec = FunctionSpec(_FAMILIES[family], _qparam(q, convention), r)
        cs = zs.extract_contours(spec, tuple(window), grid_n, field)
        if fmt == "csv":
            blocks = ["x,y,u,v"]
            for line, w in zip(cs.polylines, cs.w_images):
                rows = [
                    ",".join(format(v, f".{CSV_DIGITS}g") for v in (x, y, u, vv))
                    for (x, y), (u, vv) in zip(line, w)
                ]
                blocks.append("\n".join(rows))
            _write_output("\n\n".join(blocks) + "\n", output)
            return
        _emit(
            {
                "op": "contour",
                "inputs": {"family": family, "r": r, "q": q, "convention": convention, "field": field,
                           "window": list(window), "grid_n": grid_n},
                "values": [
                    {"z": [[float(x), float(y)] for x, y in line],
                     "w": [[float(u), float(v)] for u, v in w]}
                    for line, w in zip(cs.polylines, cs.w_images)
                ],
                "error_estimate": None,
                "certified": True,
                "method": "marching-squares",
            },
            fmt,
            output,
        )

    _run(body)


@main.command("bernoulli")
@click.option("--n", type=int, required=True)
@click.option("--variant", type=click.Choice(["plain", "tilde"]), default="plain", show_default=True)
@_with_common
def cmd_bernoulli(n, variant, q, convention, fmt, output):
    """Deformed Bernoulli number from the trigonometric sum rules."""

    def body():
        value = sr.q_bernoulli(n, _qparam(q, convention), variant)
        _emit(
            {
                "op": "bernoulli",
                "inputs": {"n": n, "variant": variant, "q": q, "convention": convention},
                "value": value,
                "error_estimate": None,
                "certified": True,
                "method": "series-log",
            },
            fmt,
            output,
        )

    _run(body)


@main.command("zeta")
@click.option("--p", type=float, required=True)
@click.option("--variant", type=click.Choice(["plain", "tilde"]), default="plain", show_default=True)
@click.option("--zero-count", type=int, default=24, show_default=True)
@_with_common
def cmd_zeta(p, variant, zero_count, q, convention, fmt, output):
    """Normalised deformed zeta value with a reported tail estimate."""

    def body():
        tv = sr.q_zeta(p, _qparam(q, convention), variant, zero_count=zero_count)
        _emit(
            {
                "op": "zeta",
                "inputs": {"p": p, "variant": variant, "zero_count": zero_count, "q": q, "convention": convention},
                "value": tv.value,
                "error_estimate": tv.tail_estimate,
                "certified": True,
                "method": "zero-partial-sum",
            },
            fmt,
            output,
        )

    _run(body)


@main.command("dilog")
@click.option("--z-re", type=float, required=True)
@click.option("--z-im", type=float, default=0.0, show_default=True)
@click.option("--n-terms", type=int, default=200, show_default=True)
@_with_common
def cmd_dilog(z_re, z_im, n_terms, q, convention, fmt, output):
    """Deformed dilogarithm (Jackson convention, 0 < q < 1)."""

    def body():
        ev = sr.q_dilog(complex(z_re, z_im), _qparam(q, convention), n_terms)
        _emit(
            {
                "op": "dilog",
                "inputs": {"z_re": z_re, "z_im": z_im, "n_terms": n_terms, "q": q, "convention": convention},
                "value": ev.value,
                "error_estimate": ev.last_term,
                "certified": ev.certified,
                "method": "series",
            },
            fmt,
            output,
        )

    _run(body)


@main.command("verify")
@click.option("--suite", type=click.Choice(["paper-fixtures"]), default="paper-fixtures", show_default=True)
def cmd_verify(suite):
    """Run the built-in fixture suite; non-zero exit if any row fails."""
    try:
        rows = verification.paper_fixture_rows()
    except Exception as exc:  # a crash in any check is an internal failure
        click.echo(f"failure: {exc}", err=True)
        sys.exit(1)
    click.echo(verification.format_rows(rows))
    if not all(r.ok for r in rows):
        sys.exit(1)


if __name__ == "__main__":
    main()
