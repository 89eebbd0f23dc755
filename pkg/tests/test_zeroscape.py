import math

import numpy as np
import pytest

from qlog import zeroscape as zs
from qlog.qnum import Convention, Family, FunctionSpec, QParam, eval_series
from qlog.zeroscape import RootKind

JAC = Convention.JACKSON

SPEC35 = FunctionSpec(Family.EXP, QParam(0.35))
SPEC5 = FunctionSpec(Family.EXP, QParam(0.5))


class TestRealZeros:
    def test_jackson_published_values(self):
        scan = zs.find_real_zeros(FunctionSpec(Family.EXP, QParam(1.09, JAC)), -20.0, -0.5)
        got = [r.location.real for r in scan.records[:4]]
        for g, want in zip(got, (-12.1111, -13.2011, -14.3892, -15.6842)):
            assert g == pytest.approx(want, abs=1e-3)

    @pytest.mark.parametrize("q", [1.09, 1.5, 2.0])
    def test_jackson_exact_law(self, q):
        spec = FunctionSpec(Family.EXP, QParam(q, JAC))
        lo = q**8 / (1.0 - q) * 1.15 - 1.0
        scan = zs.find_real_zeros(spec, lo, -1e-3)
        assert len(scan.records) >= 8
        for i, rec in enumerate(scan.records[:8], start=1):
            assert abs(rec.location.real - q**i / (1.0 - q)) < 1e-10

    def test_symmetric_single_real_zero(self):
        scan = zs.find_real_zeros(SPEC35, -6.0, -0.5)
        assert len(scan.records) == 1
        assert scan.records[0].location.real == pytest.approx(-5.19755, abs=1e-4)

    def test_residual_certificates(self):
        scan = zs.find_real_zeros(SPEC35, -12.0, -0.5)
        for rec in scan.records:
            assert rec.certified
            assert rec.residual < 1e-10 * zs.local_scale(SPEC35, rec.location)

    def test_truncation_flag(self):
        scan = zs.find_real_zeros(FunctionSpec(Family.SIN, QParam(1.0)), 0.5, 20.0, max_count=3)
        assert scan.truncated and len(scan.records) == 3

    def test_near_degenerate_report(self):
        # just past the first collision the pair sits ~0.01 off-axis: the
        # scan cannot bracket it and must say so instead of staying silent
        scan = zs.find_real_zeros(FunctionSpec(Family.EXP, QParam(0.1409)), -4.0, -1.0)
        assert scan.records == []
        assert len(scan.near_degenerate) == 1
        assert scan.near_degenerate[0] == pytest.approx(-2.48, abs=0.05)

    def test_close_pair_still_resolved(self):
        scan = zs.find_real_zeros(FunctionSpec(Family.EXP, QParam(0.1406)), -4.0, -1.0)
        assert len(scan.records) == 2

    def test_bad_window(self):
        with pytest.raises(ValueError):
            zs.find_real_zeros(SPEC5, -1.0, -2.0)


class TestComplexZeros:
    def test_pair_published_q35(self):
        recs = zs.find_complex_zeros(SPEC35, count=1)
        up = recs[0].location
        assert up.real == pytest.approx(-2.8222, abs=1e-3)
        assert up.imag == pytest.approx(1.969, abs=1e-3)
        assert recs[0].kind is RootKind.PAIR_UPPER
        assert recs[1].kind is RootKind.PAIR_LOWER

    def test_published_snapshot_matches_q20(self):
        # the "-2.51 + 0.87i" snapshot lies at deformation 0.20 (its branch
        # values match 0.22, the pair itself matches 0.20)
        up = zs.find_complex_zeros(FunctionSpec(Family.EXP, QParam(0.20)), count=1)[0].location
        assert up.real == pytest.approx(-2.51, abs=2e-2)
        assert up.imag == pytest.approx(0.87, abs=2e-2)

    def test_frozen_q22_pair(self):
        # frozen from two independent routes (double-precision subdivision
        # + Newton, and a 40-digit reference refinement)
        up = zs.find_complex_zeros(FunctionSpec(Family.EXP, QParam(0.22)), count=1)[0].location
        assert up.real == pytest.approx(-2.54697334901, abs=1e-8)
        assert up.imag == pytest.approx(1.01079029724, abs=1e-8)

    def test_schwarz_symmetry_and_residuals(self):
        recs = zs.find_complex_zeros(SPEC5, count=2)
        assert len(recs) == 4
        for up, low in zip(recs[0::2], recs[1::2]):
            assert abs(up.location.imag + low.location.imag) < 1e-10
            assert abs(up.location.real - low.location.real) < 1e-10
        for rec in recs:
            assert rec.certified
            assert abs(complex(eval_series(SPEC5, rec.location, 1e-15).value)) < 1e-10 * zs.local_scale(SPEC5, rec.location)

    def test_seeded_search(self):
        recs = zs.find_complex_zeros(SPEC5, seeds=[-3.0 + 3.0j])
        assert recs[0].location == pytest.approx(-3.094473614200782 + 3.359066783481497j, abs=1e-9)

    def test_diverging_seed_raises(self):
        with pytest.raises(ArithmeticError):
            zs.find_complex_zeros(FunctionSpec(Family.EXP, QParam(1.5, JAC)), seeds=[1e8 + 1e8j])


class TestTurningPoints:
    def test_q22_branch_values(self):
        tps = zs.find_turning_points(FunctionSpec(Family.EXP, QParam(0.22)), x_min=-6.0, x_max=-0.5)
        assert tps[0].branch_value.real == pytest.approx(0.04770, abs=1e-4)
        assert tps[1].branch_value.real == pytest.approx(0.06936, abs=1e-4)
        # frozen locations (dual double/40-digit computation)
        assert tps[0].location.real == pytest.approx(-2.82647007529, abs=1e-6)
        assert tps[1].location.real == pytest.approx(-4.33102606799, abs=1e-6)

    def test_q35_complex_pair_and_branch(self):
        recs = zs.find_turning_points(SPEC35, count=2)
        up = recs[0]
        assert up.location.real == pytest.approx(-3.5434, abs=1e-3)
        assert abs(up.location.imag) == pytest.approx(1.32945, abs=1e-3)
        assert up.branch_value.real == pytest.approx(0.0222415, abs=1e-4)
        assert abs(up.branch_value.imag) == pytest.approx(0.01879, abs=1e-4)

    def test_q35_real_turning_points(self):
        tps = zs.find_turning_points(SPEC35, x_min=-12.0, x_max=-4.0)
        assert tps[0].location.real == pytest.approx(-6.3471, rel=1e-3)
        assert tps[1].location.real == pytest.approx(-10.7028, rel=1e-3)
        assert tps[0].branch_value.real == pytest.approx(-0.00909587, rel=1e-3)
        assert tps[1].branch_value.real == pytest.approx(0.087536, rel=1e-3)

    def test_needs_some_mode(self):
        with pytest.raises(ValueError):
            zs.find_turning_points(SPEC35)


class TestEnumeration:
    def test_first_twenty_q5(self):
        recs = zs.enumerate_zeros(SPEC5, 20)
        assert len(recs) == 20
        moduli = [abs(r.location) for r in recs]
        # non-decreasing up to conjugate-partner rounding ties
        assert all(b >= a * (1 - 1e-12) for a, b in zip(moduli, moduli[1:]))
        assert all(r.certified for r in recs)
        # two conjugate pairs head the list (frozen values), then reals
        assert recs[0].location == pytest.approx(-3.094473614200782 + 3.359066783481497j, abs=1e-8)
        assert recs[2].location == pytest.approx(-6.287603188730038 + 2.1515361918916596j, abs=1e-8)
        assert all(r.kind is RootKind.REAL for r in recs[4:])

    def test_product_form_oracle(self):
        recs = zs.enumerate_zeros(SPEC5, 20)
        z = -1.0
        prod = 1.0 + 0j
        for rec in recs:
            prod *= 1.0 - z / rec.location
        series = eval_series(SPEC5, z).value
        assert abs(prod - series) < 1e-3

    def test_trig_enumeration_classical(self):
        recs = zs.enumerate_zeros(FunctionSpec(Family.SIN, QParam(1.0)), 10)
        for i, rec in enumerate(recs, start=1):
            assert rec.location.real == pytest.approx(i * math.pi, rel=1e-12)
        recs = zs.enumerate_zeros(FunctionSpec(Family.COS, QParam(1.0)), 10)
        for i, rec in enumerate(recs, start=1):
            assert rec.location.real == pytest.approx((i - 0.5) * math.pi, rel=1e-12)


class TestWinding:
    def test_classical_sine_counts(self):
        spec = FunctionSpec(Family.SIN, QParam(1.0))
        for rho, want in ((10.0, 7), (35.5, 23), (100.3, 63)):
            assert zs.winding_number_circle(spec, rho) == want

    def test_box_counts(self):
        assert zs.winding_number(SPEC35, (-6.0, -0.5, -3.0, 3.0)) == 3  # pair + real zero
        assert zs.winding_number(SPEC35, (-4.9, -0.5, -0.5, 0.5)) == 0

    def test_certify_simple(self):
        assert zs.certify_simple(SPEC35, complex(-5.197551087576053))
        assert not zs.certify_simple(SPEC35, complex(-4.0))


class TestCollision:
    def test_zero_pair_value(self):
        col = zs.collision_point(SPEC5, kind="zero", pair_index=1, q_lo=0.08)
        assert col.q_star == pytest.approx(0.14, abs=1e-2)
        assert col.bracket_width <= 1e-4
        assert col.location == pytest.approx(-2.48, abs=0.05)

    def test_turning_pair_value(self):
        col = zs.collision_point(SPEC5, kind="turning", pair_index=1, q_lo=0.12)
        assert col.q_star == pytest.approx(0.25, abs=1e-2)
        assert col.bracket_width <= 1e-4

    def test_jackson_reports_none(self):
        assert zs.collision_point(FunctionSpec(Family.EXP, QParam(2.0, JAC)), kind="zero") is None

    def test_kind_validation(self):
        with pytest.raises(ValueError):
            zs.collision_point(SPEC5, kind="saddle")


class TestContinuation:
    def test_stays_real_below_collision(self):
        spec = FunctionSpec(Family.EXP, QParam(0.10))
        scan = zs.find_real_zeros(spec, -8.0, -0.5)
        traj = zs.continue_in_q(spec, 0.10, 0.13, 10, scan.records[:2])
        assert not traj.truncated and not traj.annotations
        for p in traj.points:
            assert all(k is RootKind.REAL for k in p.kinds)
            assert p.locations[0].real < 0

    def test_collision_annotation_and_symmetry(self):
        spec = FunctionSpec(Family.EXP, QParam(0.10))
        scan = zs.find_real_zeros(spec, -8.0, -0.5)
        traj = zs.continue_in_q(spec, 0.10, 0.20, 25, scan.records[:2])
        assert len(traj.annotations) == 1
        assert "collision" in traj.annotations[0]
        q_at = float(traj.annotations[0].split("(")[-1].split(",")[0])
        assert 0.13 < q_at < 0.16
        end = traj.points[-1]
        assert end.kinds[0] is RootKind.PAIR_UPPER and end.kinds[1] is RootKind.PAIR_LOWER
        for p in traj.points:
            assert abs(p.locations[0].imag + p.locations[1].imag) < 1e-10
        # landing point equals the directly-located pair at q = 0.20
        direct = zs.find_complex_zeros(FunctionSpec(Family.EXP, QParam(0.20)), count=1)[0].location
        assert end.locations[0] == pytest.approx(direct, abs=1e-9)


class TestContours:
    def test_real_axis_appears(self):
        cs = zs.extract_contours(SPEC5, (-6.0, 1.0, -3.0, 3.0), 64, "im")
        axis = [pl for pl in cs.polylines if np.all(np.abs(pl[:, 1]) < 1e-9)]
        assert axis and axis[0].shape[0] == 65

    def test_re_contour_crosses_at_first_cos_zero(self):
        c1 = zs.enumerate_zeros(FunctionSpec(Family.COS, QParam(0.5)), 1)[0].location.real
        cs = zs.extract_contours(SPEC5, (-1.0, 1.0, 0.2, 3.2), 64, "re")
        cell = 2.0 / 64
        best = min(
            abs(y - c1)
            for pl in cs.polylines
            for x, y in pl
            if abs(x) < 2 * cell
        )
        assert best < cell

    def test_vertex_residuals_within_tolerance(self):
        cs = zs.extract_contours(SPEC35, (-4.0, 0.5, -2.5, 2.5), 48, "re")
        assert cs.polylines
        for res, tol in zip(cs.vertex_residuals, cs.vertex_tolerances):
            assert np.all(res <= tol + 1e-300)

    def test_w_images_meet_branch_point(self):
        spec = FunctionSpec(Family.EXP, QParam(0.22))
        tp = zs.find_turning_points(spec, x_min=-6.0, x_max=-0.5)[0]
        tau, b = tp.location.real, tp.branch_value.real
        cs = zs.extract_contours(spec, (tau - 1.2, tau + 1.2, -1.2, 1.2), 96, "im")
        best = min(
            abs(complex(u, v) - b)
            for line, w in zip(cs.polylines, cs.w_images)
            for (x, y), (u, v) in zip(line, w)
            if abs(y) > 1e-9
        )
        assert best < 2e-3

    def test_deterministic(self):
        a = zs.extract_contours(SPEC5, (-4.0, 0.5, -2.0, 2.0), 32, "im")
        b = zs.extract_contours(SPEC5, (-4.0, 0.5, -2.0, 2.0), 32, "im")
        assert len(a.polylines) == len(b.polylines)
        for pa, pb in zip(a.polylines, b.polylines):
            assert np.array_equal(pa, pb)

    def test_validation(self):
        with pytest.raises(ValueError):
            zs.extract_contours(SPEC5, (-1, 1, -1, 1), 8, "im")
        with pytest.raises(ValueError):
            zs.extract_contours(SPEC5, (-1, 1, -1, 1), 32, "abs")
