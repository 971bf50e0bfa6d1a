import io
import math

import numpy as np
import pytest

from shockrefl.errors import DetachmentError, SubsonicUpstreamError
from shockrefl.gas import GasConstants, make_state
from shockrefl.polar import (
    CSV_COLUMNS,
    build_polar,
    critical_angle,
    polar_to_csv,
    solve_for_turn,
    sonic_angle,
)

from oracles import (
    dense_polar_scan,
    scan_solve_for_turn,
    scan_tau_sonic,
    scan_tau_star,
)

K = GasConstants(gamma=1.4, rho0=1.0, c0=1.0)


def polar_m3():
    return build_polar(make_state(1.0, 1.0, (3.0, 0.0)), K)


class TestBuildPolar:
    def test_subsonic_rejected(self):
        with pytest.raises(SubsonicUpstreamError):
            build_polar(make_state(1.0, 1.0, (0.9, 0.0)), K)

    def test_endpoints_close_at_upstream(self):
        p = polar_m3()
        # beta = +-beta_max are degenerate: v_d = v_u
        assert p.vdx[0] == pytest.approx(3.0, abs=1e-9)
        assert abs(p.vdy[0]) < 1e-9
        assert p.vdx[-1] == pytest.approx(3.0, abs=1e-9)
        assert p.tau[0] == pytest.approx(0.0, abs=1e-9)

    def test_normal_shock_is_sampled(self):
        p = polar_m3()
        j = int(np.argmin(np.abs(p.beta)))
        assert p.beta[j] == 0.0
        assert p.tau[j] == 0.0
        assert p.vdy[j] == 0.0

    def test_mirror_symmetry(self):
        p = polar_m3()
        assert np.allclose(p.tau, -p.tau[::-1], atol=1e-12)
        assert np.allclose(p.vdx, p.vdx[::-1], atol=1e-12)
        assert np.allclose(p.vdy, -p.vdy[::-1], atol=1e-12)

    def test_loop_is_strictly_convex(self):
        for m in (1.2, 2.0, 3.0, 5.0):
            for g in (1.2, 1.4, 5.0 / 3.0):
                p = build_polar(make_state(1.0, 1.0, (m, 0.0)),
                                GasConstants(gamma=g))
                assert p.is_strictly_convex(), (m, g)

    def test_downstream_slower_than_upstream(self):
        p = polar_m3()
        speed = np.hypot(p.vdx, p.vdy)
        interior = np.abs(np.abs(p.beta) - p.beta_max) > 1e-9
        assert np.all(speed[interior] < 3.0)


class TestCriticalAngle:
    def test_frozen_m3(self):
        p = polar_m3()
        assert p.tau_star == pytest.approx(0.998594731012757, abs=1e-10)
        assert abs(p.beta_star) == pytest.approx(0.2508636253205886, abs=1e-6)

    @pytest.mark.parametrize("m", [1.2, 2.0, 3.0, 5.0])
    @pytest.mark.parametrize("g", [1.2, 1.4, 5.0 / 3.0])
    def test_matches_dense_scan(self, m, g):
        p = build_polar(make_state(1.0, 1.0, (m, 0.0)), GasConstants(gamma=g))
        ts, _ = scan_tau_star(dense_polar_scan(m, g, n=200001))
        assert p.tau_star == pytest.approx(ts, abs=1e-7)

    def test_vanishes_in_sonic_limit(self):
        # tau_star -> 0 monotonically as M_u -> 1+
        prev = None
        for m in (1.3, 1.2, 1.1, 1.05, 1.02, 1.01):
            p = build_polar(make_state(1.0, 1.0, (m, 0.0)), K)
            if prev is not None:
                assert p.tau_star < prev
            prev = p.tau_star
        assert prev < 2e-3

    def test_critical_point_inside_loop(self):
        p = polar_m3()
        assert 0.0 < p.beta_star < p.beta_max


class TestSonicAngle:
    def test_frozen_m3(self):
        p = polar_m3()
        assert p.tau_sonic == pytest.approx(0.842865666723698, abs=1e-10)
        assert p.beta_sonic == pytest.approx(0.5217403871561521, abs=1e-9)

    @pytest.mark.parametrize("m", [1.5, 2.0, 3.0, 5.0])
    def test_matches_dense_scan(self, m):
        p = build_polar(make_state(1.0, 1.0, (m, 0.0)), K)
        ts, _ = scan_tau_sonic(dense_polar_scan(m, 1.4, n=400001))
        assert p.tau_sonic == pytest.approx(ts, abs=1e-6)

    def test_ordering(self):
        for m in (1.3, 2.0, 3.0, 5.0):
            p = build_polar(make_state(1.0, 1.0, (m, 0.0)), K)
            assert 0.0 < p.tau_sonic < p.tau_star
            assert p.beta_star < p.beta_sonic < p.beta_max

    def test_sonic_point_is_sonic(self):
        p = polar_m3()
        assert p.m_d_of_beta(p.beta_sonic) == pytest.approx(1.0, abs=1e-10)


class TestSolveForTurn:
    def test_frozen_m3_minus15deg(self):
        p = polar_m3()
        weak, strong = solve_for_turn(p, math.radians(-15.0))
        assert weak.beta == pytest.approx(1.0436768031454473, abs=1e-9)
        assert strong.beta == pytest.approx(0.022502979104041292, abs=1e-9)

    def test_turn_angle_attained_both_branches(self):
        p = polar_m3()
        for tau in (-0.9, -0.5, -0.1, 0.1, 0.5, 0.9):
            weak, strong = solve_for_turn(p, tau)
            for sol in (weak, strong):
                v = sol.downstream.v
                assert math.atan2(v[1], v[0]) == pytest.approx(tau, abs=1e-10)

    def test_branch_ordering(self):
        p = polar_m3()
        weak, strong = solve_for_turn(p, -0.3)
        assert strong.downstream.speed < weak.downstream.speed
        assert abs(strong.beta) < abs(weak.beta)
        assert strong.downstream.mach < 1.0

    def test_sign_convention(self):
        p = polar_m3()
        weak, strong = solve_for_turn(p, 0.4)
        # tau > 0 requires beta < 0
        assert weak.beta < 0.0 and strong.beta < 0.0

    def test_tau_zero(self):
        p = polar_m3()
        weak, strong = solve_for_turn(p, 0.0)
        assert weak.is_degenerate
        assert strong.beta == 0.0
        assert abs(strong.downstream.v[1]) < 1e-12

    def test_detachment(self):
        p = polar_m3()
        with pytest.raises(DetachmentError):
            solve_for_turn(p, p.tau_star + 1e-6)

    def test_critical_returns_twice(self):
        p = polar_m3()
        weak, strong = solve_for_turn(p, -p.tau_star)
        assert weak.beta == strong.beta

    def test_source_frame_restored(self):
        a = 0.8
        up = make_state(1.0, 1.0, (3.0 * math.cos(a), 3.0 * math.sin(a)))
        p = build_polar(up, K)
        weak, _ = solve_for_turn(p, -0.3)
        v = weak.downstream.v
        turn = math.atan2(v[1], v[0]) - a
        assert turn == pytest.approx(-0.3, abs=1e-10)

    def test_oracle_equivalence_random(self):
        # package betas vs dense-scan interpolation on random instances
        rng = np.random.default_rng(5)
        for _ in range(12):
            m = float(rng.uniform(1.3, 5.0))
            g = float(rng.choice([1.2, 1.4, 5.0 / 3.0]))
            k = GasConstants(gamma=g)
            p = build_polar(make_state(1.0, 1.0, (m, 0.0)), k)
            scan = dense_polar_scan(m, g, n=200001)
            tau = -float(rng.uniform(0.05, 0.95)) * p.tau_star
            weak, strong = solve_for_turn(p, tau)
            bw, bs = scan_solve_for_turn(scan, tau)
            assert weak.beta == pytest.approx(bw, abs=1e-6)
            assert strong.beta == pytest.approx(bs, abs=1e-6)


class TestCsv:
    def test_header_and_shape(self):
        p = polar_m3()
        buf = io.StringIO()
        polar_to_csv(p, buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + len(p.beta)

    def test_round_trip_precision(self):
        p = polar_m3()
        buf = io.StringIO()
        polar_to_csv(p, buf)
        buf.seek(0)
        data = np.genfromtxt(buf, delimiter=",", skip_header=1)
        assert np.array_equal(data[:, 0], p.beta)
        assert np.array_equal(data[:, 6], p.tau)

    def test_deterministic(self):
        a, b = io.StringIO(), io.StringIO()
        polar_to_csv(polar_m3(), a)
        polar_to_csv(polar_m3(), b)
        assert a.getvalue() == b.getvalue()
