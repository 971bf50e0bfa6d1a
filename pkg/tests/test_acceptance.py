"""End-to-end acceptance suite for the full analysis chain.

Each test is one exit criterion: jump-condition residuals, independent-oracle
equivalence, polar structure, reference angles, the vertical-shock velocity
property, criterion disagreement, transition-map stability under refinement,
and the desk-scale simulation anchors.  Runtime budgets are asserted where a
criterion carries one.
"""

import math
import time

import numpy as np
import pytest

from oracles import dense_polar_scan, scan_solve_for_turn
from shockrefl.gas import GasConstants, make_state
from shockrefl.numerics import brent
from shockrefl.polar import build_polar, solve_for_turn
from shockrefl.reflection import (
    CRITERIA,
    ReflectionConfig,
    local_rr,
    predict_transition,
    reflection_point_abscissa,
    trivial_strong_theta,
    vertical_shock_downstream,
)
from shockrefl.shock import oblique_shock
from shockrefl.sim import SimConfig, front_offsets, run, setup_initial, step
from shockrefl import sim
from shockrefl.transition_map import curve_theta_at, sweep

K14 = GasConstants(gamma=1.4)
GAMMAS = (1.2, 1.4, 5.0 / 3.0)


def pinned_config(theta_deg, m1=3.0, k=K14):
    """Reflection config with theta + alpha held at the trivial angle."""
    th = math.radians(theta_deg)
    return ReflectionConfig(m1=m1, alpha=trivial_strong_theta(m1, 0.0, k) - th,
                            theta=th, k=k)


class TestJumpConditions:
    def test_residual_suite(self):
        t_start = time.monotonic()
        k = K14
        for m_u in (1.1, 1.5, 2.0, 3.0, 5.0):
            upstream = make_state(1.0, 1.0, (m_u, 0.0))
            beta_max = math.acos(1.0 / m_u)
            for beta in np.linspace(-0.999, 0.999, 50) * beta_max:
                sol = oblique_shock(upstream, float(beta), k)
                u, d = sol.upstream, sol.downstream
                vn_u, vn_d = float(u.v @ sol.n), float(d.v @ sol.n)
                # mass flux
                assert u.rho * vn_u == pytest.approx(d.rho * vn_d, rel=1e-10)
                # Bernoulli
                bu = u.c ** 2 + 0.5 * (k.gamma - 1.0) * u.speed ** 2
                bd = d.c ** 2 + 0.5 * (k.gamma - 1.0) * d.speed ** 2
                assert bu == pytest.approx(bd, rel=1e-10)
                # tangential continuity
                assert float((u.v - d.v) @ sol.t) == pytest.approx(
                    0.0, abs=1e-10 * u.speed)
                # admissibility: compression with supersonic-normal upstream
                assert d.rho >= u.rho * (1.0 - 1e-10)
                assert vn_u >= u.c * (1.0 - 1e-10)
                assert vn_d <= d.c * (1.0 + 1e-10)
        assert time.monotonic() - t_start < 5.0


class TestOracleEquivalence:
    def test_turn_solver_matches_dense_scan(self):
        # 105 random (M_u, tau) instances against a million-sample scan,
        # grouped by upstream so the scan cost stays inside the budget
        t_start = time.monotonic()
        rng = np.random.default_rng(42)
        checked = 0
        for _ in range(15):
            m_u = float(rng.uniform(1.2, 5.0))
            gamma = float(rng.choice(GAMMAS))
            k = GasConstants(gamma=gamma)
            polar = build_polar(make_state(1.0, 1.0, (m_u, 0.0)), k)
            scan = dense_polar_scan(m_u, gamma)
            for _ in range(7):
                tau = float(rng.uniform(0.05, 0.95)) * polar.tau_star \
                    * float(rng.choice([-1.0, 1.0]))
                weak, strong = solve_for_turn(polar, tau)
                b_weak, b_strong = scan_solve_for_turn(scan, tau)
                assert weak.beta == pytest.approx(b_weak, abs=1e-6)
                assert strong.beta == pytest.approx(b_strong, abs=1e-6)
                checked += 1
        assert checked >= 100
        assert time.monotonic() - t_start < 60.0


class TestPolarStructure:
    def test_structure_suite(self):
        for m_u in (1.2, 2.0, 3.0, 5.0):
            for gamma in GAMMAS:
                k = GasConstants(gamma=gamma)
                p = build_polar(make_state(1.0, 1.0, (m_u, 0.0)), k)
                assert p.is_strictly_convex(), (m_u, gamma)
                assert np.allclose(p.tau, -p.tau[::-1], atol=1e-12)
                assert np.allclose(p.vdx, p.vdx[::-1], atol=1e-12)
                assert np.allclose(p.vdy, -p.vdy[::-1], atol=1e-12)
                assert 0.0 < p.tau_sonic < p.tau_star < 0.5 * math.pi
                weak, strong = solve_for_turn(p, 0.5 * p.tau_star)
                assert strong.downstream.speed < weak.downstream.speed
                assert strong.downstream.mach < 1.0

    def test_max_turn_vanishes_at_sonic_upstream(self):
        taus = []
        for m_u in (1.001, 1.01, 1.1):
            p = build_polar(make_state(1.0, 1.0, (m_u, 0.0)), K14)
            taus.append(p.tau_star)
        assert 0.0 < taus[0] < taus[1] < taus[2]


class TestReferenceAngles:
    """The perpendicular-reflected-shock angle near incident Mach 3.

    The published reference quotes 142.9 degrees at "M approximately 3" using
    the shock-normal Mach number of the incident front; this code
    parametrizes by the steady upstream Mach number M1 = |v1| / c1.  The two
    conventions differ by a factor sin(phi), so the same physical
    configuration sits at normal Mach 2.0 but steady Mach 3.3175, and the
    steady-Mach value at exactly M1 = 3 lands 0.011 degrees below the quoted
    band.  The band test is kept strict and the audit test pins the physical
    anchor under the normal-Mach convention.
    """

    def test_reference_band_at_steady_mach_3(self):
        t_deg = math.degrees(trivial_strong_theta(3.0, 0.0, K14))
        assert 141.9 <= t_deg <= 143.9, (
            f"steady-Mach-3 value {t_deg:.4f} deg sits below the quoted band; "
            "the quoted 142.9 deg is reproduced under the shock-normal Mach "
            "convention (see the convention audit test)")

    def test_convention_audit_normal_mach_2(self):
        # solve for the steady Mach whose trivial configuration has a
        # shock-normal incident Mach of exactly 2.0
        def normal_mach_resid(m1):
            th = trivial_strong_theta(m1, 0.0, K14)
            return m1 * math.sin(th) - 2.0

        m1_eq = brent(normal_mach_resid, 2.8, 3.6, xtol=1e-10)
        t_deg = math.degrees(trivial_strong_theta(m1_eq, 0.0, K14))
        assert 141.9 <= t_deg <= 143.9
        assert t_deg == pytest.approx(142.9, abs=0.05)
        assert m1_eq == pytest.approx(3.3175, abs=0.01)

    def test_band_attained_on_steady_mach_scan(self):
        # the scan shows where the quoted angle is attained in steady Mach
        vals = {m1: math.degrees(trivial_strong_theta(m1, 0.0, K14))
                for m1 in np.linspace(2.8, 3.2, 9)}
        assert all(141.1 < v < 142.6 for v in vals.values())
        assert vals[2.8] < vals[3.2]    # monotone: 142.9 attained above 3.2
        m1_root = brent(
            lambda m: math.degrees(trivial_strong_theta(m, 0.0, K14)) - 142.9,
            3.2, 3.4, xtol=1e-9)
        assert 3.2 < m1_root < 3.4


class TestVerticalShockProperty:
    def test_positive_and_increasing_rightward(self):
        # on configs where the reflected strong shock leans past perpendicular,
        # vertical shocks at and right of the reflection point push the
        # downstream flow in the positive wall direction, increasingly so
        rng = np.random.default_rng(7)
        done = 0
        while done < 20:
            m1 = float(rng.uniform(2.6, 4.5))
            gamma = float(rng.choice(GAMMAS))
            k = GasConstants(gamma=gamma)
            delta = math.radians(float(rng.uniform(1.0, 6.0)))
            try:
                t = trivial_strong_theta(m1, 0.0, k)
                rr = local_rr(ReflectionConfig(m1=m1, alpha=-delta,
                                               theta=t + delta, k=k))
            except Exception:
                continue
            if not rr.exists or rr.angle_condition_ok:
                continue
            x_r = reflection_point_abscissa(rr)
            v0 = vertical_shock_downstream(rr, x_r)
            assert v0[0] > 0.0, (m1, gamma, delta)
            # admissible lines right of the reflection point
            d = rr.geometry.wall_opposite_dir
            if float(rr.sector2.v @ d) < 0.0:
                d = -d
            x_max = float(rr.sector2.v @ d) - rr.sector2.c
            xs = np.linspace(x_r, x_r + 0.98 * (x_max - x_r), 12)
            vals = [vertical_shock_downstream(rr, float(x))[0] for x in xs]
            assert np.all(np.diff(vals) > 0.0), (m1, gamma, delta)
            done += 1


class TestCriterionDisagreement:
    def test_high_angle_disagreement(self):
        rr = local_rr(pinned_config(147.9))
        assert rr.exists
        assert predict_transition(rr, "detachment") == "RR"
        assert predict_transition(rr, "angle_condition_new") == "MR"

    def test_low_angle_agreement(self):
        rr = local_rr(pinned_config(137.9))
        assert all(predict_transition(rr, c) == "RR" for c in CRITERIA)


class TestTransitionMapStability:
    def test_sweep_budget_and_refinement(self):
        t_start = time.monotonic()
        coarse = sweep(resolution=128)
        assert time.monotonic() - t_start < 300.0
        # layering: nothing exists below the detach curve, detach is lowest
        for i, m1 in enumerate(coarse.m1_grid):
            td = curve_theta_at(coarse, "detach", float(m1), tol=0.0)
            if math.isnan(td):
                continue
            below = coarse.theta_grid < td - 1e-9
            defined = coarse.status[i] != 0
            assert not coarse.exists[i][below & defined].any()
        for m1 in (1.6, 2.0, 3.0, 4.0, 5.0):
            td = curve_theta_at(coarse, "detach", m1)
            for name in ("angle_condition", "strong_trivial", "sonic",
                         "weak_trivial"):
                t = curve_theta_at(coarse, name, m1)
                if not math.isnan(t):
                    assert t >= td - 1e-9

        fine = sweep(resolution=256)
        cell = float(coarse.theta_grid[1] - coarse.theta_grid[0])
        for name in ("detach", "angle_condition", "strong_trivial", "sonic",
                     "weak_trivial"):
            for m1 in np.linspace(1.4, 5.8, 45):
                a = curve_theta_at(coarse, name, float(m1), tol=0.0)
                b = curve_theta_at(fine, name, float(m1), tol=0.0)
                if math.isnan(a) or math.isnan(b):
                    continue
                assert abs(a - b) < cell, (name, m1)


class TestSimulationAnchors:
    def test_high_angle_is_mach_reflection(self):
        t_start = time.monotonic()
        cfg = SimConfig(reflection=pinned_config(147.9), n_a=400, n_b=400)
        _, pat = run(cfg)
        assert pat.classification == "MR"
        assert pat.stem_length > 0.0
        assert time.monotonic() - t_start < 600.0

    def test_low_angle_is_regular_reflection(self):
        t_start = time.monotonic()
        cfg = SimConfig(reflection=pinned_config(137.9), n_a=400, n_b=400)
        _, pat = run(cfg)
        assert pat.classification == "RR"
        assert pat.stem_length == 0.0
        assert time.monotonic() - t_start < 600.0

    def test_classification_stable_under_resolution_and_order(self):
        # halving the 400-cell anchors and toggling the scheme order must not
        # flip the outcome
        for theta_deg, want in ((147.9, "MR"), (137.9, "RR")):
            for second_order in (True, False):
                cfg = SimConfig(reflection=pinned_config(theta_deg),
                                n_a=200, n_b=200, second_order=second_order)
                _, pat = run(cfg)
                assert pat.classification == want, (theta_deg, second_order)


class TestCapturedShockConsistency:
    def test_front_speed_within_two_percent(self):
        r = ReflectionConfig(m1=2.2, alpha=0.0, theta=0.5 * math.pi, k=K14)
        cfg = SimConfig(reflection=r, n_a=400, n_b=16, extent_a=1.25,
                        extent_b=0.05)
        f = setup_initial(cfg)
        for _ in range(100):    # let the captured profile form
            f = step(f, cfg)
        off0 = np.nanmean(front_offsets(f, cfg)[2:-2])
        t0 = f.t
        for _ in range(500):
            f = step(f, cfg)
        off1 = np.nanmean(front_offsets(f, cfg)[2:-2])
        geo, _, _ = sim._exact_states(cfg)
        # offsets are relative to the analytic front line, so any drift is
        # exactly the captured-vs-analytic speed mismatch integrated in time
        drift = abs(off1 - off0) * cfg.h_a
        assert drift < 0.02 * abs(geo.sigma_inc) * (f.t - t0)

    def test_mass_conserved_per_step(self):
        cfg = SimConfig(reflection=pinned_config(147.9), n_a=64, n_b=64)
        f = setup_initial(cfg)
        for _ in range(10):
            f2 = step(f, cfg)
            dm = f2.total_mass() - f.total_mass()
            assert dm == pytest.approx(f2.last_dt * f2.boundary_mass_rate,
                                       rel=1e-12, abs=1e-13)
            f = f2
