"""Shock polar construction and branch analysis.

A polar is built for a canonicalized upstream state v_u = (M_u c_u, 0); the
original upstream direction is remembered so branch solutions can be handed
back in the caller's frame.  With the downstream-normal convention used here,
positive shock angles beta produce negative (clockwise) turn angles tau, and
the polar is mirror-symmetric under beta -> -beta.
"""

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DetachmentError, SubsonicUpstreamError
from .gas import FluidState, GasConstants, make_state
from .numerics import brent, golden_section_max
from .shock import normal_shock, normal_shock_array, oblique_shock

CSV_COLUMNS = ("beta_rad", "vdx", "vdy", "rho_d", "c_d", "M_d", "tau_rad")

# |tau - tau_star| below which a turn request is treated as critical-type
CRITICAL_TOL = 1e-9


@dataclass(eq=False)
class ShockPolar:
    upstream: FluidState            # canonicalized: v = (M_u c_u, 0)
    source_upstream: FluidState     # as handed to build_polar
    k: GasConstants
    m_u: float
    beta_max: float
    beta: np.ndarray
    vdx: np.ndarray
    vdy: np.ndarray
    rho_d: np.ndarray
    c_d: np.ndarray
    m_d: np.ndarray
    tau: np.ndarray
    tau_star: float = field(default=float("nan"))
    beta_star: float = field(default=float("nan"))
    tau_sonic: float = field(default=float("nan"))
    beta_sonic: float = field(default=float("nan"))

    def tau_of_beta(self, b):
        """Signed turn angle for shock angle b (canonical frame, exact solve)."""
        vdx, vdy = self._vd_of_beta(b)
        return math.atan2(vdy, vdx)

    def _vd_of_beta(self, b):
        c_u = self.upstream.c
        speed = self.m_u * c_u
        vn_u = speed * math.cos(b)
        zn_d, _, _ = normal_shock(min(vn_u, speed), self.upstream.rho, c_u, self.k)
        # v_d = v_u - (vn_u - zn_d) n with n = (cos b, sin b)
        s = vn_u - zn_d
        return speed - s * math.cos(b), -s * math.sin(b)

    def m_d_of_beta(self, b):
        c_u = self.upstream.c
        speed = self.m_u * c_u
        vn_u = speed * math.cos(b)
        zn_d, _, c_d = normal_shock(min(vn_u, speed), self.upstream.rho, c_u, self.k)
        vt = -speed * math.sin(b)   # tangential component, t = (-sin b, cos b)
        return math.hypot(zn_d, vt) / c_d

    def chord_cross_products(self):
        """Cross products of successive chords of the sampled curve."""
        dx = np.diff(self.vdx)
        dy = np.diff(self.vdy)
        return dx[:-1] * dy[1:] - dy[:-1] * dx[1:]

    def is_strictly_convex(self):
        cross = self.chord_cross_products()
        return bool(np.all(cross > 0.0) or np.all(cross < 0.0))

    def min_curve_speed(self):
        """Smallest |d v_d / d beta| estimated from the samples."""
        dx = np.diff(self.vdx)
        dy = np.diff(self.vdy)
        db = np.diff(self.beta)
        return float(np.min(np.hypot(dx, dy) / db))


def build_polar(upstream, k, n_samples=512):
    """Sample the shock polar of the given upstream state.

    The beta grid is Chebyshev-clustered towards +-beta_max where the curve's
    curvature concentrates; the count is rounded up to odd so that beta = 0
    (the normal shock) is always a sample.
    """
    m_u = upstream.mach
    if m_u <= 1.0:
        raise SubsonicUpstreamError(f"polar requires M_u > 1, got {m_u}")
    if n_samples < 64:
        raise SubsonicUpstreamError(f"n_samples must be >= 64, got {n_samples}")
    n = int(n_samples) | 1
    c_u = upstream.c
    speed = m_u * c_u
    canonical = make_state(upstream.rho, c_u, (speed, 0.0))
    beta_max = math.acos(1.0 / m_u)

    i = np.arange(n)
    beta = -beta_max * np.cos(math.pi * i / (n - 1))
    beta[(n - 1) // 2] = 0.0    # cos(pi/2) is not exact in floating point
    vn_u = np.minimum(speed * np.cos(beta), speed)
    zn_d, rho_d, c_d = normal_shock_array(vn_u, upstream.rho, c_u, k)
    s = vn_u - zn_d
    vdx = speed - s * np.cos(beta)
    vdy = -s * np.sin(beta)
    vt = -speed * np.sin(beta)
    m_d = np.hypot(zn_d, vt) / c_d
    tau = np.arctan2(vdy, vdx)

    polar = ShockPolar(
        upstream=canonical, source_upstream=upstream, k=k, m_u=m_u,
        beta_max=beta_max, beta=beta, vdx=vdx, vdy=vdy,
        rho_d=rho_d, c_d=c_d, m_d=m_d, tau=tau,
    )
    critical_angle(polar)
    sonic_angle(polar)
    return polar


def critical_angle(polar):
    """Maximum attainable |turn| tau_star, by golden-section bracketed at the grid max."""
    if not math.isnan(polar.tau_star):
        return polar.tau_star
    pos = polar.beta >= 0.0
    betas = polar.beta[pos]
    taus = np.abs(polar.tau[pos])
    j = int(np.argmax(taus))
    lo = betas[max(j - 1, 0)]
    hi = betas[min(j + 1, len(betas) - 1)]
    b_star = golden_section_max(lambda b: abs(polar.tau_of_beta(b)), lo, hi,
                                xtol=1e-12)
    polar.beta_star = b_star
    polar.tau_star = abs(polar.tau_of_beta(b_star))
    return polar.tau_star


def sonic_angle(polar):
    """|turn| at which the weak branch is exactly sonic (M_d = 1)."""
    if not math.isnan(polar.tau_sonic):
        return polar.tau_sonic
    critical_angle(polar)
    # weak branch lives on beta in (beta_star, beta_max); M_d is < 1 at the
    # critical point and -> M_u > 1 at the sonic endpoint
    b = brent(lambda x: polar.m_d_of_beta(x) - 1.0,
              polar.beta_star, polar.beta_max * (1.0 - 1e-12), xtol=1e-12)
    polar.beta_sonic = b
    polar.tau_sonic = abs(polar.tau_of_beta(b))
    return polar.tau_sonic


def solve_for_turn(polar, tau):
    """Weak- and strong-type solutions attaining the signed turn angle tau.

    Solutions are returned in the frame of the original (source) upstream
    state.  |tau| > tau_star raises DetachmentError; within CRITICAL_TOL of
    tau_star the single critical-type solution is returned twice.
    """
    atau = abs(tau)
    ts = critical_angle(polar)
    if atau > ts + CRITICAL_TOL:
        raise DetachmentError(
            f"|tau|={atau} exceeds tau_star={ts}: no attached solution")
    sgn = -1.0 if tau > 0.0 else 1.0   # beta and tau have opposite signs

    if atau >= ts - CRITICAL_TOL:
        sol = oblique_shock(polar.source_upstream, sgn * polar.beta_star, polar.k)
        return sol, sol

    def g(b):
        return abs(polar.tau_of_beta(b)) - atau

    if atau == 0.0:
        b_weak = polar.beta_max
        b_strong = 0.0
    else:
        b_strong = brent(g, 0.0, polar.beta_star, xtol=1e-12)
        b_weak = brent(g, polar.beta_star, polar.beta_max * (1.0 - 1e-13),
                       xtol=1e-12)
    weak = oblique_shock(polar.source_upstream, sgn * b_weak, polar.k)
    strong = oblique_shock(polar.source_upstream, sgn * b_strong, polar.k)
    return weak, strong


def downstream_mach(sol):
    return sol.downstream.mach


def polar_to_csv(polar, destination):
    """Write the sampled curve as CSV (canonical upstream frame)."""
    rows = np.column_stack([polar.beta, polar.vdx, polar.vdy, polar.rho_d,
                            polar.c_d, polar.m_d, polar.tau])
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(f"{x:.17g}" for x in row) + "\n")
    data = buf.getvalue()
    if hasattr(destination, "write"):
        destination.write(data)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(data)
