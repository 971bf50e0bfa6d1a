"""Local regular-reflection construction and transition-criterion predictions.

Canonical (corner) frame: the wall-wall corner sits at the origin of the
similarity plane, the reflection wall runs along the positive x-axis, and the
opposite wall along the ray at angle omega = pi - theta.  The incident shock
line lies at angle phi = pi - (theta + alpha) to the reflection wall and meets
it at the reflection point xi_R = (xi_r, 0).

In the steady frame of the reflection point the upstream (sector-1) flow runs
along the reflection wall towards the corner with Mach number M1; M1 is
*defined* as that steady-frame Mach number.  The sector-2 state follows from
the incident oblique shock, and xi_r itself is fixed by the sector-2 slip
condition on the opposite wall (v_2 parallel to the opposite wall, both walls
passing through the corner).
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GeometryError, NoShockError, RootNotFoundError
from .gas import FluidState, GasConstants, make_state, state_from_rho
from .numerics import brent
from .polar import build_polar, solve_for_turn
from .shock import ShockSolution, normal_shock, oblique_shock

CRITERIA = ("detachment", "sonic", "angle_condition_new")

_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class ReflectionConfig:
    """Parameter triple (M1, alpha, theta) plus gas constants and sector-1 state.

    Angles in radians: alpha is the counterclockwise angle from the incident
    shock to the opposite wall, the walls enclose a corner angle pi - theta.
    """

    m1: float
    alpha: float
    theta: float
    k: GasConstants = field(default_factory=GasConstants)
    rho1: Optional[float] = None
    c1: Optional[float] = None

    def __post_init__(self):
        if not self.m1 > 1.0:
            raise GeometryError(f"M1 must be > 1, got {self.m1}")
        object.__setattr__(self, "rho1", self.rho1 if self.rho1 is not None else self.k.rho0)
        object.__setattr__(self, "c1", self.c1 if self.c1 is not None else self.k.c0)

    @property
    def omega(self):
        """Opposite-wall angle above the reflection wall."""
        return math.pi - self.theta

    @property
    def phi_inc(self):
        """Incident-shock line angle above the reflection wall."""
        return math.pi - (self.theta + self.alpha)


@dataclass(eq=False)
class Geometry:
    """Corner-frame geometry bundle; frame_velocity is the shift applied to
    corner-frame quantities (zero for the canonical frame itself)."""

    corner: np.ndarray
    wall_reflection_dir: np.ndarray
    wall_opposite_dir: np.ndarray
    omega: float
    phi_inc: float
    shock_dir: np.ndarray
    shock_normal: np.ndarray
    sigma_inc: float              # incident shock speed xi . n
    xi_r: np.ndarray
    v1: np.ndarray                # sector velocities, this frame
    v2: np.ndarray
    frame_velocity: np.ndarray

    def shifted(self, w):
        """Same geometry seen from a frame moving with velocity w."""
        w = np.asarray(w, dtype=float)
        return Geometry(
            corner=self.corner - w,
            wall_reflection_dir=self.wall_reflection_dir,
            wall_opposite_dir=self.wall_opposite_dir,
            omega=self.omega,
            phi_inc=self.phi_inc,
            shock_dir=self.shock_dir,
            shock_normal=self.shock_normal,
            sigma_inc=self.sigma_inc - float(w @ self.shock_normal),
            xi_r=self.xi_r - w,
            v1=self.v1 - w,
            v2=self.v2 - w,
            frame_velocity=self.frame_velocity + w,
        )


@dataclass(eq=False)
class LocalRR:
    """Full reflection-point construction with classification flags.

    Sector velocities are stored in the corner frame; the incident and
    reflected ShockSolutions live in the steady frame of the reflection point
    (velocities v - xi_R).
    """

    config: ReflectionConfig
    geometry: Geometry
    sector1: FluidState
    sector2: FluidState
    xi_r: np.ndarray
    incident: ShockSolution
    m2: float
    tau_required: float
    tau_star: float
    exists: bool
    weak: Optional[ShockSolution] = None
    strong: Optional[ShockSolution] = None
    sector3_weak: Optional[FluidState] = None
    sector3_strong: Optional[FluidState] = None
    m3_weak: float = float("nan")
    m3_strong: float = float("nan")
    psi_weak: float = float("nan")     # reflected-shock tangent angles, corner frame
    psi_strong: float = float("nan")
    angle_downstream: float = float("nan")  # strong tangent vs opposite wall
    weak_transonic: bool = False
    angle_condition_ok: bool = False


def _incident_steady(cfg):
    """Incident oblique shock in the reflection-point steady frame.

    Returns (solution, u2) where u2 is the sector-2 steady-frame velocity.
    """
    phi = cfg.phi_inc
    if not 0.0 < phi < math.pi:
        raise GeometryError(
            f"incident shock angle phi={phi} outside (0, pi); theta+alpha out of range")
    speed = cfg.m1 * cfg.c1
    vn_u = speed * math.sin(phi)
    if vn_u <= cfg.c1:
        raise NoShockError(
            f"incident shock inadmissible: M1 sin(phi) = {vn_u / cfg.c1} <= 1")
    u1 = np.array([-speed, 0.0])
    upstream = make_state(cfg.rho1, cfg.c1, u1)
    # beta measured from u1 (pointing along -x) to the downstream normal
    beta = math.atan2(math.cos(phi), -math.sin(phi)) - math.pi
    sol = oblique_shock(upstream, beta, cfg.k)
    return sol, sol.downstream.v


def canonical_geometry(cfg):
    """Corner-frame geometry: walls, incident-shock line, reflection point.

    The reflection point abscissa is fixed by requiring the sector-2 velocity
    to be parallel to the opposite wall (slip on a wall through the corner).
    """
    omega = cfg.omega
    if not 0.0 < omega < math.pi:
        raise GeometryError(f"opposite wall angle omega={omega} outside (0, pi)")
    sol, u2 = _incident_steady(cfg)
    phi = cfg.phi_inc
    tan_omega = math.tan(omega)
    if abs(tan_omega) < 1e-14:
        raise GeometryError("walls are parallel")
    xi_r_abs = u2[1] / tan_omega - u2[0]
    if not xi_r_abs > 0.0:
        raise GeometryError(
            f"reflection point xi_r={xi_r_abs} not on the positive wall ray")
    xi_r = np.array([xi_r_abs, 0.0])
    shock_dir = np.array([math.cos(phi), math.sin(phi)])
    shock_normal = np.array([-math.sin(phi), math.cos(phi)])
    v1 = sol.upstream.v + xi_r
    v2 = u2 + xi_r
    return Geometry(
        corner=np.zeros(2),
        wall_reflection_dir=np.array([1.0, 0.0]),
        wall_opposite_dir=np.array([math.cos(omega), math.sin(omega)]),
        omega=omega,
        phi_inc=phi,
        shock_dir=shock_dir,
        shock_normal=shock_normal,
        sigma_inc=float(xi_r @ shock_normal),
        xi_r=xi_r,
        v1=v1,
        v2=v2,
        frame_velocity=np.zeros(2),
    )


def _tangent_angle(sol):
    """Angle in (0, pi) of the shock-line tangent pointing away from the wall."""
    d = sol.t
    if d[1] < 0.0:
        d = -d
    ang = math.atan2(d[1], d[0])
    if ang <= 0.0:
        ang += math.pi
    return ang


def local_rr(cfg, n_samples=512):
    """Construct the local regular reflection for a parameter triple.

    Non-existence (required turn beyond the critical angle of the reflected
    polar) is reported through the `exists` flag, not an exception, so that
    parameter sweeps stay total.
    """
    geo = canonical_geometry(cfg)
    incident, u2 = _incident_steady(cfg)
    s2 = incident.downstream
    m2 = s2.mach

    if m2 <= 1.0:
        raise NoShockError(f"sector-2 state subsonic (M2={m2}): no reflected polar")

    # turn required to bring u2 parallel to the reflection wall, flow towards
    # the corner: target direction (-1, 0)
    tau_required = _signed_angle(u2, np.array([-1.0, 0.0]))
    rpolar = build_polar(s2, cfg.k, n_samples=n_samples)
    tau_star = rpolar.tau_star

    rr = LocalRR(
        config=cfg, geometry=geo,
        sector1=make_state(cfg.rho1, cfg.c1, incident.upstream.v + geo.xi_r),
        sector2=make_state(s2.rho, s2.c, geo.v2),
        xi_r=geo.xi_r, incident=incident, m2=m2,
        tau_required=tau_required, tau_star=tau_star,
        exists=abs(tau_required) <= tau_star,
    )
    if not rr.exists:
        return rr

    weak, strong = solve_for_turn(rpolar, tau_required)
    rr.weak, rr.strong = weak, strong
    rr.sector3_weak = make_state(weak.downstream.rho, weak.downstream.c,
                                 weak.downstream.v + geo.xi_r)
    rr.sector3_strong = make_state(strong.downstream.rho, strong.downstream.c,
                                   strong.downstream.v + geo.xi_r)
    rr.m3_weak = weak.downstream.mach
    rr.m3_strong = strong.downstream.mach
    rr.psi_weak = _tangent_angle(weak)
    rr.psi_strong = _tangent_angle(strong)
    rr.angle_downstream = rr.psi_strong - geo.omega
    rr.weak_transonic = rr.m3_weak < 1.0
    rr.angle_condition_ok = rr.angle_downstream <= 0.5 * math.pi + _ANGLE_TOL
    return rr


def _signed_angle(a, b):
    """Counterclockwise angle from vector a to vector b, in (-pi, pi]."""
    return math.atan2(a[0] * b[1] - a[1] * b[0], float(a @ b))


def angle_condition(rr, geometry=None):
    """True iff the strong-type reflected-shock tangent meets the opposite wall
    at a downstream-side angle <= 90 degrees (exactly 90 counts as true)."""
    if not rr.exists:
        raise GeometryError("angle_condition requires an existing local RR")
    geo = geometry if geometry is not None else rr.geometry
    return (rr.psi_strong - geo.omega) <= 0.5 * math.pi + _ANGLE_TOL


def _trivial_theta(m1, alpha, k, branch, xtol=1e-8, n_scan=256):
    """theta at which the chosen reflected branch is perpendicular to the
    opposite wall (perpendicularity residual root in theta)."""

    def residual(theta):
        cfg = ReflectionConfig(m1=m1, alpha=alpha, theta=theta, k=k)
        rr = local_rr(cfg, n_samples=128)
        if not rr.exists:
            return None
        psi = rr.psi_weak if branch == "weak" else rr.psi_strong
        return psi - rr.geometry.omega - 0.5 * math.pi

    # scan the admissible theta band: phi = pi - theta - alpha needs
    # M1 sin(phi) > 1 and omega = pi - theta in (0, pi)
    phi_min = math.asin(1.0 / m1)
    t_lo = max(1e-6, math.pi - alpha - (math.pi - phi_min) + 1e-6)
    t_hi = min(math.pi - 1e-6, math.pi - alpha - phi_min - 1e-6)
    if not t_lo < t_hi:
        raise RootNotFoundError("no admissible theta interval for these parameters")
    thetas = np.linspace(t_lo, t_hi, n_scan)
    prev_t = prev_r = None
    for t in thetas:
        try:
            r = residual(t)
        except (GeometryError, NoShockError):
            r = None
        if r is not None and prev_r is not None and r * prev_r <= 0.0:
            def f(theta):
                val = residual(theta)
                if val is None:
                    raise RootNotFoundError(
                        f"{branch}-trivial residual undefined at theta={theta}")
                return val
            return brent(f, prev_t, t, xtol=xtol)
        if r is not None:
            prev_t, prev_r = t, r
        else:
            prev_t = prev_r = None
    raise RootNotFoundError(
        f"no {branch}-trivial perpendicularity root for M1={m1}, alpha={alpha}")


def trivial_strong_theta(m1, alpha, k, xtol=1e-8):
    """The unique theta making the strong reflected shock perpendicular to the
    opposite wall (trivial strong-type RR)."""
    return _trivial_theta(m1, alpha, k, "strong", xtol=xtol)


def trivial_weak_theta(m1, alpha, k, xtol=1e-8):
    return _trivial_theta(m1, alpha, k, "weak", xtol=xtol)


def vertical_shock_downstream(rr, xi_x):
    """Downstream velocity of the straight vertical shock at abscissa xi_x.

    Works in the corner frame rotated and oriented so that the opposite wall
    lies along the positive x-axis with the sector-2 flow running in +x
    ("vertical" = perpendicular to the opposite wall); xi_x is the abscissa in
    that frame.  Returns the downstream velocity in the same frame.
    """
    if not rr.exists:
        raise GeometryError("vertical_shock_downstream requires an existing local RR")
    geo = rr.geometry
    v2, c2, rho2 = rr.sector2.v, rr.sector2.c, rr.sector2.rho
    d = geo.wall_opposite_dir
    if float(v2 @ d) < 0.0:
        d = -d                       # orient the wall axis along the flow
    ex = d
    ey = np.array([-d[1], d[0]])

    def to_frame(vec):
        return np.array([float(vec @ ex), float(vec @ ey)])

    v2f = to_frame(v2)
    u_x = v2f[0] - xi_x              # steady-frame normal speed at the line
    if abs(u_x) <= c2:
        raise NoShockError(
            f"vertical line at xi_x={xi_x} inadmissible: |u_n|={abs(u_x)} <= c2={c2}")
    zn_u = abs(u_x)
    zn_d, _, _ = normal_shock(zn_u, rho2, c2, rr.config.k)
    sgn = 1.0 if u_x > 0.0 else -1.0
    return np.array([v2f[0] - sgn * (zn_u - zn_d), v2f[1]])


def reflection_point_abscissa(rr):
    """xi_R abscissa in the frame used by vertical_shock_downstream."""
    geo = rr.geometry
    d = geo.wall_opposite_dir
    if float(rr.sector2.v @ d) < 0.0:
        d = -d
    return float(rr.xi_r @ d)


def predict_transition(rr, criterion):
    """RR/MR prediction of a transition criterion for this local construction."""
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; choose from {CRITERIA}")
    if rr is None or not rr.exists:
        return "MR"
    if criterion == "detachment":
        return "RR"
    if criterion == "sonic":
        return "RR" if rr.m3_weak > 1.0 else "MR"
    return "RR" if rr.angle_condition_ok else "MR"


def rr_to_dict(rr):
    """JSON-serializable report (angles in degrees)."""
    deg = math.degrees

    def vec(v):
        return [float(v[0]), float(v[1])]

    def state(s):
        return None if s is None else {"rho": s.rho, "c": s.c, "v": vec(s.v)}

    out = {
        "m1": rr.config.m1,
        "alpha_deg": deg(rr.config.alpha),
        "theta_deg": deg(rr.config.theta),
        "gamma": rr.config.k.gamma,
        "omega_deg": deg(rr.geometry.omega),
        "phi_inc_deg": deg(rr.geometry.phi_inc),
        "xi_r": vec(rr.xi_r),
        "sector1": state(rr.sector1),
        "sector2": state(rr.sector2),
        "sector3_weak": state(rr.sector3_weak),
        "sector3_strong": state(rr.sector3_strong),
        "m2": rr.m2,
        "tau_required_deg": deg(rr.tau_required),
        "tau_star_deg": deg(rr.tau_star),
        "exists": rr.exists,
        "m3_weak": rr.m3_weak,
        "m3_strong": rr.m3_strong,
        "psi_weak_deg": deg(rr.psi_weak) if not math.isnan(rr.psi_weak) else None,
        "psi_strong_deg": deg(rr.psi_strong) if not math.isnan(rr.psi_strong) else None,
        "angle_downstream_deg": (deg(rr.angle_downstream)
                                 if not math.isnan(rr.angle_downstream) else None),
        "weak_transonic": rr.weak_transonic,
        "angle_condition_ok": rr.angle_condition_ok,
        "predictions": {c: predict_transition(rr, c) for c in CRITERIA},
    }
    return out


def rr_to_json(rr, indent=2):
    return json.dumps(rr_to_dict(rr), indent=indent, sort_keys=True)
