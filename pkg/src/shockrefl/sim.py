"""Shock-capturing reference solver for the wedge reflection problem.

The wedge between the two walls is mapped to a rectangle by a shear: grid
coordinates (a, b) correspond to physical points x = a e_r + b e_o with
e_r = (1, 0) along the reflection wall and e_o = (cos omega, sin omega) along
the opposite wall, so both walls are grid-aligned and slip is enforced by
exact mirror ghosts.

Unsteady potential flow is marched in physical time as the first-order system

    rho_t + div(rho v) = 0
    v_t + grad(|v|^2 / 2 + pi(rho)) = 0

whose jump conditions are exactly the potential-flow shock conditions (mass
flux continuity, tangential continuity, Bernoulli).  Fluxes are Rusanov with
MUSCL slope reconstruction (MC limiter) and two-stage Heun time stepping; a
first-order toggle is kept for scheme-order sensitivity checks.  The velocity
potential is integrated alongside from the unsteady Bernoulli equation as a
diagnostic field.
"""

import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import FailedStepError, GeometryError
from .gas import GasConstants, pi_of_rho
from .reflection import ReflectionConfig, canonical_geometry, _incident_steady

CLASSIFICATIONS = ("RR", "MR", "undetermined")

FIELD_CSV_COLUMNS = ("x", "y", "xi", "eta", "rho", "vx", "vy", "L",
                     "shock_indicator")

# shock-indicator level treated as a captured front
INDICATOR_THRESHOLD = 0.03


@dataclass(frozen=True)
class SimConfig:
    """Reflection parameters plus grid/time discretization controls."""

    reflection: ReflectionConfig
    n_a: int = 400                 # cells along the reflection wall
    n_b: int = 400                 # cells along the opposite wall
    extent_a: float = 1.25         # sheared-coordinate domain [0, extent]
    extent_b: float = 0.85
    cfl: float = 0.45
    t0: float = 0.2
    t_end: float = 1.0
    second_order: bool = True
    k_stem: int = 4                # stem threshold, cells

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise GeometryError(f"cfl must be in (0, 1), got {self.cfl}")
        if not 0.0 < self.t0 < self.t_end:
            raise GeometryError(
                f"need 0 < t0 < t_end, got t0={self.t0}, t_end={self.t_end}")
        if self.n_a < 16 or self.n_b < 16:
            raise GeometryError("grid must have at least 16 cells per axis")
        if self.extent_a <= 0.0 or self.extent_b <= 0.0:
            raise GeometryError("domain extents must be positive")

    @property
    def h_a(self):
        return self.extent_a / self.n_a

    @property
    def h_b(self):
        return self.extent_b / self.n_b


@dataclass(eq=False)
class SimField:
    """Cell-average state on the sheared grid at one time level.

    Arrays are indexed [i, j] with i along a (reflection wall) and j along b
    (opposite wall).
    """

    t: float
    rho: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    psi: np.ndarray
    omega: float
    h_a: float
    h_b: float
    a_centers: np.ndarray
    b_centers: np.ndarray
    last_dt: float = 0.0
    boundary_mass_rate: float = 0.0   # net mass inflow rate of the last step

    def physical_xy(self):
        a = self.a_centers[:, None]
        b = self.b_centers[None, :]
        x = a + b * math.cos(self.omega)
        y = np.broadcast_to(b * math.sin(self.omega), x.shape)
        return x, y

    def velocity(self):
        return self.vx, self.vy

    def total_mass(self):
        area = self.h_a * self.h_b * math.sin(self.omega)
        return float(np.sum(self.rho)) * area

    def shock_indicator(self):
        """Normalized density-gradient magnitude, grid-scaled."""
        ga, gb = np.gradient(self.rho, self.h_a, self.h_b)
        # gradient in physical coordinates through the inverse shear
        sin_o, cos_o = math.sin(self.omega), math.cos(self.omega)
        gx = ga
        gy = (gb - cos_o * ga) / sin_o
        return np.hypot(gx, gy) * min(self.h_a, self.h_b) / self.rho


@dataclass(eq=False)
class PatternResult:
    classification: str
    junction_xi: np.ndarray        # similarity coordinates of the front junction
    stem_length: float             # similarity units, 0 for RR
    stem_cells: int
    offsets: Optional[np.ndarray] = None   # per-row front offset, cells

    def to_dict(self):
        return {
            "classification": self.classification,
            "junction_xi": [float(self.junction_xi[0]),
                            float(self.junction_xi[1])],
            "stem_length": float(self.stem_length),
            "stem_cells": int(self.stem_cells),
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def _exact_states(cfg):
    """Sector states and incident-shock geometry in the corner frame."""
    rcfg = cfg.reflection
    geo = canonical_geometry(rcfg)
    sol, _ = _incident_steady(rcfg)
    s1 = (rcfg.rho1, rcfg.c1, geo.v1)
    s2 = (sol.downstream.rho, sol.downstream.c, geo.v2)
    return geo, s1, s2


def incident_travel_cells(cfg):
    """Shock-normal grid layers crossed by the incident front during the run."""
    geo, _, _ = _exact_states(cfg)
    travel = abs(geo.sigma_inc) * (cfg.t_end - cfg.t0)
    layer = min(cfg.h_a, cfg.h_b) * math.sin(cfg.reflection.omega)
    return travel / layer


def _paint_two_state(cfg, t, a, b):
    """Exact two-state field at time t on coordinate arrays a, b (broadcast)."""
    geo, (rho1, c1, v1), (rho2, c2, v2) = _exact_states(cfg)
    omega = cfg.reflection.omega
    x = a + b * math.cos(omega)
    y = b * math.sin(omega)
    n = geo.shock_normal
    upstream = x * n[0] + y * n[1] < geo.sigma_inc * t
    rho = np.where(upstream, rho1, rho2)
    vx = np.where(upstream, v1[0], v2[0])
    vy = np.where(upstream, v1[1], v2[1])
    # potential, continuous across the shock line
    jump_n = float((v1 - v2) @ n)
    psi1 = v1[0] * x + v1[1] * y
    psi2 = v2[0] * x + v2[1] * y + jump_n * geo.sigma_inc * t
    psi = np.where(upstream, psi1, psi2)
    return rho, vx, vy, psi


def setup_initial(cfg):
    """Sharp two-state initial data at t0 with the exact shock position."""
    geo, _, _ = _exact_states(cfg)
    # the shock must cross the reflection wall inside the domain
    wall_hit = geo.xi_r[0] * cfg.t0
    if not 0.0 < wall_hit < cfg.extent_a:
        raise GeometryError(
            f"incident shock hits the wall at a={wall_hit}, outside "
            f"[0, {cfg.extent_a}]")
    a = (np.arange(cfg.n_a) + 0.5) * cfg.h_a
    b = (np.arange(cfg.n_b) + 0.5) * cfg.h_b
    rho, vx, vy, psi = _paint_two_state(cfg, cfg.t0, a[:, None], b[None, :])
    return SimField(t=cfg.t0, rho=rho, vx=vx, vy=vy, psi=psi,
                    omega=cfg.reflection.omega, h_a=cfg.h_a, h_b=cfg.h_b,
                    a_centers=a, b_centers=b)


def _sound_speed_sq(rho, k):
    return k.c0 ** 2 * (rho / k.rho0) ** (k.gamma - 1.0)


def _bernoulli(rho, vx, vy, k):
    return 0.5 * (vx * vx + vy * vy) + pi_of_rho(rho, k)


def _mc_slope(um, u0, up):
    """Monotonized-central limited slope from three cell values."""
    dl = u0 - um
    dr = up - u0
    dc = 0.5 * (up - um)
    s = np.sign(dl) + np.sign(dr)
    mag = np.minimum(np.abs(dc), 2.0 * np.minimum(np.abs(dl), np.abs(dr)))
    return 0.5 * s * np.where(dl * dr > 0.0, mag, 0.0)


def _pad_ghosts(cfg, U, t):
    """Pad (3, n_a, n_b) with two ghost layers per side.

    a = 0 and b = 0 walls get mirror (slip) ghosts; the outer a and b edges
    get the exact two-state far field at time t.
    """
    omega = cfg.reflection.omega
    rho, vx, vy = U
    n_a, n_b = rho.shape
    P = np.empty((3, n_a + 4, n_b + 4))
    P[:, 2:-2, 2:-2] = U

    # outer edges: exact Dirichlet states at ghost centers
    a_ghost = (np.array([n_a + 0.5, n_a + 1.5])) * cfg.h_a
    b_all = (np.arange(-2, n_b + 2) + 0.5) * cfg.h_b
    r, u, v, _ = _paint_two_state(cfg, t, a_ghost[:, None], b_all[None, :])
    P[0, -2:, :], P[1, -2:, :], P[2, -2:, :] = r, u, v
    a_all = (np.arange(-2, n_a + 2) + 0.5) * cfg.h_a
    b_ghost = (np.array([n_b + 0.5, n_b + 1.5])) * cfg.h_b
    r, u, v, _ = _paint_two_state(cfg, t, a_all[:, None], b_ghost[None, :])
    P[0, :, -2:], P[1, :, -2:], P[2, :, -2:] = r, u, v

    # reflection wall (b = 0): mirror across y = 0
    P[0, :, 1] = P[0, :, 2]
    P[0, :, 0] = P[0, :, 3]
    P[1, :, 1] = P[1, :, 2]
    P[1, :, 0] = P[1, :, 3]
    P[2, :, 1] = -P[2, :, 2]
    P[2, :, 0] = -P[2, :, 3]

    # opposite wall (a = 0): mirror across the wall line
    nx, ny = math.sin(omega), -math.cos(omega)
    for g, s in ((1, 2), (0, 3)):
        vn = P[1, s, :] * nx + P[2, s, :] * ny
        P[0, g, :] = P[0, s, :]
        P[1, g, :] = P[1, s, :] - 2.0 * vn * nx
        P[2, g, :] = P[2, s, :] - 2.0 * vn * ny
    return P


def _rusanov(UL, UR, n, k):
    """Rusanov flux along unit normal n for stacked states (3, ...)."""
    rL, uL, vL = UL
    rR, uR, vR = UR
    unL = uL * n[0] + vL * n[1]
    unR = uR * n[0] + vR * n[1]
    cL = np.sqrt(_sound_speed_sq(rL, k))
    cR = np.sqrt(_sound_speed_sq(rR, k))
    s = np.maximum(np.abs(unL) + cL, np.abs(unR) + cR)
    BL = _bernoulli(rL, uL, vL, k)
    BR = _bernoulli(rR, uR, vR, k)
    F = np.empty_like(UL)
    F[0] = 0.5 * (rL * unL + rR * unR) - 0.5 * s * (rR - rL)
    F[1] = 0.5 * (BL + BR) * n[0] - 0.5 * s * (uR - uL)
    F[2] = 0.5 * (BL + BR) * n[1] - 0.5 * s * (vR - vL)
    return F


def _rhs(cfg, U, t, k):
    """Finite-volume residual dU/dt and the net boundary mass-inflow rate."""
    omega = cfg.reflection.omega
    sin_o = math.sin(omega)
    P = _pad_ghosts(cfg, U, t)

    if cfg.second_order:
        sa = _mc_slope(P[:, :-2, :], P[:, 1:-1, :], P[:, 2:, :])
        sb = _mc_slope(P[:, :, :-2], P[:, :, 1:-1], P[:, :, 2:])
        # face states for a-faces between cells i and i+1 (padded index space)
        aL = P[:, 1:-2, 2:-2] + 0.5 * sa[:, :-1, 2:-2]
        aR = P[:, 2:-1, 2:-2] - 0.5 * sa[:, 1:, 2:-2]
        bL = P[:, 2:-2, 1:-2] + 0.5 * sb[:, 2:-2, :-1]
        bR = P[:, 2:-2, 2:-1] - 0.5 * sb[:, 2:-2, 1:]
    else:
        aL = P[:, 1:-2, 2:-2]
        aR = P[:, 2:-1, 2:-2]
        bL = P[:, 2:-2, 1:-2]
        bR = P[:, 2:-2, 2:-1]

    n_a_hat = (sin_o, -math.cos(omega))   # unit normal of constant-a faces
    n_b_hat = (0.0, 1.0)
    Fa = _rusanov(aL, aR, n_a_hat, k)     # (3, n_a+1, n_b)
    Fb = _rusanov(bL, bR, n_b_hat, k)     # (3, n_a, n_b+1)

    dUdt = -(Fa[:, 1:, :] - Fa[:, :-1, :]) / (cfg.h_a * sin_o) \
        - (Fb[:, :, 1:] - Fb[:, :, :-1]) / (cfg.h_b * sin_o)

    # net mass inflow rate through the domain boundary (mass per time);
    # a-faces have length h_b, b-faces length h_a
    rate = float((np.sum(Fa[0, 0, :]) - np.sum(Fa[0, -1, :])) * cfg.h_b
                 + (np.sum(Fb[0, :, 0]) - np.sum(Fb[0, :, -1])) * cfg.h_a)
    return dUdt, rate


def stable_dt(cfg, fieldstate):
    """CFL time step from the current maximal directional wave speeds."""
    omega = cfg.reflection.omega
    sin_o = math.sin(omega)
    c = np.sqrt(_sound_speed_sq(fieldstate.rho, cfg.reflection.k))
    na = (sin_o, -math.cos(omega))
    sa = float(np.max(np.abs(fieldstate.vx * na[0] + fieldstate.vy * na[1]) + c))
    sb = float(np.max(np.abs(fieldstate.vy) + c))
    return cfg.cfl * min(cfg.h_a * sin_o / sa, cfg.h_b * sin_o / sb)


def step(fieldstate, cfg, dt=None):
    """One conservative (Heun) update; returns the advanced SimField."""
    k = cfg.reflection.k
    if dt is None:
        dt = stable_dt(cfg, fieldstate)
    dt = min(dt, cfg.t_end - fieldstate.t)
    t = fieldstate.t
    U0 = np.stack([fieldstate.rho, fieldstate.vx, fieldstate.vy])

    L0, r0 = _rhs(cfg, U0, t, k)
    B1 = _bernoulli(U0[0], U0[1], U0[2], k)
    if cfg.second_order:
        U1 = U0 + dt * L0
        if np.min(U1[0]) <= 0.0:
            raise FailedStepError("negative density in predictor stage",
                                  field=fieldstate)
        L1, r1 = _rhs(cfg, U1, t + dt, k)
        Un = U0 + 0.5 * dt * (L0 + L1)
        rate = 0.5 * (r0 + r1)
        B2 = _bernoulli(U1[0], U1[1], U1[2], k)
        psi_dot = _BREF(cfg) - 0.5 * (B1 + B2)
    else:
        Un = U0 + dt * L0
        rate = r0
        psi_dot = _BREF(cfg) - B1
    if np.min(Un[0]) <= 0.0:
        raise FailedStepError("negative density after step", field=fieldstate)

    return replace(
        fieldstate, t=t + dt, rho=Un[0], vx=Un[1], vy=Un[2],
        psi=fieldstate.psi + dt * psi_dot,
        last_dt=dt, boundary_mass_rate=rate,
    )


def _BREF(cfg):
    """Unsteady-Bernoulli constant, fixed by the steady sector-1 potential."""
    _, (rho1, c1, v1), _ = _exact_states(cfg)
    return 0.5 * float(v1 @ v1) + pi_of_rho(rho1, cfg.reflection.k)


def run(cfg, on_step=None):
    """March from t0 to t_end and classify the final pattern."""
    f = setup_initial(cfg)
    while f.t < cfg.t_end - 1e-12:
        f = step(f, cfg)
        if on_step is not None:
            on_step(f)
    return f, classify_pattern(f, cfg)


def _analytic_front_a(cfg, t, b):
    """Sheared abscissa of the analytic incident-shock line at height b."""
    geo, _, _ = _exact_states(cfg)
    omega = cfg.reflection.omega
    phi = geo.phi_inc
    # x . n = sigma t with x = a e_r + b e_o and n = (-sin phi, cos phi)
    return (b * math.sin(omega - phi) - geo.sigma_inc * t) / math.sin(phi)


def front_offsets(fieldstate, cfg):
    """Per-row offset (in cells) of the forward-most captured front from the
    analytic incident-shock line.  nan where no front is found."""
    ind = fieldstate.shock_indicator()
    n_a, n_b = ind.shape
    offsets = np.full(n_b, np.nan)
    for j in range(n_b):
        row = ind[:, j]
        hot = np.nonzero(row > INDICATOR_THRESHOLD)[0]
        if len(hot) == 0:
            continue
        i_front = hot[-1]
        # sharpen to the local ridge of the captured front, then to sub-cell
        # precision by an indicator-weighted centroid over the ridge
        lo = max(i_front - 3, 0)
        hi = min(i_front + 4, n_a)
        i_front = lo + int(np.argmax(row[lo:hi]))
        wlo = max(i_front - 3, 0)
        whi = min(i_front + 4, n_a)
        w = row[wlo:whi]
        a_front = float(np.sum(fieldstate.a_centers[wlo:whi] * w) / np.sum(w))
        a_inc = _analytic_front_a(cfg, fieldstate.t, fieldstate.b_centers[j])
        offsets[j] = (a_front - a_inc) / fieldstate.h_a
    return offsets


def classify_pattern(fieldstate, cfg):
    """RR/MR decision from the forward-front offsets near the reflection wall.

    A Mach stem shows up as a contiguous run of rows, starting at the wall,
    whose forward front sits more than k_stem cells ahead of the analytic
    incident line; the junction (triple point or reflection point) is the top
    of that run.
    """
    offsets = front_offsets(fieldstate, cfg)
    valid = ~np.isnan(offsets)
    if not valid[: max(4, cfg.k_stem)].all():
        return PatternResult("undetermined", np.array([np.nan, np.nan]),
                             0.0, 0, offsets)
    ahead = valid & (offsets > cfg.k_stem)
    n_run = 0
    while n_run < len(offsets) and ahead[n_run]:
        n_run += 1

    t = fieldstate.t
    omega = fieldstate.omega
    if n_run >= cfg.k_stem:
        j_top = n_run - 1
        b_top = fieldstate.b_centers[j_top]
        a_top = _analytic_front_a(cfg, t, b_top) \
            + offsets[j_top] * fieldstate.h_a
        x = a_top + b_top * math.cos(omega)
        y = b_top * math.sin(omega)
        stem = b_top * math.sin(omega) / t   # wall distance, similarity units
        return PatternResult("MR", np.array([x / t, y / t]), stem, n_run,
                             offsets)
    a_wall = _analytic_front_a(cfg, t, fieldstate.b_centers[0])
    return PatternResult("RR", np.array([a_wall / t, 0.0]), 0.0, 0, offsets)


def pseudo_mach_field(fieldstate, cfg):
    """Pseudo-Mach number L = |v - xi| / c in similarity coordinates."""
    x, y = fieldstate.physical_xy()
    t = fieldstate.t
    zx = fieldstate.vx - x / t
    zy = fieldstate.vy - y / t
    c = np.sqrt(_sound_speed_sq(fieldstate.rho, cfg.reflection.k))
    return np.hypot(zx, zy) / c


def field_to_csv(fieldstate, cfg, destination, stride=1):
    """Dump the field as CSV (row-major, deterministic)."""
    x, y = fieldstate.physical_xy()
    t = fieldstate.t
    L = pseudo_mach_field(fieldstate, cfg)
    ind = fieldstate.shock_indicator()
    sl = np.s_[::stride, ::stride]
    cols = [x[sl], y[sl], x[sl] / t, y[sl] / t, fieldstate.rho[sl],
            fieldstate.vx[sl], fieldstate.vy[sl], L[sl], ind[sl]]
    flat = np.column_stack([c.ravel() for c in cols])
    buf = io.StringIO()
    buf.write(",".join(FIELD_CSV_COLUMNS) + "\n")
    for row in flat:
        buf.write(",".join(f"{v:.9g}" for v in row) + "\n")
    data = buf.getvalue()
    if hasattr(destination, "write"):
        destination.write(data)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(data)
