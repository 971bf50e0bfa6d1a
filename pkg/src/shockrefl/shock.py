"""Steady-frame Rankine-Hugoniot shock solving for potential flow.

Across a potential-flow shock the mass flux rho * v^n and the tangential
velocity are continuous, and the Bernoulli invariant
c^2 + (gamma-1)/2 |v|^2 holds on both sides.  The normal-shock kernel solves
the resulting scalar mass-flux equation for the downstream normal speed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateJumpError, InadmissibleAngleError, NoShockError
from .gas import FluidState, GasConstants, make_state
from .numerics import bisect_newton

# relative tolerance below which a shock is treated as the degenerate
# (zero-strength) solution
SONIC_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class ShockSolution:
    """Matched upstream/downstream states with jump geometry.

    n is the downstream unit normal (flow crosses with v.n > 0), t is 90
    degrees counterclockwise from n, beta the angle from the upstream velocity
    to n and strength = v^n_u - v^n_d >= 0.
    """

    upstream: FluidState
    downstream: FluidState
    n: np.ndarray
    t: np.ndarray
    beta: float
    strength: float

    @property
    def is_degenerate(self):
        scale = max(self.upstream.c, self.upstream.speed)
        return self.strength <= SONIC_EPS * scale


def normal_shock(zn_u, rho_u, c_u, k):
    """Downstream (zn_d, rho_d, c_d) of a normal shock with upstream normal speed zn_u.

    Solves rho(c(z)) * z = rho_u * zn_u on (0, zn_u) where
    c(z)^2 = c_u^2 + (gamma-1)/2 (zn_u^2 - z^2).  Requires zn_u >= c_u; at
    equality the degenerate zero-strength solution is returned.
    """
    if zn_u <= 0.0 or rho_u <= 0.0 or c_u <= 0.0:
        raise NoShockError("normal_shock requires positive zn_u, rho_u, c_u")
    if zn_u < c_u * (1.0 - SONIC_EPS):
        raise NoShockError(
            f"upstream normal component subsonic: zn_u={zn_u}, c_u={c_u}")
    if zn_u <= c_u * (1.0 + SONIC_EPS):
        return zn_u, rho_u, c_u

    g = k.gamma
    cu2 = c_u * c_u
    k2 = 0.5 * (g - 1.0)
    a2 = cu2 + k2 * zn_u * zn_u          # c(z)^2 = a2 - k2 z^2
    expo = 1.0 / (g - 1.0)
    flux = zn_u                          # mass flux / rho_u

    def f(z):
        c2 = a2 - k2 * z * z
        return (c2 / cu2) ** expo * z - flux

    def fp(z):
        c2 = a2 - k2 * z * z
        return (c2 / cu2) ** expo * (1.0 - z * z / c2)

    # the admissible root is subsonic: bracket by the sonic point z = c(z)
    z_sonic = math.sqrt((2.0 * cu2 + (g - 1.0) * zn_u * zn_u) / (g + 1.0))
    lo = 1e-9 * zn_u
    hi = z_sonic * (1.0 - 1e-14)
    if f(lo) * f(hi) > 0.0:
        # no sign change: numerically at the sonic limit
        return zn_u, rho_u, c_u
    zn_d = bisect_newton(f, fp, lo, hi, xtol=1e-13)
    c_d2 = a2 - k2 * zn_d * zn_d
    c_d = math.sqrt(c_d2)
    rho_d = rho_u * (c_d2 / cu2) ** expo
    return zn_d, rho_d, c_d


def normal_shock_array(zn_u, rho_u, c_u, k, iters=60):
    """Vectorized normal-shock kernel over an array of upstream normal speeds.

    Entries with zn_u <= c_u come back as zero-strength solutions.  Fixed
    bisection iterations followed by Newton polish; accurate to ~1e-14
    relative.
    """
    zn_u = np.asarray(zn_u, dtype=float)
    g = k.gamma
    cu2 = c_u * c_u
    k2 = 0.5 * (g - 1.0)
    expo = 1.0 / (g - 1.0)
    a2 = cu2 + k2 * zn_u ** 2
    active = zn_u > c_u * (1.0 + SONIC_EPS)

    def resid(z):
        return (np.maximum(a2 - k2 * z * z, 1e-300) / cu2) ** expo * z - zn_u

    z_sonic = np.sqrt((2.0 * cu2 + (g - 1.0) * zn_u ** 2) / (g + 1.0))
    lo = np.full_like(zn_u, 1e-12)
    hi = z_sonic.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        neg = resid(mid) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    z = 0.5 * (lo + hi)
    for _ in range(3):  # Newton polish
        c2 = a2 - k2 * z * z
        r = (c2 / cu2) ** expo * z - zn_u
        dr = (c2 / cu2) ** expo * (1.0 - z * z / c2)
        z = np.clip(z - r / np.where(dr == 0.0, 1.0, dr), 0.0, z_sonic)
    zn_d = np.where(active, z, zn_u)
    c_d2 = a2 - k2 * zn_d ** 2
    rho_d = rho_u * (c_d2 / cu2) ** expo
    return zn_d, rho_d, np.sqrt(c_d2)


def oblique_shock(upstream, beta, k):
    """Steady oblique shock for arbitrary upstream direction.

    beta is the angle from the upstream velocity to the downstream unit
    normal.  The upstream velocity is decomposed into (n, t), the normal part
    run through normal_shock, and recombined.
    """
    v_u = upstream.v
    speed = upstream.speed
    m_u = speed / upstream.c
    if m_u <= 1.0:
        raise NoShockError(f"upstream must be supersonic, M={m_u}")
    cosb = math.cos(beta)
    vn_u = speed * cosb
    if vn_u < upstream.c * (1.0 - SONIC_EPS):
        raise InadmissibleAngleError(
            f"|beta|={abs(beta)} exceeds arccos(1/M)={math.acos(1.0 / m_u)}")
    phi = math.atan2(v_u[1], v_u[0])
    ang = phi + beta
    n = np.array([math.cos(ang), math.sin(ang)])
    t = np.array([-n[1], n[0]])
    vt = float(v_u @ t)
    zn_d, rho_d, c_d = normal_shock(vn_u, upstream.rho, upstream.c, k)
    v_d = zn_d * n + vt * t
    return ShockSolution(
        upstream=upstream,
        downstream=make_state(rho_d, c_d, v_d),
        n=n,
        t=t,
        beta=float(beta),
        strength=vn_u - zn_d,
    )


def shock_normal_from_jump(v_u, v_d, tol=None):
    """Unit normal (v_u - v_d)/|v_u - v_d|; the velocity jump is normal."""
    v_u = np.asarray(v_u, dtype=float)
    v_d = np.asarray(v_d, dtype=float)
    jump = v_u - v_d
    mag = float(np.hypot(jump[0], jump[1]))
    if tol is None:
        tol = 1e-9 * max(float(np.hypot(*v_u)), float(np.hypot(*v_d)), 1.0)
    if mag <= tol:
        raise DegenerateJumpError(f"velocity jump {mag} below tolerance {tol}")
    return jump / mag


def shock_speed(xi_point, n):
    """sigma = xi . n, the self-similar speed of a shock through xi_point."""
    xi_point = np.asarray(xi_point, dtype=float)
    n = np.asarray(n, dtype=float)
    return float(xi_point @ n)
