"""Parameter-space sweeps over (M1, theta) and transition-curve extraction.

For fixed (gamma, alpha) every grid cell is classified through the local
regular-reflection construction, and the classical and angle-based transition
curves are extracted column by column: sign changes of the defining residuals
between adjacent theta samples are refined by 1-D root finding, so curve
points are accurate well below the grid spacing.
"""

import io
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import ShockreflError
from .gas import GasConstants
from .numerics import brent
from .reflection import ReflectionConfig, local_rr

CURVE_NAMES = ("detach", "angle_condition", "strong_trivial", "sonic",
               "weak_trivial")

CELL_COLUMNS = ("m1", "theta_deg", "exists", "weak_supersonic",
                "weak_transonic", "angle_ok", "pred_detach", "pred_sonic",
                "pred_new")
CURVE_COLUMNS = ("curve_name", "m1", "theta_deg")

# cell status codes
UNDEFINED, NO_RR, HAS_RR = 0, 1, 2

# default sweep window; theta spans the existence band with margin
DEFAULT_M1_RANGE = (1.2, 6.0)
DEFAULT_THETA_RANGE = (math.radians(100.0), math.radians(175.0))


@dataclass(eq=False)
class TransitionMap:
    gamma: float
    alpha: float
    m1_grid: np.ndarray
    theta_grid: np.ndarray
    status: np.ndarray            # (n_m1, n_theta) int8, status codes above
    weak_supersonic: np.ndarray   # bool, defined where status == HAS_RR
    angle_ok: np.ndarray
    curves: dict

    @property
    def exists(self):
        return self.status == HAS_RR

    @property
    def pred_detach(self):
        return self.exists

    @property
    def pred_sonic(self):
        return self.exists & self.weak_supersonic

    @property
    def pred_new(self):
        return self.exists & self.angle_ok


def _cell(m1, theta, alpha, k, n_samples):
    """Classify one (m1, theta) cell; swallows model errors into UNDEFINED."""
    try:
        rr = local_rr(ReflectionConfig(m1=m1, alpha=alpha, theta=theta, k=k),
                      n_samples=n_samples)
    except ShockreflError:
        return UNDEFINED, False, False
    if not rr.exists:
        return NO_RR, False, False
    return HAS_RR, bool(rr.m3_weak > 1.0), bool(rr.angle_condition_ok)


def _rr_or_none(m1, theta, alpha, k, n_samples):
    try:
        rr = local_rr(ReflectionConfig(m1=m1, alpha=alpha, theta=theta, k=k),
                      n_samples=n_samples)
    except ShockreflError:
        return None
    return rr


def _residual(rr, which):
    """Curve residual at a constructed local RR, or None where undefined."""
    if rr is None:
        return None
    if which == "detach":
        return rr.tau_star - abs(rr.tau_required)
    if not rr.exists:
        return None
    if which == "strong_trivial":
        return rr.psi_strong - rr.geometry.omega - 0.5 * math.pi
    if which == "weak_trivial":
        return rr.psi_weak - rr.geometry.omega - 0.5 * math.pi
    if which == "sonic":
        return rr.m3_weak - 1.0
    raise ValueError(f"unknown residual {which!r}")


def sweep(gamma=1.4, alpha=0.0, m1_range=DEFAULT_M1_RANGE,
          theta_range=DEFAULT_THETA_RANGE, resolution=128, n_samples=128):
    """Classify a (M1, theta) window and extract transition curves.

    resolution is the sample count per axis (a pair is accepted for
    rectangular grids).  Cell failures are recorded, never raised.
    """
    if np.isscalar(resolution):
        res_m1 = res_theta = int(resolution)
    else:
        res_m1, res_theta = (int(r) for r in resolution)
    if res_m1 < 16 or res_theta < 16:
        raise ValueError(f"resolution must be >= 16 per axis, got {resolution}")
    if not 1.0 < m1_range[0] <= m1_range[1]:
        raise ValueError(f"m1_range must lie in (1, inf), got {m1_range}")
    k = GasConstants(gamma=gamma)
    if m1_range[0] == m1_range[1]:
        res_m1 = 1
    if theta_range[0] == theta_range[1]:
        res_theta = 1
    m1_grid = np.linspace(m1_range[0], m1_range[1], res_m1)
    theta_grid = np.linspace(theta_range[0], theta_range[1], res_theta)

    status = np.zeros((res_m1, res_theta), dtype=np.int8)
    weak_sup = np.zeros_like(status, dtype=bool)
    angle_ok = np.zeros_like(status, dtype=bool)
    for i, m1 in enumerate(m1_grid):
        for j, th in enumerate(theta_grid):
            s, ws, ao = _cell(float(m1), float(th), alpha, k, n_samples)
            status[i, j] = s
            weak_sup[i, j] = ws
            angle_ok[i, j] = ao

    tmap = TransitionMap(gamma=gamma, alpha=alpha, m1_grid=m1_grid,
                         theta_grid=theta_grid, status=status,
                         weak_supersonic=weak_sup, angle_ok=angle_ok,
                         curves={})
    tmap.curves = _extract_curves(tmap, k, n_samples)
    return tmap


def _refine_root(which, m1, lo, hi, alpha, k, n_samples, xtol=1e-9):
    def f(theta):
        r = _residual(_rr_or_none(m1, theta, alpha, k, n_samples), which)
        if r is None:
            raise ShockreflError(f"{which} residual undefined at theta={theta}")
        return r
    try:
        return brent(f, lo, hi, xtol=xtol)
    except ShockreflError:
        return None


def _refine_label(pred, lo, hi, xtol=1e-9):
    """Bisection on a boolean predicate over theta; root of the label flip."""
    p_lo = pred(lo)
    for _ in range(200):
        if hi - lo < xtol:
            break
        mid = 0.5 * (lo + hi)
        if pred(mid) == p_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _extract_curves(tmap, k, n_samples):
    alpha = tmap.alpha
    theta = tmap.theta_grid
    curves = {name: [] for name in CURVE_NAMES}
    residual_names = ("detach", "strong_trivial", "sonic", "weak_trivial")
    pred_new = tmap.pred_new

    for i, m1 in enumerate(tmap.m1_grid):
        m1 = float(m1)
        rrs = [_rr_or_none(m1, float(t), alpha, k, n_samples) for t in theta]
        for which in residual_names:
            res = [_residual(rr, which) for rr in rrs]
            for j in range(len(theta) - 1):
                a, b = res[j], res[j + 1]
                if a is None or b is None or a * b > 0.0:
                    continue
                root = _refine_root(which, m1, float(theta[j]),
                                    float(theta[j + 1]), alpha, k, n_samples)
                if root is not None:
                    curves[which].append((m1, root))
        # boundary of the angle-based prediction (may ride the detach curve
        # where the angle condition already holds at detachment)
        def rr_pred(t):
            rr = _rr_or_none(m1, t, alpha, k, n_samples)
            return rr is not None and rr.exists and rr.angle_condition_ok
        for j in range(len(theta) - 1):
            # a flip against an undefined cell is a domain edge, not a boundary
            if rrs[j] is None or rrs[j + 1] is None:
                continue
            if bool(pred_new[i, j]) == bool(pred_new[i, j + 1]):
                continue
            root = _refine_label(rr_pred, float(theta[j]), float(theta[j + 1]))
            curves["angle_condition"].append((m1, root))

    out = {}
    for name in CURVE_NAMES:
        pts = sorted(curves[name])
        out[name] = np.array(pts, dtype=float).reshape(-1, 2)
    return out


def _fmt_bool(x):
    return "true" if x else "false"


def export_csv(tmap, destination):
    """Write cells.csv and curves.csv under the destination directory.

    Row order is deterministic: cells row-major over (m1, theta), curve rows
    grouped by name in CURVE_NAMES order and sorted along the curve.
    """
    os.makedirs(destination, exist_ok=True)
    cells_path = os.path.join(destination, "cells.csv")
    curves_path = os.path.join(destination, "curves.csv")

    buf = io.StringIO()
    buf.write(",".join(CELL_COLUMNS) + "\n")
    exists, p_son, p_new = tmap.exists, tmap.pred_sonic, tmap.pred_new
    for i, m1 in enumerate(tmap.m1_grid):
        for j, th in enumerate(tmap.theta_grid):
            if tmap.status[i, j] == UNDEFINED:
                row = [f"{m1:.17g}", f"{math.degrees(th):.17g}", "undefined",
                       "", "", "", "", "", ""]
            else:
                e = bool(exists[i, j])
                ws = bool(tmap.weak_supersonic[i, j]) if e else False
                row = [
                    f"{m1:.17g}", f"{math.degrees(th):.17g}", _fmt_bool(e),
                    _fmt_bool(ws), _fmt_bool(e and not ws),
                    _fmt_bool(bool(tmap.angle_ok[i, j]) if e else False),
                    "RR" if e else "MR",
                    "RR" if bool(p_son[i, j]) else "MR",
                    "RR" if bool(p_new[i, j]) else "MR",
                ]
            buf.write(",".join(row) + "\n")
    with open(cells_path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())

    buf = io.StringIO()
    buf.write(",".join(CURVE_COLUMNS) + "\n")
    for name in CURVE_NAMES:
        for m1, th in tmap.curves[name]:
            buf.write(f"{name},{m1:.17g},{math.degrees(th):.17g}\n")
    with open(curves_path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())
    return cells_path, curves_path


def curve_theta_at(tmap, name, m1, tol=None):
    """Interpolated theta of a named curve at abscissa m1.

    Returns nan when the curve is absent or m1 lies more than tol (default:
    one m1 grid step) outside the curve's span.
    """
    pts = tmap.curves[name]
    if len(pts) == 0:
        return float("nan")
    ms, ts = pts[:, 0], pts[:, 1]
    if tol is None:
        tol = (float(np.max(np.diff(tmap.m1_grid)))
               if len(tmap.m1_grid) > 1 else 0.0)
    if m1 < ms[0] - tol or m1 > ms[-1] + tol:
        return float("nan")
    return float(np.interp(m1, ms, ts))
