"""Figure builders for the three supported artifact kinds.

Each builder validates the CSV header against the producing schema, then
returns a matplotlib Figure; rendering to disk goes through an atomic write
with deterministic output settings (fixed fonts, no embedded metadata).
"""

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

KINDS = ("transition_map", "sim_field", "polar_curve")

CELL_HEADER = ["m1", "theta_deg", "exists", "weak_supersonic",
               "weak_transonic", "angle_ok", "pred_detach", "pred_sonic",
               "pred_new"]
CURVE_HEADER = ["curve_name", "m1", "theta_deg"]
FIELD_HEADER = ["x", "y", "xi", "eta", "rho", "vx", "vy", "L",
                "shock_indicator"]
POLAR_HEADER = ["beta_rad", "vdx", "vdy", "rho_d", "c_d", "M_d", "tau_rad"]

CURVE_NAMES = ("detach", "angle_condition", "strong_trivial", "sonic",
               "weak_trivial")
CURVE_STYLES = {
    "detach": dict(color="black", lw=1.8),
    "angle_condition": dict(color="tab:red", lw=1.4, ls="--"),
    "strong_trivial": dict(color="tab:blue", lw=1.2),
    "sonic": dict(color="tab:green", lw=1.2, ls=":"),
    "weak_trivial": dict(color="tab:purple", lw=1.2, ls="-."),
}


class SchemaError(ValueError):
    """Input file does not match the expected artifact schema."""


@dataclass
class FigureSpec:
    kind: str
    inputs: list
    output: str
    pattern: Optional[str] = None    # pattern JSON for sim_field
    title: Optional[str] = None
    dpi: int = 150
    styling: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; "
                              f"choose from {KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input file is required")


def _read_csv(path, expected_header):
    if not os.path.exists(path):
        raise SchemaError(f"input file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected_header:
            raise SchemaError(
                f"{path}: header {header} does not match expected "
                f"{expected_header}")
        rows = list(reader)
    return rows


def _float_grid(rows, columns):
    return {c: np.array([float(r[i]) for r in rows])
            for i, c in enumerate(columns)}


def build_transition_map(spec):
    """Region shading from the cell table plus the five named curves."""
    if len(spec.inputs) != 2:
        raise SchemaError("transition_map needs two inputs: cells.csv and "
                          "curves.csv")
    cells = _read_csv(spec.inputs[0], CELL_HEADER)
    curves = _read_csv(spec.inputs[1], CURVE_HEADER)

    m1 = np.array([float(r[0]) for r in cells])
    th = np.array([float(r[1]) for r in cells])
    m1_grid = np.unique(m1)
    th_grid = np.unique(th)
    # 0 undefined, 1 no local solution, 2 exists, 3 exists and angle holds
    code = np.zeros((len(m1_grid), len(th_grid)))
    im = np.searchsorted(m1_grid, m1)
    jt = np.searchsorted(th_grid, th)
    for k, r in enumerate(cells):
        if r[2] == "undefined":
            c = 0.0
        elif r[2] == "false":
            c = 1.0
        else:
            c = 3.0 if r[5] == "true" else 2.0
        code[im[k], jt[k]] = c

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    cmap = matplotlib.colors.ListedColormap(
        ["#f0f0f0", "#c6dbef", "#fdd0a2", "#a1d99b"])
    ax.pcolormesh(m1_grid, th_grid, code.T, cmap=cmap, vmin=-0.5, vmax=3.5,
                  shading="nearest", rasterized=True)

    by_name = {name: [] for name in CURVE_NAMES}
    for r in curves:
        if r[0] not in by_name:
            raise SchemaError(f"unknown curve name {r[0]!r} in "
                              f"{spec.inputs[1]}")
        by_name[r[0]].append((float(r[1]), float(r[2])))
    for name in CURVE_NAMES:
        pts = np.array(sorted(by_name[name])).reshape(-1, 2)
        ax.plot(pts[:, 0], pts[:, 1], label=name, **CURVE_STYLES[name])

    ax.set_xlabel("M1")
    ax.set_ylabel("theta [deg]")
    ax.set_title(spec.title or "Reflection pattern regions")
    ax.legend(loc="lower right", fontsize=8)
    return fig


def build_sim_field(spec):
    """Density contours with the shock-indicator ridge and walls marked."""
    if len(spec.inputs) != 1:
        raise SchemaError("sim_field needs exactly one field CSV input")
    rows = _read_csv(spec.inputs[0], FIELD_HEADER)
    d = _float_grid(rows, FIELD_HEADER)
    xi, eta, rho, ind = d["xi"], d["eta"], d["rho"], d["shock_indicator"]

    fig, ax = plt.subplots(figsize=(7.0, 5.5))
    tcf = ax.tricontourf(xi, eta, rho, levels=24, cmap="viridis")
    fig.colorbar(tcf, ax=ax, label="rho")
    ridge = ind > 0.03
    if ridge.any():
        ax.plot(xi[ridge], eta[ridge], ".", color="white", ms=1.5,
                label="shock indicator")

    # walls: the domain is a parallelogram with one wall on eta = 0 and the
    # other through the origin along the top-left data edge
    ax.plot([0.0, float(xi.max())], [0.0, 0.0], color="black", lw=2.0)
    top = eta >= eta.max() - 1e-12
    far = np.argmin(xi[top])
    wall_dir = np.array([xi[top][far], eta[top][far]])
    wall_dir = wall_dir / np.hypot(*wall_dir)
    span = 1.05 * float(np.hypot(xi[top][far], eta[top][far]))
    ax.plot([0.0, span * wall_dir[0]], [0.0, span * wall_dir[1]],
            color="black", lw=2.0)

    classification = None
    if spec.pattern is not None:
        with open(spec.pattern, encoding="utf-8") as fh:
            pat = json.load(fh)
        for key in ("classification", "junction_xi"):
            if key not in pat:
                raise SchemaError(f"{spec.pattern}: missing key {key!r}")
        classification = pat["classification"]
        jx, jy = pat["junction_xi"]
        ax.plot([jx], [jy], marker="o", mfc="none", mec="red", ms=11,
                mew=2.0, ls="none", label=f"junction ({classification})")
    ax.set_xlabel("xi")
    ax.set_ylabel("eta")
    ax.set_aspect("equal")
    title = spec.title or "Density field"
    if classification is not None and spec.title is None:
        title += f" ({classification})"
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    return fig


def build_polar_curve(spec):
    """Downstream-velocity loop with turn-angle extremes marked."""
    if len(spec.inputs) != 1:
        raise SchemaError("polar_curve needs exactly one polar CSV input")
    rows = _read_csv(spec.inputs[0], POLAR_HEADER)
    d = _float_grid(rows, POLAR_HEADER)

    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    ax.plot(d["vdx"], d["vdy"], color="tab:blue", lw=1.5, label="polar")
    j = int(np.argmax(np.abs(d["tau_rad"])))
    ax.plot([d["vdx"][j]], [d["vdy"][j]], "r^", ms=7,
            label=f"max turn {abs(math.degrees(d['tau_rad'][j])):.1f} deg")
    sup = d["M_d"] >= 1.0
    if sup.any() and (~sup).any():
        ax.plot(d["vdx"][sup], d["vdy"][sup], ".", color="tab:green", ms=2,
                label="supersonic downstream")
    ax.axhline(0.0, color="gray", lw=0.6)
    ax.set_xlabel("vx")
    ax.set_ylabel("vy")
    ax.set_aspect("equal")
    ax.set_title(spec.title or "Shock polar")
    ax.legend(loc="upper left", fontsize=8)
    return fig


BUILDERS = {
    "transition_map": build_transition_map,
    "sim_field": build_sim_field,
    "polar_curve": build_polar_curve,
}


def build_figure(spec):
    return BUILDERS[spec.kind](spec)


def render(spec):
    """Build and write the figure atomically; returns the output path."""
    fig = build_figure(spec)
    tmp = spec.output + ".tmp"
    try:
        # metadata suppressed so identical inputs give identical bytes
        fig.savefig(tmp, dpi=spec.dpi, format=_format_of(spec.output),
                    metadata=_deterministic_metadata(spec.output))
        os.replace(tmp, spec.output)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.remove(tmp)
    return spec.output


def _format_of(path):
    ext = os.path.splitext(path)[1].lstrip(".").lower()
    return ext or "png"


def _deterministic_metadata(path):
    fmt = _format_of(path)
    if fmt == "png":
        return {"Software": None}
    if fmt == "svg":
        return {"Date": None}
    return None
