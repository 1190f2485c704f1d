"""Profile-curve panels of free-boundary annuli and their duals as plain SVG.

Each panel shows the ``s = 0`` slice projected to the ``(x0, x1)`` disc:
the unit circle, the cap boundary as a dashed chord ``x0 = cos R`` and the
profile curve.  The SVG text is generated by hand with fixed number
formatting, so identical inputs give identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dual import dual_surface
from .io import atomic_write_text, write_json
from .rotational import solve_for_radius
from .surface import build_annulus

FIGURE_RADII = (0.22, 0.98, np.pi / 2, 1.95, 1.84)
# Necks decrease along the family; the last two radii come after the maximum.
FIGURE_BRANCHES = ("pre", "pre", "pre", "post", "post")
PANEL_SIZE = 240
MARGIN = 12
CURVE_SAMPLES = 257


@dataclass
class Panel:
    """Data behind one SVG panel."""

    name: str
    row: str
    R_target: float
    R: float
    gamma: float
    r0: float
    branch: str
    curve: np.ndarray
    annotation: str


def _num(v: float) -> str:
    return f"{v:.3f}"


def _to_px(xy: np.ndarray) -> np.ndarray:
    half = PANEL_SIZE / 2
    scale = half - MARGIN
    return np.column_stack([half + scale * xy[:, 0], half - scale * xy[:, 1]])


def render_panel(panel: Panel) -> str:
    """SVG 1.1 text for one panel (x0 to the right, x1 upwards)."""
    half = PANEL_SIZE / 2
    scale = half - MARGIN
    c = np.cos(panel.R)
    chord = np.sqrt(max(0.0, 1 - c * c))
    ends = _to_px(np.array([[c, -chord], [c, chord]]))
    pts = _to_px(panel.curve)
    path = "M " + " L ".join(f"{_num(x)} {_num(y)}" for x, y in pts)
    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{PANEL_SIZE}" height="{PANEL_SIZE}" viewBox="0 0 {PANEL_SIZE} {PANEL_SIZE}">',
        f"  <title>{panel.name}</title>",
        f'  <circle cx="{_num(half)}" cy="{_num(half)}" r="{_num(scale)}" '
        'fill="none" stroke="#888888" stroke-width="1"/>',
        f'  <line x1="{_num(ends[0, 0])}" y1="{_num(ends[0, 1])}" x2="{_num(ends[1, 0])}" '
        f'y2="{_num(ends[1, 1])}" stroke="#444444" stroke-width="1" stroke-dasharray="4 3"/>',
        f'  <path d="{path}" fill="none" stroke="#1f4e9c" stroke-width="1.6"/>',
        f'  <text x="{MARGIN}" y="{PANEL_SIZE - 4}" font-family="sans-serif" '
        f'font-size="11">{panel.annotation}</text>',
        "</svg>",
    ]
    return "\n".join(lines) + "\n"


def figure_panels(n_s: int = 16) -> list[Panel]:
    """Solve every target radius and collect the top and bottom panels.

    Raises:
        NoContactError: If a target radius is not reached on its branch.
    """
    panels = []
    for R_target, branch in zip(FIGURE_RADII, FIGURE_BRANCHES):
        profile, contact = solve_for_radius(R_target, branch)
        surf = build_annulus(profile, contact, CURVE_SAMPLES, n_s)
        dual = dual_surface(surf)
        tag = f"R{R_target:.4f}"
        R = contact.params.R
        panels.append(Panel(
            f"top_{tag}", "top", R_target, R, contact.params.gamma, profile.r0, branch,
            surf.points[:, 0, :2], f"R = {R:.4f}",
        ))
        dp = dual.dual_params
        panels.append(Panel(
            f"bottom_{tag}", "bottom", R_target, dp.R, dp.gamma, profile.r0, branch,
            dual.points[:, 0, :2], f"dual: R~ = {dp.R:.4f}, gamma~ = {dp.gamma:.4f}",
        ))
    return panels


def write_figure1(out_dir) -> dict:
    """Write ten SVG panels and ``index.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    entries = []
    for p in figure_panels():
        path = atomic_write_text(out / f"{p.name}.svg", render_panel(p))
        entries.append({
            "file": path.name,
            "row": p.row,
            "R_target": p.R_target,
            "R": p.R,
            "gamma": p.gamma,
            "r0": p.r0,
            "branch": p.branch,
        })
    index = {
        "panels": entries,
        "convention": "s = 0 slice projected to the (x0, x1) disc; x0 rightward, x1 upward; "
        "dashed chord is the cap boundary x0 = cos R",
    }
    write_json(out / "index.json", index)
    return index
