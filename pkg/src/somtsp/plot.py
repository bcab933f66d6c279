"""SVG rendering of training snapshots: city dots plus the neuron ring."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Sequence

import numpy as np

from .fileio import atomic_write_text
from .instance import Instance

VIEW_W = 640
VIEW_H = 640
MARGIN = 40

_SVG_NS = "http://www.w3.org/2000/svg"


def _viewport_transform(points: np.ndarray):
    """Affine map of data coordinates into the viewport, preserving aspect ratio.

    The y axis is flipped so tours look math-oriented (y grows upward).
    """
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    span = hi - lo
    usable_w = VIEW_W - 2 * MARGIN
    usable_h = VIEW_H - 2 * MARGIN
    scale = min(
        usable_w / span[0] if span[0] > 0 else np.inf,
        usable_h / span[1] if span[1] > 0 else np.inf,
    )
    if not np.isfinite(scale):
        scale = 1.0  # all points coincide; any scale centers them
    off_x = MARGIN + (usable_w - span[0] * scale) / 2.0
    off_y = MARGIN + (usable_h - span[1] * scale) / 2.0

    def to_view(xy: np.ndarray) -> np.ndarray:
        out = np.empty_like(xy, dtype=np.float64)
        out[:, 0] = off_x + (xy[:, 0] - lo[0]) * scale
        out[:, 1] = VIEW_H - (off_y + (xy[:, 1] - lo[1]) * scale)
        return out

    return to_view


def render_frame(instance: Instance, ring_positions: np.ndarray, step: int, to_view=None) -> str:
    """One SVG frame: the ring as a closed polyline under the city dots."""
    if to_view is None:
        to_view = _viewport_transform(np.vstack([instance.coords, ring_positions]))
    svg = ET.Element(
        "svg",
        xmlns=_SVG_NS,
        version="1.1",
        width=str(VIEW_W),
        height=str(VIEW_H),
        viewBox=f"0 0 {VIEW_W} {VIEW_H}",
    )
    ET.SubElement(svg, "rect", width=str(VIEW_W), height=str(VIEW_H), fill="white")

    ring_v = to_view(ring_positions)
    ET.SubElement(
        svg,
        "polygon",
        points=" ".join(f"{x:.3f},{y:.3f}" for x, y in ring_v),
        fill="none",
        stroke="#2b6fb2",
        attrib={"stroke-width": "1.5", "stroke-linejoin": "round"},
    )
    for x, y in to_view(instance.coords):
        ET.SubElement(svg, "circle", cx=f"{x:.3f}", cy=f"{y:.3f}", r="4", fill="#1a1a1a")
    caption = ET.SubElement(
        svg,
        "text",
        x="12",
        y=str(VIEW_H - 12),
        fill="#444",
        attrib={"font-family": "sans-serif", "font-size": "16"},
    )
    caption.text = f"step {step}"
    return ET.tostring(svg, encoding="unicode") + "\n"


def render_frames(
    snapshots: Sequence[tuple[int, np.ndarray]], instance: Instance, out_dir: Path
) -> list[Path]:
    """Write one SVG per snapshot into out_dir, named frame-<step>.svg.

    All frames share one viewport transform (fit to the cities plus every
    snapshot ring), so an image sequence does not jitter.
    """
    if not snapshots:
        raise ValueError("no snapshots to render")
    out_dir = Path(out_dir)
    if not out_dir.is_dir():
        raise NotADirectoryError(f"output directory does not exist: {out_dir}")
    to_view = _viewport_transform(
        np.vstack([instance.coords] + [ring for _, ring in snapshots])
    )
    paths = []
    for step, ring in snapshots:
        path = out_dir / f"frame-{step:06d}.svg"
        atomic_write_text(path, render_frame(instance, ring, step, to_view))
        paths.append(path)
    return paths
