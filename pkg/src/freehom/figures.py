"""Byte-stable SVG figures: the skewed strip and the fundamental polygon."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .geometry import FuchsianRep, GeodesicTrace, klein_to_disk  # noqa: E402

_STYLE = {
    "svg.hashsalt": "freehom",
    "svg.fonttype": "path",
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "lines.linewidth": 1.0,
}
_METADATA = {"Date": None, "Creator": None}


def _save(fig, path) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, format="svg", metadata=_METADATA)
    plt.close(fig)


def emit_strip_svg(scene: dict, path) -> dict:
    """Strip 0 < x < 1 with horizontal stable leaves, slanted unstable leaves
    and the ladder of fixed orbits."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4, 6))
        y0, y1 = scene["strip"]["y"]
        ax.plot([0, 0], [y0, y1], color="black")
        ax.plot([1, 1], [y0, y1], color="black")
        for leaf in scene["stable_leaves"]:
            ax.plot([0, 1], [leaf["y"], leaf["y"]], color="tab:blue", linewidth=0.8)
            ax.text(1.03, leaf["y"], leaf["label"], va="center", color="tab:blue")
        for leaf in scene["unstable_leaves"]:
            (xa, ya), (xb, yb) = leaf["from"], leaf["to"]
            ax.plot([xa, xb], [ya, yb], color="tab:red", linewidth=0.8)
        for pt in scene["ladder"]:
            marker = "o" if pt["orientation"] > 0 else "s"
            ax.plot([pt["x"]], [pt["y"]], marker=marker, color="black", markersize=4)
            ax.text(pt["x"] + 0.04, pt["y"] + 0.12, pt["label"], fontsize=7)
        ax.set_xlim(-0.1, 1.25)
        ax.set_ylim(y0, y1)
        ax.set_aspect("auto")
        ax.axis("off")
        _save(fig, path)
    return {"path": str(path), "points": len(scene["ladder"]),
            "stable_leaves": len(scene["stable_leaves"])}


def _klein_polyline(a: complex, b: complex, n: int = 32) -> np.ndarray:
    return klein_to_disk(a + np.linspace(0.0, 1.0, n) * (b - a))


def emit_surface_svg(rep: FuchsianRep, traces: list[GeodesicTrace], path,
                     crossings: list[complex] | None = None) -> dict:
    """Fundamental polygon in the Poincare disk with traced geodesic segments;
    crossing points (Klein coordinates) are marked."""
    crossings = list(crossings or [])
    domain = traces[0].domain if traces else rep.domain
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5, 5))
        t = np.linspace(0, 2 * np.pi, 361)
        ax.plot(np.cos(t), np.sin(t), color="0.6", linewidth=0.6)
        v = domain.vertices
        for k in range(len(v)):
            z = _klein_polyline(v[k], v[(k + 1) % len(v)])
            ax.plot(z.real, z.imag, color="black")
        colours = ["tab:blue", "tab:orange", "tab:green", "tab:purple"]
        for i, tr in enumerate(traces):
            for seg in tr.segments:
                z = _klein_polyline(seg.start, seg.end)
                ax.plot(z.real, z.imag, color=colours[i % len(colours)], linewidth=1.2)
        if crossings:
            z = klein_to_disk(np.array(crossings))
            ax.plot(z.real, z.imag, linestyle="none", marker="o", color="red", markersize=4)
        ax.set_xlim(-1.05, 1.05)
        ax.set_ylim(-1.05, 1.05)
        ax.set_aspect("equal")
        ax.axis("off")
        _save(fig, path)
    return {"path": str(path), "polygon_vertices": len(v), "traces": len(traces),
            "crossing_marks": len(crossings)}
