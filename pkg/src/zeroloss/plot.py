"""Deterministic SVG frames of a construction, projected onto two barycentric coordinates."""

from __future__ import annotations

import math

import numpy as np

from .construct import ConstructionTrace
from .dataset import LabeledDataset, to_barycentric
from .errors import InvalidInputError

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
FRAME = 300
PAD = 20


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def plot_trace(ds: LabeledDataset, trace: ConstructionTrace | None = None) -> str:
    """One frame for the raw data and one after each layer, side by side in a single SVG.

    Points are drawn in the coordinates ``(kappa_1, kappa_2)`` of the class
    means; each layer frame also marks the cone apex and its two boundary
    rays as they appear in that plane.
    """
    if ds.class_count < 2:
        raise InvalidInputError("need at least two classes for a two-coordinate projection")
    steps = trace.steps if trace is not None else ()
    if any(s.snapshot.shape != ds.X.shape for s in steps):
        raise InvalidInputError("trace snapshots do not match the dataset; replay the trace against it first")
    _, frame = to_barycentric(ds)
    lin = frame.forward_matrix[:2]

    clouds = [lin @ ds.X] + [lin @ s.snapshot for s in steps]
    allpts = np.hstack(clouds)
    lo = allpts.min(axis=1)
    hi = allpts.max(axis=1)
    span = float(max(hi - lo)) or 1.0
    centre = 0.5 * (lo + hi)
    unit = (FRAME - 2 * PAD) / (1.2 * span)

    def to_px(xy):
        x = FRAME / 2 + (xy[0] - centre[0]) * unit
        y = FRAME / 2 - (xy[1] - centre[1]) * unit
        return x, y

    width = FRAME * len(clouds)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{FRAME + 24}" '
        f'viewBox="0 0 {width} {FRAME + 24}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{FRAME + 24}" fill="white"/>',
    ]
    labels = ds.class_index
    for f, cloud in enumerate(clouds):
        title = "input" if f == 0 else f"layer {f}: class {steps[f - 1].collapsed_class} collapsed"
        out.append(f'<g transform="translate({f * FRAME},0)">')
        out.append(f'<rect x="1" y="1" width="{FRAME - 2}" height="{FRAME - 2}" fill="none" stroke="#999"/>')
        out.append(f'<text x="{FRAME / 2}" y="{FRAME + 16}" text-anchor="middle">{title}</text>')
        out.append(f'<svg x="0" y="0" width="{FRAME}" height="{FRAME}">')
        if f > 0:
            cone = steps[f - 1].cone
            apex = frame.forward(cone.apex)[:2]
            ax = lin @ cone.axis
            norm = float(np.linalg.norm(ax))
            ax_px, ay_px = to_px(apex)
            if norm > 0:
                base = math.atan2(ax[1], ax[0])
                reach = 2.0 * span
                for sign in (-1.0, 1.0):
                    ang = base + sign * cone.aperture / 2.0
                    end = apex + reach * np.array([math.cos(ang), math.sin(ang)])
                    ex, ey = to_px(end)
                    out.append(f'<line x1="{_fmt(ax_px)}" y1="{_fmt(ay_px)}" x2="{_fmt(ex)}" y2="{_fmt(ey)}" '
                               'stroke="#555" stroke-dasharray="4 3"/>')
            out.append(f'<path d="M{_fmt(ax_px - 4)} {_fmt(ay_px - 4)}L{_fmt(ax_px + 4)} {_fmt(ay_px + 4)}'
                       f'M{_fmt(ax_px - 4)} {_fmt(ay_px + 4)}L{_fmt(ax_px + 4)} {_fmt(ay_px - 4)}" '
                       'stroke="black" stroke-width="2"/>')
        for i in range(cloud.shape[1]):
            x, y = to_px(cloud[:, i])
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2" fill="{PALETTE[labels[i] % len(PALETTE)]}"/>')
        out.append("</svg></g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
