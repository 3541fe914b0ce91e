"""Static SVG rendering of 2D bodies, plank systems, and trajectories.

One fixed-size viewport per scene, fitted to the body's bounding box plus a
10% margin, y-axis flipped so the picture matches the usual orientation.
Coordinates are written with six decimals so identical scenes produce
identical bytes.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .geometry import Ball, ConvexBody, _as_vertex_body

_SIZE = 640.0
_PLANK_FILLS = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
                "#76b7b2", "#edc948", "#9c755f", "#bab0ac", "#d37295",
                "#8cd17d", "#499894")


def _fmt(v: float) -> str:
    out = f"{v:.6f}"
    return "0.000000" if out == "-0.000000" else out


class _Canvas:
    def __init__(self, lo, hi):
        span = np.maximum(hi - lo, 1e-9)
        pad = 0.1 * span
        self.lo = lo - pad
        self.hi = hi + pad
        self.scale = _SIZE / float(np.max(self.hi - self.lo))
        self.w = float((self.hi[0] - self.lo[0]) * self.scale)
        self.h = float((self.hi[1] - self.lo[1]) * self.scale)

    def map(self, p) -> tuple:
        x = (p[0] - self.lo[0]) * self.scale
        y = self.h - (p[1] - self.lo[1]) * self.scale
        return x, y

    def pts(self, P) -> str:
        return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(self.map, P))


def _body_outline(K: ConvexBody, cv: _Canvas) -> str:
    if isinstance(K, Ball):
        cx, cy = cv.map(K.center)
        r = K.radius * cv.scale
        return (f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
                'fill="#dce6f2" stroke="#1f3552" stroke-width="2"/>')
    V = _as_vertex_body(K).vertices
    return (f'<polygon points="{cv.pts(V)}" '
            'fill="#dce6f2" stroke="#1f3552" stroke-width="2"/>')


def _plank_band(plank, K: ConvexBody, cv: _Canvas, color: str) -> str:
    # clip the slab against the enlarged viewport box, not the body
    n = np.asarray(plank.normal, float)
    t = np.array([-n[1], n[0]])
    corners = np.stack([cv.lo, [cv.hi[0], cv.lo[1]], cv.hi, [cv.lo[0], cv.hi[1]]])
    span = np.abs(corners @ t).max() * 1.5
    band = []
    for off in (plank.lo, plank.hi):
        band.append(n * off + t * span)
        band.append(n * off - t * span)
    band[2], band[3] = band[3], band[2]
    return (f'<polygon points="{cv.pts(band)}" fill="{color}" '
            'fill-opacity="0.35" stroke="none"/>')


def render_scene(K: ConvexBody, planks=None, trajectory=None,
                 witness=None) -> str:
    """SVG scene: the body, optional planks, trajectory, witness marker."""
    if K.dim != 2:
        raise DimensionMismatch("SVG output is 2D only")
    lo, hi = K.bounding_box()
    cv = _Canvas(np.asarray(lo, float), np.asarray(hi, float))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(cv.w)}" '
        f'height="{_fmt(cv.h)}" viewBox="0 0 {_fmt(cv.w)} {_fmt(cv.h)}">',
        f'<rect width="{_fmt(cv.w)}" height="{_fmt(cv.h)}" fill="#ffffff"/>',
        _body_outline(K, cv),
    ]
    for i, p in enumerate(planks or []):
        parts.append(_plank_band(p, K, cv, _PLANK_FILLS[i % len(_PLANK_FILLS)]))
    if trajectory is not None and len(trajectory):
        P = np.atleast_2d(np.asarray(trajectory, float))
        parts.append(f'<polygon points="{cv.pts(P)}" fill="none" '
                     'stroke="#c0392b" stroke-width="2.5"/>')
        for p in P:
            x, y = cv.map(p)
            parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="5" '
                         'fill="#c0392b"/>')
    if witness is not None:
        x, y = cv.map(np.asarray(witness, float))
        parts.append(f'<path d="M {_fmt(x - 7)} {_fmt(y - 7)} L {_fmt(x + 7)} '
                     f'{_fmt(y + 7)} M {_fmt(x - 7)} {_fmt(y + 7)} L '
                     f'{_fmt(x + 7)} {_fmt(y - 7)}" stroke="#8e44ad" '
                     'stroke-width="3" fill="none"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
