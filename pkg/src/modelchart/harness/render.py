"""Static scatter renders of scenes and charts as hand-written SVG."""
import numpy as np

from .._io import atomic_write_text
from ..errors import EmptyInput

WIDTH = 640
HEIGHT = 400
MARGIN = 40
OTHER_STYLE = 'r="1.8" fill="#9aa4b1"'
VIP_STYLE = 'r="2.6" fill="#d62728"'


def _as_xy(points):
    if len(points) and hasattr(points[0], "x"):
        return np.array([[p.x, p.y] for p in points], dtype=float)
    xy = np.asarray(points, dtype=float)
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise ValueError(f"expected (N, 2) points, got shape {xy.shape}")
    return xy


def _fmt(v):
    return f"{v:.2f}"


def svg_scatter(points, vip_indices=(), title=""):
    """SVG text for a scatter of ``points`` with ``vip_indices`` highlighted.

    Axes are scaled to the finite points with equal aspect; non-finite
    points (failed estimates) are left out.
    """
    xy = _as_xy(points) if len(points) else np.empty((0, 2))
    finite = np.all(np.isfinite(xy), axis=1)
    if not finite.any():
        raise EmptyInput("nothing to render: no finite points")
    vip = np.zeros(len(xy), dtype=bool)
    vip[np.asarray(list(vip_indices), dtype=int)] = True

    lo = xy[finite].min(axis=0)
    hi = xy[finite].max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    scale = min((WIDTH - 2 * MARGIN) / span[0], (HEIGHT - 2 * MARGIN) / span[1])
    # centre the data box inside the plot area
    off = np.array([WIDTH, HEIGHT]) / 2 - scale * span / 2

    def px(p):
        return off[0] + scale * (p[0] - lo[0]), HEIGHT - (off[1] + scale * (p[1] - lo[1]))

    x0, y1 = px(lo)
    x1, y0 = px(hi)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" height="{_fmt(y1 - y0)}" '
        'fill="none" stroke="#444" stroke-width="0.8"/>',
        f'<text x="{_fmt(x0)}" y="{_fmt(y1 + 14)}" font-size="10" font-family="sans-serif">'
        f'{lo[0]:.4g}</text>',
        f'<text x="{_fmt(x1)}" y="{_fmt(y1 + 14)}" font-size="10" font-family="sans-serif" '
        f'text-anchor="end">{hi[0]:.4g}</text>',
        f'<text x="{_fmt(x0 - 4)}" y="{_fmt(y1)}" font-size="10" font-family="sans-serif" '
        f'text-anchor="end">{lo[1]:.4g}</text>',
        f'<text x="{_fmt(x0 - 4)}" y="{_fmt(y0 + 8)}" font-size="10" font-family="sans-serif" '
        f'text-anchor="end">{hi[1]:.4g}</text>',
    ]
    if title:
        safe = title.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        out.append(f'<text x="{WIDTH / 2}" y="20" font-size="13" font-family="sans-serif" '
                   f'text-anchor="middle">{safe}</text>')
    # VIP marks drawn last so they sit on top
    for group, style in ((~vip, OTHER_STYLE), (vip, VIP_STYLE)):
        for k in np.flatnonzero(group & finite):
            cx, cy = px(xy[k])
            out.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" {style}/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_chart_svg(points, vip_indices, path, title=""):
    """Write a scatter SVG of ``points`` to ``path``; returns the path."""
    atomic_write_text(path, svg_scatter(points, vip_indices, title))
    return path
