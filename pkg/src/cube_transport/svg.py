"""Tiny self-contained SVG writer for concentration profiles.

One plot per profile: measured mass (solid), target bound (dashed), and a
shaded 3-standard-error band when the profile is empirical. No plotting
dependency; the output is a plain polyline SVG.
"""

from __future__ import annotations

import numpy as np

from .concentration import ConcentrationProfile

WIDTH = 640
HEIGHT = 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 20, 36, 48


def _points(xs, ys, x0, x1) -> str:
    px = MARGIN_L + (np.asarray(xs) - x0) / (x1 - x0) * (WIDTH - MARGIN_L - MARGIN_R)
    py = HEIGHT - MARGIN_B - np.clip(np.asarray(ys), 0.0, 1.0) * (HEIGHT - MARGIN_T - MARGIN_B)
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))


def profile_svg(profile: ConcentrationProfile) -> str:
    ts = profile.ts
    x0, x1 = float(ts[0]), float(ts[-1])
    if x1 <= x0:
        x1 = x0 + 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    title = profile.label or "halfspace profile"
    parts.append(f'<text x="{MARGIN_L}" y="22" font-family="monospace" font-size="14">'
                 f'{title} (alpha={profile.alpha:.4g})</text>')
    # axes
    y_axis_x = MARGIN_L
    x_axis_y = HEIGHT - MARGIN_B
    parts.append(f'<line x1="{y_axis_x}" y1="{MARGIN_T}" x2="{y_axis_x}" y2="{x_axis_y}" '
                 f'stroke="black"/>')
    parts.append(f'<line x1="{y_axis_x}" y1="{x_axis_y}" x2="{WIDTH - MARGIN_R}" '
                 f'y2="{x_axis_y}" stroke="black"/>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = x_axis_y - frac * (HEIGHT - MARGIN_T - MARGIN_B)
        parts.append(f'<line x1="{y_axis_x - 4}" y1="{y:.2f}" x2="{y_axis_x}" '
                     f'y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{y_axis_x - 8}" y="{y + 4:.2f}" font-family="monospace" '
                     f'font-size="11" text-anchor="end">{frac:.2f}</text>')
        x = y_axis_x + frac * (WIDTH - MARGIN_L - MARGIN_R)
        tick_t = x0 + frac * (x1 - x0)
        parts.append(f'<line x1="{x:.2f}" y1="{x_axis_y}" x2="{x:.2f}" '
                     f'y2="{x_axis_y + 4}" stroke="black"/>')
        parts.append(f'<text x="{x:.2f}" y="{x_axis_y + 18}" font-family="monospace" '
                     f'font-size="11" text-anchor="middle">{tick_t:.3g}</text>')
    parts.append(f'<text x="{(WIDTH + MARGIN_L - MARGIN_R) / 2:.0f}" y="{HEIGHT - 10}" '
                 f'font-family="monospace" font-size="12" text-anchor="middle">t</text>')
    parts.append(f'<text x="14" y="{(HEIGHT + MARGIN_T - MARGIN_B) / 2:.0f}" '
                 f'font-family="monospace" font-size="12" '
                 f'transform="rotate(-90 14 {(HEIGHT + MARGIN_T - MARGIN_B) / 2:.0f})" '
                 f'text-anchor="middle">mass</text>')
    if np.any(profile.std_error > 0):
        upper = profile.measured + 3.0 * profile.std_error
        lower = profile.measured - 3.0 * profile.std_error
        band = _points(ts, upper, x0, x1) + " " + _points(ts[::-1], lower[::-1], x0, x1)
        parts.append(f'<polygon points="{band}" fill="#4477aa" fill-opacity="0.18" '
                     f'stroke="none"/>')
    parts.append(f'<polyline points="{_points(ts, profile.measured, x0, x1)}" '
                 f'fill="none" stroke="#4477aa" stroke-width="2"/>')
    parts.append(f'<polyline points="{_points(ts, profile.bound, x0, x1)}" '
                 f'fill="none" stroke="#cc3311" stroke-width="2" stroke-dasharray="6 4"/>')
    legend_y = MARGIN_T + 12
    parts.append(f'<line x1="{WIDTH - 210}" y1="{legend_y}" x2="{WIDTH - 180}" '
                 f'y2="{legend_y}" stroke="#4477aa" stroke-width="2"/>')
    parts.append(f'<text x="{WIDTH - 174}" y="{legend_y + 4}" font-family="monospace" '
                 f'font-size="11">measured</text>')
    parts.append(f'<line x1="{WIDTH - 210}" y1="{legend_y + 16}" x2="{WIDTH - 180}" '
                 f'y2="{legend_y + 16}" stroke="#cc3311" stroke-width="2" '
                 f'stroke-dasharray="6 4"/>')
    parts.append(f'<text x="{WIDTH - 174}" y="{legend_y + 20}" font-family="monospace" '
                 f'font-size="11">1-exp(-(t/a)^2)</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def write_profile_svg(profile: ConcentrationProfile, path) -> None:
    with open(path, "w") as fh:
        fh.write(profile_svg(profile))
