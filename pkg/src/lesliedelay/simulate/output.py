"""CSV and minimal SVG writers for trajectories and section hits."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .integrator import Trajectory
from .poincare import PoincareResult


def write_trajectory_csv(path: str | Path, traj: Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("t", "u0", "v0", "u0_lag"))
        for row in traj.data[:, :4]:
            w.writerow(tuple(f"{x:.12g}" for x in row))


def write_poincare_csv(path: str | Path, results: list[PoincareResult]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("section", "t", "u0", "u0_lag"))
        for pr in results:
            for t, (a, b) in zip(pr.times, pr.points):
                w.writerow((pr.section, f"{t:.12g}", f"{a:.12g}", f"{b:.12g}"))


def svg_document(
    polylines: list[np.ndarray] = (),
    points: list[np.ndarray] = (),
    size: int = 480,
    margin: int = 40,
    labels: tuple[str, str] = ("x", "y"),
    bounds: tuple[float, float, float, float] | None = None,
) -> str:
    """Static SVG with axes, polylines and dot markers in a fixed viewport."""
    everything = [np.asarray(a).reshape(-1, 2) for a in (*polylines, *points) if len(a)]
    if bounds is None:
        if everything:
            allp = np.vstack(everything)
            x0, y0 = allp.min(axis=0)
            x1, y1 = allp.max(axis=0)
        else:
            x0 = y0 = 0.0
            x1 = y1 = 1.0
    else:
        x0, x1, y0, y1 = bounds
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    span = size - 2 * margin

    def tx(p):
        p = np.asarray(p).reshape(-1, 2)
        X = margin + (p[:, 0] - x0) / (x1 - x0) * span
        Y = size - margin - (p[:, 1] - y0) / (y1 - y0) * span
        return X, Y

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="{margin}" y="{margin}" width="{span}" height="{span}" fill="none" stroke="black"/>',
        f'<text x="{size / 2}" y="{size - 8}" text-anchor="middle" font-size="12">{labels[0]} [{x0:.4g}, {x1:.4g}]</text>',
        f'<text x="12" y="{size / 2}" font-size="12" transform="rotate(-90 12 {size / 2})" '
        f'text-anchor="middle">{labels[1]} [{y0:.4g}, {y1:.4g}]</text>',
    ]
    for line in polylines:
        if len(line) < 2:
            continue
        X, Y = tx(line)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(X, Y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="1"/>')
    for group in points:
        if not len(group):
            continue
        X, Y = tx(group)
        out.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="1.2" fill="crimson"/>' for a, b in zip(X, Y))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path: str | Path, text: str) -> None:
    Path(path).write_text(text)
