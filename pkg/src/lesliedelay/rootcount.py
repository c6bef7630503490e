"""Argument-principle count of characteristic roots in the right half-plane.

For Re(lam) >= 0 every factor lam + c with c >= 0 satisfies |lam + c| >= |lam|,
so |P0| >= |lam|^2 while |P1| + |P2| + |P3| <= c1 |lam| + c0. Beyond the
radius where |lam|^2 exceeds that bound there are no roots, and the box
[0, R] x [-R, R] contains every unstable root.
"""
from __future__ import annotations

import math

import numpy as np

from . import quasipoly as qp

INITIAL_POINTS = 10_000
MAX_ARG_STEP = math.pi / 8
MAX_DEPTH = 40
INTEGER_TOL = 1e-6
# Fixed box for crossing checks: holds every root that reaches the imaginary
# axis (switching frequencies stay below 1.2) with room to spare.
CROSSING_BOX = (0.0, 2.0, -3.0, 3.0)


class ContourError(RuntimeError):
    """The contour passes (numerically) through a root."""


def root_free_radius(q: qp.QuasiPolynomial, margin: float = 1.25) -> float:
    c1 = sum(abs(c[1]) for c in (q.p1, q.p2) if len(c) > 1)
    c0 = sum(abs(c[0]) for c in (q.p1, q.p2, q.p3))
    R = 0.5 * (c1 + math.sqrt(c1 * c1 + 4 * c0))
    return max(margin * R, 1.0)


def rectangle(x0: float, x1: float, y0: float, y1: float, n: int) -> np.ndarray:
    """Counter-clockwise boundary samples of the box, without repeating the start."""
    per = max(n // 4, 8)
    s = np.linspace(0.0, 1.0, per, endpoint=False)
    bottom = (x0 + (x1 - x0) * s) + 1j * y0
    right = x1 + 1j * (y0 + (y1 - y0) * s)
    top = (x1 - (x1 - x0) * s) + 1j * y1
    left = x0 + 1j * (y1 - (y1 - y0) * s)
    return np.concatenate([bottom, right, top, left])


def arg_change(f, a: complex, b: complex, fa: complex, fb: complex, max_step: float = MAX_ARG_STEP) -> float:
    """Change of arg f along the segment a -> b, bisecting until every step is small."""
    total = 0.0
    stack = [(a, b, fa, fb, 0)]
    while stack:
        x, y, fx, fy, depth = stack.pop()
        if fx == 0 or fy == 0:
            raise ContourError(f"characteristic function vanishes on the contour near {x}")
        step = float(np.angle(fy / fx))
        if abs(step) <= max_step:
            total += step
            continue
        if depth >= MAX_DEPTH:
            raise ContourError(f"argument jump not resolved near {x}")
        m = 0.5 * (x + y)
        fm = f(m)
        stack.append((x, m, fx, fm, depth + 1))
        stack.append((m, y, fm, fy, depth + 1))
    return total


def winding_number(f, contour: np.ndarray, values: np.ndarray | None = None) -> float:
    """Net change of arg f around the closed polygon over 2 pi."""
    z = np.append(contour, contour[0])
    fz = np.array([f(x) for x in contour]) if values is None else np.asarray(values)
    fz = np.append(fz, fz[0])
    if np.any(fz == 0):
        raise ContourError("characteristic function vanishes on the contour")
    steps = np.angle(fz[1:] / fz[:-1])
    total = float(steps[np.abs(steps) <= MAX_ARG_STEP].sum())
    for i in np.nonzero(np.abs(steps) > MAX_ARG_STEP)[0]:
        total += arg_change(f, z[i], z[i + 1], fz[i], fz[i + 1])
    return total / (2 * math.pi)


def count_unstable(
    q: qp.QuasiPolynomial,
    tau1: float,
    tau2: float,
    box: tuple[float, float, float, float] | None = None,
    points: int = INITIAL_POINTS,
) -> int:
    """Roots of D_n inside the box, counted with multiplicity (default: all with Re > 0)."""
    if box is None:
        R = root_free_radius(q)
        box = (0.0, R, -R, R)
    contour = rectangle(*box, points)

    def f(lam):
        return complex(qp.eval_D(q, lam, tau1, tau2))

    total = winding_number(f, contour, qp.eval_D(q, contour, tau1, tau2))
    k = round(total)
    if abs(total - k) > INTEGER_TOL:
        raise ContourError(f"winding number {total} is not an integer")
    return int(k)
