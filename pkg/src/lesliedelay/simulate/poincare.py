"""Poincare sections at node x = 0 and attractor classification."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from ..model import Equilibrium
from .integrator import Trajectory

SECTION_V = "v=v*"
SECTION_UDOT = "du/dt=0"
SECTIONS = (SECTION_V, SECTION_UDOT)

MIN_HITS = 20
EQUILIBRIUM_AMPLITUDE = 1e-6
MAX_CLUSTERS = 8
CLUSTER_RADIUS = 1e-3
# A closed curve may have no chain gap larger than this multiple of the median gap.
GAP_RATIO = 25.0
ROOT_XTOL = 1e-14


class TooFewHitsWarning(UserWarning):
    pass


@dataclass
class PoincareResult:
    section: str
    points: np.ndarray  # (N, 2): u(0,t), u(0,t - tau1)
    times: np.ndarray
    amplitude: float
    classification: str | None = None


def _cubic(y0, d0, y1, d1, s, h):
    s2 = s * s
    s3 = s2 * s
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1


def _cubic_slope(y0, d0, y1, d1, s, h):
    s2 = s * s
    return (6 * s2 - 6 * s) * y0 / h + (3 * s2 - 4 * s + 1) * d0 + (-6 * s2 + 6 * s) * y1 / h + (3 * s2 - 2 * s) * d1


def _hits(traj: Trajectory, section: str, e: Equilibrium):
    t = traj.t
    u, v, ul = traj.column("u0"), traj.column("v0"), traj.column("u0_lag")
    du, dv, dul = traj.column("du0"), traj.column("dv0"), traj.column("du0_lag")
    if section == SECTION_V:
        g = v - e.v_star
        # Upward crossings only.
        idx = np.nonzero((g[:-1] < 0) & (g[1:] >= 0))[0]

        def fn(i, s, h):
            return _cubic(g[i], dv[i], g[i + 1], dv[i + 1], s, h)

    elif section == SECTION_UDOT:
        # Maxima of u: slope of the interpolant goes from positive to non-positive.
        idx = np.nonzero((du[:-1] > 0) & (du[1:] <= 0))[0]

        def fn(i, s, h):
            return _cubic_slope(u[i], du[i], u[i + 1], du[i + 1], s, h)

    else:
        raise ValueError(f"unknown section {section!r}")
    times, pts, resid = [], [], []
    for i in idx:
        h = t[i + 1] - t[i]
        f0, f1 = fn(i, 0.0, h), fn(i, 1.0, h)
        if f1 == 0:
            s = 1.0
        elif f0 * f1 > 0:
            # Interpolant disagrees with the bracket; fall back to the node.
            continue
        else:
            s = brentq(lambda s: fn(i, s, h), 0.0, 1.0, xtol=ROOT_XTOL)
        times.append(t[i] + s * h)
        pts.append((_cubic(u[i], du[i], u[i + 1], du[i + 1], s, h), _cubic(ul[i], dul[i], ul[i + 1], dul[i + 1], s, h)))
        resid.append(abs(fn(i, s, h)))
    return np.array(times), np.array(pts).reshape(-1, 2), np.array(resid)


def section_residuals(traj: Trajectory, e: Equilibrium, section: str = SECTION_V) -> np.ndarray:
    """Section-condition residual of each hit, evaluated on the interpolant."""
    return _hits(traj, section, e)[2]


def poincare(traj: Trajectory, e: Equilibrium, section: str = SECTION_V) -> PoincareResult:
    u, v = traj.column("u0"), traj.column("v0")
    amplitude = float(max(np.ptp(u), np.ptp(v))) if u.size else 0.0
    times, pts, _ = _hits(traj, section, e)
    pr = PoincareResult(section=section, points=pts, times=times, amplitude=amplitude)
    if amplitude < EQUILIBRIUM_AMPLITUDE:
        pr.classification = "equilibrium"
    elif len(pts) < MIN_HITS:
        warnings.warn(f"only {len(pts)} section hits; classification withheld", TooFewHitsWarning, stacklevel=2)
    else:
        pr.classification = classify(pr)
    return pr


def _clusters(pts: np.ndarray, radius: float) -> int | None:
    """Number of greedy clusters of the given radius, or None beyond MAX_CLUSTERS."""
    centres: list[np.ndarray] = []
    for q in pts:
        if any(np.hypot(*(q - c)) < radius for c in centres):
            continue
        centres.append(q)
        if len(centres) > MAX_CLUSTERS:
            return None
    return len(centres)


def _closed_chain(pts: np.ndarray, gap_ratio: float = GAP_RATIO) -> bool:
    """Greedy nearest-neighbour tour; closed curve if no gap is anomalously large."""
    pts = np.unique(np.round(pts, 12), axis=0)
    n = len(pts)
    if n < MIN_HITS:
        return False
    tree = cKDTree(pts)
    visited = np.zeros(n, dtype=bool)
    cur = int(np.argmin(pts[:, 0]))
    start = cur
    visited[cur] = True
    gaps = []
    for _ in range(n - 1):
        k = 8
        while True:
            d, j = tree.query(pts[cur], k=min(k, n))
            free = [(dd, jj) for dd, jj in zip(np.atleast_1d(d), np.atleast_1d(j)) if not visited[jj]]
            if free or k >= n:
                break
            k *= 4
        if not free:
            d_all = np.hypot(*(pts - pts[cur]).T)
            d_all[visited] = np.inf
            jj = int(np.argmin(d_all))
            dd = d_all[jj]
        else:
            dd, jj = free[0]
        gaps.append(dd)
        visited[jj] = True
        cur = int(jj)
    gaps.append(float(np.hypot(*(pts[cur] - pts[start]))))
    gaps = np.asarray(gaps)
    med = float(np.median(gaps))
    if med == 0:
        return False
    return float(gaps.max()) <= gap_ratio * med


def classify(pr: PoincareResult) -> str:
    if pr.amplitude < EQUILIBRIUM_AMPLITUDE:
        return "equilibrium"
    pts = pr.points
    if len(pts) and _clusters(pts, CLUSTER_RADIUS) is not None:
        return "periodic"
    if _closed_chain(pts):
        return "torus2"
    return "torus3-or-chaos"
