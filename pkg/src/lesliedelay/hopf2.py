"""Double-Hopf candidates: intersections of two switching curves."""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from . import quasipoly as qp
from .direction import derivatives
from .model import ModelParams
from .switching import CurveSegment

NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-13
STRONG_BAND = 1e-3
NEAR_BAND = 1e-2
# Intersections closer than this (tau distance and frequency) are duplicates.
DEDUP_TOL = 1e-7


@dataclass(frozen=True)
class DoubleHopfPoint:
    tau1_star: float
    tau2_star: float
    omega1: float
    omega2: float
    n1: int
    n2: int
    resonance_flag: str = "none"
    resonance_ratio: tuple[int, int] | None = None
    refined: bool = True
    residual: float = float("nan")


def _polyline_crossings(A: np.ndarray, B: np.ndarray):
    """Proper crossings between two polylines given as (k, 2) arrays.

    Yields (i, k, s, t): segment i of A at fraction s meets segment k of B at t.
    """
    p = A[:-1]
    r = np.diff(A, axis=0)
    q = B[:-1]
    sv = np.diff(B, axis=0)
    # Bounding-box prefilter.
    amin = np.minimum(A[:-1], A[1:])
    amax = np.maximum(A[:-1], A[1:])
    bmin = np.minimum(B[:-1], B[1:])
    bmax = np.maximum(B[:-1], B[1:])
    if amax[:, 0].max() < bmin[:, 0].min() or bmax[:, 0].max() < amin[:, 0].min():
        return
    if amax[:, 1].max() < bmin[:, 1].min() or bmax[:, 1].max() < amin[:, 1].min():
        return
    for i in range(len(r)):
        ov = (
            (bmax[:, 0] >= amin[i, 0])
            & (bmin[:, 0] <= amax[i, 0])
            & (bmax[:, 1] >= amin[i, 1])
            & (bmin[:, 1] <= amax[i, 1])
        )
        ks = np.flatnonzero(ov)
        if ks.size == 0:
            continue
        den = r[i, 0] * sv[ks, 1] - r[i, 1] * sv[ks, 0]
        qp_ = q[ks] - p[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (qp_[:, 0] * sv[ks, 1] - qp_[:, 1] * sv[ks, 0]) / den
            t = (qp_[:, 0] * r[i, 1] - qp_[:, 1] * r[i, 0]) / den
        hit = (den != 0) & (s >= 0) & (s <= 1) & (t >= 0) & (t <= 1)
        for k, ss, tt in zip(ks[hit], s[hit], t[hit]):
            yield i, int(k), float(ss), float(tt)


def _system(qa, qb, x):
    t1, t2, w1, w2 = x
    da = qp.eval_D(qa, 1j * w1, t1, t2)
    db = qp.eval_D(qb, 1j * w2, t1, t2)
    return np.array([da.real, da.imag, db.real, db.imag])


def _jacobian(qa, qb, x):
    t1, t2, w1, w2 = x
    la, a1, a2 = derivatives(qa, 1j * w1, t1, t2)
    lb, b1, b2 = derivatives(qb, 1j * w2, t1, t2)
    # d/domega D(i omega) = i * dD/dlambda.
    dwa = 1j * la
    dwb = 1j * lb
    return np.array(
        [
            [a1.real, a2.real, dwa.real, 0.0],
            [a1.imag, a2.imag, dwa.imag, 0.0],
            [b1.real, b2.real, 0.0, dwb.real],
            [b1.imag, b2.imag, 0.0, dwb.imag],
        ]
    )


def refine(qa, qb, x0, max_iter: int = NEWTON_MAX_ITER, tol: float = NEWTON_TOL):
    """Damped Newton on the 4x4 system; returns (x, converged, residual)."""
    x = np.asarray(x0, dtype=float)
    r = _system(qa, qb, x)
    nr = np.linalg.norm(r)
    for _ in range(max_iter):
        if nr < tol:
            return x, True, float(np.abs(r).max())
        try:
            step = np.linalg.solve(_jacobian(qa, qb, x), -r)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-6:
            xn = x + lam * step
            rn = _system(qa, qb, xn)
            if np.linalg.norm(rn) < nr:
                break
            lam *= 0.5
        else:
            break
        x, r, nr = xn, rn, np.linalg.norm(rn)
    return x, bool(nr < tol), float(np.abs(r).max())


def resonance_check(pt: DoubleHopfPoint, strong: float = STRONG_BAND, near: float = NEAR_BAND):
    """Nearest low-order ratio m:n (1 <= m, n <= 3) and its band classification."""
    ratio = pt.omega1 / pt.omega2
    best = None
    for m, n in itertools.product(range(1, 4), repeat=2):
        gap = abs(ratio - m / n)
        if best is None or gap < best[0]:
            best = (gap, (m, n))
    gap, mn = best
    if gap < strong:
        return "strong", mn
    if gap < near:
        return "near", mn
    return "none", None


def intersect(qa, segA: CurveSegment, qb, segB: CurveSegment) -> list[DoubleHopfPoint]:
    """Refined intersections of two curve segments (possibly from different modes)."""
    if segA.n != qa.n or segB.n != qb.n:
        raise ValueError("quasipolynomial does not match segment mode")
    out: list[DoubleHopfPoint] = []
    for i, k, s, t in _polyline_crossings(segA.tau, segB.tau):
        w1 = segA.omega[i] + s * (segA.omega[i + 1] - segA.omega[i])
        w2 = segB.omega[k] + t * (segB.omega[k + 1] - segB.omega[k])
        tau = segA.tau[i] + s * (segA.tau[i + 1] - segA.tau[i])
        x, ok, res = refine(qa, qb, [tau[0], tau[1], w1, w2])
        if abs(x[2] - x[3]) < 1e-9:
            continue  # same root pair on both curves, not a double Hopf point
        if not ok:
            x = np.array([tau[0], tau[1], w1, w2])
        pt = _ordered(x, qa.n, qb.n, ok, res)
        if not any(_same(pt, o) for o in out):
            out.append(pt)
    return out


def _ordered(x, na, nb, ok, res) -> DoubleHopfPoint:
    t1, t2, wa, wb = (float(v) for v in x)
    if wa > wb:
        wa, wb, na, nb = wb, wa, nb, na
    pt = DoubleHopfPoint(t1, t2, wa, wb, na, nb, refined=ok, residual=res)
    flag, mn = resonance_check(pt)
    return replace(pt, resonance_flag=flag, resonance_ratio=mn)


def _same(a: DoubleHopfPoint, b: DoubleHopfPoint) -> bool:
    return (
        abs(a.tau1_star - b.tau1_star) < DEDUP_TOL
        and abs(a.tau2_star - b.tau2_star) < DEDUP_TOL
        and abs(a.omega1 - b.omega1) < DEDUP_TOL
        and abs(a.omega2 - b.omega2) < DEDUP_TOL
    )


def find_double_hopf(
    p: ModelParams, segments: dict[int, list[CurveSegment]], window: tuple[float, float] | None = None
) -> list[DoubleHopfPoint]:
    """All pairwise curve intersections across every mode, inside ``window``."""
    qs = {n: qp.build(p, n) for n in segments}
    flat = [s for n in sorted(segments) for s in segments[n]]
    found: list[DoubleHopfPoint] = []
    for a, b in itertools.combinations(flat, 2):
        if a.n == b.n and a.j == b.j and a.sign == b.sign and a.j1 == b.j1 and a.j2 == b.j2:
            continue
        for pt in intersect(qs[a.n], a, qs[b.n], b):
            if window is not None and not (0 <= pt.tau1_star <= window[0] and 0 <= pt.tau2_star <= window[1]):
                continue
            if not any(_same(pt, o) for o in found):
                found.append(pt)
    found.sort(key=lambda h: (h.tau1_star + h.tau2_star, h.tau1_star))
    return found


def on_stability_boundary(p: ModelParams, pt: DoubleHopfPoint, n_max: int, radius: float = 1e-3, probes: int = 24) -> bool:
    """True when some delay pair on a small ring around pt is asymptotically stable."""
    from .direction import stable_region_check
    from .errors import PathThroughIntersectionError
    from .switching import mode_segments

    segs = mode_segments(p, (pt.tau1_star + 2 * radius, pt.tau2_star + 2 * radius), n_max=n_max)
    for ang in np.linspace(0.0, 2 * np.pi, probes, endpoint=False):
        t1 = pt.tau1_star + radius * np.cos(ang)
        t2 = pt.tau2_star + radius * np.sin(ang)
        if t1 <= 0 or t2 <= 0:
            continue
        try:
            if stable_region_check(p, t1, t2, n_max, segments=segs):
                return True
        except PathThroughIntersectionError:
            continue
    return False


def write_csv(path: str | Path, pts: Iterable[DoubleHopfPoint]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("tau1", "tau2", "omega1", "omega2", "n1", "n2", "resonance_flag", "refined", "residual"))
        for h in pts:
            w.writerow(
                (
                    f"{h.tau1_star:.12g}",
                    f"{h.tau2_star:.12g}",
                    f"{h.omega1:.12g}",
                    f"{h.omega2:.12g}",
                    h.n1,
                    h.n2,
                    h.resonance_flag,
                    int(h.refined),
                    f"{h.residual:.3g}",
                )
            )
