"""Crossing sets and stability switching curves in the (tau1, tau2) plane."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from . import quasipoly as qp
from .quasipoly import QuasiPolynomial

SAMPLES_PER_INTERVAL = 400
OMEGA_FLOOR = 1e-4  # lower sampling limit for half-open intervals (0, b]
LINK_TOL = 1e-6
ANGLE_TOL = 1e-3

CSV_COLUMNS = ("n", "j", "sign", "j1", "j2", "omega", "tau1", "tau2")


@dataclass(frozen=True)
class CrossingInterval:
    n: int
    j: int
    a: float
    b: float
    delta1a: int | None
    delta2a: int | None
    delta1b: int
    delta2b: int

    @property
    def half_open(self) -> bool:
        return self.a == 0.0


@dataclass
class CurveSegment:
    n: int
    j: int
    sign: int
    j1: int
    j2: int
    samples: np.ndarray  # rows of (omega, tau1, tau2), omega increasing
    piece: int = 0
    unbounded: bool = False
    interval: CrossingInterval | None = field(default=None, repr=False)

    @property
    def key(self) -> tuple[int, int, int, int, int, int]:
        return (self.n, self.j, self.sign, self.j1, self.j2, self.piece)

    @property
    def omega(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def tau(self) -> np.ndarray:
        return self.samples[:, 1:3]

    def touches(self, endpoint: str) -> bool:
        """True when the sample list reaches the given interval endpoint."""
        if self.interval is None:
            return False
        if endpoint == "a":
            return (not self.interval.half_open) and self.samples[0, 0] == self.interval.a
        return self.samples[-1, 0] == self.interval.b


def _bit(theta: float, omega: float, name: str) -> int:
    k = round(theta / math.pi)
    if abs(theta - k * math.pi) > ANGLE_TOL:
        raise ValueError(f"{name}={theta:.6g} at omega={omega:.6g} is not a multiple of pi")
    return int(k)


def crossing_set(
    q: QuasiPolynomial,
    omega_max: float = qp.OMEGA_MAX,
    grid_points: int = qp.GRID_POINTS,
) -> list[CrossingInterval]:
    roots, starts_inside = qp.F_roots(q, omega_max, grid_points)
    edges = list(roots)
    if starts_inside:
        edges.insert(0, 0.0)
    if len(edges) % 2:
        raise ValueError(f"F_{q.n} is negative at omega_max={omega_max}; enlarge the search range")
    out = []
    for j, (a, b) in enumerate(zip(edges[0::2], edges[1::2]), start=1):
        ang_b = qp.angles(q, b)
        if a == 0.0:
            d1a = d2a = None
        else:
            ang_a = qp.angles(q, a)
            d1a = _bit(ang_a.theta1, a, "theta1")
            d2a = _bit(ang_a.theta2, a, "theta2")
        out.append(
            CrossingInterval(
                n=q.n,
                j=j,
                a=float(a),
                b=float(b),
                delta1a=d1a,
                delta2a=d2a,
                delta1b=_bit(ang_b.theta1, b, "theta1"),
                delta2b=_bit(ang_b.theta2, b, "theta2"),
            )
        )
    return out


def tau_curve(q: QuasiPolynomial, omega, sign: int, j1: int, j2: int):
    """Delay pair on branch ``sign`` with winding offsets (j1, j2).

    tau1 uses +sign*theta1 and tau2 uses -sign*theta2. Values may be negative.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    ang = qp.angles(q, omega)
    w = ang.omega
    tau1 = (sign * ang.theta1 - ang.phi1 + 2 * j1 * math.pi) / w
    tau2 = (-sign * ang.theta2 - ang.phi2 + 2 * j2 * math.pi) / w
    return tau1, tau2


def sample_omegas(interval: CrossingInterval, count: int = SAMPLES_PER_INTERVAL) -> np.ndarray:
    """Cosine-clustered frequencies over the interval, endpoints included."""
    a = OMEGA_FLOOR if interval.half_open else interval.a
    s = 0.5 * (1.0 - np.cos(np.linspace(0.0, math.pi, count)))
    w = a + (interval.b - a) * s
    w[0], w[-1] = a, interval.b
    return w


def _runs(mask: np.ndarray) -> list[slice]:
    idx = np.flatnonzero(np.diff(np.concatenate(([0], mask.astype(np.int8), [0]))))
    return [slice(s, e) for s, e in zip(idx[0::2], idx[1::2])]


def interval_segments(
    q: QuasiPolynomial,
    interval: CrossingInterval,
    window: tuple[float, float],
    count: int = SAMPLES_PER_INTERVAL,
) -> list[CurveSegment]:
    t1max, t2max = window
    w = sample_omegas(interval, count)
    ang = qp.angles(q, w)
    # tau >= 0 needs 2*j*pi >= phi -/+ theta >= -2*pi; tau <= tau_max needs j <= b*tau_max/(2 pi) + 1.
    j1_hi = math.ceil(interval.b * t1max / (2 * math.pi)) + 1
    j2_hi = math.ceil(interval.b * t2max / (2 * math.pi)) + 1
    out = []
    for sign in (1, -1):
        base1 = (sign * ang.theta1 - ang.phi1) / w
        base2 = (-sign * ang.theta2 - ang.phi2) / w
        for j1 in range(-1, j1_hi + 1):
            tau1 = base1 + 2 * j1 * math.pi / w
            for j2 in range(-1, j2_hi + 1):
                tau2 = base2 + 2 * j2 * math.pi / w
                keep = (tau1 >= 0) & (tau2 >= 0)
                inside = keep & (tau1 <= t1max) & (tau2 <= t2max)
                if not inside.any():
                    continue
                for piece, sl in enumerate(_runs(keep)):
                    if not inside[sl].any():
                        continue
                    out.append(
                        CurveSegment(
                            n=q.n,
                            j=interval.j,
                            sign=sign,
                            j1=j1,
                            j2=j2,
                            samples=np.column_stack((w[sl], tau1[sl], tau2[sl])),
                            piece=piece,
                            unbounded=interval.half_open and sl.start == 0,
                            interval=interval,
                        )
                    )
    return out


def generate_segments(
    q: QuasiPolynomial,
    window: tuple[float, float],
    count: int = SAMPLES_PER_INTERVAL,
    omega_max: float = qp.OMEGA_MAX,
    intervals: Iterable[CrossingInterval] | None = None,
) -> list[CurveSegment]:
    if window[0] <= 0 or window[1] <= 0:
        raise ValueError("window bounds must be positive")
    if intervals is None:
        intervals = crossing_set(q, omega_max)
    segs = []
    for iv in intervals:
        segs.extend(interval_segments(q, iv, window, count))
    segs.sort(key=lambda s: s.key)
    return segs


def mode_segments(
    p,
    window: tuple[float, float],
    n_max: int | None = None,
    count: int = SAMPLES_PER_INTERVAL,
    omega_max: float = qp.OMEGA_MAX,
) -> dict[int, list[CurveSegment]]:
    """Segments for modes 0, 1, ...

    With ``n_max`` None the scan stops at the first mode whose crossing set is
    empty; otherwise every mode up to ``n_max`` is reported (possibly empty).
    """
    out: dict[int, list[CurveSegment]] = {}
    n = 0
    while True:
        if n_max is not None and n > n_max:
            break
        q = qp.build(p, n)
        ivs = crossing_set(q, omega_max)
        if not ivs and n_max is None:
            break
        out[n] = generate_segments(q, window, count, omega_max, ivs)
        n += 1
    return out


def connectivity(segs: list[CurveSegment], tol: float = LINK_TOL) -> list[tuple[tuple, tuple, str]]:
    """Endpoint links between + and - branches found by coincidence of (tau1, tau2)."""
    links = []
    plus = [s for s in segs if s.sign == 1]
    minus = [s for s in segs if s.sign == -1]
    for sp in plus:
        for sm in minus:
            if (sp.n, sp.j) != (sm.n, sm.j):
                continue
            for tag, idx in (("a", 0), ("b", -1)):
                if not (sp.touches(tag) and sm.touches(tag)):
                    continue
                if np.hypot(*(sp.tau[idx] - sm.tau[idx])) < tol:
                    links.append((sp.key, sm.key, tag))
    return links


def predicted_partner(interval: CrossingInterval, j1: int, j2: int, tag: str) -> tuple[int, int]:
    """(j1, j2) of the minus branch joined to plus branch (j1, j2) at endpoint ``tag``."""
    if tag == "a":
        if interval.half_open:
            raise ValueError("half-open interval has no finite left endpoint")
        return j1 + interval.delta1a, j2 - interval.delta2a
    return j1 + interval.delta1b, j2 - interval.delta2b


def write_csv(path: str | Path, segs: Iterable[CurveSegment]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for s in segs:
            for om, t1, t2 in s.samples:
                w.writerow([s.n, s.j, s.sign, s.j1, s.j2, f"{om:.12g}", f"{t1:.12g}", f"{t2:.12g}"])


def write_links_csv(path: str | Path, links) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("n", "j", "plus_j1", "plus_j2", "minus_j1", "minus_j2", "endpoint"))
        for kp, km, tag in links:
            w.writerow((kp[0], kp[1], kp[3], kp[4], km[3], km[4], tag))
