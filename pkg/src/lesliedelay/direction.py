"""Crossing directions across switching curves and the stable-region test."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from . import quasipoly as qp
from .errors import MultipleRootError, OffCurveError, PathThroughIntersectionError
from .model import ModelParams
from .quasipoly import QuasiPolynomial
from .switching import CurveSegment, mode_segments

MULTIPLE_ROOT_TOL = 1e-14
ON_CURVE_TOL = 1e-6
TRANSVERSAL_TOL = 1e-10
# Two curve crossings closer than this (in path parameter) are treated as one intersection point.
PATH_SEPARATION = 1e-6

GAINS_TWO = "gains-two"
LOSES_TWO = "loses-two"
TANGENT = "tangent"


@dataclass(frozen=True)
class CrossingData:
    R0: float
    I0: float
    R1: float
    I1: float
    R2: float
    I2: float
    omega: float

    @property
    def jacobian_det(self) -> float:
        """R1*I2 - R2*I1."""
        return self.R1 * self.I2 - self.R2 * self.I1

    @property
    def delta_matrix(self) -> np.ndarray:
        """d(tau1, tau2)/d(sigma, omega) on the curve (implicit function theorem)."""
        M = np.array([[self.R1, self.R2], [self.I1, self.I2]])
        N = np.array([[self.R0, -self.I0], [self.I0, self.R0]])
        return -np.linalg.solve(M, N)

    @property
    def delta(self) -> float:
        return float(np.linalg.det(self.delta_matrix))

    @property
    def two_more_on_right(self) -> bool:
        return self.delta > 0

    @property
    def tangent(self) -> np.ndarray:
        """(d tau1/d omega, d tau2/d omega): positive curve direction."""
        return self.delta_matrix[:, 1]

    @property
    def right_normal(self) -> np.ndarray:
        t = self.tangent
        return np.array([t[1], -t[0]])


def derivatives(q: QuasiPolynomial, lam: complex, tau1: float, tau2: float) -> tuple[complex, complex, complex]:
    """(dD/dlambda, dD/dtau1, dD/dtau2) at ``lam``."""
    P0, P1, P2, P3 = q.polys_at(lam)
    dP0, dP1, dP2, dP3 = q.dpolys_at(lam)
    e1 = np.exp(-lam * tau1)
    e2 = np.exp(-lam * tau2)
    e12 = e1 * e2
    d_lam = dP0 + (dP1 - tau1 * P1) * e1 + (dP2 - tau2 * P2) * e2 + (dP3 - (tau1 + tau2) * P3) * e12
    d_t1 = -lam * (P1 * e1 + P3 * e12)
    d_t2 = -lam * (P2 * e2 + P3 * e12)
    return complex(d_lam), complex(d_t1), complex(d_t2)


def partials(q: QuasiPolynomial, omega: float, tau1: float, tau2: float, check: bool = True) -> CrossingData:
    lam = 1j * omega
    if check:
        res = abs(qp.eval_D(q, lam, tau1, tau2))
        if res > ON_CURVE_TOL:
            raise OffCurveError(f"|D_{q.n}(i*{omega:.6g})| = {res:.3g} at ({tau1:.6g}, {tau2:.6g})")
    d_lam, d_t1, d_t2 = derivatives(q, lam, tau1, tau2)
    if abs(d_lam) ** 2 < MULTIPLE_ROOT_TOL:
        raise MultipleRootError(f"i*{omega:.6g} is a multiple root of D_{q.n}")
    return CrossingData(
        R0=d_lam.real, I0=d_lam.imag, R1=d_t1.real, I1=d_t1.imag, R2=d_t2.real, I2=d_t2.imag, omega=omega
    )


def crossing_direction(cd: CrossingData, sign: int) -> str:
    """Effect on the region to the right of a branch (positive omega direction)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    expected = GAINS_TWO if sign == 1 else LOSES_TWO
    observed = GAINS_TWO if cd.delta > 0 else LOSES_TWO
    if expected != observed:
        raise ValueError(f"branch sign {sign:+d} disagrees with delta={cd.delta:.3g}")
    return expected


def direction_value(cd: CrossingData, l1: float, l2: float) -> float:
    return -l1 * (cd.I0 * cd.I1 + cd.R0 * cd.R1) - l2 * (cd.I0 * cd.I2 + cd.R0 * cd.R2)


def direction_along(cd: CrossingData, l1: float, l2: float, tol: float = TRANSVERSAL_TOL) -> int | str:
    """+2 / -2 roots gained in the right half-plane when crossing along (l1, l2)."""
    if l1 == 0 and l2 == 0:
        raise ValueError("direction must be non-zero")
    val = direction_value(cd, l1, l2)
    if val > tol:
        return 2
    if val < -tol:
        return -2
    return TANGENT


def transversal_hopf(cd: CrossingData, l1: float, l2: float) -> bool:
    """Transversality hypothesis of the two-parameter Hopf theorem."""
    return direction_along(cd, l1, l2) != TANGENT


def _path_crossings(q: QuasiPolynomial, seg: CurveSegment, target: np.ndarray):
    """Crossings of the ray segment origin->target with one curve segment.

    Returns (s, omega, tau1, tau2) with s in (0, 1) the path parameter.
    """
    tau = seg.tau
    norm2 = float(target @ target)
    # Signed distance to the infinite line through origin and target.
    g = tau[:, 0] * target[1] - tau[:, 1] * target[0]
    out = []
    for i in np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0):
        if g[i] == 0 and g[i + 1] == 0:
            continue
        w0, w1 = seg.omega[i], seg.omega[i + 1]

        def gfun(w):
            t1, t2 = _tau_at(q, seg, w)
            return t1 * target[1] - t2 * target[0]

        if g[i] == 0:
            w = w0
        elif g[i + 1] == 0:
            w = w1
        else:
            w = brentq(gfun, w0, w1, xtol=1e-15, rtol=1e-15)
        t1, t2 = _tau_at(q, seg, w)
        s = (t1 * target[0] + t2 * target[1]) / norm2
        if 0.0 < s < 1.0:
            out.append((s, w, t1, t2))
    return out


def _tau_at(q, seg, w):
    from .switching import tau_curve

    t1, t2 = tau_curve(q, w, seg.sign, seg.j1, seg.j2)
    return float(t1), float(t2)


def crossings_along_path(
    p: ModelParams, tau1: float, tau2: float, n_max: int, segments: dict | None = None
) -> list[tuple[int, float, int]]:
    """(mode, path parameter, +/-2) for every switching curve crossed from the origin."""
    target = np.array([tau1, tau2], dtype=float)
    if segments is None:
        segments = mode_segments(p, (max(tau1, 1e-9), max(tau2, 1e-9)), n_max=n_max)
    events = []
    for n, segs in segments.items():
        if n > n_max:
            continue
        q = qp.build(p, n)
        for seg in segs:
            for s, w, t1, t2 in _path_crossings(q, seg, target):
                cd = partials(q, w, t1, t2)
                effect = direction_along(cd, target[0], target[1])
                if effect == TANGENT:
                    raise PathThroughIntersectionError(
                        f"path is tangent to a switching curve at ({t1:.6g}, {t2:.6g})"
                    )
                events.append((n, s, effect))
    events.sort(key=lambda e: e[1])
    for (na, sa, _), (nb, sb, _) in zip(events, events[1:]):
        if sb - sa < PATH_SEPARATION:
            raise PathThroughIntersectionError(
                f"path meets two switching curves at parameter {sa:.9g}; perturb the endpoint"
            )
    return events


def unstable_root_count(p: ModelParams, tau1: float, tau2: float, n_max: int, segments: dict | None = None) -> int:
    """Number of characteristic roots with positive real part, summed over modes 0..n_max."""
    if tau1 < 0 or tau2 < 0:
        raise ValueError("delays must be non-negative")
    if tau1 == 0 and tau2 == 0:
        return 0
    return sum(effect for _, _, effect in crossings_along_path(p, tau1, tau2, n_max, segments))


def stable_region_check(p: ModelParams, tau1: float, tau2: float, n_max: int = 10, segments: dict | None = None) -> bool:
    return unstable_root_count(p, tau1, tau2, n_max, segments) == 0


def write_directions_csv(path: str | Path, q: QuasiPolynomial, segs) -> None:
    """Curve samples annotated with delta and the right-region effect."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("n", "j", "sign", "j1", "j2", "omega", "tau1", "tau2", "delta", "gains_on_right"))
        for s in segs:
            for om, t1, t2 in s.samples:
                try:
                    cd = partials(q, om, t1, t2)
                    delta = cd.delta
                    gains = int(delta > 0)
                except (MultipleRootError, np.linalg.LinAlgError):
                    delta, gains = math.nan, ""
                w.writerow([s.n, s.j, s.sign, s.j1, s.j2, f"{om:.12g}", f"{t1:.12g}", f"{t2:.12g}", f"{delta:.12g}", gains])
