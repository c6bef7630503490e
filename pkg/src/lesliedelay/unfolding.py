"""Polar unfolding of the double-Hopf normal form and its local bifurcation set.

The cubic normal-form coefficients are inputs. From them we build the planar
amplitude system

    rho1' = rho1 (nu1 + rho1^2 + b rho2^2)
    rho2' = rho2 (nu2 + c rho1^2 + d rho2^2)

classify it among the twelve unfoldings (Ia ... VIII) and map its critical
rays back into the (tau1, tau2) plane.
"""
from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ChartRangeError,
    DegenerateUnfoldingError,
    OnBoundaryError,
    SingularMapError,
    UnsupportedModeError,
)
from .hopf2 import DoubleHopfPoint
from .model import ModelParams, equilibrium, linearize

CHART_RADIUS = 0.15
ANGLE_TOL = 1e-9

K_NAMES = ("K11", "K21", "K13", "K23", "K2100", "K1011", "K0021", "K1110")

# (d, b, c, d - bc) sign patterns.
CASE_TABLE = {
    (1, 1, 1, 1): "Ia",
    (1, 1, 1, -1): "Ib",
    (1, 1, -1, 1): "II",
    (1, -1, 1, 1): "III",
    (1, -1, -1, 1): "IVa",
    (1, -1, -1, -1): "IVb",
    (-1, 1, 1, -1): "V",
    (-1, 1, -1, 1): "VIa",
    (-1, 1, -1, -1): "VIb",
    (-1, -1, 1, 1): "VIIa",
    (-1, -1, 1, -1): "VIIb",
    (-1, -1, -1, -1): "VIII",
}


@dataclass(frozen=True)
class EigenData:
    r12: complex
    r32: complex
    r12_star: complex
    r32_star: complex
    D1: complex
    D2: complex


@dataclass(frozen=True)
class NormalFormCoeffs:
    K11: complex
    K21: complex
    K13: complex
    K23: complex
    K2100: complex
    K1011: complex
    K0021: complex
    K1110: complex


# Coefficients printed for the double-Hopf point of the reference parameter set.
REFERENCE_K = NormalFormCoeffs(
    K11=0.0947 - 0.0071j,
    K21=-0.2689 + 0.4408j,
    K13=0.1196 + 1.2137j,
    K23=1.6381 - 2.5531j,
    K2100=0.0154 - 0.0146j,
    K1011=0.4878 + 0.2082j,
    K0021=-0.9861 - 0.9526j,
    K1110=-0.1778 - 0.1523j,
)


@dataclass(frozen=True)
class UnfoldingParams:
    eps1: int
    eps2: int
    nu_map: np.ndarray
    b: float
    c: float
    d: int
    d_minus_bc: float
    case_label: str

    def nu(self, sigma1: float, sigma2: float) -> np.ndarray:
        return self.nu_map @ np.array([sigma1, sigma2], dtype=float)


@dataclass(frozen=True)
class SemiLine:
    label: str
    kind: str
    point: tuple[float, float]
    direction: tuple[float, float]  # unit vector in (tau1, tau2)
    nu_direction: tuple[float, float]

    @property
    def reciprocal_slope(self) -> float:
        """d tau1 / d tau2, the denominator in tau2 = (tau1 - tau1*)/s + tau2*."""
        return self.direction[0] / self.direction[1]

    @property
    def side(self) -> str:
        dx, dy = self.direction
        if abs(dx) > 1e-12:
            return f"tau1{'>' if dx > 0 else '<'}{self.point[0]:.6g}"
        return f"tau2{'>' if dy > 0 else '<'}{self.point[1]:.6g}"

    @property
    def angle(self) -> float:
        return math.atan2(self.direction[1], self.direction[0]) % (2 * math.pi)


def eigen_data(p: ModelParams, pt: DoubleHopfPoint) -> EigenData:
    """Eigenvector and adjoint constants at a mode-0 double-Hopf point."""
    if pt.n1 != 0 or pt.n2 != 0:
        raise UnsupportedModeError("eigen data are only provided for n1 = n2 = 0")
    e = equilibrium(p)
    q = p.gamma * (1.0 - p.m)
    k = p.mode_scale(0)
    t1, t2 = pt.tau1_star, pt.tau2_star

    def pair(w):
        e2 = cmath.exp(-1j * w * t2)
        den = p.r2 * e2 + p.d2 * k + 1j * w
        r = q * p.r2 * e2 / den
        r_star = -p.a * (1.0 - p.m) * e.u_star / den
        norm = (
            1
            + r_star * r
            - t1 * (p.r1 / p.K) * e.u_star * cmath.exp(-1j * w * t1)
            + r_star * q * p.r2 * t2 * e2
            - p.r2 * t2 * e2 * r_star * r
        )
        return r, r_star, 1.0 / norm

    r12, r12s, D1 = pair(pt.omega1)
    r32, r32s, D2 = pair(pt.omega2)
    return EigenData(r12=r12, r32=r32, r12_star=r12s, r32_star=r32s, D1=D1, D2=D2)


def bilinear_pairing(p: ModelParams, pt: DoubleHopfPoint, which: int = 1) -> complex:
    """(psi, phi) for the scaled system (time unit tau1*), in closed form.

    The delay measure has atoms at theta = 0, -1 and -tau2*/tau1*; each atom
    at theta_j contributes -theta_j e^{i w tau1* theta_j} psi(0) M_j phi(0).
    """
    ed = eigen_data(p, pt)
    lin = linearize(p)
    t1, t2 = pt.tau1_star, pt.tau2_star
    w, r, rs, Dn = (pt.omega1, ed.r12, ed.r12_star, ed.D1) if which == 1 else (pt.omega2, ed.r32, ed.r32_star, ed.D2)
    row = np.array([1.0, rs])
    col = np.array([1.0, r])
    total = row @ col
    for theta, M in ((-1.0, t1 * lin.B), (-t2 / t1, t1 * lin.C)):
        total -= theta * cmath.exp(1j * w * t1 * theta) * (row @ M @ col)
    return Dn * total


def _sign(x: float) -> int:
    return 1 if x > 0 else -1


def classify_case(b: float, c: float, d: int) -> str:
    dbc = d - b * c
    if b == 0 or c == 0 or dbc == 0:
        raise DegenerateUnfoldingError(f"b={b}, c={c}, d-bc={dbc} lies on a classification boundary")
    return CASE_TABLE[(d, _sign(b), _sign(c), _sign(dbc))]


def unfold(K: NormalFormCoeffs, pt: DoubleHopfPoint | None = None) -> UnfoldingParams:
    if K.K2100.real == 0 or K.K0021.real == 0:
        raise DegenerateUnfoldingError("Re K2100 and Re K0021 must be non-zero")
    eps1 = _sign(K.K2100.real)
    eps2 = _sign(K.K0021.real)
    b = eps1 * eps2 * K.K1011.real / K.K0021.real
    c = K.K1110.real / K.K2100.real
    d = eps1 * eps2
    nu_map = eps1 * np.array([[K.K11.real, K.K21.real], [K.K13.real, K.K23.real]])
    return UnfoldingParams(
        eps1=eps1,
        eps2=eps2,
        nu_map=nu_map,
        b=b,
        c=c,
        d=d,
        d_minus_bc=d - b * c,
        case_label=classify_case(b, c, d),
    )


def critical_rays(up: UnfoldingParams) -> list[tuple[str, np.ndarray]]:
    """Bifurcation rays of the amplitude system in the (nu1, nu2) plane."""
    b, c, d = up.b, up.c, up.d
    rays = [
        ("pitchfork rho2, nu2=0, nu1>0", np.array([1.0, 0.0])),
        ("pitchfork rho1, nu1=0, nu2>0", np.array([0.0, 1.0])),
        ("pitchfork rho2, nu2=0, nu1<0", np.array([-1.0, 0.0])),
        ("pitchfork rho1, nu1=0, nu2<0", np.array([0.0, -1.0])),
        # Mixed mode leaves the rho1 branch (rho1^2 = -nu1).
        ("mixed mode from rho1 branch", np.array([-1.0, -c])),
        # Mixed mode leaves the rho2 branch (rho2^2 = -nu2/d).
        ("mixed mode from rho2 branch", np.array([-b, -d], dtype=float)),
    ]
    if d == -1 and up.d_minus_bc > 0:
        # Trace of the mixed-mode Jacobian vanishes at rho1^2 = rho2^2 = s.
        hopf = np.array([-(1.0 + b), -(c + d)])
        rays.append(("heteroclinic loop (leading order)", hopf))
        rays.append(("torus Hopf", hopf))
    return rays


def semilines(up: UnfoldingParams, pt: DoubleHopfPoint) -> list[SemiLine]:
    """Critical rays mapped to (tau1, tau2), labelled L1.. counter-clockwise."""
    det = float(np.linalg.det(up.nu_map))
    if det == 0:
        raise SingularMapError("nu_map is singular")
    inv = np.linalg.inv(up.nu_map)
    items = []
    for kind, ray in critical_rays(up):
        s = inv @ ray
        s = s / np.hypot(*s)
        items.append((kind, s, ray))
    start = math.atan2(items[0][1][1], items[0][1][0])
    # Stable order: angle from the first ray, heteroclinic before Hopf on ties.
    order = sorted(
        range(len(items)),
        key=lambda i: (round((math.atan2(items[i][1][1], items[i][1][0]) - start) % (2 * math.pi), 12), i),
    )
    out = []
    for rank, i in enumerate(order, start=1):
        kind, s, ray = items[i]
        out.append(
            SemiLine(
                label=f"L{rank}",
                kind=kind,
                point=(pt.tau1_star, pt.tau2_star),
                direction=(float(s[0]), float(s[1])),
                nu_direction=(float(ray[0]), float(ray[1])),
            )
        )
    return out


def region_of(
    up: UnfoldingParams,
    pt: DoubleHopfPoint,
    tau1: float,
    tau2: float,
    radius: float = CHART_RADIUS,
    angle_tol: float = ANGLE_TOL,
) -> str:
    """Region label D1..DN of a delay pair near the double-Hopf point.

    With N semi-lines L1..LN sorted counter-clockwise, region D_k is the sector
    swept counter-clockwise from L_{N+1-k} to L_{N+2-k} (indices mod N), so D1
    runs from LN to L1.
    """
    dx, dy = tau1 - pt.tau1_star, tau2 - pt.tau2_star
    r = math.hypot(dx, dy)
    if r > radius:
        raise ChartRangeError(f"({tau1}, {tau2}) is {r:.4g} from the double-Hopf point (chart radius {radius})")
    if r == 0:
        raise OnBoundaryError("point coincides with the double-Hopf point")
    lines = semilines(up, pt)
    N = len(lines)
    ang = math.atan2(dy, dx) % (2 * math.pi)
    for ln in lines:
        gap = abs((ang - ln.angle + math.pi) % (2 * math.pi) - math.pi)
        if gap < angle_tol:
            raise OnBoundaryError(f"point lies on {ln.label}")
    for i in range(N):
        lo = lines[i].angle
        hi = lines[(i + 1) % N].angle
        width = (hi - lo) % (2 * math.pi)
        if 0 < (ang - lo) % (2 * math.pi) < width:
            # Sector from L_{i+1} to L_{i+2} is D_{N-i}.
            return f"D{(N - i - 1) % N + 1}"
    raise OnBoundaryError("point falls in a zero-width sector")


def write_semilines_csv(path: str | Path, lines: list[SemiLine]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("label", "kind", "tau1", "tau2", "dir_tau1", "dir_tau2", "reciprocal_slope", "side"))
        for ln in lines:
            w.writerow(
                (
                    ln.label,
                    ln.kind,
                    f"{ln.point[0]:.10g}",
                    f"{ln.point[1]:.10g}",
                    f"{ln.direction[0]:.10g}",
                    f"{ln.direction[1]:.10g}",
                    f"{ln.reciprocal_slope:.6f}",
                    ln.side,
                )
            )


def report(up: UnfoldingParams, pt: DoubleHopfPoint, lines: list[SemiLine]) -> str:
    rows = [
        f"double-Hopf point: tau1*={pt.tau1_star:.6f} tau2*={pt.tau2_star:.6f} "
        f"omega1={pt.omega1:.6f} omega2={pt.omega2:.6f}",
        f"eps1={up.eps1:+d} eps2={up.eps2:+d}",
        f"b={up.b:.6f} c={up.c:.6f} d={up.d:+d} d-bc={up.d_minus_bc:.6f}",
        f"unfolding case: {up.case_label}",
    ]
    for ln in lines:
        rows.append(
            f"{ln.label}: tau2 = (tau1 - {ln.point[0]:.4f})/({ln.reciprocal_slope:.4f}) + {ln.point[1]:.4f}"
            f"  ({ln.side})  [{ln.kind}]"
        )
    if any(ln.kind.startswith("heteroclinic") for ln in lines):
        rows.append("note: heteroclinic-loop line carries only its leading-order slope (shared with the torus Hopf line)")
    return "\n".join(rows)
