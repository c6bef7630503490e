"""Mode-n characteristic quasipolynomial and the switching-angle functions.

For spatial mode ``n`` the characteristic function is

    D_n(lam; tau1, tau2) = P0(lam) + P1(lam) e^{-lam tau1}
                         + P2(lam) e^{-lam tau2} + P3(lam) e^{-lam (tau1 + tau2)}

with real polynomials P0..P3 stored low-to-high.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegenerateAngleError
from .model import ModelParams, equilibrium

# Root isolation defaults for F_n.
OMEGA_MAX = 10.0
GRID_POINTS = 4000
BISECT_TOL = 1e-10
TANGENCY_TOL = 1e-12
# |cos theta| may exceed 1 by round-off at crossing-set endpoints.
COS_SLACK = 1e-7


class TangencyWarning(UserWarning):
    """F_n touches zero without changing sign (double root)."""


@dataclass(frozen=True)
class QuasiPolynomial:
    n: int
    p0: tuple[float, ...]
    p1: tuple[float, ...]
    p2: tuple[float, ...]
    p3: tuple[float, ...]

    def __post_init__(self):
        degs = [_degree(c) for c in (self.p0, self.p1, self.p2, self.p3)]
        if degs[0] < max(degs[1:]):
            raise ValueError("deg P0 must dominate the delayed polynomials")
        if sum(c[0] for c in (self.p0, self.p1, self.p2, self.p3)) == 0:
            raise ValueError("lambda = 0 is a characteristic root for all delays")

    @property
    def coeffs(self) -> tuple[tuple[float, ...], ...]:
        return (self.p0, self.p1, self.p2, self.p3)

    def polys_at(self, lam):
        """Values (P0, P1, P2, P3) at ``lam`` (scalar or array)."""
        return tuple(npoly.polyval(lam, c) for c in self.coeffs)

    def dpolys_at(self, lam):
        return tuple(npoly.polyval(lam, npoly.polyder(c)) if len(c) > 1 else 0.0 * lam for c in self.coeffs)


def _degree(c) -> int:
    c = np.trim_zeros(np.asarray(c, dtype=float), "b")
    return max(len(c) - 1, 0)


def build(p: ModelParams, n: int) -> QuasiPolynomial:
    if n < 0:
        raise ValueError("mode index must be non-negative")
    e = equilibrium(p)
    k = p.mode_scale(n)
    s = p.r1 * e.u_star / p.K
    p0 = (p.d1 * k * p.d2 * k, (p.d1 + p.d2) * k, 1.0)
    p1 = (s * p.d2 * k, s)
    p2 = (p.r2 * p.d1 * k + p.a * (1.0 - p.m) ** 2 * p.gamma * p.r2 * e.u_star, p.r2)
    p3 = (s * p.r2,)
    return QuasiPolynomial(n=n, p0=p0, p1=p1, p2=p2, p3=p3)


def eval_D(q: QuasiPolynomial, lam, tau1: float, tau2: float):
    P0, P1, P2, P3 = q.polys_at(lam)
    e1 = np.exp(-lam * tau1)
    e2 = np.exp(-lam * tau2)
    return P0 + P1 * e1 + P2 * e2 + P3 * e1 * e2


def _moduli(q: QuasiPolynomial, omega):
    P0, P1, P2, P3 = q.polys_at(1j * np.asarray(omega, dtype=float))
    z1 = P2 * np.conj(P3) - P0 * np.conj(P1)
    z2 = P1 * np.conj(P3) - P0 * np.conj(P2)
    a0, a1, a2, a3 = (np.abs(x) ** 2 for x in (P0, P1, P2, P3))
    s1 = a0 + a1 - a2 - a3
    s2 = a0 - a1 + a2 - a3
    return s1, s2, z1, z2


def F(q: QuasiPolynomial, omega):
    """Crossing-set indicator; omega is in the crossing set iff F <= 0."""
    s1, _, z1, _ = _moduli(q, omega)
    out = s1 * s1 - 4.0 * np.abs(z1) ** 2
    return float(out) if np.ndim(out) == 0 else out


def condition_margins(q: QuasiPolynomial, omega):
    """Slack of the tau1 and tau2 solvability inequalities (<= 0 means solvable)."""
    s1, s2, z1, z2 = _moduli(q, omega)
    return s1 * s1 - 4.0 * np.abs(z1) ** 2, s2 * s2 - 4.0 * np.abs(z2) ** 2


@dataclass(frozen=True)
class AngleData:
    omega: np.ndarray | float
    F: np.ndarray | float
    theta1: np.ndarray | float
    theta2: np.ndarray | float
    phi1: np.ndarray | float
    phi2: np.ndarray | float
    A1: np.ndarray | float
    B1: np.ndarray | float
    A2: np.ndarray | float
    B2: np.ndarray | float


def _principal_arg(z):
    # numpy's angle lives in [-pi, pi]; move -pi to +pi.
    phi = np.angle(z)
    return np.where(phi <= -np.pi, phi + 2 * np.pi, phi)


def _arccos_checked(c):
    if np.any(np.abs(c) > 1.0 + COS_SLACK):
        raise ValueError("omega lies outside the crossing set (|cos theta| > 1)")
    return np.arccos(np.clip(c, -1.0, 1.0))


def angles(q: QuasiPolynomial, omega) -> AngleData:
    omega = np.asarray(omega, dtype=float)
    s1, s2, z1, z2 = _moduli(q, omega)
    m1 = np.abs(z1)
    m2 = np.abs(z2)
    if np.any(m1 == 0.0) or np.any(m2 == 0.0):
        raise DegenerateAngleError("A^2 + B^2 = 0: switching angle undefined at this omega")
    theta1 = _arccos_checked(s1 / (2.0 * m1))
    theta2 = _arccos_checked(s2 / (2.0 * m2))
    out = AngleData(
        omega=omega,
        F=s1 * s1 - 4.0 * m1 * m1,
        theta1=theta1,
        theta2=theta2,
        phi1=_principal_arg(z1),
        phi2=_principal_arg(z2),
        A1=z1.real,
        B1=z1.imag,
        A2=z2.real,
        B2=z2.imag,
    )
    if omega.ndim == 0:
        out = AngleData(**{k: float(v) for k, v in out.__dict__.items()})
    return out


def F_roots(
    q: QuasiPolynomial,
    omega_max: float = OMEGA_MAX,
    grid_points: int = GRID_POINTS,
    tol: float = BISECT_TOL,
) -> tuple[np.ndarray, bool]:
    """Positive roots of F_n on (0, omega_max] and whether F_n(0) <= 0.

    Sign changes on a uniform grid are refined by bisection. Interior grid
    points with |F| below ``TANGENCY_TOL`` and no sign change trigger a
    ``TangencyWarning``.
    """
    w = np.linspace(0.0, omega_max, grid_points)
    f = F(q, w)
    roots = []
    for i in np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0):
        roots.append(_bisect(q, w[i], w[i + 1], f[i], tol))
    # Grid points that land exactly on a root.
    for i in np.flatnonzero(f[1:-1] == 0.0) + 1:
        if np.sign(f[i - 1]) != np.sign(f[i + 1]):
            roots.append(w[i])
    near = np.flatnonzero(np.abs(f[1:-1]) < TANGENCY_TOL) + 1
    for i in near:
        if np.sign(f[i - 1]) == np.sign(f[i + 1]):
            warnings.warn(
                f"F_{q.n} grazes zero near omega={w[i]:.6g}; tangency not resolved",
                TangencyWarning,
                stacklevel=2,
            )
    return np.array(sorted(roots)), bool(f[0] <= 0.0)


def _bisect(q, lo, hi, flo, tol):
    slo = np.sign(flo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = F(q, mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == slo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
