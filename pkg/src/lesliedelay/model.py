"""Model parameters, positive equilibrium, linearization and reaction terms.

The system is the diffusive modified Leslie-Gower predator-prey model with a
prey-feedback delay ``tau1`` and a predator-feedback delay ``tau2`` on the
interval ``[0, l*pi]`` with homogeneous Neumann boundary conditions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import SingularDenominatorError

# Leslie-Gower denominator guard.
U_LAG_MIN = 1e-12


@dataclass(frozen=True)
class ModelParams:
    r1: float
    r2: float
    a: float
    K: float
    gamma: float
    m: float
    l: float
    d1: float
    d2: float

    def __post_init__(self):
        for name in ("r1", "r2", "K", "gamma", "l", "d1", "d2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")
        if not (math.isfinite(self.a) and self.a >= 0):
            raise ValueError(f"a must be non-negative, got {self.a!r}")
        if not (0 <= self.m < 1):
            raise ValueError(f"m must lie in [0, 1), got {self.m!r}")

    @classmethod
    def keys(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def as_dict(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in self.keys()}

    def mode_scale(self, n: int) -> float:
        """Laplacian eigenvalue magnitude n^2 / l^2 of mode cos(n x / l)."""
        return n * n / (self.l * self.l)


# Parameter set used for every numerical reproduction in this package.
REFERENCE_PARAMS = ModelParams(r1=0.8, r2=1.0, a=1.3, K=0.7, gamma=1.0, m=0.27, l=2.0, d1=0.3, d2=0.4)


@dataclass(frozen=True)
class Equilibrium:
    u_star: float
    v_star: float


@dataclass(frozen=True)
class Linearization:
    D: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def characteristic_matrix(self, lam: complex, tau1: float, tau2: float, n: int, l: float) -> np.ndarray:
        """lambda*I - M_n - A - B e^{-lambda tau1} - C e^{-lambda tau2}."""
        k = n * n / (l * l)
        return (
            lam * np.eye(2)
            + k * self.D
            - self.A
            - self.B * np.exp(-lam * tau1)
            - self.C * np.exp(-lam * tau2)
        )


def equilibrium(p: ModelParams) -> Equilibrium:
    q = p.gamma * (1.0 - p.m)
    u_star = p.K * p.r1 / (p.r1 + p.a * p.K * q * (1.0 - p.m))
    return Equilibrium(u_star=u_star, v_star=q * u_star)


def linearize(p: ModelParams, e: Equilibrium | None = None) -> Linearization:
    if e is None:
        e = equilibrium(p)
    q = p.gamma * (1.0 - p.m)
    D = np.diag([p.d1, p.d2])
    A = np.array([[0.0, -p.a * (1.0 - p.m) * e.u_star], [0.0, 0.0]])
    B = np.array([[-p.r1 * e.u_star / p.K, 0.0], [0.0, 0.0]])
    C = np.array([[0.0, 0.0], [q * p.r2, -p.r2]])
    return Linearization(D=D, A=A, B=B, C=C)


def zero_delay_coefficients(p: ModelParams, n: int) -> tuple[float, float]:
    """Trace-like and determinant-like coefficients of lambda^2 + A lambda + B at tau1 = tau2 = 0."""
    e = equilibrium(p)
    k = p.mode_scale(n)
    s = p.r1 * e.u_star / p.K
    A = p.d1 * k + p.d2 * k + s + p.r2
    B = (
        p.d1 * p.d2 * k * k
        + s * p.d2 * k
        + p.r2 * p.d1 * k
        + p.a * (1.0 - p.m) ** 2 * p.gamma * p.r2 * e.u_star
        + s * p.r2
    )
    return A, B


def zero_delay_stable(p: ModelParams, n_max: int) -> bool:
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    for n in range(n_max + 1):
        A, B = zero_delay_coefficients(p, n)
        if not (A > 0 and B > 0):
            return False
    return True


def global_stability_hint(p: ModelParams) -> bool:
    """Sufficient condition for global stability of E* without delays."""
    return p.r1 / p.K > p.a * (1.0 - p.m)


def reaction(p: ModelParams, u_now, v_now, u_lag1, u_lag2, v_lag2):
    """Nonlinear reaction terms of the delayed system (no diffusion).

    Accepts scalars or arrays. ``u_lag1`` is u(t - tau1); ``u_lag2`` and
    ``v_lag2`` are u, v at t - tau2.
    """
    u_lag2 = np.asarray(u_lag2, dtype=float)
    if np.any(u_lag2 < U_LAG_MIN):
        raise SingularDenominatorError("prey density at t - tau2 is (near) zero")
    q = p.gamma * (1.0 - p.m)
    du = p.r1 * u_now * (1.0 - u_lag1 / p.K) - p.a * (1.0 - p.m) * u_now * v_now
    dv = p.r2 * v_now * (1.0 - v_lag2 / (q * u_lag2))
    if np.ndim(du) == 0 and np.ndim(dv) == 0:
        return float(du), float(dv)
    return du, dv
