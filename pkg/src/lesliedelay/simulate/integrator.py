"""Method-of-lines integration of the delayed reaction-diffusion system."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import SimulationError
from ..model import Equilibrium, ModelParams, equilibrium
from . import kernel

ZERO_DELAY = -(1 << 40)
# Delay-to-step ratios within this distance of an integer are snapped to it.
STEP_SNAP = 1e-9
RECORD_COLUMNS = ("t", "u0", "v0", "u0_lag", "du0", "dv0", "du0_lag")


@dataclass(frozen=True)
class History:
    """Initial function, constant in time on [-max tau, 0].

    ``kind`` is ``"offset"`` (equilibrium plus a flat shift ``(du, dv)``) or
    ``"perturbed"`` (equilibrium plus ``amplitude * cos(mode x / l)`` on both
    species, optionally with seeded random nodal noise of size ``noise``).
    """

    kind: str = "offset"
    du: float = 0.01
    dv: float = 0.01
    amplitude: float = 0.0
    mode: int = 0
    noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("offset", "perturbed"):
            raise ValueError(f"unknown history kind {self.kind!r}")

    def profile(self, p: ModelParams, e: Equilibrium, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "offset":
            return np.full_like(x, e.u_star + self.du), np.full_like(x, e.v_star + self.dv)
        shape = self.amplitude * np.cos(self.mode * x / p.l)
        u = e.u_star + shape
        v = e.v_star + shape
        if self.noise:
            rng = np.random.default_rng(self.seed)
            u = u + self.noise * rng.standard_normal(x.size)
            v = v + self.noise * rng.standard_normal(x.size)
        return u, v


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams
    tau1: float
    tau2: float
    grid_points: int = 64
    dt: float = 0.01
    t_end: float = 6000.0
    t_transient: float = 2000.0
    history: History = field(default_factory=History)
    record_stride: int = 10

    def __post_init__(self):
        if self.tau1 < 0 or self.tau2 < 0:
            raise ValueError("delays must be non-negative")
        if self.grid_points < 1:
            raise ValueError("grid_points must be at least 1")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        for name, tau in (("tau1", self.tau1), ("tau2", self.tau2)):
            if tau > 0 and not self.dt < tau / 10:
                raise ValueError(f"dt={self.dt} must be below {name}/10 = {tau / 10}")
        bound = self.dt_bound
        if self.dt > bound:
            raise ValueError(f"dt={self.dt} exceeds the explicit diffusion bound {bound:.6g}")
        if not self.t_transient < self.t_end:
            raise ValueError("t_transient must be smaller than t_end")
        if self.record_stride < 1:
            raise ValueError("record_stride must be at least 1")

    @property
    def dx(self) -> float:
        if self.grid_points == 1:
            return math.inf
        return self.params.l * math.pi / (self.grid_points - 1)

    @property
    def dt_bound(self) -> float:
        return 0.9 * self.dx**2 / (2 * max(self.params.d1, self.params.d2))

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.params.l * math.pi, self.grid_points)

    def with_(self, **kw) -> "SimConfig":
        return replace(self, **kw)


def _lag_table(cfg: SimConfig) -> tuple[np.ndarray, np.ndarray]:
    """Integer offsets and fractions for stage offsets 0, 1/2, 1 and each delay."""
    offs = np.empty((3, 2), dtype=np.int64)
    fracs = np.zeros((3, 2))
    for col, tau in enumerate((cfg.tau1, cfg.tau2)):
        q = tau / cfg.dt
        if abs(q - round(q)) < STEP_SNAP:
            q = float(round(q))
        for row, c in enumerate((0.0, 0.5, 1.0)):
            if tau == 0:
                offs[row, col] = ZERO_DELAY
                continue
            pos = c - q
            base = math.floor(pos)
            offs[row, col] = base
            fracs[row, col] = pos - base
    return offs, fracs


class SimState:
    """Current fields plus ring buffers of past states and slopes."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        p = cfg.params
        self.eq = equilibrium(p)
        qmax = max(cfg.tau1, cfg.tau2) / cfg.dt
        self.L = int(math.ceil(qmax)) + 4
        M = cfg.grid_points
        self.U = np.zeros((self.L, M))
        self.V = np.zeros((self.L, M))
        self.dU = np.zeros((self.L, M))
        self.dV = np.zeros((self.L, M))
        self.hist_u, self.hist_v = cfg.history.profile(p, self.eq, cfg.x)
        self.pars = np.array([p.r1, p.r2, p.a, p.K, p.gamma, p.m, p.d1, p.d2])
        self.inv_dx2 = 0.0 if M == 1 else 1.0 / cfg.dx**2
        self.offs, self.fracs = _lag_table(cfg)
        self.k = 0
        self.U[0] = self.hist_u
        self.V[0] = self.hist_v
        status = kernel.initial_slope(
            self.U[0].copy(), self.V[0].copy(), self.hist_u, self.hist_v, self.pars, self.inv_dx2,
            cfg.tau1 == 0, cfg.tau2 == 0, self.dU[0], self.dV[0],
        )
        _check(status, 0.0)

    @property
    def t(self) -> float:
        return self.k * self.cfg.dt

    @property
    def u(self) -> np.ndarray:
        return self.U[self.k % self.L].copy()

    @property
    def v(self) -> np.ndarray:
        return self.V[self.k % self.L].copy()

    def advance(self, nsteps: int, rec: np.ndarray | None = None, rec_start: int = 0, rec_pos: int = 0) -> int:
        if rec is None:
            rec = np.empty((0, len(RECORD_COLUMNS)))
        status, done, rec_pos = kernel.advance(
            self.U, self.V, self.dU, self.dV, self.hist_u, self.hist_v, self.k, nsteps,
            self.pars, self.inv_dx2, self.cfg.dt, self.offs, self.fracs,
            rec, rec_start, self.cfg.record_stride, rec_pos,
        )
        self.k += done
        _check(status, (self.k + 1) * self.cfg.dt)
        return rec_pos


def _check(status: int, t: float) -> None:
    if status == kernel.OK:
        return
    reason = {
        kernel.NON_FINITE: "non-finite value",
        kernel.NON_POSITIVE: "loss of positivity",
        kernel.SINGULAR: "delayed prey density too close to zero",
    }[status]
    raise SimulationError(f"{reason} at t={t:.6g}", t)


def step(state: SimState, cfg: SimConfig | None = None) -> SimState:
    """Advance one RK4 step in place and return the state."""
    if cfg is not None and cfg is not state.cfg:
        raise ValueError("state was built for a different configuration")
    state.advance(1)
    return state


@dataclass
class Trajectory:
    """Recorded samples at node x = 0 after the transient."""

    cfg: SimConfig
    data: np.ndarray  # columns RECORD_COLUMNS
    final_u: np.ndarray
    final_v: np.ndarray

    @property
    def t(self) -> np.ndarray:
        return self.data[:, 0]

    def column(self, name: str) -> np.ndarray:
        return self.data[:, RECORD_COLUMNS.index(name)]


def run(cfg: SimConfig, chunk: int = 200_000) -> Trajectory:
    state = SimState(cfg)
    total = int(round(cfg.t_end / cfg.dt))
    start = int(math.ceil(cfg.t_transient / cfg.dt))
    first = -(-start // cfg.record_stride) * cfg.record_stride
    n_rec = max(0, (total - first) // cfg.record_stride + 1)
    rec = np.empty((n_rec, len(RECORD_COLUMNS)))
    pos = 0
    while state.k < total:
        pos = state.advance(min(chunk, total - state.k), rec, start, pos)
    return Trajectory(cfg=cfg, data=rec[:pos], final_u=state.u, final_v=state.v)
