"""Reference reproduction suite: regression and property checks with pinned tolerances."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import direction as dr
from . import hopf2
from . import quasipoly as qp
from . import rootcount
from . import switching as sw
from . import unfolding as uf
from .errors import DegenerateUnfoldingError, MultipleRootError
from .model import REFERENCE_PARAMS, ModelParams, equilibrium
from .simulate import SECTION_V, History, SimConfig, SimState, poincare, run

WINDOW = (20.0, 20.0)
MODES = 10

F_ROOTS = {
    0: (0.2587, 0.6682, 0.7697, 1.1791),
    1: (0.184, 0.5264, 0.8607, 1.189),
    2: (0.8968, 1.171),
    3: (0.6638, 0.9798),
}
F_ROOT_TOL = 2e-3
ENDPOINT_ANGLES = (math.pi, math.pi, math.pi, 0.0)  # theta1(a), theta2(a), theta1(b), theta2(b)
ENDPOINT_BITS = ((1, 1), (1, 0))
ANGLE_TOL = 1e-3
RESIDUAL_SAMPLES = 10_000
RESIDUAL_TOL = 1e-8
DIRECTION_CROSSINGS = 20
DIRECTION_STEP = 1e-3
HH_POINT = (3.9042, 1.406)
HH_TOL = 5e-3
HH_OMEGAS = (0.61081, 0.94964)
HH_OMEGA_TOL = 1e-3
UNFOLDING = {"eps1": 1, "eps2": -1, "b": 0.4946, "c": -11.5623, "d": -1, "d_minus_bc": 4.7192}
UNFOLDING_TOL = 5e-4
UNFOLDING_CASE = "VIa"
RECIPROCAL_SLOPES = (-13.6972, 2.8383, 1.2106, 0.6790, 0.6790, -3.5180, -13.6972, 2.8381)
SLOPE_TOL = 5e-3
STABLE_POINT = (1.74, 0.67)
UNSTABLE_POINT = (3.62, 1.435)
E_STAR = (0.4358, 0.3181)
E_STAR_TOL = 1e-3
TORUS2_POINT = (3.82, 1.4345)
CHAOS_POINT = (3.905, 1.4136)
TORUS2_HORIZON = (8000.0, 14000.0)
CHAOS_HORIZON = (30000.0, 40000.0)
EQUILIBRIUM_STEPS = 10_000
EQUILIBRIUM_TOL = 1e-12
TIME_ORDER_MIN = 3.5
SPACE_ORDER_MIN = 1.9
FD_REL_TOL = 1e-6


@dataclass
class Check:
    number: int
    title: str
    passed: bool = True
    lines: list[str] = field(default_factory=list)
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0
    budget: float | None = None

    def expect(self, ok: bool, text: str) -> None:
        self.lines.append(f"{'ok  ' if ok else 'FAIL'} {text}")
        self.passed &= bool(ok)

    def finish(self, t0: float) -> "Check":
        self.seconds = time.perf_counter() - t0
        if self.budget is not None:
            self.expect(self.seconds < self.budget, f"runtime {self.seconds:.2f} s < {self.budget:g} s")
        return self


def check_f_roots(p: ModelParams = REFERENCE_PARAMS) -> Check:
    t0 = time.perf_counter()
    c = Check(1, "F_n roots", budget=5.0)
    for n in range(MODES + 1):
        roots, _ = qp.F_roots(qp.build(p, n))
        c.measured[n] = tuple(roots)
        ref = F_ROOTS.get(n, ())
        ok = len(roots) == len(ref) and all(abs(r - s) <= F_ROOT_TOL for r, s in zip(roots, ref))
        c.expect(ok, f"n={n}: {np.round(roots, 5).tolist()} vs {list(ref)}")
    return c.finish(t0)


def check_endpoints(p: ModelParams = REFERENCE_PARAMS) -> Check:
    t0 = time.perf_counter()
    c = Check(2, "endpoint angles and delta bits on the first mode-0 interval")
    q = qp.build(p, 0)
    iv = sw.crossing_set(q)[0]
    a, b = qp.angles(q, iv.a), qp.angles(q, iv.b)
    got = (a.theta1, a.theta2, b.theta1, b.theta2)
    c.measured["angles"] = got
    for name, g, r in zip(("theta1(a)", "theta2(a)", "theta1(b)", "theta2(b)"), got, ENDPOINT_ANGLES):
        c.expect(abs(g - r) <= ANGLE_TOL, f"{name} = {g:.6f} (ref {r:.6f})")
    bits = ((iv.delta1a, iv.delta2a), (iv.delta1b, iv.delta2b))
    c.measured["bits"] = bits
    c.expect(bits == ENDPOINT_BITS, f"delta bits a={bits[0]} b={bits[1]}")
    # Endpoint links predicted by the bits are found geometrically.
    segs = sw.mode_segments(p, WINDOW, n_max=0)[0]
    links = sw.connectivity([s for s in segs if s.interval is not None and s.interval.j == 1])
    keyed = {(la[:5], lb[:5], tag) for la, lb, tag in links}
    probe = [(s.j1, s.j2) for s in segs if s.sign == 1 and s.interval.j == 1 and s.touches("a") and s.touches("b")]
    found = 0
    for j1, j2 in probe:
        for tag in ("a", "b"):
            pj1, pj2 = sw.predicted_partner(iv, j1, j2, tag)
            want = ((0, 1, 1, j1, j2), (0, 1, -1, pj1, pj2), tag)
            found += want in keyed or (want[1], want[0], tag) in keyed
    c.expect(found == 2 * len(probe) and probe, f"{found}/{2 * len(probe)} predicted endpoint links present")
    return c.finish(t0)


def check_residuals(p: ModelParams = REFERENCE_PARAMS, seed: int = 1) -> Check:
    t0 = time.perf_counter()
    c = Check(3, "curve residual |D_n(i omega)|", budget=10.0)
    segs = sw.mode_segments(p, WINDOW)
    rows = [(n, s.samples) for n, ss in segs.items() for s in ss]
    allpts = np.vstack([np.column_stack([np.full(len(sm), n), sm]) for n, sm in rows])
    rng = np.random.default_rng(seed)
    pick = allpts[rng.choice(len(allpts), size=min(RESIDUAL_SAMPLES, len(allpts)), replace=False)]
    worst = 0.0
    for n in np.unique(pick[:, 0]).astype(int):
        sel = pick[pick[:, 0] == n]
        q = qp.build(p, n)
        vals = np.abs(qp.eval_D(q, 1j * sel[:, 1], sel[:, 2], sel[:, 3]))
        worst = max(worst, float(vals.max()))
    c.measured["max_residual"] = worst
    c.measured["samples"] = len(pick)
    c.expect(len(pick) == RESIDUAL_SAMPLES, f"{len(pick)} samples over modes {sorted(segs)}")
    c.expect(worst < RESIDUAL_TOL, f"max residual {worst:.3e} < {RESIDUAL_TOL:g}")
    return c.finish(t0)


def _near_other_curve(tau: np.ndarray, seg, same_mode, radius: float) -> bool:
    for other in same_mode:
        if other is seg:
            continue
        if np.min(np.hypot(*(other.tau - tau).T)) < radius:
            return True
    return False


def check_directions(p: ModelParams = REFERENCE_PARAMS, seed: int = 2) -> Check:
    t0 = time.perf_counter()
    c = Check(4, "crossing direction vs argument-principle count", budget=60.0)
    segs = sw.mode_segments(p, WINDOW)
    flat = [s for n in sorted(segs) for s in segs[n]]
    weights = np.array([len(s.samples) for s in flat], dtype=float)
    rng = np.random.default_rng(seed)
    h = DIRECTION_STEP
    done = attempts = 0
    while done < DIRECTION_CROSSINGS and attempts < 50 * DIRECTION_CROSSINGS:
        attempts += 1
        seg = flat[rng.choice(len(flat), p=weights / weights.sum())]
        q = qp.build(p, seg.n)
        w = float(rng.uniform(seg.omega[0], seg.omega[-1]))
        t1, t2 = (float(x) for x in sw.tau_curve(q, w, seg.sign, seg.j1, seg.j2))
        try:
            cd = dr.partials(q, w, t1, t2)
        except MultipleRootError:
            continue
        nrm = cd.right_normal
        nrm = nrm / np.hypot(*nrm)
        tau = np.array([t1, t2])
        lo, hi = tau - h * nrm, tau + h * nrm
        if min(lo.min(), hi.min()) <= 0 or _near_other_curve(tau, seg, segs[seg.n], 20 * h):
            continue
        predicted = dr.direction_along(cd, *nrm)
        if predicted == dr.TANGENT:
            continue
        box = rootcount.CROSSING_BOX
        change = rootcount.count_unstable(q, *hi, box=box) - rootcount.count_unstable(q, *lo, box=box)
        done += 1
        rule = 2 if cd.two_more_on_right else -2
        c.expect(
            change == predicted == rule,
            f"n={seg.n} omega={w:.5f} tau=({t1:.4f}, {t2:.4f}): count change {change:+d}, predicted {predicted:+d}",
        )
    c.expect(done == DIRECTION_CROSSINGS, f"{done} transversal crossings tested")
    return c.finish(t0)


def find_hh(p: ModelParams = REFERENCE_PARAMS, window=WINDOW, n_max: int = MODES):
    """First double-Hopf point (by tau1 + tau2) that lies on the stability boundary."""
    segs = sw.mode_segments(p, window)
    for pt in hopf2.find_double_hopf(p, segs, window):
        if hopf2.on_stability_boundary(p, pt, n_max):
            return pt
    return None


def check_hh(p: ModelParams = REFERENCE_PARAMS) -> Check:
    t0 = time.perf_counter()
    c = Check(5, "double-Hopf point", budget=10.0)
    pt = find_hh(p)
    c.expect(pt is not None, "a double-Hopf point on the stability boundary exists")
    if pt is None:
        return c.finish(t0)
    c.measured["hh"] = pt
    c.expect(abs(pt.tau1_star - HH_POINT[0]) <= HH_TOL, f"tau1* = {pt.tau1_star:.6f} (ref {HH_POINT[0]})")
    c.expect(abs(pt.tau2_star - HH_POINT[1]) <= HH_TOL, f"tau2* = {pt.tau2_star:.6f} (ref {HH_POINT[1]})")
    c.expect(abs(pt.omega1 - HH_OMEGAS[0]) <= HH_OMEGA_TOL, f"omega1 = {pt.omega1:.6f} (ref {HH_OMEGAS[0]})")
    c.expect(abs(pt.omega2 - HH_OMEGAS[1]) <= HH_OMEGA_TOL, f"omega2 = {pt.omega2:.6f} (ref {HH_OMEGAS[1]})")
    c.expect(pt.resonance_flag == "none", f"resonance flag {pt.resonance_flag!r}")
    return c.finish(t0)


def reference_hh() -> hopf2.DoubleHopfPoint:
    pt = find_hh()
    if pt is None:
        raise RuntimeError("reference double-Hopf point not found")
    return pt


def check_unfolding(pt: hopf2.DoubleHopfPoint | None = None, K: uf.NormalFormCoeffs = uf.REFERENCE_K) -> Check:
    t0 = time.perf_counter()
    c = Check(6, "unfolding parameters and semi-lines")
    pt = pt or reference_hh()
    up = uf.unfold(K, pt)
    for name, ref in UNFOLDING.items():
        got = getattr(up, name)
        c.measured[name] = got
        c.expect(abs(got - ref) <= UNFOLDING_TOL, f"{name} = {got:.6f} (ref {ref})")
    c.expect(up.case_label == UNFOLDING_CASE, f"case {up.case_label}")
    lines = uf.semilines(up, pt)
    slopes = [ln.reciprocal_slope for ln in lines]
    c.measured["slopes"] = slopes
    ok = len(slopes) == len(RECIPROCAL_SLOPES) and all(abs(a - b) <= SLOPE_TOL for a, b in zip(slopes, RECIPROCAL_SLOPES))
    c.expect(ok, f"reciprocal slopes {np.round(slopes, 4).tolist()}")
    return c.finish(t0)


def _sim(p: ModelParams, tau, horizon=None, **kw):
    cfg = SimConfig(p, *tau, **kw)
    if horizon is not None:
        cfg = cfg.with_(t_transient=horizon[0], t_end=horizon[1])
    traj = run(cfg)
    return traj, poincare(traj, equilibrium(p), SECTION_V)


def check_stability_sim(p: ModelParams = REFERENCE_PARAMS) -> Check:
    t0 = time.perf_counter()
    c = Check(7, "stability accounting and simulation", budget=300.0)
    n_stable = dr.unstable_root_count(p, *STABLE_POINT, MODES)
    c.expect(n_stable == 0, f"{STABLE_POINT}: {n_stable} unstable roots")
    traj, pr = _sim(p, STABLE_POINT)
    du = float(np.max(np.abs(traj.final_u - E_STAR[0])))
    dv = float(np.max(np.abs(traj.final_v - E_STAR[1])))
    c.expect(max(du, dv) <= E_STAR_TOL, f"{STABLE_POINT}: |u - u*| = {du:.2e}, |v - v*| = {dv:.2e} ({pr.classification})")
    n_unstable = dr.unstable_root_count(p, *UNSTABLE_POINT, MODES)
    c.expect(n_unstable > 0, f"{UNSTABLE_POINT}: {n_unstable} unstable roots")
    traj, pr = _sim(p, UNSTABLE_POINT)
    c.expect(pr.classification == "periodic", f"{UNSTABLE_POINT}: {pr.classification} ({len(pr.points)} hits)")
    return c.finish(t0)


def check_torus(p: ModelParams = REFERENCE_PARAMS) -> Check:
    t0 = time.perf_counter()
    c = Check(8, "Poincare classification near the double-Hopf point", budget=600.0)
    for tau, horizon, want in ((TORUS2_POINT, TORUS2_HORIZON, "torus2"), (CHAOS_POINT, CHAOS_HORIZON, "torus3-or-chaos")):
        _, pr = _sim(p, tau, horizon)
        c.measured[tau] = pr.classification
        c.expect(pr.classification == want, f"{tau}: {pr.classification} ({len(pr.points)} hits, want {want})")
    return c.finish(t0)


def observed_orders(p: ModelParams = REFERENCE_PARAMS) -> tuple[float, float]:
    """Self-convergence orders in time and space of the t = 50 solution."""
    hist = History("perturbed", amplitude=0.05, mode=1)

    def final(M, dt, tau):
        cfg = SimConfig(p, *tau, grid_points=M, dt=dt, t_transient=0.0, t_end=50.0, history=hist)
        s = SimState(cfg)
        s.advance(int(round(50.0 / dt)))
        return s.u

    # Delays are multiples of every step so derivative jumps fall on grid nodes.
    a = [final(17, dt, (3.6, 1.44)) for dt in (0.04, 0.02, 0.01)]
    e_t = [np.max(np.abs(a[0] - a[1])), np.max(np.abs(a[1] - a[2]))]
    b = [final(M, 0.005, STABLE_POINT) for M in (9, 17, 33)]
    e_x = [np.max(np.abs(b[0] - b[1][::2])), np.max(np.abs(b[1] - b[2][::2]))]
    return float(np.log2(e_t[0] / e_t[1])), float(np.log2(e_x[0] / e_x[1]))


def equilibrium_drift(p: ModelParams = REFERENCE_PARAMS, steps: int = EQUILIBRIUM_STEPS) -> float:
    cfg = SimConfig(p, *UNSTABLE_POINT, grid_points=16, dt=0.01, t_transient=0.0, t_end=steps * 0.01 + 1,
                    history=History("offset", du=0.0, dv=0.0))
    s = SimState(cfg)
    s.advance(steps)
    e = equilibrium(p)
    return float(max(np.max(np.abs(s.u - e.u_star)), np.max(np.abs(s.v - e.v_star))))


def partials_fd_error(p: ModelParams = REFERENCE_PARAMS, h: float = 1e-6) -> float:
    """Worst relative gap between analytic partials and central differences along the curves."""
    worst = 0.0
    segs = sw.mode_segments(p, (8.0, 8.0))
    for n, ss in segs.items():
        q = qp.build(p, n)
        for s in ss[:4]:
            for w, t1, t2 in s.samples[:: max(1, len(s.samples) // 5)]:
                lam = 1j * w
                got = dr.derivatives(q, lam, t1, t2)

                def D(lam_, a, b):
                    return complex(qp.eval_D(q, lam_, a, b))

                fd = (
                    (D(lam + h, t1, t2) - D(lam - h, t1, t2)) / (2 * h),
                    (D(lam, t1 + h, t2) - D(lam, t1 - h, t2)) / (2 * h),
                    (D(lam, t1, t2 + h) - D(lam, t1, t2 - h)) / (2 * h),
                )
                for g, f in zip(got, fd):
                    worst = max(worst, abs(g - f) / max(abs(g), 1e-3))
    return worst


def table_coverage(seed: int = 3, draws: int = 4000) -> set[str]:
    rng = np.random.default_rng(seed)
    seen = set()
    for _ in range(draws):
        vals = rng.normal(size=(8, 2))
        K = uf.NormalFormCoeffs(*(complex(a, b) for a, b in vals))
        try:
            up = uf.unfold(K)
        except DegenerateUnfoldingError:
            continue
        key = (up.d, int(np.sign(up.b)), int(np.sign(up.c)), int(np.sign(up.d_minus_bc)))
        if uf.CASE_TABLE[key] != up.case_label:
            raise AssertionError(f"inconsistent label for {key}")
        seen.add(up.case_label)
    return seen


def check_properties(p: ModelParams = REFERENCE_PARAMS) -> Check:
    t0 = time.perf_counter()
    c = Check(9, "property suites")
    drift = equilibrium_drift(p)
    c.expect(drift < EQUILIBRIUM_TOL, f"equilibrium drift after {EQUILIBRIUM_STEPS} steps {drift:.2e}")
    order_t, order_x = observed_orders(p)
    c.expect(order_t >= TIME_ORDER_MIN, f"temporal order {order_t:.3f} >= {TIME_ORDER_MIN}")
    c.expect(order_x >= SPACE_ORDER_MIN, f"spatial order {order_x:.3f} >= {SPACE_ORDER_MIN}")
    fd = partials_fd_error(p)
    c.expect(fd < FD_REL_TOL, f"partials vs central differences: worst relative gap {fd:.2e}")
    seen = table_coverage()
    c.expect(seen == set(uf.CASE_TABLE.values()), f"{len(seen)}/12 unfolding cases reached")
    c.measured.update(drift=drift, order_t=order_t, order_x=order_x, fd=fd, cases=seen)
    return c.finish(t0)


def run_all(include_slow: bool = True) -> list[Check]:
    out = [check_f_roots(), check_endpoints(), check_residuals(), check_directions()]
    h = check_hh()
    out.append(h)
    out.append(check_unfolding(h.measured.get("hh")))
    if include_slow:
        out += [check_stability_sim(), check_torus()]
    out.append(check_properties())
    return out


def format_table(checks: list[Check]) -> str:
    rows = []
    for c in checks:
        rows.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.number}. {c.title} ({c.seconds:.1f} s)")
        rows += [f"        {line}" for line in c.lines]
    return "\n".join(rows)
