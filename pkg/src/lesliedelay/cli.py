"""Command-line entry point: ``lesliedelay <subcommand> [options]``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from . import direction as dr
from . import hopf2
from . import quasipoly as qp
from . import switching as sw
from . import unfolding as uf
from .errors import ConfigError, LeslieDelayError
from .model import equilibrium

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4
EXIT_NONE_FOUND = 5
EXIT_EXISTS = 6
EXIT_CHECKS_FAILED = 7

DEFAULT_WINDOW = (20.0, 20.0)
# Modes examined by the stability test when --modes is not given.
BOUNDARY_MODES = 10


class OutputExists(Exception):
    pass


class UsageError(Exception):
    pass


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}") from None
    return a, b


class Outputs:
    """Output directory guard: refuses to replace files unless allowed."""

    def __init__(self, root: str | Path, overwrite: bool):
        self.root = Path(root)
        self.overwrite = overwrite

    def claim(self, *names: str) -> list[Path]:
        paths = [self.root / n for n in names]
        clash = [p for p in paths if p.exists()]
        if clash and not self.overwrite:
            raise OutputExists(f"{clash[0]} exists; pass --overwrite to replace it")
        self.root.mkdir(parents=True, exist_ok=True)
        return paths


def _write_manifest(out: Outputs, args) -> None:
    (path,) = out.claim("manifest.txt")
    rows = [
        f"subcommand = {args.command}",
        f"config = {args.config}",
        f"output = {out.root}",
        f"seed = {args.seed}",
        f"version = {__version__}",
    ]
    path.write_text("\n".join(rows) + "\n")


def _load(args) -> cfgmod.Config:
    if args.config is None:
        raise ConfigError("--config is required for this subcommand")
    return cfgmod.load(args.config)


def _window(args) -> tuple[float, float]:
    w = args.window or DEFAULT_WINDOW
    if w[0] <= 0 or w[1] <= 0:
        raise UsageError("--window bounds must be positive")
    return w


def _curve_svg(segs: dict[int, list[sw.CurveSegment]], window) -> str:
    from .simulate.output import svg_document

    lines = [s.tau for n in sorted(segs) for s in segs[n]]
    return svg_document(polylines=lines, labels=("tau1", "tau2"), bounds=(0.0, window[0], 0.0, window[1]))


def cmd_curves(args) -> int:
    conf = _load(args)
    window = _window(args)
    segs = sw.mode_segments(conf.params, window, n_max=args.modes)
    out = Outputs(args.out, args.overwrite)
    names = [f"curves_n{n}.csv" for n in sorted(segs)] + ["links.csv", "curves.svg"]
    paths = dict(zip(names, out.claim(*names)))
    links = []
    for n in sorted(segs):
        sw.write_csv(paths[f"curves_n{n}.csv"], segs[n])
        links += sw.connectivity(segs[n])
        print(f"mode {n}: {len(segs[n])} curve segments")
    sw.write_links_csv(paths["links.csv"], links)
    paths["curves.svg"].write_text(_curve_svg(segs, window))
    _write_manifest(out, args)
    return EXIT_OK


def cmd_directions(args) -> int:
    conf = _load(args)
    window = _window(args)
    segs = sw.mode_segments(conf.params, window, n_max=args.modes)
    out = Outputs(args.out, args.overwrite)
    names = [f"directions_n{n}.csv" for n in sorted(segs)]
    for n, path in zip(sorted(segs), out.claim(*names)):
        dr.write_directions_csv(path, qp.build(conf.params, n), segs[n])
        print(f"mode {n}: {sum(len(s.samples) for s in segs[n])} annotated samples")
    _write_manifest(out, args)
    return EXIT_OK


def _boundary_points(conf, window, n_max):
    segs = sw.mode_segments(conf.params, window, n_max=n_max)
    pts = hopf2.find_double_hopf(conf.params, segs, window)
    n_check = BOUNDARY_MODES if n_max is None else n_max
    flags = [hopf2.on_stability_boundary(conf.params, pt, n_check) for pt in pts]
    return pts, flags


def cmd_hh(args) -> int:
    conf = _load(args)
    window = _window(args)
    pts, flags = _boundary_points(conf, window, args.modes)
    out = Outputs(args.out, args.overwrite)
    (path,) = out.claim("double_hopf.csv")
    hopf2.write_csv(path, pts)
    _annotate_boundary(path, flags)
    for pt, flag in zip(pts, flags):
        if flag:
            print(
                f"double-Hopf point on the stability boundary: tau1={pt.tau1_star:.6f} tau2={pt.tau2_star:.6f} "
                f"omega1={pt.omega1:.6f} omega2={pt.omega2:.6f} modes=({pt.n1},{pt.n2}) resonance={pt.resonance_flag}"
            )
    print(f"{len(pts)} curve intersections, {sum(flags)} on the stability boundary")
    _write_manifest(out, args)
    return EXIT_OK if pts else EXIT_NONE_FOUND


def _annotate_boundary(path: Path, flags: list[bool]) -> None:
    rows = path.read_text().splitlines()
    rows[0] += ",on_stability_boundary"
    for i, f in enumerate(flags, start=1):
        rows[i] += f",{int(f)}"
    path.write_text("\n".join(rows) + "\n")


def _hh_from_config(conf, args) -> hopf2.DoubleHopfPoint | None:
    if all(k in conf.hh for k in cfgmod.HH_KEYS):
        return hopf2.DoubleHopfPoint(
            conf.hh["hh_tau1"], conf.hh["hh_tau2"], conf.hh["hh_omega1"], conf.hh["hh_omega2"], 0, 0
        )
    if conf.hh:
        missing = [k for k in cfgmod.HH_KEYS if k not in conf.hh]
        raise ConfigError(f"missing {missing[0]} (give all four hh_* keys or none)", path=conf.path)
    pts, flags = _boundary_points(conf, _window(args), args.modes)
    on = [p for p, f in zip(pts, flags) if f]
    return on[0] if on else None


def cmd_classify(args) -> int:
    conf = _load(args)
    K = conf.require_K()
    pt = _hh_from_config(conf, args)
    if pt is None:
        print("no double-Hopf point on the stability boundary in the window", file=sys.stderr)
        return EXIT_NONE_FOUND
    up = uf.unfold(K, pt)
    lines = uf.semilines(up, pt)
    radius = conf.chart_radius or uf.CHART_RADIUS
    report = [uf.report(up, pt, lines)]
    for t1, t2 in conf.probes:
        try:
            label = uf.region_of(up, pt, t1, t2, radius=radius)
        except LeslieDelayError as exc:
            label = f"unassigned ({exc})"
        report.append(f"probe ({t1}, {t2}): {label}")
    text = "\n".join(report) + "\n"
    out = Outputs(args.out, args.overwrite)
    rpath, spath = out.claim("classification.txt", "semilines.csv")
    rpath.write_text(text)
    uf.write_semilines_csv(spath, lines)
    _write_manifest(out, args)
    print(text, end="")
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .simulate import History, SECTIONS, SimConfig, poincare, run, svg_document
    from .simulate import write_poincare_csv, write_trajectory_csv

    conf = _load(args)
    sim = dict(conf.sim)
    tau = args.tau or (sim.pop("tau1", None), sim.pop("tau2", None))
    sim.pop("tau1", None)
    sim.pop("tau2", None)
    if tau[0] is None or tau[1] is None:
        raise ConfigError("delays missing: pass --tau T1,T2 or set tau1 and tau2", path=conf.path)
    for key, attr in (("grid_points", "grid"), ("dt", "dt"), ("t_end", "t_end"), ("t_transient", "t_transient")):
        if getattr(args, attr) is not None:
            sim[key] = getattr(args, attr)
    hdu = sim.pop("history_du", 0.01)
    hdv = sim.pop("history_dv", 0.01)
    if args.noise:
        history = History("perturbed", amplitude=max(hdu, hdv), noise=args.noise, seed=args.seed)
    else:
        history = History("offset", du=hdu, dv=hdv)
    try:
        scfg = SimConfig(conf.params, tau[0], tau[1], history=history, **sim)
    except ValueError as exc:
        raise ConfigError(str(exc), path=conf.path) from None
    out = Outputs(args.out, args.overwrite)
    tpath, ppath, svg = out.claim("trajectory.csv", "poincare.csv", "poincare.svg")
    traj = run(scfg)
    e = equilibrium(conf.params)
    results = [poincare(traj, e, s) for s in SECTIONS]
    write_trajectory_csv(tpath, traj)
    write_poincare_csv(ppath, results)
    svg.write_text(svg_document(points=[results[0].points], labels=("u(0,t)", "u(0,t-tau1)")))
    _write_manifest(out, args)
    for pr in results:
        print(f"section {pr.section}: {len(pr.points)} hits, classification {pr.classification or 'withheld'}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    from . import reproduce

    checks = reproduce.run_all(include_slow=not args.quick)
    print(reproduce.format_table(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECKS_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lesliedelay", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, window=True):
        p.add_argument("--config", help="plain-text key = value configuration")
        p.add_argument("--out", default="out", help="output directory (created if absent)")
        p.add_argument("--overwrite", action="store_true", help="replace existing output files")
        p.add_argument("--seed", type=int, default=0, help="seed for perturbed initial data")
        if window:
            p.add_argument("--window", type=_pair, help="delay window T1,T2 (default 20,20)")
            p.add_argument("--modes", type=int, help="highest spatial mode (default: up to the first empty one)")

    for name, fn, text in (
        ("curves", cmd_curves, "switching-curve samples, endpoint links and an SVG overlay"),
        ("directions", cmd_directions, "curve samples annotated with the crossing direction"),
        ("hh", cmd_hh, "double-Hopf points (switching-curve intersections)"),
        ("classify", cmd_classify, "unfolding case, semi-lines and probe regions"),
    ):
        p = sub.add_parser(name, help=text)
        common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("simulate", help="integrate the nonlinear system and classify the attractor")
    common(p, window=False)
    p.add_argument("--tau", type=_pair, help="delays T1,T2 (else tau1/tau2 from the config)")
    p.add_argument("--grid", type=int, help="spatial grid points")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--t-end", type=float, dest="t_end", help="final time")
    p.add_argument("--t-transient", type=float, dest="t_transient", help="discarded initial window")
    p.add_argument("--noise", type=float, default=0.0, help="seeded nodal noise added to the initial function")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="run the reference reproduction suite and print a pass/fail table")
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.add_argument("--out", default=None, help=argparse.SUPPRESS)
    p.add_argument("--overwrite", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=0, help=argparse.SUPPRESS)
    p.add_argument("--quick", action="store_true", help="skip the long simulations")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.error(str(exc))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputExists as exc:
        print(f"refusing to overwrite: {exc}", file=sys.stderr)
        return EXIT_EXISTS
    except (LeslieDelayError, ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
