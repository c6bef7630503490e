"""Plain-text ``key = value`` configuration shared by every subcommand.

Lines are ``key = value``; ``#`` starts a comment. Unknown keys are errors.
Complex normal-form coefficients are given as two decimals ``re im``.
``probe = tau1, tau2`` may be repeated.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .model import ModelParams
from .unfolding import K_NAMES, NormalFormCoeffs

MODEL_KEYS = ModelParams.keys()
HH_KEYS = ("hh_tau1", "hh_tau2", "hh_omega1", "hh_omega2")
SIM_KEYS = ("tau1", "tau2", "grid_points", "dt", "t_end", "t_transient", "history_du", "history_dv")
INT_KEYS = ("grid_points",)
OTHER_KEYS = ("chart_radius",)
REPEATABLE = ("probe",)
KNOWN = set(MODEL_KEYS) | set(K_NAMES) | set(HH_KEYS) | set(SIM_KEYS) | set(OTHER_KEYS) | set(REPEATABLE)


@dataclass
class Config:
    params: ModelParams
    K: NormalFormCoeffs | None = None
    hh: dict[str, float] = field(default_factory=dict)
    sim: dict[str, float] = field(default_factory=dict)
    probes: list[tuple[float, float]] = field(default_factory=list)
    chart_radius: float | None = None
    path: str | None = None
    missing_K: tuple[str, ...] = ()

    def require_K(self) -> NormalFormCoeffs:
        if self.K is None:
            raise ConfigError(f"missing normal-form coefficient {self.missing_K[0]}", path=self.path)
        return self.K


def _float(text: str, key: str, line: int, path: str | None) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}", line, path) from None


def parse(text: str, path: str | None = None) -> Config:
    seen: dict[str, int] = {}
    values: dict[str, object] = {}
    probes: list[tuple[float, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", lineno, path)
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in KNOWN:
            raise ConfigError(f"unknown key {key!r}", lineno, path)
        if key in seen and key not in REPEATABLE:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", lineno, path)
        seen[key] = lineno
        if key == "probe":
            parts = value.replace(",", " ").split()
            if len(parts) != 2:
                raise ConfigError("probe expects two delays 'tau1, tau2'", lineno, path)
            probes.append((_float(parts[0], key, lineno, path), _float(parts[1], key, lineno, path)))
        elif key in K_NAMES:
            parts = value.split()
            if len(parts) != 2:
                raise ConfigError(f"{key} expects 're im'", lineno, path)
            values[key] = complex(_float(parts[0], key, lineno, path), _float(parts[1], key, lineno, path))
        elif key in INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(f"{key}: expected an integer, got {value!r}", lineno, path) from None
        else:
            values[key] = _float(value, key, lineno, path)

    missing = [k for k in MODEL_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing model parameter {missing[0]}", path=path)
    try:
        params = ModelParams(**{k: values[k] for k in MODEL_KEYS})
    except ValueError as exc:
        raise ConfigError(str(exc), seen.get(str(exc).split()[0]), path) from None

    missing_K = tuple(k for k in K_NAMES if k not in values)
    K = None
    if not missing_K:
        K = NormalFormCoeffs(**{k: values[k] for k in K_NAMES})
    return Config(
        params=params,
        K=K,
        hh={k: values[k] for k in HH_KEYS if k in values},
        sim={k: values[k] for k in SIM_KEYS if k in values},
        probes=probes,
        chart_radius=values.get("chart_radius"),
        path=path,
        missing_K=missing_K,
    )


def load(path: str | Path) -> Config:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path=str(path)) from None
    return parse(text, str(path))


def reference_text() -> str:
    """Config reproducing the reference parameter set and normal-form fixture."""
    from .model import REFERENCE_PARAMS
    from .unfolding import REFERENCE_K

    rows = ["# model"]
    rows += [f"{k} = {v!r}" for k, v in REFERENCE_PARAMS.as_dict().items()]
    rows.append("# normal-form coefficients (re im)")
    rows += [f"{k} = {getattr(REFERENCE_K, k).real!r} {getattr(REFERENCE_K, k).imag!r}" for k in K_NAMES]
    rows += ["probe = 3.82, 1.4345", "probe = 3.905, 1.4136", "probe = 3.9043, 1.418"]
    return "\n".join(rows) + "\n"
