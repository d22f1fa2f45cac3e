"""Declarative experiment description and its validation."""
from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Any

from .densities import DensityModel, NoiseModel
from .errors import AdmissibilityError, ConfigError, RmShiftError
from .estimator import VARIANTS
from .kde import DEFAULT_FLOOR_EPS, DEFAULT_GRID_SIZE
from .kernels import get_kernel
from .shapes import ShapeFunction, fourier_first

DEFAULT_BOUNDARY = "periodic"


class AdmissibilityWarning(UserWarning):
    """A hypothesis of the convergence theory fails but the run may still proceed."""


@dataclass(frozen=True)
class KdeConfig:
    kernel: str = "epanechnikov"
    alpha: float = 0.4
    grid_size: int = DEFAULT_GRID_SIZE
    floor_eps: float = DEFAULT_FLOOR_EPS
    mode: str = "grid"
    boundary: str = DEFAULT_BOUNDARY


@dataclass(frozen=True)
class EstimatorConfig:
    theta0: float = 0.0
    warmup: int = 10
    variant: str = "plug_in"
    gain_scale: float = 1.0


def default_record_points(n_steps: int) -> tuple[int, ...]:
    points = {10 ** k for k in range(2, 19) if 10 ** k <= n_steps}
    points.add(n_steps)
    return tuple(sorted(points))


@dataclass(frozen=True)
class ExperimentConfig:
    theta_true: float
    sign_f1: int
    shape: ShapeFunction
    noise: NoiseModel
    n_steps: int
    n_reps: int
    seed: int
    density: DensityModel = field(default_factory=DensityModel)
    kde: KdeConfig = field(default_factory=KdeConfig)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    record_points: tuple[int, ...] = ()
    clt_checks: bool = True
    trajectory_reps: int = 3

    def __post_init__(self):
        if not self.record_points:
            object.__setattr__(self, "record_points", default_record_points(self.n_steps))
        else:
            object.__setattr__(self, "record_points",
                               tuple(int(p) for p in self.record_points))

    def with_overrides(self, **changes) -> "ExperimentConfig":
        """Copy with top-level fields replaced; record points are re-defaulted
        when ``n_steps`` changes and none are given."""
        if "n_steps" in changes and "record_points" not in changes:
            changes["record_points"] = default_record_points(changes["n_steps"])
        return replace(self, **changes)

    def with_estimator(self, **changes) -> "ExperimentConfig":
        return replace(self, estimator=replace(self.estimator, **changes))

    def with_kde(self, **changes) -> "ExperimentConfig":
        return replace(self, kde=replace(self.kde, **changes))

    def validate(self, strict: bool = False) -> list[str]:
        """Check every field; return warnings (raised as errors when ``strict``)."""
        return validate(self, strict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "theta_true": self.theta_true,
            "sign_f1": self.sign_f1,
            "shape": {"family": self.shape.family,
                      "coefficients": list(self.shape.coefficients)},
            "density": {"family": self.density.family,
                        "amplitude": self.density.amplitude},
            "noise": {"family": self.noise.family, "sigma": self.noise.sigma},
            "kde": dict(vars(self.kde)),
            "estimator": dict(vars(self.estimator)),
            "n_steps": self.n_steps,
            "n_reps": self.n_reps,
            "seed": self.seed,
            "record_points": list(self.record_points),
            "clt_checks": self.clt_checks,
            "trajectory_reps": self.trajectory_reps,
        }

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form; independent of key order."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


_REQUIRED = ("theta_true", "sign_f1", "shape.family", "shape.coefficients",
             "noise.sigma", "n_steps", "n_reps", "seed")
_SECTIONS = {
    "shape": {"family", "coefficients"},
    "density": {"family", "amplitude"},
    "noise": {"family", "sigma"},
    "kde": set(KdeConfig.__dataclass_fields__),
    "estimator": set(EstimatorConfig.__dataclass_fields__),
}
_TOP = {"theta_true", "sign_f1", "n_steps", "n_reps", "seed", "record_points",
        "clt_checks", "trajectory_reps"} | set(_SECTIONS)


def _lookup(data, dotted):
    node = data
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


def _number(data, key, kind=float):
    value = _lookup(data, key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def from_dict(data: dict[str, Any]) -> ExperimentConfig:
    """Build a config from a parsed key tree, applying defaults.

    Raises:
        ConfigError: a required key is missing, a key is unknown, or a value
            has the wrong type or range.
    """
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    for key in _REQUIRED:
        if _lookup(data, key) is None:
            raise ConfigError(f"missing required key '{key}'")
    for key, value in data.items():
        if key not in _TOP:
            raise ConfigError(f"unknown key '{key}'")
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"{key}: expected a mapping")
            for sub in value:
                if sub not in _SECTIONS[key]:
                    raise ConfigError(f"unknown key '{key}.{sub}'")

    try:
        coefs = _lookup(data, "shape.coefficients")
        if not isinstance(coefs, list):
            raise ConfigError("shape.coefficients: expected a list of numbers")
        shape = ShapeFunction(str(_lookup(data, "shape.family")), tuple(coefs))
        dens = data.get("density", {})
        density = DensityModel(str(dens.get("family", "uniform")),
                               float(dens.get("amplitude", 0.0)))
        noise = NoiseModel(str(data["noise"].get("family", "gaussian")),
                           _number(data, "noise.sigma"))
        kde = KdeConfig(**data.get("kde", {}))
        est = EstimatorConfig(**data.get("estimator", {}))
    except ConfigError:
        raise
    except (RmShiftError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    return ExperimentConfig(
        theta_true=_number(data, "theta_true"),
        sign_f1=_number(data, "sign_f1", int),
        shape=shape,
        density=density,
        noise=noise,
        kde=kde,
        estimator=est,
        n_steps=_number(data, "n_steps", int),
        n_reps=_number(data, "n_reps", int),
        seed=_number(data, "seed", int),
        record_points=tuple(data.get("record_points", ())),
        clt_checks=bool(data.get("clt_checks", True)),
        trajectory_reps=int(data.get("trajectory_reps", 3)),
    )


def validate(cfg: ExperimentConfig, strict: bool = False) -> list[str]:
    notes = []

    def warn(message):
        if strict:
            raise AdmissibilityError(message)
        warnings.warn(message, AdmissibilityWarning, stacklevel=3)
        notes.append(message)

    if not (math.isfinite(cfg.theta_true) and abs(cfg.theta_true) < 0.25):
        raise AdmissibilityError(f"theta_true: theta outside admissible set C "
                                 f"(|{cfg.theta_true}| must be < 1/4)")
    if cfg.sign_f1 not in (-1, 1):
        raise ConfigError("sign_f1: must be -1 or +1")
    if cfg.n_steps < 1:
        raise ConfigError("n_steps: must be positive")
    if cfg.n_reps < 1:
        raise ConfigError("n_reps: must be positive")
    if not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("seed: must be an unsigned 64-bit integer")
    rp = cfg.record_points
    if list(rp) != sorted(set(rp)) or rp[0] < 1 or rp[-1] > cfg.n_steps:
        raise ConfigError("record_points: must be strictly increasing within [1, n_steps]")
    if cfg.trajectory_reps < 0:
        raise ConfigError("trajectory_reps: must be nonnegative")

    k = cfg.kde
    try:
        get_kernel(k.kernel)
    except RmShiftError as exc:
        raise ConfigError(f"kde.kernel: {exc}") from exc
    if not 0.0 < k.alpha < 1.0:
        raise ConfigError("kde.alpha: must lie in (0, 1)")
    if int(k.grid_size) != k.grid_size or k.grid_size < 2:
        raise ConfigError("kde.grid_size: must be an integer >= 2")
    if not k.floor_eps > 0:
        raise ConfigError("kde.floor_eps: must be positive")
    if k.mode not in ("grid", "exact"):
        raise ConfigError("kde.mode: must be 'grid' or 'exact'")
    if k.boundary not in ("none", "periodic"):
        raise ConfigError("kde.boundary: must be 'none' or 'periodic'")

    e = cfg.estimator
    if e.variant not in VARIANTS:
        raise ConfigError(f"estimator.variant: must be one of {VARIANTS}")
    if not (math.isfinite(e.theta0) and abs(e.theta0) <= 0.25):
        raise ConfigError("estimator.theta0: must lie in C = [-1/4, 1/4]")
    if int(e.warmup) != e.warmup or not 1 <= e.warmup < cfg.n_steps:
        raise ConfigError("estimator.warmup: must be an integer in [1, n_steps)")
    if not e.gain_scale > 0:
        raise ConfigError("estimator.gain_scale: must be positive")

    f1 = fourier_first(cfg.shape)
    if f1 == 0 or math.copysign(1, f1) != cfg.sign_f1:
        warn(f"sign_f1={cfg.sign_f1} does not match the shape's f1={f1:.6g}")
    if cfg.clt_checks:
        if 4 * math.pi * abs(f1) <= 1:
            raise AdmissibilityError(f"shape: CLT condition violated "
                                     f"(4*pi*|f1| = {4 * math.pi * abs(f1):.6g} <= 1)")
        if not 0.25 < k.alpha < 0.5:
            warn(f"kde.alpha={k.alpha} outside (1/4, 1/2) required for asymptotic normality")
    return notes


def read_config(path) -> ExperimentConfig:
    """Parse a YAML (or JSON) key tree into a config without admissibility checks."""
    import yaml

    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return from_dict(data)


def load_config(path, strict: bool = False) -> ExperimentConfig:
    """Read and fully validate a config file."""
    cfg = read_config(path)
    validate(cfg, strict)
    return cfg


def dump_config(cfg: ExperimentConfig, path) -> None:
    import yaml

    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=True)
