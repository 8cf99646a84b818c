"""
YAML scenario documents.

Each section maps onto a dataclass; field metadata names the value kind used for
coercion. Unknown keys and malformed values raise ConfigError with the dotted key path.
"""

import dataclasses
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from asteroid_gnc.core.environment import ASTRONOMICAL_UNIT, CIRCULAR, FIXED, SOLAR_MU
from asteroid_gnc.core.errors import ConfigError
from asteroid_gnc.gravity_models.base_gravity_model import (
    GRAVITATIONAL_CONSTANT,
    POLYHEDRON,
    get_supported_gravity_models,
)
from asteroid_gnc.shape_parsers.base_shape_parser import UNIT_SCALES, get_supported_shape_formats
from asteroid_gnc.utils.synthetic_shapes import get_supported_synthetic_shapes

logger = logging.getLogger(__name__)


def _field(default=None, kind="float", section=None):
    metadata = {"kind": kind, "section": section}
    if isinstance(default, list):
        return dataclasses.field(default_factory=lambda: list(default), metadata=metadata)
    return dataclasses.field(default=default, metadata=metadata)


def _section(cls, optional=False):
    if optional:
        return dataclasses.field(default=None, metadata={"kind": "section", "section": cls})
    return dataclasses.field(default_factory=cls, metadata={"kind": "section", "section": cls})


def _items(cls):
    return dataclasses.field(default_factory=list, metadata={"kind": "items", "section": cls})


@dataclasses.dataclass
class ShapeConfig:
    path: Optional[str] = _field(kind="str")
    units: Optional[str] = _field(kind="str")
    format: Optional[str] = _field(kind="str")
    synthetic: Optional[str] = _field(kind="str")
    subdivisions: int = _field(3, kind="int")
    semi_axes: Optional[List[float]] = _field(kind="vector")
    radius: float = _field(1000.0)


@dataclasses.dataclass
class GravityConfig:
    model: str = _field(POLYHEDRON, kind="str")
    density: float = _field(2100.0)  # kg/m^3, assumed; not a measured Castalia value
    gravitational_constant: float = _field(GRAVITATIONAL_CONSTANT)
    mu: Optional[float] = _field()  # point_mass model
    acceleration: Optional[List[float]] = _field(kind="vector")  # uniform model
    reference_radius: float = _field(1000.0)


@dataclasses.dataclass
class SunConfig:
    mode: str = _field(FIXED, kind="str")
    direction: List[float] = _field([1.0, 0.0, 0.0], kind="vector")
    distance: float = _field(ASTRONOMICAL_UNIT)
    orbit_radius: float = _field(ASTRONOMICAL_UNIT)
    orbit_rate: float = _field(0.0)
    phase: float = _field(0.0)
    plane_normal: List[float] = _field([0.0, 0.0, 1.0], kind="vector")
    reference_direction: List[float] = _field([1.0, 0.0, 0.0], kind="vector")


@dataclasses.dataclass
class EnvironmentConfig:
    rotation_period: Optional[float] = _field()  # s
    spin_rate: Optional[float] = _field()  # rad/s
    srp_coefficient: float = _field(0.0)
    solar_mu: float = _field(SOLAR_MU)
    include_indirect: bool = _field(True, kind="bool")
    disturbance_torque: List[float] = _field([0.0, 0.0, 0.0], kind="vector")
    sun: SunConfig = _section(SunConfig)


@dataclasses.dataclass
class SiteConfig:
    vertex: Optional[int] = _field(kind="int")
    position: Optional[List[float]] = _field(kind="vector")
    snap: bool = _field(False, kind="bool")
    longitude: Optional[float] = _field()


@dataclasses.dataclass
class DescentConfig:
    initial_position: List[float] = _field([-500.0, 1000.0, 1100.0], kind="vector")
    initial_velocity: List[float] = _field([2.2, -1.2, -0.1], kind="vector")
    final_position: List[float] = _field([0.0, 0.0, 100.0], kind="vector")
    final_velocity: List[float] = _field([0.0, 0.0, -0.2], kind="vector")
    final_acceleration: Optional[List[float]] = _field(kind="vector")  # default: -g at the target
    tau: Optional[float] = _field()
    dt: float = _field(0.5)
    kp: float = _field(4e-4)
    kd: float = _field(4e-2)
    feedforward: bool = _field(True, kind="bool")
    compensate_rotation: bool = _field(True, kind="bool")
    saturation: Optional[float] = _field()


@dataclasses.dataclass
class LandingConfig:
    initial_position: Optional[List[float]] = _field(kind="vector")  # default: descent terminal state
    initial_velocity: Optional[List[float]] = _field(kind="vector")
    initial_euler: List[float] = _field([0.1745, -0.3491, 0.3491], kind="vector")  # roll, pitch, yaw
    initial_rate: List[float] = _field([0.1, 0.2, -0.1], kind="vector")
    target_euler: List[float] = _field([0.0, 0.0, 0.0], kind="vector")
    mass: float = _field(50.0)
    dimensions: List[float] = _field([0.6, 0.36, 0.36], kind="vector")
    cp: float = _field(0.5)
    cd: float = _field(2.0)
    wheel_max_torque: float = _field(0.025)
    wheel_inertia: float = _field(1e-3)
    wheel_momentum_limit: Optional[float] = _field()
    dt: float = _field(0.05)
    t_max: float = _field(3600.0)


@dataclasses.dataclass
class HopTargetConfig:
    vertex: Optional[int] = _field(kind="int")
    position: Optional[List[float]] = _field(kind="vector")
    time_of_flight: float = _field(600.0)


@dataclasses.dataclass
class HopGridConfig:
    speeds: List[float] = _field([0.1, 0.2, 0.3, 0.45], kind="floats")
    azimuths_deg: List[float] = _field([0.0, 180.0], kind="floats")
    elevation_deg: float = _field(45.0)


@dataclasses.dataclass
class HopsConfig:
    launch_vertex: Optional[int] = _field(kind="int")  # default: the landing site
    launch_position: Optional[List[float]] = _field(kind="vector")
    dt: float = _field(1.0)
    t_max: float = _field(7200.0)
    tolerance: float = _field(0.1)
    max_iterations: int = _field(15, kind="int")
    workers: int = _field(1, kind="int")
    targets: List[HopTargetConfig] = _items(HopTargetConfig)
    velocities: List[List[float]] = _field([], kind="vectors")
    grid: Optional[HopGridConfig] = _section(HopGridConfig, optional=True)


@dataclasses.dataclass
class SamplingGridConfig:
    minimum: List[float] = _field(kind="vector")
    maximum: List[float] = _field(kind="vector")
    counts: List[int] = _field([10, 1, 1], kind="ints")


@dataclasses.dataclass
class SamplingConfig:
    points: List[List[float]] = _field([], kind="vectors")
    grid: Optional[SamplingGridConfig] = _section(SamplingGridConfig, optional=True)
    random_count: int = _field(0, kind="int")  # uniform points in the bounding box, drawn with `seed`
    random_scale: float = _field(1.5)


@dataclasses.dataclass
class OutputConfig:
    directory: Optional[str] = _field(kind="str")
    plots: bool = _field(False, kind="bool")
    record_wall_clock: bool = _field(False, kind="bool")


@dataclasses.dataclass
class ScenarioConfig:
    name: str = _field("scenario", kind="str")
    seed: int = _field(0, kind="int")
    shape: ShapeConfig = _section(ShapeConfig)
    gravity: GravityConfig = _section(GravityConfig)
    environment: EnvironmentConfig = _section(EnvironmentConfig)
    site: SiteConfig = _section(SiteConfig)
    descent: Optional[DescentConfig] = _section(DescentConfig, optional=True)
    landing: Optional[LandingConfig] = _section(LandingConfig, optional=True)
    hops: Optional[HopsConfig] = _section(HopsConfig, optional=True)
    sampling: Optional[SamplingConfig] = _section(SamplingConfig, optional=True)
    output: OutputConfig = _section(OutputConfig)

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    number = float(value)
    if not math.isfinite(number):
        raise ConfigError(f"{path}: expected a finite number, got {value!r}")
    return number


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _numbers(value, path: str, length: Optional[int] = None) -> List[float]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{path}: expected a list, got {value!r}")
    if length is not None and len(value) != length:
        raise ConfigError(f"{path}: expected {length} values, got {len(value)}")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _coerce(value, field: dataclasses.Field, path: str):
    kind = field.metadata["kind"]
    if value is None:
        return None
    if kind == "float":
        return _number(value, path)
    if kind == "int":
        return _integer(value, path)
    if kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true or false, got {value!r}")
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if kind == "vector":
        return _numbers(value, path, 3)
    if kind == "floats":
        return _numbers(value, path)
    if kind == "ints":
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        return [_integer(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if kind == "vectors":
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list of vectors, got {value!r}")
        return [_numbers(v, f"{path}[{i}]", 3) for i, v in enumerate(value)]
    if kind == "section":
        return _build(field.metadata["section"], value, path)
    if kind == "items":
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        return [_build(field.metadata["section"], v, f"{path}[{i}]") for i, v in enumerate(value)]
    raise ConfigError(f"{path}: unsupported field kind {kind}")


def _build(cls, data, path: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'scenario'}: expected a mapping, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(fields))
    if unknown:
        prefix = f"{path}." if path else ""
        raise ConfigError(f"Unknown key '{prefix}{unknown[0]}'")
    values = {}
    for name, value in data.items():
        values[name] = _coerce(value, fields[name], f"{path}.{name}" if path else name)
    return cls(**values)


def _exactly_one(section, names, path: str):
    given = [name for name in names if getattr(section, name) is not None]
    if len(given) != 1:
        raise ConfigError(f"{path}: give exactly one of {', '.join(names)} (got {given or 'none'})")


def _positive(value, path: str):
    if value is not None and not value > 0:
        raise ConfigError(f"{path}: must be positive, got {value}")


def validate_scenario(config: ScenarioConfig, base_dir: Optional[Path] = None) -> ScenarioConfig:
    shape = config.shape
    _exactly_one(shape, ("path", "synthetic"), "shape")
    if shape.path is not None:
        path = Path(shape.path)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
            shape.path = str(path)
        if not path.is_file():
            raise ConfigError(f"shape.path: shape model file not found: {path}")
        if shape.units is not None and shape.units.lower() not in UNIT_SCALES:
            raise ConfigError(f"shape.units: expected one of {sorted(UNIT_SCALES)}, got {shape.units}")
        if shape.format is not None and shape.format not in get_supported_shape_formats():
            raise ConfigError(f"shape.format: expected one of {get_supported_shape_formats()}, got {shape.format}")
    elif shape.synthetic not in get_supported_synthetic_shapes():
        raise ConfigError(f"shape.synthetic: expected one of {get_supported_synthetic_shapes()}, got {shape.synthetic}")
    if shape.subdivisions < 0:
        raise ConfigError(f"shape.subdivisions: must be non-negative, got {shape.subdivisions}")

    gravity = config.gravity
    if gravity.model not in get_supported_gravity_models():
        raise ConfigError(f"gravity.model: expected one of {get_supported_gravity_models()}, got {gravity.model}")
    _positive(gravity.density, "gravity.density")
    _positive(gravity.gravitational_constant, "gravity.gravitational_constant")
    if gravity.model == "point_mass" and gravity.mu is None:
        raise ConfigError("gravity.mu: required by the point_mass model")
    if gravity.model == "uniform" and gravity.acceleration is None:
        raise ConfigError("gravity.acceleration: required by the uniform model")

    environment = config.environment
    if environment.rotation_period is not None and environment.spin_rate is not None:
        raise ConfigError("environment: give rotation_period or spin_rate, not both")
    _positive(environment.rotation_period, "environment.rotation_period")
    if environment.sun.mode not in (FIXED, CIRCULAR):
        raise ConfigError(f"environment.sun.mode: expected {FIXED} or {CIRCULAR}, got {environment.sun.mode}")

    if config.descent is not None or config.landing is not None or (config.hops is not None and config.hops.launch_vertex is None and config.hops.launch_position is None):
        _exactly_one(config.site, ("vertex", "position"), "site")

    if config.descent is not None:
        _positive(config.descent.dt, "descent.dt")
        _positive(config.descent.tau, "descent.tau")
    if config.landing is not None:
        _positive(config.landing.dt, "landing.dt")
        _positive(config.landing.t_max, "landing.t_max")
        _positive(config.landing.mass, "landing.mass")
    if config.hops is not None:
        hops = config.hops
        if hops.launch_vertex is not None and hops.launch_position is not None:
            raise ConfigError("hops: give launch_vertex or launch_position, not both")
        _positive(hops.dt, "hops.dt")
        _positive(hops.t_max, "hops.t_max")
        _positive(hops.tolerance, "hops.tolerance")
        if hops.workers < 1:
            raise ConfigError(f"hops.workers: must be at least 1, got {hops.workers}")
        for i, target in enumerate(hops.targets):
            _exactly_one(target, ("vertex", "position"), f"hops.targets[{i}]")
            _positive(target.time_of_flight, f"hops.targets[{i}].time_of_flight")
    if config.sampling is not None and config.sampling.grid is not None:
        grid = config.sampling.grid
        if grid.minimum is None or grid.maximum is None:
            raise ConfigError("sampling.grid: minimum and maximum are required")
        if len(grid.counts) != 3 or min(grid.counts) < 1:
            raise ConfigError(f"sampling.grid.counts: expected three positive counts, got {grid.counts}")
    return config


def parse_scenario(data, base_dir: Optional[Path] = None) -> ScenarioConfig:
    return validate_scenario(_build(ScenarioConfig, data, ""), base_dir)


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Scenario file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigError(f"Scenario {path} is not valid YAML: {e}") from e
    config = parse_scenario(data, base_dir=path.resolve().parent)
    logger.info(f"Loaded scenario '{config.name}' from {path}")
    return config
