"""
Asteroid spin state, sun ephemeris and the solar disturbance acceleration.

Everything here is immutable; one AsteroidEnvironment can be shared by any number of
concurrent propagations.
"""

import dataclasses
import logging
import math
from typing import Tuple

import numpy as np
from scipy.spatial.transform import Rotation

logger = logging.getLogger(__name__)

FIXED = "fixed"
CIRCULAR = "circular"

ASTRONOMICAL_UNIT = 1.495978707e11  # m
SOLAR_MU = 1.327e20  # m^3/s^2
SPIN_AXIS = (0.0, 0.0, 1.0)


def _unit(vector, name: str) -> Tuple[float, float, float]:
    v = np.asarray(vector, dtype=float).reshape(3)
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError(f"{name} must be a finite non-zero vector, got {v.tolist()}")
    return tuple((v / norm).tolist())


@dataclasses.dataclass(frozen=True)
class SpinState:
    """Constant spin about the body-fixed Z axis."""

    rate: float = 0.0  # rad/s

    def __post_init__(self):
        if not math.isfinite(self.rate) or self.rate < 0:
            raise ValueError(f"Spin rate must be finite and non-negative, got {self.rate}")

    @classmethod
    def from_period(cls, period: float) -> "SpinState":
        """Spin state from a rotation period in seconds."""
        if period <= 0:
            raise ValueError(f"Rotation period must be positive, got {period}")
        return cls(2.0 * math.pi / period)

    @property
    def vector(self) -> np.ndarray:
        return self.rate * np.array(SPIN_AXIS)

    @property
    def period(self) -> float:
        return math.inf if self.rate == 0 else 2.0 * math.pi / self.rate


@dataclasses.dataclass(frozen=True)
class SunEphemeris:
    mode: str = FIXED
    # fixed mode
    direction: Tuple[float, float, float] = (1.0, 0.0, 0.0)
    distance: float = ASTRONOMICAL_UNIT
    # circular mode
    orbit_radius: float = ASTRONOMICAL_UNIT
    orbit_rate: float = 0.0  # rad/s
    phase: float = 0.0  # rad at t = 0
    plane_normal: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    reference_direction: Tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if self.mode not in (FIXED, CIRCULAR):
            raise ValueError(f"Invalid sun ephemeris mode: {self.mode}")
        if self.distance <= 0 or self.orbit_radius <= 0:
            raise ValueError("Sun distance and orbit radius must be positive")
        object.__setattr__(self, "direction", _unit(self.direction, "Sun direction"))
        normal = np.array(_unit(self.plane_normal, "Orbit plane normal"))
        reference = np.asarray(self.reference_direction, dtype=float)
        # reference direction is projected into the orbit plane
        in_plane = reference - (reference @ normal) * normal
        object.__setattr__(self, "plane_normal", tuple(normal.tolist()))
        object.__setattr__(self, "reference_direction", _unit(in_plane, "Orbit reference direction"))


@dataclasses.dataclass(frozen=True)
class DisturbanceParams:
    srp_coefficient: float = 0.0  # eta, m^3/s^2
    solar_mu: float = SOLAR_MU
    include_indirect: bool = True

    def __post_init__(self):
        if self.srp_coefficient < 0 or self.solar_mu < 0:
            raise ValueError("SRP coefficient and solar gravitational parameter must be non-negative")


def sun_position(ephemeris: SunEphemeris, t: float, spin_rate: float = 0.0) -> np.ndarray:
    """Sun position d(t) in the rotating body frame (m)."""
    if t < 0:
        raise ValueError(f"Time must be non-negative, got {t}")
    if ephemeris.mode == FIXED:
        return ephemeris.distance * np.array(ephemeris.direction)

    normal = np.array(ephemeris.plane_normal)
    reference = np.array(ephemeris.reference_direction)
    angle = ephemeris.phase + ephemeris.orbit_rate * t
    inertial = ephemeris.orbit_radius * (math.cos(angle) * reference + math.sin(angle) * np.cross(normal, reference))
    if spin_rate == 0.0:
        return inertial
    return Rotation.from_rotvec(-spin_rate * t * np.array(SPIN_AXIS)).apply(inertial)


def _cube_ratio_minus_one(q: float) -> float:
    # (1 + q)^(3/2) - 1 without cancellation for small q
    return q * (3.0 + 3.0 * q + q * q) / (1.0 + (1.0 + q) ** 1.5)


def disturbance_accel(params: DisturbanceParams, ephemeris: SunEphemeris, position, t: float, spin_rate: float = 0.0) -> np.ndarray:
    """
    SRP plus solar third-body acceleration at `position` (body frame, m/s^2).

    SRP is eta * u / |d|^2 with u the sun-to-asteroid unit vector, so it does not depend
    on the spacecraft offset. The third-body term is -mu (R - d)/|R - d|^3, completed with
    the indirect term -mu d/|d|^3 unless `include_indirect` is off.
    """
    r = np.asarray(position, dtype=float)
    d = sun_position(ephemeris, t, spin_rate)
    relative = r - d
    separation = float(np.linalg.norm(relative))
    if separation == 0.0:
        raise ValueError("Spacecraft position coincides with the sun")
    d_norm = float(np.linalg.norm(d))

    accel = np.zeros(3)
    if params.srp_coefficient:
        accel += params.srp_coefficient * (-d / d_norm) / d_norm ** 2
    if params.solar_mu:
        if params.include_indirect:
            q = float(r @ (r - 2.0 * d)) / d_norm ** 2
            accel -= params.solar_mu / separation ** 3 * (r + _cube_ratio_minus_one(q) * d)
        else:
            accel -= params.solar_mu * relative / separation ** 3
    return accel


@dataclasses.dataclass(frozen=True)
class AsteroidEnvironment:
    spin: SpinState = SpinState()
    sun: SunEphemeris = SunEphemeris()
    disturbance: DisturbanceParams = DisturbanceParams()
    disturbance_torque: Tuple[float, float, float] = (0.0, 0.0, 0.0)  # N m, spacecraft body axes

    def __post_init__(self):
        torque = np.asarray(self.disturbance_torque, dtype=float).reshape(3)
        object.__setattr__(self, "disturbance_torque", tuple(torque.tolist()))

    @property
    def spin_vector(self) -> np.ndarray:
        return self.spin.vector

    @property
    def torque(self) -> np.ndarray:
        return np.array(self.disturbance_torque)

    def sun_position(self, t: float) -> np.ndarray:
        return sun_position(self.sun, t, self.spin.rate)

    def disturbance_accel(self, position, t: float) -> np.ndarray:
        return disturbance_accel(self.disturbance, self.sun, position, t, self.spin.rate)
