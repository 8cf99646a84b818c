"""
Tracking control: the descent PD acceleration law and the reaction-wheel attitude PD law,
plus the per-step controller objects the propagator drives.

A controller exposes command(state) -> ControlOutput, evaluated once per step and held
over it, and commit(output, dt), called after the step is accepted.
"""

import dataclasses
import logging
import math
from typing import Optional

import numpy as np

from asteroid_gnc.core.errors import AmbiguousAttitudeError
from asteroid_gnc.core.frames import SiteFrame, point_to_body, vector_to_site
from asteroid_gnc.core.guidance import GuidanceProfile, ReferenceSample
from asteroid_gnc.utils.attitude import IDENTITY, rotation_error_vector, rotation_matrix

logger = logging.getLogger(__name__)

DEFAULT_KP = 4e-4  # 1/s^2
DEFAULT_KD = 4e-2  # 1/s
DEFAULT_CP = 0.5  # N m / rad
DEFAULT_CD = 2.0  # N m s / rad
DEFAULT_WHEEL_TORQUE = 0.025  # N m
DEFAULT_WHEEL_INERTIA = 1e-3  # kg m^2
# Attitude errors closer than this to pi have no well-defined rotation axis
AMBIGUOUS_ANGLE_MARGIN = 1e-6

# sat_flags bit layout
ACCEL_SATURATION_SHIFT = 0
WHEEL_SATURATION_SHIFT = 3
MOMENTUM_LIMIT_SHIFT = 6


def _per_axis(value, name: str) -> np.ndarray:
    v = np.array(np.broadcast_to(np.asarray(value, dtype=float), (3,)))
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be finite and non-negative, got {v.tolist()}")
    v.setflags(write=False)
    return v


def saturation_flags(accel=None, wheels=None, momentum=None) -> int:
    flags = 0
    for shift, bits in ((ACCEL_SATURATION_SHIFT, accel), (WHEEL_SATURATION_SHIFT, wheels), (MOMENTUM_LIMIT_SHIFT, momentum)):
        if bits is None:
            continue
        for axis, on in enumerate(bits):
            if on:
                flags |= 1 << (shift + axis)
    return flags


@dataclasses.dataclass(frozen=True, eq=False)
class TranslationGains:
    kp: np.ndarray = DEFAULT_KP
    kd: np.ndarray = DEFAULT_KD
    feedforward: bool = True
    # also cancel Coriolis and centrifugal terms of the rotating site frame
    compensate_rotation: bool = True
    saturation: Optional[float] = None  # m/s^2 per axis

    def __post_init__(self):
        object.__setattr__(self, "kp", _per_axis(self.kp, "kp"))
        object.__setattr__(self, "kd", _per_axis(self.kd, "kd"))
        if self.saturation is not None and not self.saturation >= 0:
            raise ValueError(f"Acceleration saturation must be non-negative, got {self.saturation}")


@dataclasses.dataclass(frozen=True, eq=False)
class AttitudeGains:
    cp: np.ndarray = DEFAULT_CP
    cd: np.ndarray = DEFAULT_CD

    def __post_init__(self):
        object.__setattr__(self, "cp", _per_axis(self.cp, "cp"))
        object.__setattr__(self, "cd", _per_axis(self.cd, "cd"))


@dataclasses.dataclass(frozen=True, eq=False)
class SpacecraftInertia:
    mass: float
    dimensions: tuple
    tensor: np.ndarray

    def __post_init__(self):
        tensor = np.array(self.tensor, dtype=float).reshape(3, 3)
        if not np.allclose(tensor, tensor.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(tensor).max())):
            raise ValueError("Inertia tensor must be symmetric")
        if np.linalg.eigvalsh(tensor).min() <= 0:
            raise ValueError("Inertia tensor must be positive definite")
        tensor.setflags(write=False)
        object.__setattr__(self, "tensor", tensor)


def box_inertia(mass: float, dimensions) -> SpacecraftInertia:
    """Uniform rectangular box of side lengths (a, b, c) along body X, Y, Z."""
    a, b, c = (float(d) for d in dimensions)
    if mass <= 0 or min(a, b, c) <= 0:
        raise ValueError(f"Mass and dimensions must be positive, got {mass} and {(a, b, c)}")
    tensor = mass / 12.0 * np.diag([b * b + c * c, a * a + c * c, a * a + b * b])
    return SpacecraftInertia(mass=float(mass), dimensions=(a, b, c), tensor=tensor)


@dataclasses.dataclass(frozen=True)
class TranslationCommand:
    acceleration: np.ndarray
    raw: np.ndarray
    saturated: np.ndarray


def descent_accel_command(
    position,
    velocity,
    reference: ReferenceSample,
    gains: TranslationGains,
    gravity=None,
    disturbance=None,
    apparent=None,
) -> TranslationCommand:
    """
    u = -kp e - kd e_dot, plus a_d - g - d (- apparent) with feedforward on, clamped per axis.

    All vectors are in the site frame; `apparent` is the Coriolis + centrifugal acceleration
    the rotating frame adds at the current state.
    """
    error = np.asarray(position, dtype=float) - reference.position
    error_rate = np.asarray(velocity, dtype=float) - reference.velocity
    raw = -gains.kp * error - gains.kd * error_rate
    if gains.feedforward:
        raw = raw + reference.acceleration
        for term in (gravity, disturbance, apparent):
            if term is not None:
                raw = raw - np.asarray(term, dtype=float)

    if gains.saturation is None:
        return TranslationCommand(acceleration=raw, raw=raw, saturated=np.zeros(3, dtype=bool))
    clamped = np.clip(raw, -gains.saturation, gains.saturation)
    return TranslationCommand(acceleration=clamped, raw=raw, saturated=np.abs(raw) > gains.saturation)


@dataclasses.dataclass(frozen=True)
class WheelAllocation:
    body_torque: np.ndarray  # torque the wheels exert on the spacecraft
    saturated: np.ndarray
    momentum_limited: np.ndarray


@dataclasses.dataclass
class ReactionWheelSet:
    """
    Three wheels aligned with the body axes. Wheel i supplies body torque component i;
    its stored momentum changes by the opposite amount.
    """

    max_torque: float = DEFAULT_WHEEL_TORQUE
    inertia: float = DEFAULT_WHEEL_INERTIA
    momentum_limit: Optional[float] = None
    momentum: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.max_torque < 0 or self.inertia <= 0:
            raise ValueError(f"Invalid wheel parameters: max_torque={self.max_torque}, inertia={self.inertia}")
        if self.momentum_limit is not None and self.momentum_limit <= 0:
            raise ValueError(f"Momentum limit must be positive, got {self.momentum_limit}")
        self.momentum = np.array(self.momentum, dtype=float).reshape(3)

    @classmethod
    def from_wheel_geometry(
        cls, mass: float, diameter: float, max_torque: float = DEFAULT_WHEEL_TORQUE, momentum_limit: Optional[float] = None
    ) -> "ReactionWheelSet":
        """Spin inertia of a solid disc rotor, 1/2 m r^2."""
        if mass <= 0 or diameter <= 0:
            raise ValueError(f"Wheel mass and diameter must be positive, got {mass} and {diameter}")
        inertia = 0.5 * mass * (diameter / 2.0) ** 2
        logger.debug(f"Wheel inertia from geometry: {inertia:.4e} kg m^2")
        return cls(max_torque=max_torque, inertia=inertia, momentum_limit=momentum_limit)

    @property
    def wheel_speeds(self) -> np.ndarray:
        return self.momentum / self.inertia

    def allocate(self, torque_command) -> WheelAllocation:
        command = np.asarray(torque_command, dtype=float)
        torque = np.clip(command, -self.max_torque, self.max_torque)
        saturated = np.abs(command) > self.max_torque
        limited = np.zeros(3, dtype=bool)
        if self.momentum_limit is not None:
            # a wheel at its limit refuses torque that would spin it up further
            at_limit = np.abs(self.momentum) >= self.momentum_limit
            pushing = -torque * np.sign(self.momentum) > 0
            limited = at_limit & pushing
            torque = np.where(limited, 0.0, torque)
        return WheelAllocation(body_torque=torque, saturated=saturated, momentum_limited=limited)

    def commit(self, body_torque, dt: float):
        self.momentum = self.momentum - np.asarray(body_torque, dtype=float) * dt


@dataclasses.dataclass(frozen=True)
class AttitudeCommand:
    body_torque: np.ndarray
    raw: np.ndarray
    error: np.ndarray
    saturated: np.ndarray
    momentum_limited: np.ndarray


def attitude_torque_command(
    attitude, rate, target_attitude, target_rate, gains: AttitudeGains, wheels: ReactionWheelSet
) -> AttitudeCommand:
    error = rotation_error_vector(attitude, target_attitude)
    angle = float(np.linalg.norm(error))
    if angle > math.pi - AMBIGUOUS_ANGLE_MARGIN:
        raise AmbiguousAttitudeError(f"Attitude error of {math.degrees(angle):.4f} deg has no unique axis")
    raw = -gains.cp * error - gains.cd * (np.asarray(rate, dtype=float) - np.asarray(target_rate, dtype=float))
    allocation = wheels.allocate(raw)
    return AttitudeCommand(
        body_torque=allocation.body_torque,
        raw=raw,
        error=error,
        saturated=allocation.saturated,
        momentum_limited=allocation.momentum_limited,
    )


@dataclasses.dataclass(frozen=True)
class ControlOutput:
    acceleration: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(3))
    torque: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(3))
    wheel_torques: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(3))
    flags: int = 0

    def merged(self, other: "ControlOutput") -> "ControlOutput":
        return ControlOutput(
            acceleration=self.acceleration + other.acceleration,
            torque=self.torque + other.torque,
            wheel_torques=self.wheel_torques + other.wheel_torques,
            flags=self.flags | other.flags,
        )


class NullController:
    """Free flight: no acceleration, no torque."""

    def command(self, state) -> ControlOutput:
        return ControlOutput()

    def commit(self, output: ControlOutput, dt: float):
        pass


class DescentController:
    def __init__(
        self,
        profile: GuidanceProfile,
        gains: TranslationGains,
        gravity_model,
        environment,
        frame: SiteFrame,
        start_time: float = 0.0,
    ):
        self.profile = profile
        self.gains = gains
        self.gravity_model = gravity_model
        self.environment = environment
        self.frame = frame
        self.start_time = start_time
        self._spin_site = vector_to_site(frame, environment.spin_vector)
        self._origin_site = vector_to_site(frame, frame.origin)

    def command(self, state) -> ControlOutput:
        if state.frame != "site":
            raise ValueError(f"Descent control runs in the site frame, got a {state.frame} state")
        reference = self.profile.sample(state.t - self.start_time)
        gravity = disturbance = apparent = None
        if self.gains.feedforward:
            body_point = point_to_body(self.frame, state.position)
            gravity = vector_to_site(self.frame, self.gravity_model.acceleration(body_point))
            disturbance = vector_to_site(self.frame, self.environment.disturbance_accel(body_point, state.t))
            if self.gains.compensate_rotation:
                w = self._spin_site
                radius = state.position + self._origin_site
                apparent = -2.0 * np.cross(w, state.velocity) - np.cross(w, np.cross(w, radius))
        command = descent_accel_command(
            state.position, state.velocity, reference, self.gains, gravity, disturbance, apparent
        )
        return ControlOutput(acceleration=command.acceleration, flags=saturation_flags(accel=command.saturated))

    def commit(self, output: ControlOutput, dt: float):
        pass


class AttitudeController:
    """
    Reaction-wheel attitude hold. With `frame_rate` set (rotation rate of the tagged frame,
    in that frame's axes), the target rate follows the frame so the target attitude is held
    relative to it.
    """

    def __init__(
        self,
        gains: AttitudeGains,
        wheels: ReactionWheelSet,
        target_attitude=IDENTITY,
        target_rate=(0.0, 0.0, 0.0),
        frame_rate=None,
    ):
        self.gains = gains
        self.wheels = wheels
        self.target_attitude = np.asarray(target_attitude, dtype=float)
        self.target_rate = np.asarray(target_rate, dtype=float)
        self.frame_rate = None if frame_rate is None else np.asarray(frame_rate, dtype=float)

    def command(self, state) -> ControlOutput:
        target_rate = self.target_rate
        if self.frame_rate is not None:
            target_rate = target_rate + rotation_matrix(state.attitude).T @ self.frame_rate
        command = attitude_torque_command(
            state.attitude, state.rate, self.target_attitude, target_rate, self.gains, self.wheels
        )
        return ControlOutput(
            torque=command.body_torque,
            wheel_torques=command.body_torque,
            flags=saturation_flags(wheels=command.saturated, momentum=command.momentum_limited),
        )

    def commit(self, output: ControlOutput, dt: float):
        self.wheels.commit(output.wheel_torques, dt)


class CombinedController:
    def __init__(self, translation, attitude):
        self.translation = translation
        self.attitude = attitude

    def command(self, state) -> ControlOutput:
        return self.translation.command(state).merged(self.attitude.command(state))

    def commit(self, output: ControlOutput, dt: float):
        self.translation.commit(output, dt)
        self.attitude.commit(output, dt)
