"""
Descent reference trajectory with a quadratic acceleration profile.

    a_d(t) = C0 + C1 t + C2 t^2
    v_d(t) = C0 t + C1 t^2 / 2 + C2 t^3 / 3 + v0
    r_d(t) = C0 t^2 / 2 + C1 t^3 / 6 + C2 t^4 / 12 + v0 t + r0

The coefficients follow from the boundary states at t = 0 and t = tau. The transfer time
is chosen so that the vertical (Z) channel has C2 = 0.
"""

import dataclasses
import logging
import math
from typing import Optional

import numpy as np

from asteroid_gnc.core.errors import InfeasibleBoundaryError
from asteroid_gnc.core.frames import SiteFrame, point_to_body, vector_to_site

logger = logging.getLogger(__name__)

VERTICAL = 2


def _vector(value, name: str) -> np.ndarray:
    v = np.array(value, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be finite, got {v.tolist()}")
    v.setflags(write=False)
    return v


@dataclasses.dataclass(frozen=True, eq=False)
class BoundaryConditions:
    initial_position: np.ndarray
    initial_velocity: np.ndarray
    final_position: np.ndarray
    final_velocity: np.ndarray
    final_acceleration: np.ndarray = (0.0, 0.0, 0.0)

    def __post_init__(self):
        for field in dataclasses.fields(self):
            object.__setattr__(self, field.name, _vector(getattr(self, field.name), field.name))

    def with_final_acceleration(self, acceleration) -> "BoundaryConditions":
        return dataclasses.replace(self, final_acceleration=acceleration)


@dataclasses.dataclass(frozen=True)
class ReferenceSample:
    acceleration: np.ndarray
    velocity: np.ndarray
    position: np.ndarray


@dataclasses.dataclass(frozen=True, eq=False)
class GuidanceProfile:
    c0: np.ndarray  # m/s^2
    c1: np.ndarray  # m/s^3
    c2: np.ndarray  # m/s^4
    tau: float  # s
    boundary: BoundaryConditions

    def sample(self, t: float) -> ReferenceSample:
        return sample_profile(self, t)


def solve_profile(boundary: BoundaryConditions, tau: float) -> GuidanceProfile:
    if not tau > 0:
        raise ValueError(f"Transfer time must be positive, got {tau}")
    dr = boundary.final_position - boundary.initial_position
    v0 = boundary.initial_velocity
    vf = boundary.final_velocity
    af = boundary.final_acceleration

    c0 = af - 6.0 * (vf + v0) / tau + 12.0 * dr / tau ** 2
    c1 = -6.0 * af / tau + 6.0 * (5.0 * vf + 3.0 * v0) / tau ** 2 - 48.0 * dr / tau ** 3
    c2 = 6.0 * af / tau ** 2 - 12.0 * (2.0 * vf + v0) / tau ** 3 + 36.0 * dr / tau ** 4
    return GuidanceProfile(c0=c0, c1=c1, c2=c2, tau=float(tau), boundary=boundary)


def solve_transfer_time(boundary: BoundaryConditions) -> float:
    """
    Smallest positive root of a_f tau^2 - 2 (2 v_f + v_0) tau + 6 (r_f - r_0) = 0 on the
    vertical channel, i.e. the transfer time that zeroes C2 along Z.
    """
    a = float(boundary.final_acceleration[VERTICAL])
    b = -2.0 * float(2.0 * boundary.final_velocity[VERTICAL] + boundary.initial_velocity[VERTICAL])
    c = 6.0 * float(boundary.final_position[VERTICAL] - boundary.initial_position[VERTICAL])
    discriminant = b * b - 4.0 * a * c

    if a == 0.0:
        roots = [-c / b] if b != 0.0 else []
    elif discriminant < 0.0:
        roots = []
    else:
        q = -0.5 * (b + math.copysign(math.sqrt(discriminant), b))
        roots = [q / a] + ([c / q] if q != 0.0 else [])

    positive = sorted(root for root in roots if root > 0.0 and math.isfinite(root))
    if not positive:
        raise InfeasibleBoundaryError(
            f"No positive transfer time for vertical boundary data (a={a}, b={b}, c={c})", discriminant
        )
    logger.debug(f"Transfer time roots {roots}, selected {positive[0]}")
    return positive[0]


def plan_descent(boundary: BoundaryConditions, tau: Optional[float] = None) -> GuidanceProfile:
    if tau is None:
        tau = solve_transfer_time(boundary)
    profile = solve_profile(boundary, tau)
    logger.info(f"Descent profile planned: tau={profile.tau:.3f} s, C2_z={profile.c2[VERTICAL]:.3e}")
    return profile


def sample_profile(profile: GuidanceProfile, t: float) -> ReferenceSample:
    """Reference (a_d, v_d, r_d) at time t, clamped to [0, tau]."""
    t = min(max(float(t), 0.0), profile.tau)
    c0, c1, c2 = profile.c0, profile.c1, profile.c2
    v0 = profile.boundary.initial_velocity
    r0 = profile.boundary.initial_position
    acceleration = c0 + c1 * t + c2 * t ** 2
    velocity = c0 * t + c1 * t ** 2 / 2.0 + c2 * t ** 3 / 3.0 + v0
    position = c0 * t ** 2 / 2.0 + c1 * t ** 3 / 6.0 + c2 * t ** 4 / 12.0 + v0 * t + r0
    return ReferenceSample(acceleration=acceleration, velocity=velocity, position=position)


def default_terminal_acceleration(gravity_model, frame: SiteFrame, final_position) -> np.ndarray:
    """-g at the target point, expressed in the site frame."""
    target = point_to_body(frame, final_position)
    return -vector_to_site(frame, gravity_model.acceleration(target))
