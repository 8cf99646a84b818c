"""
Coupled translational and attitude propagation in a rotating frame.

Translation (body or site frame, both rotating with the asteroid):

    R_ddot = u + g + d - 2 w x R_dot - w x (w x R)

Attitude: w_dot = J^-1 (-w x J w + tau), q_dot = 1/2 q (x) [0, w_rel], where w is the
body rate and w_rel removes the rotation of the tagged frame.

Integration is classical RK4 at a fixed step with zero-order-hold control. Events are
located by bisection of the step in which their function turns non-positive.
"""

import dataclasses
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from asteroid_gnc.core.control import ControlOutput, NullController, SpacecraftInertia
from asteroid_gnc.core.errors import DivergenceError
from asteroid_gnc.core.frames import SiteFrame, body_to_site, point_to_body, site_to_body, vector_to_site
from asteroid_gnc.core.mesh import PolyhedronMesh, closest_surface_point, solid_angle_sums
from asteroid_gnc.core.trajectory_log import TrajectoryLog
from asteroid_gnc.utils.attitude import (
    IDENTITY,
    from_rotation,
    quat_conjugate,
    quat_multiply,
    quat_normalize,
    quat_rate,
    quaternion_to_euler_321,
    rotation_matrix,
)

logger = logging.getLogger(__name__)

BODY = "body"
SITE = "site"

SURFACE_IMPACT = "surface_impact"
ALTITUDE_BELOW = "altitude_below"
TIME_ELAPSED = "time_elapsed"
ESCAPE = "escape"
SURFACE_EVENTS = (SURFACE_IMPACT, ALTITUDE_BELOW)

DEFAULT_EVENT_TOLERANCE = 1e-3  # s
DIVERGENCE_RADIUS_FACTOR = 100.0
MAX_STEPS = 10_000_000


def get_supported_event_kinds() -> List[str]:
    return [SURFACE_IMPACT, ALTITUDE_BELOW, TIME_ELAPSED, ESCAPE]


def _frozen_vector(value, size: int) -> np.ndarray:
    v = np.array(value, dtype=float).reshape(size)
    v.setflags(write=False)
    return v


@dataclasses.dataclass(frozen=True, eq=False)
class SpacecraftState:
    t: float
    position: np.ndarray
    velocity: np.ndarray
    attitude: np.ndarray = IDENTITY  # body -> tagged frame
    rate: np.ndarray = (0.0, 0.0, 0.0)  # body axes, rad/s
    frame: str = BODY

    def __post_init__(self):
        if self.frame not in (BODY, SITE):
            raise ValueError(f"Invalid frame tag: {self.frame}")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "position", _frozen_vector(self.position, 3))
        object.__setattr__(self, "velocity", _frozen_vector(self.velocity, 3))
        object.__setattr__(self, "attitude", _frozen_vector(quat_normalize(self.attitude), 4))
        object.__setattr__(self, "rate", _frozen_vector(self.rate, 3))

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate((self.position, self.velocity, self.attitude, self.rate))

    @classmethod
    def from_vector(cls, t: float, vector, frame: str = BODY) -> "SpacecraftState":
        y = np.asarray(vector, dtype=float)
        return cls(t=t, position=y[0:3], velocity=y[3:6], attitude=y[6:10], rate=y[10:13], frame=frame)

    @property
    def euler_angles(self) -> np.ndarray:
        return quaternion_to_euler_321(self.attitude)

    def in_site(self, site_frame: SiteFrame) -> "SpacecraftState":
        if self.frame == SITE:
            return self
        position, velocity = body_to_site(site_frame, self.position, self.velocity)
        attitude = quat_multiply(quat_conjugate(_frame_quaternion(site_frame)), self.attitude)
        return dataclasses.replace(self, position=position, velocity=velocity, attitude=attitude, frame=SITE)

    def in_body(self, site_frame: SiteFrame) -> "SpacecraftState":
        if self.frame == BODY:
            return self
        position, velocity = site_to_body(site_frame, self.position, self.velocity)
        attitude = quat_multiply(_frame_quaternion(site_frame), self.attitude)
        return dataclasses.replace(self, position=position, velocity=velocity, attitude=attitude, frame=BODY)


def _frame_quaternion(site_frame: SiteFrame) -> np.ndarray:
    return from_rotation(Rotation.from_matrix(site_frame.rotation))


def surface_clearance(mesh: PolyhedronMesh, point) -> float:
    """Distance to the nearest face, negative inside the body."""
    p = np.asarray(point, dtype=float)
    _, _, distance = closest_surface_point(mesh, p)
    inside = solid_angle_sums(mesh, p[None, :])[0] > 2.0 * math.pi
    return -distance if inside else distance


def _apparent_terms(spin, velocity, radius, control, gravity, disturbance) -> np.ndarray:
    return control + gravity + disturbance - 2.0 * np.cross(spin, velocity) - np.cross(spin, np.cross(spin, radius))


def translational_derivative(state: SpacecraftState, control, gravity_model, environment, site_frame: Optional[SiteFrame] = None):
    """(R_dot, R_ddot) in the state's own frame."""
    u = np.asarray(control, dtype=float)
    if state.frame == SITE:
        if site_frame is None:
            raise ValueError("A site-frame state needs its SiteFrame")
        body_point = point_to_body(site_frame, state.position)
        gravity = vector_to_site(site_frame, gravity_model.acceleration(body_point))
        disturbance = vector_to_site(site_frame, environment.disturbance_accel(body_point, state.t))
        spin = vector_to_site(site_frame, environment.spin_vector)
        radius = state.position + vector_to_site(site_frame, site_frame.origin)
    else:
        gravity = gravity_model.acceleration(state.position)
        disturbance = environment.disturbance_accel(state.position, state.t)
        spin = environment.spin_vector
        radius = state.position
    return state.velocity.copy(), _apparent_terms(spin, state.velocity, radius, u, gravity, disturbance)


def attitude_derivative(attitude, rate, torque, inertia, frame_rate=None):
    """(q_dot, w_dot); `frame_rate` is the tagged frame's rotation rate in its own axes."""
    tensor = inertia.tensor if isinstance(inertia, SpacecraftInertia) else np.asarray(inertia, dtype=float)
    w = np.asarray(rate, dtype=float)
    try:
        w_dot = np.linalg.solve(tensor, -np.cross(w, tensor @ w) + np.asarray(torque, dtype=float))
    except np.linalg.LinAlgError as e:
        raise ValueError(f"Singular inertia tensor: {e}") from e
    relative = w if frame_rate is None else w - rotation_matrix(attitude).T @ np.asarray(frame_rate, dtype=float)
    return quat_rate(attitude, relative), w_dot


@dataclasses.dataclass(frozen=True)
class EventSpec:
    kind: str
    value: float = 0.0
    tolerance: float = DEFAULT_EVENT_TOLERANCE

    def __post_init__(self):
        if self.kind not in get_supported_event_kinds():
            raise ValueError(f"Invalid event kind: {self.kind}")
        if not self.tolerance > 0:
            raise ValueError(f"Event tolerance must be positive, got {self.tolerance}")
        if self.kind in (TIME_ELAPSED, ESCAPE) and not self.value > 0:
            raise ValueError(f"{self.kind} needs a positive value, got {self.value}")


@dataclasses.dataclass(frozen=True, eq=False)
class TerminalEvent:
    kind: str
    time: float
    state: SpacecraftState


@dataclasses.dataclass(frozen=True, eq=False)
class PropagationResult:
    log: TrajectoryLog
    event: TerminalEvent

    @property
    def final_state(self) -> SpacecraftState:
        return self.event.state


class Propagator:
    def __init__(
        self,
        gravity_model,
        environment,
        dt: float,
        events: Sequence[EventSpec],
        controller=None,
        inertia=None,
        site_frame: Optional[SiteFrame] = None,
        mesh: Optional[PolyhedronMesh] = None,
        divergence_radius: Optional[float] = None,
        max_steps: int = MAX_STEPS,
    ):
        if not dt > 0:
            raise ValueError(f"Step size must be positive, got {dt}")
        if not events:
            raise ValueError("Propagation needs at least one terminating event")
        self.gravity_model = gravity_model
        self.environment = environment
        self.dt = float(dt)
        self.events = list(events)
        self.controller = controller if controller is not None else NullController()
        if inertia is None:
            inertia = np.eye(3)
        self.inertia = inertia.tensor if isinstance(inertia, SpacecraftInertia) else np.asarray(inertia, dtype=float)
        self.site_frame = site_frame
        self.mesh = mesh if mesh is not None else gravity_model.mesh
        self.divergence_radius = (
            divergence_radius if divergence_radius is not None else DIVERGENCE_RADIUS_FACTOR * gravity_model.reference_radius
        )
        self.max_steps = max_steps

        if any(e.kind in SURFACE_EVENTS for e in self.events) and self.mesh is None:
            raise ValueError("Surface events need a shape model")
        altitudes = [e.value for e in self.events if e.kind == ALTITUDE_BELOW]
        # beyond this lower bound on clearance no surface event can fire
        self._clearance_cutoff = max([0.0] + altitudes)
        self._max_vertex_radius = self.mesh.max_vertex_radius if self.mesh is not None else 0.0
        durations = [e.value for e in self.events if e.kind == TIME_ELAPSED]
        self._duration = min(durations) if durations else None

    def _setup_frame(self, frame: str):
        if frame == SITE:
            if self.site_frame is None:
                raise ValueError("A site-frame propagation needs its SiteFrame")
            self._spin = vector_to_site(self.site_frame, self.environment.spin_vector)
            self._origin = vector_to_site(self.site_frame, self.site_frame.origin)
        else:
            self._spin = self.environment.spin_vector
            self._origin = np.zeros(3)

    def _body_point(self, position: np.ndarray, frame: str) -> np.ndarray:
        return point_to_body(self.site_frame, position) if frame == SITE else position

    def _derivative(self, t: float, y: np.ndarray, output: ControlOutput, frame: str):
        position, velocity = y[0:3], y[3:6]
        body_point = self._body_point(position, frame)
        gravity = self.gravity_model.acceleration(body_point)
        disturbance = self.environment.disturbance_accel(body_point, t)
        if frame == SITE:
            gravity = vector_to_site(self.site_frame, gravity)
            disturbance = vector_to_site(self.site_frame, disturbance)
        accel = _apparent_terms(self._spin, velocity, position + self._origin, output.acceleration, gravity, disturbance)
        q_dot, w_dot = attitude_derivative(
            y[6:10], y[10:13], output.torque + self.environment.torque, self.inertia, self._spin
        )
        return np.concatenate((velocity, accel, q_dot, w_dot)), gravity, disturbance

    def _rk4(self, t: float, y: np.ndarray, h: float, output: ControlOutput, frame: str, k1=None) -> np.ndarray:
        if k1 is None:
            k1, _, _ = self._derivative(t, y, output, frame)
        k2, _, _ = self._derivative(t + 0.5 * h, y + 0.5 * h * k1, output, frame)
        k3, _, _ = self._derivative(t + 0.5 * h, y + 0.5 * h * k2, output, frame)
        k4, _, _ = self._derivative(t + h, y + h * k3, output, frame)
        y_next = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        y_next[6:10] = quat_normalize(y_next[6:10])
        return y_next

    def _clearance(self, body_point: np.ndarray) -> float:
        lower_bound = float(np.linalg.norm(body_point)) - self._max_vertex_radius
        if lower_bound > self._clearance_cutoff:
            return lower_bound
        return surface_clearance(self.mesh, body_point)

    def _event_values(self, y: np.ndarray, frame: str) -> List[float]:
        body_point = self._body_point(y[0:3], frame)
        clearance = None
        values = []
        for event in self.events:
            if event.kind in SURFACE_EVENTS:
                if clearance is None:
                    clearance = self._clearance(body_point)
                values.append(clearance - event.value if event.kind == ALTITUDE_BELOW else clearance)
            elif event.kind == ESCAPE:
                values.append(event.value - float(np.linalg.norm(body_point)))
            else:
                values.append(math.inf)
        return values

    def _locate(self, t: float, y: np.ndarray, h: float, output: ControlOutput, frame: str, candidates: List[int], k1):
        tolerance = min(self.events[i].tolerance for i in candidates)
        lo, hi = 0.0, h
        y_hi = None
        while hi - lo > tolerance:
            mid = 0.5 * (lo + hi)
            y_mid = self._rk4(t, y, mid, output, frame, k1)
            values = self._event_values(y_mid, frame)
            if any(values[i] <= 0.0 for i in candidates):
                hi, y_hi = mid, y_mid
            else:
                lo = mid
        if y_hi is None:
            y_hi = self._rk4(t, y, hi, output, frame, k1)
        values = self._event_values(y_hi, frame)
        fired = [i for i in candidates if values[i] <= 0.0] or candidates
        logger.debug(f"Event {self.events[fired[0]].kind} located in [{t + lo}, {t + hi}]")
        return hi, y_hi, self.events[fired[0]].kind

    def _record(self, log: TrajectoryLog, t: float, y: np.ndarray, output: ControlOutput, frame: str):
        _, gravity, disturbance = self._derivative(t, y, output, frame)
        log.append(t, y, output, gravity, disturbance)

    def _diverged(self, message: str, log: TrajectoryLog, t: float, y: np.ndarray, frame: str):
        if np.all(np.isfinite(y)):
            log.append(t, y, ControlOutput(), np.zeros(3), np.zeros(3))
        logger.error(f"Propagation diverged at t={t}: {message}")
        raise DivergenceError(message, log)

    def run(self, initial: SpacecraftState) -> PropagationResult:
        frame = initial.frame
        self._setup_frame(frame)
        log = TrajectoryLog(frame, self.dt)
        t0 = initial.t
        t_end = None if self._duration is None else t0 + self._duration
        t, y = t0, initial.vector
        armed = [event.kind not in SURFACE_EVENTS or value > 0 for event, value in zip(self.events, self._event_values(y, frame))]
        kind = None
        step = 0

        while True:
            if t_end is not None and t_end - t <= 1e-9 * self.dt:
                kind = TIME_ELAPSED
                break
            if step >= self.max_steps:
                self._diverged(f"step limit {self.max_steps} reached", log, t, y, frame)

            state = SpacecraftState.from_vector(t, y, frame)
            output = self.controller.command(state)
            t_next = t0 + (step + 1) * self.dt
            if t_end is not None and t_next > t_end:
                t_next = t_end
            h = t_next - t

            k1, gravity, disturbance = self._derivative(t, y, output, frame)
            log.append(t, y, output, gravity, disturbance)
            y_next = self._rk4(t, y, h, output, frame, k1)
            if not np.all(np.isfinite(y_next)):
                self._diverged("non-finite state", log, t_next, y_next, frame)

            values = self._event_values(y_next, frame)
            fired = [i for i, value in enumerate(values) if armed[i] and value <= 0.0]
            if fired:
                h_event, y_event, kind = self._locate(t, y, h, output, frame, fired, k1)
                self.controller.commit(output, h_event)
                t, y = t + h_event, y_event
                break

            self.controller.commit(output, h)
            t, y = t_next, y_next
            step += 1
            armed = [a or value > 0 for a, value in zip(armed, values)]
            if float(np.linalg.norm(self._body_point(y[0:3], frame))) > self.divergence_radius:
                self._diverged(f"left the {self.divergence_radius:.1f} m bounding sphere", log, t, y, frame)

        final_state = SpacecraftState.from_vector(t, y, frame)
        self._record(log, t, y, self.controller.command(final_state), frame)
        logger.debug(f"Propagation ended with {kind} at t={t:.6f} after {step} steps")
        return PropagationResult(log=log, event=TerminalEvent(kind=kind, time=t, state=final_state))


def propagate(
    initial: SpacecraftState,
    controller,
    gravity_model,
    environment,
    dt: float,
    events: Sequence[EventSpec],
    **kwargs,
) -> PropagationResult:
    return Propagator(gravity_model, environment, dt, events, controller=controller, **kwargs).run(initial)


def specific_energy(state: SpacecraftState, gravity_model, environment, site_frame: Optional[SiteFrame] = None) -> float:
    """Jacobi-style energy 1/2 v^2 - U - 1/2 |w x R|^2 in the rotating body frame."""
    body = state.in_body(site_frame) if state.frame == SITE else state
    spin = environment.spin_vector
    return (
        0.5 * float(body.velocity @ body.velocity)
        - gravity_model.potential(body.position)
        - 0.5 * float(np.linalg.norm(np.cross(spin, body.position)) ** 2)
    )
