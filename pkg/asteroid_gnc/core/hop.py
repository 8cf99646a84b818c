"""
Ballistic hops on the rotating asteroid and the shooting solution of the hop
boundary-value problem: find the launch velocity that reaches a target surface point
after a fixed time of flight.
"""

import dataclasses
import logging
import math
import multiprocessing
from typing import List, Optional, Sequence

import numpy as np

from asteroid_gnc.core.control import ControlOutput
from asteroid_gnc.core.dynamics import (
    BODY,
    ESCAPE,
    SURFACE_IMPACT,
    TIME_ELAPSED,
    EventSpec,
    Propagator,
    SpacecraftState,
)
from asteroid_gnc.core.errors import (
    AsteroidGncError,
    ConditioningError,
    DivergenceError,
    GravitySingularityError,
    HopConvergenceError,
    InvalidLaunchError,
)
from asteroid_gnc.core.mesh import distance_to_surface, outward_normal_at
from asteroid_gnc.core.trajectory_log import TrajectoryLog
from asteroid_gnc.utils.attitude import IDENTITY
from asteroid_gnc.utils.log_handler import setup_logging

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 0.1  # m
DEFAULT_MAX_ITERATIONS = 15
DEFAULT_STEPS_PER_HOP = 200
JACOBIAN_PERTURBATION = 1e-4  # m/s
CONDITION_LIMIT = 1e12
ESCAPE_RADIUS_FACTOR = 10.0
# launch and target must lie within this fraction of the bounding radius of the surface
SURFACE_BAND_FACTOR = 1e-3
FEASIBLE_POSITION_FACTOR = 5.0
FEASIBLE_TIME_FRACTION = 0.05
NON_PARABOLIC_THRESHOLD = 0.05

IMPACT = "impact"
ESCAPED = "escape"
TIMEOUT = "timeout"


@dataclasses.dataclass(frozen=True, eq=False)
class HopProblem:
    launch: np.ndarray  # r_i0, body frame (m)
    target: np.ndarray  # r_if, body frame (m)
    time_of_flight: float  # tau (s)
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    dt: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "launch", np.array(self.launch, dtype=float).reshape(3))
        object.__setattr__(self, "target", np.array(self.target, dtype=float).reshape(3))
        if self.time_of_flight is None or not self.time_of_flight > 0:
            raise ValueError(f"Time of flight must be positive, got {self.time_of_flight}")
        if not self.tolerance > 0 or self.max_iterations < 1:
            raise ValueError("Hop tolerance must be positive and max_iterations at least 1")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"Hop step must be positive, got {self.dt}")

    @property
    def step(self) -> float:
        return self.dt if self.dt is not None else self.time_of_flight / DEFAULT_STEPS_PER_HOP


@dataclasses.dataclass(frozen=True, eq=False)
class HopOutcome:
    kind: str  # impact | escape | timeout
    launch_velocity: np.ndarray
    time: float  # flight time at the end of the propagation
    final_position: np.ndarray  # impact point for impacts, body frame
    final_velocity: np.ndarray
    log: TrajectoryLog

    @property
    def reimpacted(self) -> bool:
        return self.kind == IMPACT


@dataclasses.dataclass(frozen=True, eq=False)
class HopSolution:
    launch_velocity: np.ndarray  # v_i0
    residual: float  # |r(tau) - r_if|
    iterations: int  # Newton updates taken
    time_of_flight: float
    arrival_position: np.ndarray  # r(tau)
    arrival_velocity: np.ndarray  # v(tau)
    log: TrajectoryLog
    feasible: Optional[bool] = None
    check: Optional[HopOutcome] = None

    @property
    def impact_position(self) -> np.ndarray:
        if self.check is not None and self.check.reimpacted:
            return self.check.final_position
        return self.arrival_position

    @property
    def impact_velocity(self) -> np.ndarray:
        if self.check is not None and self.check.reimpacted:
            return self.check.final_velocity
        return self.arrival_velocity


def _escape_radius(gravity_model, mesh) -> float:
    radius = mesh.max_vertex_radius if mesh is not None else gravity_model.reference_radius
    return ESCAPE_RADIUS_FACTOR * radius


def _require_on_surface(mesh, point: np.ndarray, label: str):
    band = SURFACE_BAND_FACTOR * mesh.bounding_radius
    distance = distance_to_surface(mesh, point)
    if distance > band:
        message = f"{label} {point.tolist()} is {distance:.3f} m from the surface (band {band:.3f} m)"
        if label == "launch":
            raise InvalidLaunchError(message)
        raise ValueError(message)


def flight_state(gravity_model, environment, launch, velocity, duration: float, dt: float):
    """Position and velocity after `duration` of unpowered flight; terrain is ignored."""
    initial = SpacecraftState(t=0.0, position=launch, velocity=velocity, frame=BODY)
    propagator = Propagator(
        gravity_model,
        environment,
        dt,
        [EventSpec(TIME_ELAPSED, duration)],
        divergence_radius=_escape_radius(gravity_model, gravity_model.mesh) * 10.0,
    )
    result = propagator.run(initial)
    return result.final_state.position, result.final_state.velocity, result.log


def ballistic_hop(
    gravity_model,
    environment,
    launch,
    velocity,
    t_max: float,
    dt: float,
    controller=None,
    initial_attitude=IDENTITY,
    initial_rate=(0.0, 0.0, 0.0),
    inertia=None,
    mesh=None,
    escape_radius: Optional[float] = None,
) -> HopOutcome:
    """
    Propagate an unpowered hop until surface impact, escape or t_max. An optional attitude
    controller re-orients the spacecraft during the flight.
    """
    mesh = mesh if mesh is not None else gravity_model.mesh
    if mesh is None:
        raise ValueError("Ballistic hops need a shape model for impact detection")
    r0 = np.asarray(launch, dtype=float)
    v0 = np.asarray(velocity, dtype=float)
    speed = float(np.linalg.norm(v0))
    initial = SpacecraftState(
        t=0.0, position=r0, velocity=v0, attitude=initial_attitude, rate=initial_rate, frame=BODY
    )

    if speed == 0.0:
        log = TrajectoryLog(BODY, dt)
        log.append(0.0, initial.vector, ControlOutput(), gravity_model.acceleration(r0), environment.disturbance_accel(r0, 0.0))
        return HopOutcome(IMPACT, v0, 0.0, r0, v0, log)

    normal = outward_normal_at(mesh, r0)
    if float(v0 @ normal) < -1e-12 * speed:
        raise InvalidLaunchError(f"Launch velocity {v0.tolist()} points into the surface (normal {normal.tolist()})")

    radius = escape_radius if escape_radius is not None else _escape_radius(gravity_model, mesh)
    events = [EventSpec(SURFACE_IMPACT), EventSpec(ESCAPE, radius), EventSpec(TIME_ELAPSED, t_max)]
    propagator = Propagator(
        gravity_model,
        environment,
        dt,
        events,
        controller=controller,
        inertia=inertia,
        mesh=mesh,
        divergence_radius=2.0 * radius,
    )
    result = propagator.run(initial)
    kind = {SURFACE_IMPACT: IMPACT, ESCAPE: ESCAPED, TIME_ELAPSED: TIMEOUT}[result.event.kind]
    final = result.final_state
    logger.debug(f"Hop with |v0|={speed:.4f} m/s ended in {kind} after {final.t:.2f} s")
    return HopOutcome(kind, v0, final.t, final.position, final.velocity, result.log)


def initial_velocity_guess(gravity_model, problem: HopProblem) -> np.ndarray:
    """Flat-field ballistic guess (r_if - r_i0)/tau - g(r_i0) tau / 2."""
    tau = problem.time_of_flight
    return (problem.target - problem.launch) / tau - 0.5 * gravity_model.acceleration(problem.launch) * tau


def check_feasibility(solution: HopSolution, problem: HopProblem, gravity_model, environment, mesh) -> HopOutcome:
    tau = problem.time_of_flight
    return ballistic_hop(
        gravity_model,
        environment,
        problem.launch,
        solution.launch_velocity,
        (1.0 + 2.0 * FEASIBLE_TIME_FRACTION) * tau,
        problem.step,
        mesh=mesh,
    )


def _is_feasible(outcome: HopOutcome, problem: HopProblem) -> bool:
    if not outcome.reimpacted:
        return False
    miss = float(np.linalg.norm(outcome.final_position - problem.target))
    late = abs(outcome.time - problem.time_of_flight)
    return miss <= FEASIBLE_POSITION_FACTOR * problem.tolerance and late <= FEASIBLE_TIME_FRACTION * problem.time_of_flight


def solve_hop_velocity(
    problem: HopProblem,
    gravity_model,
    environment,
    initial_guess=None,
    perturbation: float = JACOBIAN_PERTURBATION,
    check: bool = True,
) -> HopSolution:
    """
    Newton shooting on the launch velocity with a forward-difference Jacobian. Terrain
    crossings of intermediate iterates are ignored; the converged hop is re-propagated
    with impact events to set `feasible`.

    Launch and target must lie on a face, not on a mesh vertex or edge: the polyhedron field
    is singular there and `GravitySingularityError` is raised before any iteration. Use
    `surface_point_along` to place endpoints instead of taking `mesh.vertices` directly.
    """
    mesh = gravity_model.mesh
    if mesh is not None:
        _require_on_surface(mesh, problem.launch, "launch")
        _require_on_surface(mesh, problem.target, "target")

    tau, dt = problem.time_of_flight, problem.step
    velocity = np.asarray(initial_guess, dtype=float) if initial_guess is not None else initial_velocity_guess(gravity_model, problem)
    best_velocity, best_residual = velocity.copy(), math.inf

    for iteration in range(problem.max_iterations + 1):
        try:
            position, arrival_velocity, log = flight_state(gravity_model, environment, problem.launch, velocity, tau, dt)
        except (DivergenceError, GravitySingularityError) as e:
            raise HopConvergenceError(f"Shooting iterate failed: {e}", best_velocity, best_residual, iteration) from e
        error = position - problem.target
        residual = float(np.linalg.norm(error))
        logger.debug(f"Shooting iteration {iteration}: v0={velocity.tolist()}, residual={residual:.6e} m")
        if residual < best_residual:
            best_velocity, best_residual = velocity.copy(), residual

        if residual <= problem.tolerance:
            solution = HopSolution(
                launch_velocity=velocity,
                residual=residual,
                iterations=iteration,
                time_of_flight=tau,
                arrival_position=position,
                arrival_velocity=arrival_velocity,
                log=log,
            )
            logger.info(f"Hop solved in {iteration} iterations: |v0|={np.linalg.norm(velocity):.4f} m/s, residual={residual:.3e} m")
            if check and mesh is not None:
                solution = _with_feasibility(solution, problem, gravity_model, environment, mesh)
            return solution
        if iteration == problem.max_iterations:
            break

        jacobian = np.empty((3, 3))
        for axis in range(3):
            perturbed = velocity.copy()
            perturbed[axis] += perturbation
            try:
                shifted, _, _ = flight_state(gravity_model, environment, problem.launch, perturbed, tau, dt)
            except (DivergenceError, GravitySingularityError) as e:
                raise HopConvergenceError(f"Jacobian propagation failed: {e}", best_velocity, best_residual, iteration) from e
            jacobian[:, axis] = (shifted - position) / perturbation
        condition = np.linalg.cond(jacobian)
        if not np.isfinite(condition) or condition > CONDITION_LIMIT:
            raise ConditioningError(f"Shooting Jacobian is singular (condition number {condition:.3e})")
        velocity = velocity + np.linalg.solve(jacobian, -error)

    raise HopConvergenceError(
        f"Shooting did not converge in {problem.max_iterations} iterations (best residual {best_residual:.3e} m)",
        best_velocity,
        best_residual,
        problem.max_iterations,
    )


def _with_feasibility(solution: HopSolution, problem: HopProblem, gravity_model, environment, mesh) -> HopSolution:
    try:
        outcome = check_feasibility(solution, problem, gravity_model, environment, mesh)
    except InvalidLaunchError as e:
        logger.warning(f"Converged hop is not physical: {e}")
        return dataclasses.replace(solution, feasible=False)
    feasible = _is_feasible(outcome, problem)
    if not feasible:
        logger.warning(
            f"Converged hop fails the re-check: {outcome.kind} at t={outcome.time:.2f} s, "
            f"{np.linalg.norm(outcome.final_position - problem.target):.3f} m from the target"
        )
    return dataclasses.replace(solution, feasible=feasible, check=outcome)


@dataclasses.dataclass(frozen=True, eq=False)
class HopScanEntry:
    time_of_flight: float
    solution: Optional[HopSolution] = None
    error: Optional[str] = None


def scan_hop_times(problem: HopProblem, taus: Sequence[float], gravity_model, environment, **kwargs) -> List[HopScanEntry]:
    """Solve the same hop for each time of flight in `taus`."""
    entries = []
    for tau in taus:
        candidate = dataclasses.replace(problem, time_of_flight=float(tau))
        try:
            entries.append(HopScanEntry(float(tau), solution=solve_hop_velocity(candidate, gravity_model, environment, **kwargs)))
        except AsteroidGncError as e:
            logger.info(f"tau={tau} s: {type(e).__name__}: {e}")
            entries.append(HopScanEntry(float(tau), error=f"{type(e).__name__}: {e}"))
    return entries


def tangent_basis(mesh, point):
    """(east, north, normal) at a surface point; east is horizontal about the spin axis."""
    normal = outward_normal_at(mesh, point)
    east = np.cross([0.0, 0.0, 1.0], normal)
    if np.linalg.norm(east) < 1e-9:
        east = np.cross([0.0, 1.0, 0.0], normal)
    east /= np.linalg.norm(east)
    return east, np.cross(normal, east), normal


def tangential_launch_grid(mesh, launch, speeds: Sequence[float], azimuths: Sequence[float], elevation: float = math.radians(45.0)) -> List[np.ndarray]:
    """
    Launch velocities for every (speed, azimuth) pair. Azimuth is measured in the local
    tangent plane from east toward north; `elevation` tilts the launch off that plane.
    """
    east, north, normal = tangent_basis(mesh, launch)
    velocities = []
    for speed in speeds:
        for azimuth in azimuths:
            horizontal = math.cos(azimuth) * east + math.sin(azimuth) * north
            velocities.append(speed * (math.cos(elevation) * horizontal + math.sin(elevation) * normal))
    return velocities


def ground_track_deviation(outcome: HopOutcome, gravity_model) -> float:
    """
    Largest distance between the hop and the constant-gravity parabola through the same
    launch state, relative to the hop's largest excursion from the launch point.
    """
    positions = outcome.log.positions
    times = outcome.log.times - outcome.log.times[0]
    launch = positions[0]
    g0 = gravity_model.acceleration(launch)
    parabola = launch + np.outer(times, outcome.launch_velocity) + 0.5 * np.outer(times ** 2, g0)
    excursion = float(np.linalg.norm(positions - launch, axis=1).max())
    if excursion == 0.0:
        return 0.0
    return float(np.linalg.norm(positions - parabola, axis=1).max()) / excursion


def is_non_parabolic(outcome: HopOutcome, gravity_model, threshold: float = NON_PARABOLIC_THRESHOLD) -> bool:
    return ground_track_deviation(outcome, gravity_model) > threshold


@dataclasses.dataclass(frozen=True, eq=False)
class HopBatchItem:
    index: int
    launch: np.ndarray
    velocity: Optional[np.ndarray] = None  # propagate this launch
    target: Optional[np.ndarray] = None  # or solve for a launch reaching this target
    time_of_flight: Optional[float] = None


@dataclasses.dataclass(frozen=True)
class HopBatchSettings:
    dt: float = 1.0
    t_max: float = 7200.0
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS


@dataclasses.dataclass(frozen=True, eq=False)
class HopBatchResult:
    item: HopBatchItem
    outcome: Optional[HopOutcome] = None
    solution: Optional[HopSolution] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def solve_batch_item(item: HopBatchItem, gravity_model, environment, settings: HopBatchSettings) -> HopBatchResult:
    try:
        if item.target is not None:
            problem = HopProblem(
                item.launch,
                item.target,
                item.time_of_flight,
                tolerance=settings.tolerance,
                max_iterations=settings.max_iterations,
                dt=settings.dt,
            )
            return HopBatchResult(item, solution=solve_hop_velocity(problem, gravity_model, environment))
        if item.velocity is None:
            raise ValueError("Hop batch item needs a launch velocity or a target")
        outcome = ballistic_hop(gravity_model, environment, item.launch, item.velocity, settings.t_max, settings.dt)
        return HopBatchResult(item, outcome=outcome)
    except (AsteroidGncError, ArithmeticError, ValueError) as e:
        logger.warning(f"Hop {item.index} failed: {type(e).__name__}: {e}")
        return HopBatchResult(item, error=f"{type(e).__name__}: {e}")


_worker_context = {}


def _init_worker(gravity_model, environment, settings, log_level, log_file):
    setup_logging(log_level, log_file, True)
    _worker_context.update(gravity_model=gravity_model, environment=environment, settings=settings)


def _solve_in_worker(item: HopBatchItem) -> HopBatchResult:
    return solve_batch_item(item, _worker_context["gravity_model"], _worker_context["environment"], _worker_context["settings"])


def hop_batch(
    items: Sequence[HopBatchItem],
    gravity_model,
    environment,
    settings: HopBatchSettings = HopBatchSettings(),
    workers: int = 1,
    log_level="INFO",
    log_file=None,
) -> List[HopBatchResult]:
    """Solve or propagate every item; results come back in input order whatever the width."""
    if not items:
        raise ValueError("Hop batch is empty")
    logger.info(f"Running {len(items)} hops with {workers} worker(s)")
    if workers <= 1:
        return [solve_batch_item(item, gravity_model, environment, settings) for item in items]
    with multiprocessing.Pool(
        processes=workers,
        initializer=_init_worker,
        initargs=(gravity_model, environment, settings, log_level, log_file),
    ) as pool:
        return list(pool.imap(_solve_in_worker, items))
