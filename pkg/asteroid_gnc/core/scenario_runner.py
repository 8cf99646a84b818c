import dataclasses
import logging
import math
import time
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from asteroid_gnc import __version__
from asteroid_gnc.config.general_config import GeneralConfig
from asteroid_gnc.config.scenario_config import ScenarioConfig
from asteroid_gnc.core.control import (
    AttitudeController,
    AttitudeGains,
    DescentController,
    ReactionWheelSet,
    TranslationGains,
    box_inertia,
)
from asteroid_gnc.core.dynamics import (
    SITE,
    SURFACE_IMPACT,
    TIME_ELAPSED,
    EventSpec,
    Propagator,
    SpacecraftState,
)
from asteroid_gnc.core.environment import AsteroidEnvironment, DisturbanceParams, SpinState, SunEphemeris
from asteroid_gnc.core.errors import (
    ConditioningError,
    ConfigError,
    DegenerateLongitudeError,
    DivergenceError,
    HopConvergenceError,
    MeshParseError,
)
from asteroid_gnc.core.frames import SiteFrame, site_frame_from_position, vector_to_site
from asteroid_gnc.core.guidance import BoundaryConditions, GuidanceProfile, default_terminal_acceleration, plan_descent
from asteroid_gnc.core.hop import (
    HopBatchItem,
    HopBatchResult,
    HopBatchSettings,
    ground_track_deviation,
    hop_batch,
    tangential_launch_grid,
)
from asteroid_gnc.core.mesh import PolyhedronMesh, nearest_vertex, validate_mesh
from asteroid_gnc.core.trajectory_log import TrajectoryLog
from asteroid_gnc.gravity_models.base_gravity_model import get_gravity_model
from asteroid_gnc.shape_parsers.base_shape_parser import get_shape_parser
from asteroid_gnc.utils import csv_output
from asteroid_gnc.utils.attitude import euler_321_to_quaternion, quaternion_to_euler_321, rotation_error_vector
from asteroid_gnc.utils.synthetic_shapes import make_shape

logger = logging.getLogger(__name__)

DESCENT = "descent"
LANDING = "landing"
HOPS = "hops"

DEFAULT_DESCENT_TARGET = ((0.0, 0.0, 100.0), (0.0, 0.0, -0.2))
NON_CONVERGENCE_ERRORS = (HopConvergenceError.__name__, ConditioningError.__name__)


def build_mesh(shape) -> PolyhedronMesh:
    """Shape model from a file or a synthetic generator; invalid meshes are config errors."""
    if shape.synthetic is not None:
        mesh = make_shape(shape.synthetic, shape.subdivisions, shape.semi_axes, shape.radius)
    else:
        try:
            mesh = get_shape_parser(shape).get_mesh()
        except MeshParseError as e:
            raise ConfigError(f"shape.path: {e}") from e
    report = validate_mesh(mesh)
    if not report.is_valid:
        raise ConfigError(f"Shape model is not a closed outward-oriented polyhedron: {report.summary()}")
    return mesh


def build_environment(environment) -> AsteroidEnvironment:
    if environment.rotation_period is not None:
        spin = SpinState.from_period(environment.rotation_period)
    else:
        spin = SpinState(environment.spin_rate or 0.0)
    sun_config = environment.sun
    sun = SunEphemeris(
        mode=sun_config.mode,
        direction=tuple(sun_config.direction),
        distance=sun_config.distance,
        orbit_radius=sun_config.orbit_radius,
        orbit_rate=sun_config.orbit_rate,
        phase=sun_config.phase,
        plane_normal=tuple(sun_config.plane_normal),
        reference_direction=tuple(sun_config.reference_direction),
    )
    disturbance = DisturbanceParams(
        srp_coefficient=environment.srp_coefficient,
        solar_mu=environment.solar_mu,
        include_indirect=environment.include_indirect,
    )
    return AsteroidEnvironment(spin, sun, disturbance, tuple(environment.disturbance_torque))


def resolve_surface_point(mesh: PolyhedronMesh, vertex: Optional[int], position, snap: bool, label: str) -> np.ndarray:
    if vertex is not None:
        if not 0 <= vertex < mesh.vertex_count:
            raise ConfigError(f"{label}.vertex: index {vertex} outside 0..{mesh.vertex_count - 1}")
        return np.array(mesh.vertices[vertex], dtype=float)
    point = np.asarray(position, dtype=float)
    if snap:
        index = nearest_vertex(mesh, point)
        logger.info(f"{label}: snapped {point.tolist()} to vertex {index}")
        return np.array(mesh.vertices[index], dtype=float)
    return point


def _state_record(state: SpacecraftState) -> Dict[str, object]:
    return {
        "t": state.t,
        "frame": state.frame,
        "position": state.position.tolist(),
        "velocity": state.velocity.tolist(),
        "attitude": state.attitude.tolist(),
        "euler_321": quaternion_to_euler_321(state.attitude).tolist(),
        "rate": state.rate.tolist(),
    }


@dataclasses.dataclass
class PhaseSummary:
    name: str
    frame: str
    event: str
    start_time: float
    end_time: float
    rows: int
    terminal_state: Dict[str, object]
    peak_acceleration: float
    peak_wheel_torque: float
    saturation_count: int
    metrics: Dict[str, object] = dataclasses.field(default_factory=dict)


@dataclasses.dataclass
class RunSummary:
    name: str
    version: str
    phases: List[PhaseSummary] = dataclasses.field(default_factory=list)
    hops: List[Dict[str, object]] = dataclasses.field(default_factory=list)
    config: Dict[str, object] = dataclasses.field(default_factory=dict)
    wall_clock: Optional[float] = None

    @property
    def hop_failures(self) -> int:
        return sum(1 for hop in self.hops if hop["status"] == "error")

    @property
    def hop_non_convergence(self) -> int:
        return sum(1 for hop in self.hops if str(hop.get("error", "")).startswith(NON_CONVERGENCE_ERRORS))

    def phase(self, name: str) -> PhaseSummary:
        for phase in self.phases:
            if phase.name == name:
                return phase
        raise KeyError(name)

    def to_dict(self) -> Dict[str, object]:
        data = dataclasses.asdict(self)
        if self.wall_clock is None:
            del data["wall_clock"]
        return data


class ScenarioRunner:
    """
    Runs a scenario's phases in order (descent, landing, hops; any subset) and writes the
    per-phase trajectory CSVs, the hop table, plot datasets and summary.json.
    Everything that can fail on configuration is resolved before the output directory is
    created.
    """

    def __init__(self, config: GeneralConfig, scenario: ScenarioConfig):
        self.config = config
        self.scenario = scenario
        self.mesh: Optional[PolyhedronMesh] = None
        self.gravity_model = None
        self.environment: Optional[AsteroidEnvironment] = None
        self.site_frame: Optional[SiteFrame] = None
        self.profile: Optional[GuidanceProfile] = None

    def __str__(self) -> str:
        return f"{self.config}"

    @property
    def output_dir(self) -> Path:
        return Path(self.config.output_directory(self.scenario.output.directory))

    def _dt(self, phase_dt: float) -> float:
        return self.config.dt_override if self.config.dt_override else phase_dt

    def prepare(self, phases=(DESCENT, LANDING, HOPS)):
        scenario = self.scenario
        if self.config.dt_override is not None and not self.config.dt_override > 0:
            raise ConfigError(f"--dt-override must be positive, got {self.config.dt_override}")
        self.mesh = build_mesh(scenario.shape)
        logger.info(f"Shape model: {self.mesh}")
        try:
            self.gravity_model = get_gravity_model(scenario.gravity, self.mesh)
            self.environment = build_environment(scenario.environment)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        logger.info(f"Gravity model: {self.gravity_model}; spin rate {self.environment.spin.rate:.6e} rad/s")

        site = scenario.site
        if site.vertex is not None or site.position is not None:
            origin = resolve_surface_point(self.mesh, site.vertex, site.position, site.snap, "site")
            try:
                self.site_frame = site_frame_from_position(origin, site.longitude)
            except (DegenerateLongitudeError, ValueError) as e:
                raise ConfigError(f"site: {e}") from e
            logger.info(f"Landing site frame: {self.site_frame}")

        if DESCENT in phases and scenario.descent is not None:
            self.profile = self._plan_descent()

    def _plan_descent(self) -> GuidanceProfile:
        descent = self.scenario.descent
        boundary = BoundaryConditions(
            descent.initial_position, descent.initial_velocity, descent.final_position, descent.final_velocity
        )
        if descent.final_acceleration is not None:
            boundary = boundary.with_final_acceleration(descent.final_acceleration)
        else:
            boundary = boundary.with_final_acceleration(
                default_terminal_acceleration(self.gravity_model, self.site_frame, descent.final_position)
            )
        # InfeasibleBoundaryError is a ConfigError-family exit
        return plan_descent(boundary, descent.tau)

    def run(self, phases=(DESCENT, LANDING, HOPS)) -> RunSummary:
        started = time.perf_counter()
        self.prepare(phases)
        output_dir = self.output_dir
        output_dir.mkdir(parents=True, exist_ok=True)
        logger.info(f"Running scenario '{self.scenario.name}', outputs in {output_dir}")

        summary = RunSummary(name=self.scenario.name, version=__version__, config=self.scenario.to_dict())
        handover = None
        try:
            if DESCENT in phases and self.scenario.descent is not None:
                descent_summary, handover = self.run_descent()
                summary.phases.append(descent_summary)
            if LANDING in phases and self.scenario.landing is not None:
                summary.phases.append(self.run_landing(handover))
            if HOPS in phases and self.scenario.hops is not None:
                summary.hops = self.run_hops()
        finally:
            elapsed = time.perf_counter() - started
            logger.info(f"Scenario '{self.scenario.name}' took {elapsed:.2f} s")

        if self.scenario.output.record_wall_clock:
            summary.wall_clock = elapsed
        csv_output.write_summary(summary.to_dict(), output_dir / csv_output.SUMMARY_FILE)
        if summary.hop_failures:
            logger.warning(f"{summary.hop_failures} of {len(summary.hops)} hops failed, see {output_dir / 'hops.csv'}")
        logger.info(f"Scenario finished. Check your output directory: {output_dir}")
        return summary

    def _propagate(self, name: str, propagator: Propagator, initial: SpacecraftState):
        try:
            return propagator.run(initial)
        except DivergenceError as e:
            # keep the partial log for the post-mortem
            if e.log is not None:
                csv_output.write_trajectory_csv(e.log, self.output_dir / f"{name}.csv", name)
            raise

    def _phase_summary(self, name: str, result, metrics: Dict[str, object]) -> PhaseSummary:
        log: TrajectoryLog = result.log
        saturated = log.saturation_count()
        if saturated:
            logger.warning(f"{name}: actuator saturation in {saturated} of {len(log)} steps")
        return PhaseSummary(
            name=name,
            frame=log.frame,
            event=result.event.kind,
            start_time=float(log.times[0]),
            end_time=result.event.time,
            rows=len(log),
            terminal_state=_state_record(result.final_state),
            peak_acceleration=log.peak_acceleration(),
            peak_wheel_torque=log.peak_wheel_torque(),
            saturation_count=saturated,
            metrics=metrics,
        )

    def _inertia(self):
        landing = self.scenario.landing
        if landing is None:
            return box_inertia(50.0, (0.6, 0.36, 0.36))
        return box_inertia(landing.mass, landing.dimensions)

    def run_descent(self):
        descent = self.scenario.descent
        profile = self.profile
        gains = TranslationGains(
            kp=descent.kp,
            kd=descent.kd,
            feedforward=descent.feedforward,
            compensate_rotation=descent.compensate_rotation,
            saturation=descent.saturation,
        )
        controller = DescentController(profile, gains, self.gravity_model, self.environment, self.site_frame)
        initial = SpacecraftState(
            t=0.0,
            position=descent.initial_position,
            velocity=descent.initial_velocity,
            # attitude held with the site frame; descent has no attitude control
            rate=vector_to_site(self.site_frame, self.environment.spin_vector),
            frame=SITE,
        )
        propagator = Propagator(
            self.gravity_model,
            self.environment,
            self._dt(descent.dt),
            [EventSpec(TIME_ELAPSED, profile.tau), EventSpec(SURFACE_IMPACT)],
            controller=controller,
            inertia=self._inertia(),
            site_frame=self.site_frame,
            mesh=self.mesh,
        )
        logger.info(f"Descent: tau={profile.tau:.2f} s, dt={propagator.dt} s")
        result = self._propagate(DESCENT, propagator, initial)
        final = result.final_state
        position_error = float(np.linalg.norm(final.position - np.asarray(descent.final_position)))
        velocity_error = float(np.linalg.norm(final.velocity - np.asarray(descent.final_velocity)))
        logger.info(
            f"Descent ended with {result.event.kind} at t={final.t:.2f} s: "
            f"position error {position_error:.4f} m, velocity error {velocity_error:.5f} m/s"
        )
        metrics = {
            "tau": profile.tau,
            "c0": profile.c0.tolist(),
            "c1": profile.c1.tolist(),
            "c2": profile.c2.tolist(),
            "position_error": position_error,
            "velocity_error": velocity_error,
        }
        self._write_phase(DESCENT, result.log)
        if self.scenario.output.plots:
            self._descent_plots(result.log, profile)
        return self._phase_summary(DESCENT, result, metrics), final

    def run_landing(self, handover: Optional[SpacecraftState]) -> PhaseSummary:
        landing = self.scenario.landing
        if landing.initial_position is not None:
            position = landing.initial_position
        elif handover is not None:
            position = handover.position
        else:
            position = DEFAULT_DESCENT_TARGET[0]
        if landing.initial_velocity is not None:
            velocity = landing.initial_velocity
        elif handover is not None:
            velocity = handover.velocity
        else:
            velocity = DEFAULT_DESCENT_TARGET[1]
        start = handover.t if handover is not None else 0.0

        wheels = ReactionWheelSet(
            max_torque=landing.wheel_max_torque, inertia=landing.wheel_inertia, momentum_limit=landing.wheel_momentum_limit
        )
        target = euler_321_to_quaternion(landing.target_euler)
        spin_site = vector_to_site(self.site_frame, self.environment.spin_vector)
        controller = AttitudeController(AttitudeGains(landing.cp, landing.cd), wheels, target_attitude=target, frame_rate=spin_site)
        initial = SpacecraftState(
            t=start,
            position=position,
            velocity=velocity,
            attitude=euler_321_to_quaternion(landing.initial_euler),
            rate=landing.initial_rate,
            frame=SITE,
        )
        propagator = Propagator(
            self.gravity_model,
            self.environment,
            self._dt(landing.dt),
            [EventSpec(SURFACE_IMPACT), EventSpec(TIME_ELAPSED, landing.t_max)],
            controller=controller,
            inertia=self._inertia(),
            site_frame=self.site_frame,
            mesh=self.mesh,
        )
        logger.info(f"Landing from {np.asarray(position).tolist()} m, dt={propagator.dt} s")
        result = self._propagate(LANDING, propagator, initial)
        final = result.final_state
        error = rotation_error_vector(final.attitude, target)
        relative_rate = final.rate - spin_site
        metrics = {
            "touched_down": result.event.kind == SURFACE_IMPACT,
            "attitude_error_deg": np.degrees(np.abs(error)).tolist(),
            "rate_magnitude": float(np.linalg.norm(relative_rate)),
            "touchdown_speed": float(np.linalg.norm(final.velocity)),
            "vertical_speed": float(abs(final.velocity[2])),
            "wheel_momentum": wheels.momentum.tolist(),
        }
        if result.event.kind == SURFACE_IMPACT:
            logger.info(
                f"Touchdown at t={final.t:.2f} s: velocity {final.velocity.tolist()} m/s, "
                f"attitude error {metrics['attitude_error_deg']} deg"
            )
        else:
            logger.warning(f"Landing ended by {result.event.kind} at t={final.t:.2f} s without touchdown")
        self._write_phase(LANDING, result.log)
        if self.scenario.output.plots:
            self._landing_plots(result.log)
        return self._phase_summary(LANDING, result, metrics)

    def hop_items(self) -> List[HopBatchItem]:
        hops = self.scenario.hops
        if hops.launch_vertex is not None or hops.launch_position is not None:
            launch = resolve_surface_point(self.mesh, hops.launch_vertex, hops.launch_position, False, "hops.launch")
        else:
            launch = np.array(self.site_frame.origin)
        items = []
        for i, target in enumerate(hops.targets):
            point = resolve_surface_point(self.mesh, target.vertex, target.position, False, f"hops.targets[{i}]")
            items.append(HopBatchItem(len(items), launch, target=point, time_of_flight=target.time_of_flight))
        for velocity in hops.velocities:
            items.append(HopBatchItem(len(items), launch, velocity=np.asarray(velocity, dtype=float)))
        if hops.grid is not None:
            grid = tangential_launch_grid(
                self.mesh,
                launch,
                hops.grid.speeds,
                [math.radians(a) for a in hops.grid.azimuths_deg],
                math.radians(hops.grid.elevation_deg),
            )
            for velocity in grid:
                items.append(HopBatchItem(len(items), launch, velocity=velocity))
        if not items:
            raise ConfigError("hops: give at least one target, velocity or grid")
        return items

    def run_hops(self) -> List[Dict[str, object]]:
        hops = self.scenario.hops
        items = self.hop_items()
        settings = HopBatchSettings(
            dt=self._dt(hops.dt), t_max=hops.t_max, tolerance=hops.tolerance, max_iterations=hops.max_iterations
        )
        workers = self.config.workers or hops.workers
        results = hop_batch(
            items,
            self.gravity_model,
            self.environment,
            settings,
            workers=workers,
            log_level=self.config.log or "INFO",
            log_file=self.config.log_file,
        )
        rows = [self._hop_row(result) for result in results]
        csv_output.write_hop_table(rows, self.output_dir / "hops.csv")
        if self.scenario.output.plots:
            self._hop_plots(results)
        return rows

    def _hop_row(self, result: HopBatchResult) -> Dict[str, object]:
        item = result.item
        row = {"hop": item.index, "mode": "target" if item.target is not None else "velocity"}
        if not result.ok:
            row.update(status="error", error=result.error)
            return row
        if result.solution is not None:
            solution = result.solution
            outcome = solution.check
            velocity = solution.launch_velocity
            row.update(residual=solution.residual, iterations=solution.iterations, feasible=solution.feasible)
            log = outcome.log if outcome is not None else solution.log
        else:
            outcome = result.outcome
            velocity = outcome.launch_velocity
            log = outcome.log
        row.update(
            status="ok",
            launch_vx=velocity[0],
            launch_vy=velocity[1],
            launch_vz=velocity[2],
            launch_speed=float(np.linalg.norm(velocity)),
        )
        if outcome is not None:
            row.update(
                outcome=outcome.kind,
                flight_time=outcome.time,
                final_x=outcome.final_position[0],
                final_y=outcome.final_position[1],
                final_z=outcome.final_position[2],
                final_vx=outcome.final_velocity[0],
                final_vy=outcome.final_velocity[1],
                final_vz=outcome.final_velocity[2],
                track_deviation=ground_track_deviation(outcome, self.gravity_model),
            )
        csv_output.write_trajectory_csv(log, self.output_dir / f"hop_{item.index:03d}.csv", f"hop {item.index}")
        return row

    def _write_phase(self, name: str, log: TrajectoryLog):
        path = csv_output.write_trajectory_csv(log, self.output_dir / f"{name}.csv", name)
        logger.info(f"{name}: {len(log)} rows written to {path}")

    def _descent_plots(self, log: TrajectoryLog, profile: GuidanceProfile):
        times = log.times
        reference = [profile.sample(t) for t in times]
        ref_position = np.array([r.position for r in reference])
        ref_velocity = np.array([r.velocity for r in reference])
        plots = self.output_dir / "plots"
        csv_output.write_dataset(
            plots / "descent_tracking.csv",
            ("t", "rx", "ry", "rz", "vx", "vy", "vz", "ref_rx", "ref_ry", "ref_rz", "ref_vx", "ref_vy", "ref_vz"),
            np.column_stack((times, log.positions, log.velocities, ref_position, ref_velocity)),
            frame=log.frame,
        )
        csv_output.write_dataset(
            plots / "descent_control.csv",
            ("t", "ux", "uy", "uz"),
            np.column_stack((times, log.accelerations)),
            frame=log.frame,
        )

    def _landing_plots(self, log: TrajectoryLog):
        times = log.times
        euler = np.array([quaternion_to_euler_321(q) for q in log.attitudes]).reshape(-1, 3)
        plots = self.output_dir / "plots"
        csv_output.write_dataset(
            plots / "landing_state.csv",
            ("t", "rx", "ry", "rz", "vx", "vy", "vz"),
            np.column_stack((times, log.positions, log.velocities)),
            frame=log.frame,
        )
        csv_output.write_dataset(
            plots / "landing_attitude.csv",
            ("t", "roll", "pitch", "yaw", "wx", "wy", "wz"),
            np.column_stack((times, euler, log.rates)),
            frame=log.frame,
        )
        csv_output.write_dataset(
            plots / "landing_wheels.csv",
            ("t", "wheel1", "wheel2", "wheel3"),
            np.column_stack((times, log.wheel_torques)),
        )

    def _hop_plots(self, results: List[HopBatchResult]):
        blocks = []
        for result in results:
            if not result.ok:
                continue
            outcome = result.outcome if result.outcome is not None else result.solution.check
            log = outcome.log if outcome is not None else result.solution.log
            speeds = np.linalg.norm(log.velocities, axis=1)
            index = np.full(len(log), result.item.index, dtype=float)
            blocks.append(np.column_stack((index, log.times, log.positions, speeds)))
        data = np.vstack(blocks) if blocks else np.empty((0, 6))
        csv_output.write_dataset(
            self.output_dir / "plots" / "hop_tracks.csv", ("hop", "t", "x", "y", "z", "speed"), data, frame="body"
        )


def run_scenario(config: GeneralConfig, scenario: ScenarioConfig, phases=(DESCENT, LANDING, HOPS)) -> RunSummary:
    return ScenarioRunner(config, scenario).run(phases)


def sample_points(scenario: ScenarioConfig, mesh: PolyhedronMesh) -> np.ndarray:
    """Explicit points, then the grid (x slowest), then seeded random points in the scaled bounding box."""
    sampling = scenario.sampling
    if sampling is None:
        return np.empty((0, 3))
    blocks = [np.asarray(sampling.points, dtype=float).reshape(-1, 3)]
    if sampling.grid is not None:
        grid = sampling.grid
        axes = [np.linspace(grid.minimum[i], grid.maximum[i], grid.counts[i]) for i in range(3)]
        mesh_grid = np.meshgrid(*axes, indexing="ij")
        blocks.append(np.stack([m.ravel() for m in mesh_grid], axis=1))
    if sampling.random_count > 0:
        rng = np.random.default_rng(scenario.seed)
        half = sampling.random_scale * mesh.bounding_radius
        blocks.append(rng.uniform(-half, half, size=(sampling.random_count, 3)))
    return np.vstack(blocks)


def gravity_rows(gravity_model, points: np.ndarray) -> np.ndarray:
    rows = np.empty((len(points), len(csv_output.GRAVITY_COLUMNS)))
    failures = 0
    for i, point in enumerate(points):
        try:
            sample = gravity_model.evaluate(point)
            rows[i] = [*point, sample.potential, *sample.acceleration, sample.laplacian, 0]
        except ArithmeticError as e:
            failures += 1
            logger.debug(f"Gravity sample {i} at {point.tolist()} failed: {e}")
            rows[i] = [*point, math.nan, math.nan, math.nan, math.nan, math.nan, 1]
    if failures:
        logger.warning(f"{failures} of {len(points)} gravity samples hit a singularity and were flagged")
    return rows


def gravity_sample(config: GeneralConfig, scenario: ScenarioConfig) -> Path:
    """Write gravity.csv with one row per sample point."""
    mesh = build_mesh(scenario.shape)
    try:
        gravity_model = get_gravity_model(scenario.gravity, mesh)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    points = sample_points(scenario, mesh)
    logger.info(f"Sampling {gravity_model} at {len(points)} points")
    rows = gravity_rows(gravity_model, points)
    output_dir = Path(config.output_directory(scenario.output.directory))
    path = csv_output.write_gravity_dataset(rows, output_dir / "gravity.csv", scenario.gravity.model)
    logger.info(f"Gravity dataset written to {path}")
    return path
