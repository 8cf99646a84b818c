"""Per-step records written by the propagator and read back by the runner and the CSV writer."""

from typing import List

import numpy as np

COLUMNS = (
    "t",
    "rx", "ry", "rz",
    "vx", "vy", "vz",
    "qw", "qx", "qy", "qz",
    "wx", "wy", "wz",
    "ux", "uy", "uz",
    "tqx", "tqy", "tqz",
    "wheel1", "wheel2", "wheel3",
    "sat_flags",
)
STATE_SLICE = slice(1, 14)


class TrajectoryLog:
    """
    Row i holds the state at t_i and the control held over [t_i, t_i+1); the final row
    holds the terminal state with the command the controller would issue there.
    Gravity and disturbance samples are taken at each row's state.
    """

    def __init__(self, frame: str, dt: float):
        self.frame = frame
        self.dt = dt
        self._rows: List[np.ndarray] = []
        self._gravity: List[np.ndarray] = []
        self._disturbance: List[np.ndarray] = []

    def __len__(self) -> int:
        return len(self._rows)

    def __str__(self) -> str:
        if not self._rows:
            return f"TrajectoryLog(frame={self.frame}, empty)"
        return f"TrajectoryLog(frame={self.frame}, rows={len(self)}, t=[{self.times[0]}, {self.times[-1]}])"

    def append(self, t: float, state_vector, output, gravity, disturbance):
        row = np.concatenate(
            (
                [t],
                state_vector,
                output.acceleration,
                output.torque,
                output.wheel_torques,
                [output.flags],
            )
        )
        self._rows.append(row)
        self._gravity.append(np.asarray(gravity, dtype=float))
        self._disturbance.append(np.asarray(disturbance, dtype=float))

    def as_array(self) -> np.ndarray:
        if not self._rows:
            return np.empty((0, len(COLUMNS)))
        return np.vstack(self._rows)

    def column(self, *names: str) -> np.ndarray:
        indices = [COLUMNS.index(name) for name in names]
        data = self.as_array()[:, indices]
        return data[:, 0] if len(indices) == 1 else data

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    @property
    def positions(self) -> np.ndarray:
        return self.column("rx", "ry", "rz")

    @property
    def velocities(self) -> np.ndarray:
        return self.column("vx", "vy", "vz")

    @property
    def attitudes(self) -> np.ndarray:
        return self.column("qw", "qx", "qy", "qz")

    @property
    def rates(self) -> np.ndarray:
        return self.column("wx", "wy", "wz")

    @property
    def accelerations(self) -> np.ndarray:
        return self.column("ux", "uy", "uz")

    @property
    def torques(self) -> np.ndarray:
        return self.column("tqx", "tqy", "tqz")

    @property
    def wheel_torques(self) -> np.ndarray:
        return self.column("wheel1", "wheel2", "wheel3")

    @property
    def flags(self) -> np.ndarray:
        return self.column("sat_flags").astype(np.int64)

    @property
    def gravity(self) -> np.ndarray:
        return np.array(self._gravity).reshape(-1, 3)

    @property
    def disturbance(self) -> np.ndarray:
        return np.array(self._disturbance).reshape(-1, 3)

    def state_vector(self, index: int = -1) -> np.ndarray:
        return self._rows[index][STATE_SLICE].copy()

    def saturation_count(self) -> int:
        return int(np.count_nonzero(self.flags)) if self._rows else 0

    def peak_acceleration(self) -> float:
        return float(np.abs(self.accelerations).max()) if self._rows else 0.0

    def peak_wheel_torque(self) -> float:
        return float(np.abs(self.wheel_torques).max()) if self._rows else 0.0
