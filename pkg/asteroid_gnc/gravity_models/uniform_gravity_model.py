import numpy as np

from asteroid_gnc.gravity_models.base_gravity_model import BaseGravityModel, FieldSample


class UniformGravityModel(BaseGravityModel):
    """Constant field g with U = g . r; the flat-ground test harness for shooting."""

    def __init__(self, acceleration=(0.0, 0.0, 0.0), reference_radius: float = 1e6):
        self.field = np.asarray(acceleration, dtype=float).reshape(3)
        self._reference_radius = float(reference_radius)
        super().__init__()

    def validate(self):
        if not np.all(np.isfinite(self.field)):
            raise ValueError(f"Uniform field must be finite, got {self.field.tolist()}")

    @property
    def reference_radius(self) -> float:
        return self._reference_radius

    def evaluate(self, point) -> FieldSample:
        p = np.asarray(point, dtype=float)
        return FieldSample(potential=float(self.field @ p), acceleration=self.field.copy(), laplacian=0.0)
