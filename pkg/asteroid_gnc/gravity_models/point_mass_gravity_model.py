import numpy as np

from asteroid_gnc.core.errors import GravitySingularityError
from asteroid_gnc.gravity_models.base_gravity_model import BaseGravityModel, FieldSample


class PointMassGravityModel(BaseGravityModel):
    """Keplerian field mu / r about `center`; used as an oracle and a test harness."""

    def __init__(self, mu: float, center=(0.0, 0.0, 0.0), reference_radius: float = 1.0, mesh=None):
        self.mu = float(mu)
        self.center = np.asarray(center, dtype=float)
        self._reference_radius = float(reference_radius)
        self._mesh = mesh
        super().__init__()

    def validate(self):
        if self.mu < 0:
            raise ValueError(f"Gravitational parameter must be non-negative, got {self.mu}")
        if self._reference_radius <= 0:
            raise ValueError(f"Reference radius must be positive, got {self._reference_radius}")

    @property
    def mesh(self):
        return self._mesh

    @property
    def reference_radius(self) -> float:
        return self._reference_radius

    def evaluate(self, point) -> FieldSample:
        offset = np.asarray(point, dtype=float) - self.center
        r = float(np.linalg.norm(offset))
        if r == 0.0:
            raise GravitySingularityError("field point coincides with the point mass")
        return FieldSample(
            potential=self.mu / r,
            acceleration=-self.mu * offset / r ** 3,
            laplacian=0.0,
        )
