"""
Gravity field models share one sign convention: the potential U is positive and the
acceleration is g = +grad U, pointing toward the attracting body.
"""

import dataclasses
from typing import List

import numpy as np

POLYHEDRON = "polyhedron"
POINT_MASS = "point_mass"
UNIFORM = "uniform"

GRAVITATIONAL_CONSTANT = 6.67430e-11


@dataclasses.dataclass(frozen=True)
class FieldSample:
    potential: float  # m^2/s^2
    acceleration: np.ndarray  # m/s^2, body frame
    laplacian: float  # 1/s^2


class BaseGravityModel:  # Base interface for gravity fields
    def __init__(self):
        self.validate()

    def __str__(self) -> str:
        return f"{type(self).__name__}"

    def validate(self):
        raise NotImplementedError

    def evaluate(self, point) -> FieldSample:
        raise NotImplementedError

    def potential(self, point) -> float:
        return self.evaluate(point).potential

    def acceleration(self, point) -> np.ndarray:
        return self.evaluate(point).acceleration

    def laplacian(self, point) -> float:
        return self.evaluate(point).laplacian

    @property
    def mesh(self):
        """Surface model for impact events, or None for harness fields."""
        return None

    @property
    def reference_radius(self) -> float:
        """Length scale used for escape and divergence spheres."""
        raise NotImplementedError


# Common support methods for all gravity models

def get_supported_gravity_models() -> List[str]:
    return [POLYHEDRON, POINT_MASS, UNIFORM]


def get_gravity_model(config, mesh=None) -> BaseGravityModel:
    if config.model == POLYHEDRON:
        from asteroid_gnc.gravity_models.polyhedron_gravity_model import PolyhedronGravityModel

        if mesh is None:
            raise ValueError("Polyhedron gravity needs a shape model")
        return PolyhedronGravityModel(mesh, config.density, config.gravitational_constant)
    elif config.model == POINT_MASS:
        from asteroid_gnc.gravity_models.point_mass_gravity_model import PointMassGravityModel

        return PointMassGravityModel(config.mu, reference_radius=config.reference_radius, mesh=mesh)
    elif config.model == UNIFORM:
        from asteroid_gnc.gravity_models.uniform_gravity_model import UniformGravityModel

        return UniformGravityModel(config.acceleration, reference_radius=config.reference_radius)
    else:
        raise ValueError(f"Invalid gravity model: {config.model}")
