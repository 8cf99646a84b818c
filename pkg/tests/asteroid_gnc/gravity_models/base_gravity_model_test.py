import unittest

import numpy as np

from asteroid_gnc.core.errors import GravitySingularityError
from asteroid_gnc.gravity_models.base_gravity_model import get_gravity_model, get_supported_gravity_models
from asteroid_gnc.gravity_models.point_mass_gravity_model import PointMassGravityModel
from asteroid_gnc.gravity_models.polyhedron_gravity_model import PolyhedronGravityModel
from asteroid_gnc.gravity_models.uniform_gravity_model import UniformGravityModel
from asteroid_gnc.utils.synthetic_shapes import icosphere
from tests.test_utils import get_gravity_config


class TestBaseGravityModel(unittest.TestCase):

    def test_get_gravity_model_polyhedron(self):
        mesh = icosphere(1, radius=500.0)
        model = get_gravity_model(get_gravity_config(), mesh)
        self.assertIsInstance(model, PolyhedronGravityModel)
        self.assertIs(model.mesh, mesh)
        self.assertEqual(model.reference_radius, mesh.max_vertex_radius)

    def test_polyhedron_needs_a_mesh(self):
        with self.assertRaises(ValueError):
            get_gravity_model(get_gravity_config())

    def test_get_gravity_model_point_mass(self):
        model = get_gravity_model(get_gravity_config(model='point_mass', mu=150.0))
        self.assertIsInstance(model, PointMassGravityModel)
        self.assertIsNone(model.mesh)

    def test_get_gravity_model_uniform(self):
        model = get_gravity_model(get_gravity_config(model='uniform', acceleration=[0.0, 0.0, -1e-3]))
        self.assertIsInstance(model, UniformGravityModel)

    def test_get_gravity_model_invalid(self):
        with self.assertRaises(ValueError):
            get_gravity_model(get_gravity_config(model='spherical_harmonics'))

    def test_supported_models(self):
        self.assertEqual(get_supported_gravity_models(), ['polyhedron', 'point_mass', 'uniform'])


class TestPointMassGravityModel(unittest.TestCase):

    def test_field(self):
        model = PointMassGravityModel(4.0)
        sample = model.evaluate([2.0, 0.0, 0.0])
        self.assertEqual(sample.potential, 2.0)
        np.testing.assert_allclose(sample.acceleration, [-1.0, 0.0, 0.0])
        self.assertEqual(sample.laplacian, 0.0)

    def test_offset_center(self):
        model = PointMassGravityModel(1.0, center=[1.0, 1.0, 1.0])
        np.testing.assert_allclose(model.acceleration([1.0, 1.0, 3.0]), [0.0, 0.0, -0.25])

    def test_singularity(self):
        with self.assertRaises(GravitySingularityError):
            PointMassGravityModel(1.0).evaluate([0.0, 0.0, 0.0])

    def test_negative_mu(self):
        with self.assertRaises(ValueError):
            PointMassGravityModel(-1.0)


class TestUniformGravityModel(unittest.TestCase):

    def test_field(self):
        model = UniformGravityModel([0.0, 0.0, -2.0])
        sample = model.evaluate([5.0, 1.0, 3.0])
        self.assertEqual(sample.potential, -6.0)
        np.testing.assert_array_equal(sample.acceleration, [0.0, 0.0, -2.0])

    def test_non_finite_field(self):
        with self.assertRaises(ValueError):
            UniformGravityModel([0.0, float('nan'), 0.0])


if __name__ == '__main__':
    unittest.main()
