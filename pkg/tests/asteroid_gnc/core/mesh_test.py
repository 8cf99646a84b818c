import math
import unittest
from unittest.mock import patch

import numpy as np

from asteroid_gnc.core.errors import MeshStructureError, OnSurfaceError
from asteroid_gnc.core.mesh import (
    DEGENERATE_FACE,
    EULER_CHARACTERISTIC,
    INCONSISTENT_WINDING,
    INDEX_OUT_OF_RANGE,
    INWARD_ORIENTATION,
    ON_SURFACE_BAND,
    OPEN_EDGE,
    PolyhedronMesh,
    area_weighted_normal_sum,
    build_topology,
    closest_surface_point,
    contains_point,
    contains_points,
    edge_count,
    mass_properties,
    nearest_vertex,
    outward_normal_at,
    require_valid,
    signed_volume,
    surface_point_along,
    validate_mesh,
    volume_by_divergence,
)
from asteroid_gnc.utils.synthetic_shapes import castalia_class, cube, icosphere, regular_tetrahedron, tetrahedron
from tests.test_utils import ray_cast_inside, reversed_faces


class TestMeshValidation(unittest.TestCase):

    def test_closed_meshes_are_valid(self):
        for mesh in (tetrahedron(), cube(), icosphere(2), castalia_class(1)):
            report = validate_mesh(mesh)
            self.assertTrue(report.is_valid, report.summary())
            self.assertEqual(report.summary(), 'mesh is valid')

    def test_euler_characteristic_counts(self):
        mesh = cube()
        self.assertEqual((mesh.vertex_count, edge_count(mesh), mesh.face_count), (8, 18, 12))
        self.assertEqual(edge_count(tetrahedron()), 6)

    def test_open_mesh(self):
        mesh = tetrahedron()
        open_mesh = PolyhedronMesh(mesh.vertices, mesh.faces[:3])
        report = validate_mesh(open_mesh)
        self.assertFalse(report.is_valid)
        self.assertEqual(len(report.of_kind(OPEN_EDGE)), 3)
        self.assertEqual(len(report.of_kind(EULER_CHARACTERISTIC)), 1)
        self.assertEqual(report.of_kind(INWARD_ORIENTATION), [])

    def test_single_reversed_face_is_named(self):
        report = validate_mesh(reversed_faces(tetrahedron(), [3]))
        winding = report.of_kind(INCONSISTENT_WINDING)
        self.assertEqual(len(report), 1)
        self.assertEqual(len(winding), 1)
        self.assertEqual(winding[0].faces, (3,))

    def test_inward_orientation(self):
        report = validate_mesh(reversed_faces(cube()))
        self.assertEqual(len(report.of_kind(INWARD_ORIENTATION)), 1)
        self.assertEqual(report.of_kind(INCONSISTENT_WINDING), [])

    def test_index_out_of_range(self):
        mesh = PolyhedronMesh(tetrahedron().vertices, [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 7]])
        report = validate_mesh(mesh)
        self.assertEqual(len(report.of_kind(INDEX_OUT_OF_RANGE)), 1)
        self.assertEqual(report.of_kind(INDEX_OUT_OF_RANGE)[0].faces, (3,))

    def test_degenerate_faces(self):
        mesh = PolyhedronMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 1, 0]], tetrahedron().faces)
        self.assertGreaterEqual(len(validate_mesh(mesh).of_kind(DEGENERATE_FACE)), 1)

    def test_empty_mesh(self):
        self.assertFalse(validate_mesh(PolyhedronMesh(np.empty((0, 3)), np.empty((0, 3)))).is_valid)

    def test_require_valid_raises(self):
        with self.assertRaises(MeshStructureError):
            require_valid(reversed_faces(cube()))

    def test_mesh_is_immutable(self):
        mesh = cube()
        with self.assertRaises(ValueError):
            mesh.vertices[0, 0] = 5.0


class TestTopology(unittest.TestCase):

    def test_face_dyads(self):
        topology = build_topology(icosphere(1))
        for dyad in topology.face_dyads:
            self.assertAlmostEqual(np.trace(dyad), 1.0, places=12)
            np.testing.assert_allclose(dyad @ dyad, dyad, atol=1e-12)

    def test_edge_dyads_are_symmetric(self):
        for mesh in (regular_tetrahedron(), cube(), castalia_class(1)):
            topology = build_topology(mesh)
            self.assertEqual(2 * topology.edge_count, 3 * mesh.face_count)
            scale = max(1.0, float(np.abs(topology.edge_dyads).max()))
            np.testing.assert_allclose(topology.edge_dyads, np.transpose(topology.edge_dyads, (0, 2, 1)), atol=1e-12 * scale)

    def test_cube_edge_dyads(self):
        topology = build_topology(cube())
        edges = [tuple(e) for e in topology.edge_vertices.tolist()]
        # diagonal of the z = 0 face joins two coplanar triangles
        np.testing.assert_allclose(topology.edge_dyads[edges.index((0, 2))], np.zeros((3, 3)), atol=1e-12)
        expected = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
        np.testing.assert_allclose(topology.edge_dyads[edges.index((0, 1))], expected, atol=1e-12)

    def test_topology_rejects_invalid_mesh(self):
        with self.assertRaises(MeshStructureError):
            build_topology(reversed_faces(tetrahedron(), [0]))


class TestMassProperties(unittest.TestCase):

    def test_unit_cube(self):
        properties = mass_properties(cube(), 1.0)
        self.assertAlmostEqual(properties.volume, 1.0, places=12)
        self.assertAlmostEqual(properties.mass, 1.0, places=12)
        np.testing.assert_allclose(properties.centroid, [0.5, 0.5, 0.5], atol=1e-12)
        np.testing.assert_allclose(properties.inertia, np.eye(3) / 6.0, atol=1e-12)

    def test_tetrahedron_volume(self):
        self.assertAlmostEqual(mass_properties(tetrahedron(), 2.0).volume, 1.0 / 6.0, places=12)
        self.assertAlmostEqual(signed_volume(tetrahedron()), 1.0 / 6.0, places=12)

    def test_volume_agrees_with_divergence_theorem(self):
        mesh = castalia_class(2)
        self.assertAlmostEqual(volume_by_divergence(mesh) / signed_volume(mesh), 1.0, places=10)

    def test_closure_identity(self):
        for mesh in (cube(), icosphere(2), castalia_class(2)):
            total = area_weighted_normal_sum(mesh)
            self.assertLess(np.linalg.norm(total), 1e-10 * mesh.bounding_radius ** 2)

    def test_scaling(self):
        mesh = castalia_class(1)
        base = mass_properties(mesh, 2100.0)
        scaled = mass_properties(mesh.scaled(2.0), 2100.0)
        self.assertAlmostEqual(scaled.volume / base.volume, 8.0, places=9)
        np.testing.assert_allclose(scaled.inertia, 32.0 * base.inertia, rtol=1e-9, atol=1e-9 * np.abs(scaled.inertia).max())

    def test_inertia_is_positive_definite(self):
        inertia = mass_properties(castalia_class(2), 2100.0).inertia
        np.testing.assert_allclose(inertia, inertia.T)
        self.assertGreater(np.linalg.eigvalsh(inertia).min(), 0.0)

    def test_invalid_density(self):
        with self.assertRaises(ValueError):
            mass_properties(cube(), 0.0)

    def test_castalia_volume_matches_voxel_count(self):
        mesh = castalia_class(2)
        low, high = mesh.vertices.min(axis=0), mesh.vertices.max(axis=0)
        counts = 30
        cell = (high - low) / counts
        axes = [low[i] + cell[i] * (np.arange(counts) + 0.5) for i in range(3)]
        X, Y, Z = np.meshgrid(*axes, indexing='ij')
        points = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
        estimate = contains_points(mesh, points).sum() * np.prod(cell)
        self.assertAlmostEqual(estimate / signed_volume(mesh), 1.0, delta=0.01)


class TestPointQueries(unittest.TestCase):

    def test_contains_point(self):
        mesh = cube()
        self.assertTrue(contains_point(mesh, [0.5, 0.5, 0.5]))
        self.assertFalse(contains_point(mesh, [3.0, 0.2, 0.1]))

    def test_on_surface_raises(self):
        mesh = cube()
        centroid = mesh.vertices[mesh.faces[0]].mean(axis=0)
        with self.assertRaises(OnSurfaceError):
            contains_point(mesh, centroid)

    # The band applies to the solid-angle sum, whatever the distance to the surface
    @patch('asteroid_gnc.core.mesh.solid_angles')
    def test_on_surface_band_is_a_solid_angle_tolerance(self, mock_solid_angles):
        mock_solid_angles.return_value = np.array([2.0 * math.pi + 0.5 * ON_SURFACE_BAND])
        with self.assertRaises(OnSurfaceError):
            contains_point(cube(), [40.0, 0.0, 0.0])
        mock_solid_angles.return_value = np.array([2.0 * math.pi + 2.0 * ON_SURFACE_BAND])
        self.assertTrue(contains_point(cube(), [40.0, 0.0, 0.0]))
        mock_solid_angles.return_value = np.array([2.0 * math.pi - 2.0 * ON_SURFACE_BAND])
        self.assertFalse(contains_point(cube(), [0.5, 0.5, 0.5]))

    def test_points_just_off_a_face(self):
        mesh = cube()
        centroid = mesh.vertices[mesh.faces[0]].mean(axis=0)
        normal = np.array([0.0, 0.0, -1.0])
        offset = 1e-3 * mesh.bounding_radius
        self.assertFalse(contains_point(mesh, centroid + offset * normal))
        self.assertTrue(contains_point(mesh, centroid - offset * normal))

    def test_agrees_with_ray_casting(self):
        mesh = castalia_class(1)
        rng = np.random.default_rng(11)
        points = rng.uniform(-1.1, 1.1, size=(60, 3)) * np.array([900.0, 700.0, 484.0])
        inside = contains_points(mesh, points)
        for point, flag in zip(points, inside):
            self.assertEqual(bool(flag), ray_cast_inside(mesh, point), point)

    def test_closest_surface_point(self):
        mesh = cube(size=100.0, centered=True)
        point, face, distance = closest_surface_point(mesh, [10.0, 5.0, 57.0])
        np.testing.assert_allclose(point, [10.0, 5.0, 50.0], atol=1e-12)
        self.assertAlmostEqual(distance, 7.0, places=12)
        self.assertIn(face, (2, 3))

    def test_outward_normal(self):
        mesh = cube()
        np.testing.assert_allclose(outward_normal_at(mesh, [0.6, 0.3, 0.0]), [0.0, 0.0, -1.0], atol=1e-12)
        # on an edge the two faces are averaged
        edge_normal = outward_normal_at(mesh, [0.5, 0.0, 0.0])
        np.testing.assert_allclose(edge_normal, [0.0, -math.sqrt(0.5), -math.sqrt(0.5)], atol=1e-12)

    def test_surface_point_along(self):
        mesh = icosphere(3, radius=10.0)
        point = surface_point_along(mesh, [1.0, 2.0, 3.0])
        self.assertLessEqual(np.linalg.norm(point), 10.0 + 1e-9)
        self.assertGreater(np.linalg.norm(point), 9.8)
        np.testing.assert_allclose(np.cross(point, [1.0, 2.0, 3.0]), np.zeros(3), atol=1e-9)

    def test_surface_point_along_zero_direction(self):
        with self.assertRaises(ValueError):
            surface_point_along(cube(), [0.0, 0.0, 0.0])

    def test_nearest_vertex(self):
        self.assertEqual(nearest_vertex(cube(), [0.9, 1.2, 0.1]), 2)


if __name__ == '__main__':
    unittest.main()
