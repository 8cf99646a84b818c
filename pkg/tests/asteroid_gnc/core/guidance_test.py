import math
import unittest

import numpy as np

from asteroid_gnc.core.errors import InfeasibleBoundaryError
from asteroid_gnc.core.guidance import (
    BoundaryConditions,
    GuidanceProfile,
    default_terminal_acceleration,
    plan_descent,
    sample_profile,
    solve_profile,
    solve_transfer_time,
)
from asteroid_gnc.core.frames import site_frame_from_position
from asteroid_gnc.gravity_models.point_mass_gravity_model import PointMassGravityModel

DESCENT_BOUNDARY = BoundaryConditions(
    initial_position=[-500.0, 1000.0, 1100.0],
    initial_velocity=[2.2, -1.2, -0.1],
    final_position=[0.0, 0.0, 100.0],
    final_velocity=[0.0, 0.0, -0.2],
)


class TestGuidance(unittest.TestCase):

    def test_rest_to_rest_at_the_same_point(self):
        boundary = BoundaryConditions([1.0, 2.0, 3.0], [0.0, 0.0, 0.0], [1.0, 2.0, 3.0], [0.0, 0.0, 0.0])
        profile = solve_profile(boundary, 50.0)
        for coefficient in (profile.c0, profile.c1, profile.c2):
            np.testing.assert_array_equal(coefficient, np.zeros(3))

    def test_unit_displacement_coefficients(self):
        boundary = BoundaryConditions([0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [0.0, 0.0, 0.0])
        profile = solve_profile(boundary, 1.0)
        np.testing.assert_allclose(profile.c0, [12.0] * 3)
        np.testing.assert_allclose(profile.c1, [-48.0] * 3)
        np.testing.assert_allclose(profile.c2, [36.0] * 3)

        reference = profile.sample(0.5)
        np.testing.assert_allclose(reference.acceleration, [-3.0] * 3)
        np.testing.assert_allclose(reference.velocity, [1.5] * 3)
        np.testing.assert_allclose(reference.position, [0.6875] * 3)

    def test_linear_transfer_time(self):
        tau = solve_transfer_time(DESCENT_BOUNDARY)
        self.assertAlmostEqual(tau, 6000.0, places=9)
        profile = plan_descent(DESCENT_BOUNDARY)
        self.assertLess(abs(profile.c2[2]), 1e-12)

        final = profile.sample(profile.tau)
        np.testing.assert_allclose(final.position, DESCENT_BOUNDARY.final_position, rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(final.velocity, DESCENT_BOUNDARY.final_velocity, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(final.acceleration, np.zeros(3), atol=1e-15)
        start = profile.sample(0.0)
        np.testing.assert_array_equal(start.position, DESCENT_BOUNDARY.initial_position)
        np.testing.assert_array_equal(start.velocity, DESCENT_BOUNDARY.initial_velocity)

    def test_quadratic_transfer_time(self):
        boundary = BoundaryConditions(
            [0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 500.0], [0.0, 0.0, 0.0], final_acceleration=[0.0, 0.0, -0.001]
        )
        self.assertAlmostEqual(solve_transfer_time(boundary), math.sqrt(3e6), places=9)

    def test_infeasible_boundary(self):
        boundary = BoundaryConditions([0.0, 0.0, 10.0], [0.0, 0.0, 0.0], [0.0, 0.0, 10.0], [0.0, 0.0, 0.0])
        with self.assertRaises(InfeasibleBoundaryError) as context:
            solve_transfer_time(boundary)
        self.assertEqual(context.exception.discriminant, 0.0)

    def test_negative_discriminant(self):
        # a tau^2 + c = 0 with a and c of the same sign
        boundary = BoundaryConditions(
            [0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 500.0], [0.0, 0.0, 0.0], final_acceleration=[0.0, 0.0, 0.001]
        )
        with self.assertRaises(InfeasibleBoundaryError) as context:
            solve_transfer_time(boundary)
        self.assertLess(context.exception.discriminant, 0.0)

    def test_explicit_tau(self):
        profile = plan_descent(DESCENT_BOUNDARY, tau=4000.0)
        self.assertEqual(profile.tau, 4000.0)
        with self.assertRaises(ValueError):
            solve_profile(DESCENT_BOUNDARY, 0.0)

    def test_sampling_is_clamped(self):
        profile = plan_descent(DESCENT_BOUNDARY)
        after = sample_profile(profile, 2.0 * profile.tau)
        at_end = sample_profile(profile, profile.tau)
        np.testing.assert_array_equal(after.position, at_end.position)
        before = sample_profile(profile, -5.0)
        np.testing.assert_array_equal(before.position, DESCENT_BOUNDARY.initial_position)

    def test_derivatives_are_consistent(self):
        boundary = BoundaryConditions([0.3, -0.2, 1.0], [0.1, 0.05, -0.2], [-0.4, 0.6, 0.2], [0.0, 0.1, -0.05], [0.01, 0.0, 0.02])
        profile = solve_profile(boundary, 10.0)
        h = profile.tau * 1e-5
        for t in np.linspace(1.0, 9.0, 9):
            before, here, after = (profile.sample(t + s) for s in (-h, 0.0, h))
            numeric_acceleration = (after.position - 2.0 * here.position + before.position) / h ** 2
            numeric_velocity = (after.position - before.position) / (2.0 * h)
            scale = max(1.0, np.linalg.norm(here.acceleration))
            self.assertLess(np.linalg.norm(numeric_acceleration - here.acceleration), 1e-6 * scale)
            self.assertLess(np.linalg.norm(numeric_velocity - here.velocity), 1e-6 * max(1.0, np.linalg.norm(here.velocity)))

    def test_translation_shifts_positions_only(self):
        offset = np.array([10.0, -20.0, 5.0])
        shifted = BoundaryConditions(
            DESCENT_BOUNDARY.initial_position + offset,
            DESCENT_BOUNDARY.initial_velocity,
            DESCENT_BOUNDARY.final_position + offset,
            DESCENT_BOUNDARY.final_velocity,
        )
        base = solve_profile(DESCENT_BOUNDARY, 6000.0)
        moved = solve_profile(shifted, 6000.0)
        for t in (0.0, 1500.0, 6000.0):
            a, b = base.sample(t), moved.sample(t)
            np.testing.assert_allclose(b.position, a.position + offset, atol=1e-9)
            np.testing.assert_allclose(b.velocity, a.velocity, atol=1e-12)
            np.testing.assert_allclose(b.acceleration, a.acceleration, atol=1e-15)

    def test_time_reversal(self):
        forward = solve_profile(
            BoundaryConditions([0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [30.0, -10.0, 5.0], [0.0, 0.0, 0.0]), 100.0
        )
        backward = solve_profile(
            BoundaryConditions([30.0, -10.0, 5.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0], forward.c0), 100.0
        )
        for t in (0.0, 25.0, 50.0, 80.0, 100.0):
            np.testing.assert_allclose(backward.sample(t).position, forward.sample(100.0 - t).position, atol=1e-10)

    def test_default_terminal_acceleration(self):
        frame = site_frame_from_position([0.0, 0.0, 1000.0], longitude=0.0)
        model = PointMassGravityModel(100.0)
        acceleration = default_terminal_acceleration(model, frame, [0.0, 0.0, 100.0])
        np.testing.assert_allclose(acceleration, [0.0, 0.0, 100.0 / 1100.0 ** 2], atol=1e-15)

    def test_profile_is_immutable(self):
        profile = plan_descent(DESCENT_BOUNDARY)
        self.assertIsInstance(profile, GuidanceProfile)
        with self.assertRaises(ValueError):
            profile.boundary.initial_position[0] = 0.0


if __name__ == '__main__':
    unittest.main()
