import unittest
from unittest.mock import patch
from main import handle_args


class TestHandleArgs(unittest.TestCase):

    # Test run arguments
    @patch('sys.argv', ['program', 'run', '--config', 'scenarios/castalia_mission.yaml', '--out', 'results'])
    def test_run_args(self):
        config = handle_args()
        self.assertEqual(config.command, 'run')
        self.assertEqual(config.config, 'scenarios/castalia_mission.yaml')
        self.assertEqual(config.out, 'results')
        self.assertEqual(config.log, 'INFO')
        self.assertFalse(config.quiet)
        self.assertIsNone(config.dt_override)

    # Test step override and worker count
    @patch('sys.argv', ['program', 'hop-batch', '--config', 'hops.yaml', '--dt-override', '0.5', '--workers', '4', '--quiet'])
    def test_hop_batch_args(self):
        config = handle_args()
        self.assertEqual(config.command, 'hop-batch')
        self.assertEqual(config.dt_override, 0.5)
        self.assertEqual(config.workers, 4)
        self.assertTrue(config.quiet)

    # Test gravity arguments
    @patch('sys.argv', ['program', 'gravity', '--config', 'gravity.yaml', '--log', 'DEBUG'])
    def test_gravity_args(self):
        config = handle_args()
        self.assertEqual(config.command, 'gravity')
        self.assertEqual(config.log, 'DEBUG')
        self.assertIsNone(config.workers)

    # Test validate-mesh with a synthetic shape
    @patch('sys.argv', ['program', 'validate-mesh', '--synthetic', 'castalia_class', '--subdivisions', '2'])
    def test_validate_mesh_synthetic_args(self):
        config = handle_args()
        self.assertEqual(config.synthetic, 'castalia_class')
        self.assertEqual(config.subdivisions, 2)
        self.assertIsNone(config.shape)

    # Test validate-mesh with a shape file and units
    @patch('sys.argv', ['program', 'validate-mesh', '--shape', 'castalia.tab', '--units', 'km'])
    def test_validate_mesh_file_args(self):
        config = handle_args()
        self.assertEqual(config.shape, 'castalia.tab')
        self.assertEqual(config.units, 'km')

    # Test that validate-mesh takes a file or a synthetic shape, not both
    @patch('sys.argv', ['program', 'validate-mesh', '--shape', 'castalia.tab', '--synthetic', 'cube'])
    def test_validate_mesh_both_sources(self):
        with self.assertRaises(SystemExit):
            handle_args()

    # Test unsupported synthetic shape
    @patch('sys.argv', ['program', 'make-shape', '--synthetic', 'kleopatra', '--out', 'shape.tab'])
    def test_unsupported_synthetic_shape(self):
        with self.assertRaises(SystemExit):
            handle_args()

    # Test make-shape defaults to the tabular format
    @patch('sys.argv', ['program', 'make-shape', '--synthetic', 'icosphere', '--out', 'sphere.tab'])
    def test_make_shape_args(self):
        config = handle_args()
        self.assertEqual(config.format, 'tab')
        self.assertEqual(config.subdivisions, 3)

    # Test missing required config argument
    @patch('sys.argv', ['program', 'run'])
    def test_missing_config(self):
        with self.assertRaises(SystemExit):
            handle_args()

    # Test missing subcommand
    @patch('sys.argv', ['program'])
    def test_missing_command(self):
        with self.assertRaises(SystemExit):
            handle_args()

    # Test invalid log level argument
    @patch('sys.argv', ['program', 'run', '--config', 'scenario.yaml', '--log', 'INVALID_LOG_LEVEL'])
    def test_invalid_log_level(self):
        with self.assertRaises(SystemExit):
            handle_args()

    # Test non-numeric worker count
    @patch('sys.argv', ['program', 'run', '--config', 'scenario.yaml', '--workers', 'many'])
    def test_invalid_workers(self):
        with self.assertRaises(SystemExit):
            handle_args()

    # Test version
    @patch('sys.argv', ['program', 'version'])
    def test_version_args(self):
        self.assertEqual(handle_args().command, 'version')


if __name__ == '__main__':
    unittest.main()
