import unittest
from unittest.mock import patch

from asteroid_gnc.config.general_config import GeneralConfig
from tests.test_utils import get_run_config


class TestGeneralConfig(unittest.TestCase):

    @patch.dict('os.environ', {'ASTEROID_GNC_OUTPUT_DIR': 'from_env'})
    def test_out_argument_wins(self):
        config = get_run_config('scenario.yaml', out='from_args')
        self.assertEqual(config.output_directory('from_scenario'), 'from_args')

    @patch.dict('os.environ', {'ASTEROID_GNC_OUTPUT_DIR': 'from_env'})
    def test_scenario_directory_before_environment(self):
        config = get_run_config('scenario.yaml')
        self.assertEqual(config.output_directory('from_scenario'), 'from_scenario')
        self.assertEqual(config.output_directory(), 'from_env')

    @patch.dict('os.environ', {}, clear=True)
    def test_default_output_directory(self):
        self.assertEqual(get_run_config('scenario.yaml').output_directory(), 'output')

    def test_missing_arguments_default_to_none(self):
        config = GeneralConfig(object())
        self.assertIsNone(config.config)
        self.assertIsNone(config.workers)
        self.assertFalse(config.quiet)


if __name__ == '__main__':
    unittest.main()
