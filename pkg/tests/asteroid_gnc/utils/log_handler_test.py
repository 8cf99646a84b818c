import logging
import tempfile
import unittest
from pathlib import Path

from asteroid_gnc.utils.log_handler import MAIN_FORMAT, WORKER_FORMAT, get_formatter, resolve_log_level, setup_logging


class TestLogHandler(unittest.TestCase):

    def tearDown(self):
        root_logger = logging.getLogger()
        for handler in root_logger.handlers[:]:
            handler.close()
            root_logger.removeHandler(handler)

    def test_setup_logging_writes_the_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            log_file = Path(tmp) / 'nested' / 'run.log'
            path = setup_logging('DEBUG', str(log_file), quiet=True)
            self.assertEqual(path, log_file)
            logging.getLogger('asteroid_gnc.test').debug('descent step')
            for handler in logging.getLogger().handlers:
                handler.flush()
            self.assertIn('descent step', log_file.read_text(encoding='utf-8'))
            self.tearDown()

    def test_quiet_console(self):
        with tempfile.TemporaryDirectory() as tmp:
            setup_logging('INFO', str(Path(tmp) / 'run.log'), quiet=True)
            console = [h for h in logging.getLogger().handlers if not isinstance(h, logging.FileHandler)]
            self.assertEqual(console[0].level, logging.WARNING)
            self.tearDown()

    def test_worker_formatter(self):
        self.assertEqual(get_formatter(True)._fmt, WORKER_FORMAT)
        self.assertEqual(get_formatter(False)._fmt, MAIN_FORMAT)

    def test_resolve_log_level(self):
        self.assertEqual(resolve_log_level('warning'), logging.WARNING)
        with self.assertRaises(ValueError):
            resolve_log_level('LOUD')


if __name__ == '__main__':
    unittest.main()
