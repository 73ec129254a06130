import logging
import os
import unittest
from unittest.mock import MagicMock, patch

from main import Outcome
from src.common import error_handler
from src.common.config import ExperimentConfig
from src.common.error_handler import ErrorLogger, handle_errors, log_experiment
from src.common.errors import (
    BudgetExceededError, ConfigError, ConvergenceError, LacunariaError, MissingImageError, WordParseError
)
from tests.test_helpers import FixtureTestCase


class TestErrorHierarchy(unittest.TestCase):
    def test_builtin_bases(self):
        self.assertTrue(issubclass(ConfigError, ValueError))
        self.assertTrue(issubclass(MissingImageError, LookupError))
        self.assertTrue(issubclass(ConvergenceError, ArithmeticError))
        self.assertTrue(issubclass(BudgetExceededError, LacunariaError))

    def test_parse_error_position(self):
        error = WordParseError('bad token', 3, 7)
        self.assertEqual((error.line, error.column), (3, 7))
        self.assertIn('line 3, column 7', str(error))


class TestErrorLogger(FixtureTestCase):
    def tearDown(self):
        for name in ('errors', 'experiments'):
            for handler in list(logging.getLogger(name).handlers):
                handler.close()
                logging.getLogger(name).removeHandler(handler)
        super().tearDown()

    def test_log_error_details(self):
        details = ErrorLogger().log_error(ValueError('boom'), {'operation': 'schur'})
        self.assertEqual(details['error_type'], 'ValueError')
        self.assertEqual(details['error_message'], 'boom')
        self.assertEqual(details['context'], {'operation': 'schur'})

    def test_library_errors_skip_the_traceback(self):
        details = ErrorLogger().log_error(ConfigError('bad grid'))
        self.assertEqual(details['category'], 'input')
        self.assertIsNone(details['traceback'])
        try:
            raise KeyError('x')
        except KeyError as e:
            details = ErrorLogger().log_error(e)
        self.assertEqual(details['category'], 'unexpected')
        self.assertIn('KeyError', details['traceback'])

    def test_file_handlers_are_attached_once(self):
        log_dir = os.path.join(self.tmp_dir, 'logs')
        ErrorLogger(log_dir)
        ErrorLogger(log_dir)
        self.assertEqual(len(logging.getLogger('errors').handlers), 1)
        self.assertEqual(len(logging.getLogger('experiments').handlers), 1)

    def test_log_files(self):
        log_dir = os.path.join(self.tmp_dir, 'logs')
        logger = ErrorLogger(log_dir)
        logger.log_experiment('qn', {'n': 2})
        logger.log_error(RuntimeError('bad'))
        for handler in logging.getLogger('experiments').handlers + logging.getLogger('errors').handlers:
            handler.flush()
        with open(os.path.join(log_dir, 'experiments.log')) as f:
            self.assertIn('"operation": "qn"', f.read())
        with open(os.path.join(log_dir, 'errors.log')) as f:
            self.assertIn('RuntimeError', f.read())


class TestDecorators(unittest.TestCase):
    def setUp(self):
        self.logger = MagicMock(spec=ErrorLogger)
        patcher = patch.object(error_handler, 'get_error_logger', return_value=self.logger)
        patcher.start()
        self.addCleanup(patcher.stop)

    def test_handle_errors_logs_and_reraises(self):
        @handle_errors('count')
        def failing():
            raise ConfigError('n must be positive')

        with self.assertRaises(ConfigError):
            failing()
        error, context = self.logger.log_error.call_args[0]
        self.assertIsInstance(error, ConfigError)
        self.assertEqual(context['operation'], 'count')

    def test_log_experiment_success_and_failure(self):
        @log_experiment('qn')
        def ok():
            return 42

        @log_experiment('qn')
        def broken():
            raise BudgetExceededError('too many')

        self.assertEqual(ok(), 42)
        kwargs = self.logger.log_experiment.call_args[1]
        self.assertTrue(kwargs['success'])
        self.assertIsNone(kwargs['passed'])
        self.assertGreaterEqual(kwargs['elapsed'], 0.0)
        with self.assertRaises(BudgetExceededError):
            broken()
        kwargs = self.logger.log_experiment.call_args[1]
        self.assertFalse(kwargs['success'])
        self.assertEqual(kwargs['error'], 'too many')

    def test_config_echo_and_verdict(self):
        config = ExperimentConfig(n=2, m=3)

        @log_experiment('qn')
        @handle_errors('qn')
        def run(cfg):
            if cfg.m > 2:
                raise BudgetExceededError('too many')
            return Outcome({}, passed=False)

        with self.assertRaises(BudgetExceededError):
            run(config)
        error, context = self.logger.log_error.call_args[0]
        self.assertEqual(context['config']['m'], 3)
        self.assertEqual(self.logger.log_experiment.call_args[0][1]['config']['n'], 2)

        config.m = 2
        run(config)
        self.assertFalse(self.logger.log_experiment.call_args[1]['passed'])


if __name__ == '__main__':
    unittest.main()
