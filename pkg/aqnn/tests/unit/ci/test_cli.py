#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

# pylint: disable=missing-docstring

import io
import json
import logging
import os
import tempfile
import unittest

import mock

from aqnn.ci import cli
from aqnn.ci import run_checks
from aqnn.utils import constants
from aqnn.utils import env


class CliTestingBase(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.tmpdir = tempfile.TemporaryDirectory()
        cls.data = os.path.join(cls.tmpdir.name, 'air.csv')
        cls.model = os.path.join(cls.tmpdir.name, 'model.aqnn')
        with mock.patch('sys.stdout', new_callable=io.StringIO):
            assert cli.cli_dispatch([
                'synth', '--n-per-class', '20', '--seed', '3',
                '--out', cls.data]) == 0
            assert cli.cli_dispatch([
                'train', '--data', cls.data, '--epochs', '2',
                '--out', cls.model]) == 0

    @classmethod
    def tearDownClass(cls):
        cls.tmpdir.cleanup()

    def setUp(self):
        self.environ = mock.patch.dict(os.environ)
        self.environ.start()
        for var in env.INPUTS:
            os.environ.pop(var, None)
        self.stdout = mock.patch('sys.stdout', new_callable=io.StringIO)
        self.stderr = mock.patch('sys.stderr', new_callable=io.StringIO)
        self.out = self.stdout.start()
        self.stderr.start()

    def tearDown(self):
        self.stderr.stop()
        self.stdout.stop()
        self.environ.stop()

    def _path(self, name):
        return os.path.join(self.tmpdir.name, name)


class UsageTesting(CliTestingBase):

    def test_no_command(self):
        self.assertEqual(cli.cli_dispatch([]), cli.EX_USAGE)

    def test_unknown_command(self):
        self.assertEqual(cli.cli_dispatch(['fit']), cli.EX_USAGE)

    def test_help(self):
        self.assertEqual(cli.cli_dispatch(['--help']), cli.EX_OK)

    def test_invalid_flags(self):
        for argv in (['train', '--epochs', '0'],
                     ['train', '--lr', '-1'],
                     ['train', '--batch', 'many'],
                     ['synth'],
                     ['baseline', 'svm'],
                     ['serve', '--consecutive', '0']):
            self.assertEqual(cli.cli_dispatch(argv), cli.EX_USAGE)

    def test_missing_data(self):
        self.assertEqual(cli.cli_dispatch(['train', '--epochs', '1']),
                         cli.EX_USAGE)

    def test_bad_env_seed(self):
        os.environ['AQNN_SEED'] = 'forty-two'
        self.assertEqual(cli.cli_dispatch(
            ['train', '--data', self.data, '--epochs', '1']), cli.EX_USAGE)

    def test_bad_threshold(self):
        self.assertEqual(cli.cli_dispatch(
            ['serve', '--model', self.model, '--threshold', '1.5']),
            cli.EX_USAGE)

    def test_sensors(self):
        self.assertEqual(cli.cli_dispatch(['sensors']), cli.EX_OK)
        self.assertIn('MG-811', self.out.getvalue())


class DataErrorTesting(CliTestingBase):

    def test_missing_file(self):
        self.assertEqual(cli.cli_dispatch(
            ['train', '--data', self._path('missing.csv')]), cli.EX_DATA)

    def test_malformed_file(self):
        path = self._path('bad.csv')
        with open(path, 'w', encoding='utf-8') as cfile:
            cfile.write("1,2,3\n")
        self.assertEqual(cli.cli_dispatch(
            ['train', '--data', path, '--epochs', '1']), cli.EX_DATA)

    def test_corrupted_model(self):
        path = self._path('corrupted.aqnn')
        with open(self.model, 'rb') as mfile:
            blob = bytearray(mfile.read())
        blob[100] ^= 0x01
        with open(path, 'wb') as mfile:
            mfile.write(bytes(blob))
        self.assertEqual(cli.cli_dispatch(
            ['eval', '--model', path, '--data', self.data]), cli.EX_DATA)

    def test_not_a_model(self):
        self.assertEqual(cli.cli_dispatch(
            ['eval', '--model', self.data, '--data', self.data]),
            cli.EX_DATA)

    def test_predict_labeled(self):
        self.assertEqual(cli.cli_dispatch(
            ['predict', '--model', self.model, '--data', self.data]),
            cli.EX_DATA)
        self.assertEqual(self.out.getvalue(), '')

    @mock.patch('aqnn.ci.cli.LOGGER.exception')
    def test_debug_traceback(self, *args):
        os.environ['AQNN_DEBUG'] = 'true'
        self.assertEqual(cli.cli_dispatch(['eval']), cli.EX_USAGE)
        self.assertEqual(cli.cli_dispatch(
            ['eval', '--model', self._path('missing.aqnn'),
             '--data', self.data]), cli.EX_DATA)
        args[0].assert_called_once_with("%s failed", 'eval')


class CommandTesting(CliTestingBase):

    def test_train_outputs(self):
        self.assertTrue(os.path.isfile(self.model))
        with open(self.model + '.history.csv', encoding='utf-8') as hfile:
            self.assertEqual(len(hfile.read().splitlines()), 3)

    def test_train_splits(self):
        out = self._path('splits.aqnn')
        self.assertEqual(cli.cli_dispatch([
            'train', '--data', self.data, '--epochs', '1', '--out', out,
            '--history', self._path('h.csv'),
            '--splits-dir', self._path('splits')]), cli.EX_OK)
        for name in cli.SPLITS:
            self.assertTrue(os.path.isfile(
                os.path.join(self._path('splits'), f"{name}.csv")))
        self.assertIn('VALIDATION', self.out.getvalue().upper())

    def test_model_from_env(self):
        os.environ['AQNN_MODEL'] = self.model
        os.environ['AQNN_DATA'] = self.data
        self.assertEqual(cli.cli_dispatch(['eval']), cli.EX_OK)

    def test_eval(self):
        report = self._path('report.json')
        matrix = self._path('cm.csv')
        self.assertEqual(cli.cli_dispatch([
            'eval', '--model', self.model, '--data', self.data,
            '--json', report, '--cm-csv', matrix]), cli.EX_OK)
        with open(report, encoding='utf-8') as jfile:
            document = json.load(jfile)
        self.assertEqual(document['total'], 80)
        self.assertEqual(len(document['confusion_matrix']), 4)
        with open(matrix, encoding='utf-8') as cfile:
            self.assertEqual(len(cfile.read().splitlines()), 5)

    def test_predict(self):
        self.assertEqual(cli.cli_dispatch([
            'predict', '--model', self.model, '--data', self.data,
            '--ignore-labels']), cli.EX_OK)
        lines = self.out.getvalue().splitlines()
        self.assertEqual(len(lines), 80)
        self.assertIn('class_name', json.loads(lines[0]))

    def test_bench(self):
        self.assertEqual(cli.cli_dispatch([
            'bench', '--model', self.model, '--iterations', '100',
            '--warmup', '0']), cli.EX_OK)
        self.assertIn('P99', self.out.getvalue())

    def test_bench_too_few(self):
        self.assertEqual(cli.cli_dispatch([
            'bench', '--model', self.model, '--iterations', '10']),
            cli.EX_DATA)

    def test_baseline_knn(self):
        self.assertEqual(cli.cli_dispatch([
            'baseline', 'knn', '--data', self.data, '--k', '3']), cli.EX_OK)
        self.assertIn('TEST', self.out.getvalue().upper())

    def test_baseline_knn_even(self):
        self.assertEqual(cli.cli_dispatch([
            'baseline', 'knn', '--data', self.data, '--k', '4']),
            cli.EX_DATA)

    def test_baseline_mlp(self):
        out = self._path('mlp.aqnn')
        self.assertEqual(cli.cli_dispatch([
            'baseline', 'mlp', '--data', self.data, '--epochs', '1',
            '--out', out]), cli.EX_OK)
        self.assertTrue(os.path.isfile(out))
        self.assertIn('parameters: 9412', self.out.getvalue())

    @mock.patch('aqnn.core.serve.serve_stdio')
    def test_serve_stdio(self, *args):
        os.environ['AQNN_ALERT_CONSECUTIVE'] = '5'
        self.assertEqual(cli.cli_dispatch(
            ['serve', '--model', self.model]), cli.EX_OK)
        rule = args[0].call_args[0][2]
        self.assertEqual((rule.trigger, rule.threshold, rule.consecutive),
                         (2, 0.8, 5))

    @mock.patch('aqnn.core.serve.serve_tcp')
    def test_serve_tcp(self, *args):
        os.environ['AQNN_HOST'] = '0.0.0.0'
        self.assertEqual(cli.cli_dispatch(
            ['serve', '--model', self.model, '--port', '6000']), cli.EX_OK)
        self.assertEqual(args[0].call_args[0][3:], ('0.0.0.0', 6000))

    @mock.patch('aqnn.core.serve.serve_tcp')
    def test_serve_env_port(self, *args):
        os.environ['AQNN_PORT'] = '6001'
        self.assertEqual(cli.cli_dispatch(
            ['serve', '--model', self.model]), cli.EX_OK)
        self.assertEqual(args[0].call_args[0][3:], ('127.0.0.1', 6001))

    def test_serve_undecodable_stdin(self):
        stdin = io.TextIOWrapper(
            io.BytesIO(b'\xff\xfe\n180,140,230,95,110,410\n'),
            encoding='utf-8')
        with mock.patch('sys.stdin', stdin):
            self.assertEqual(cli.cli_dispatch(
                ['serve', '--model', self.model]), cli.EX_OK)
        lines = [json.loads(line)
                 for line in self.out.getvalue().splitlines()]
        self.assertEqual(lines[0], {'error': 'parse', 'line': 1})
        self.assertIn('class_index', lines[1])

    def test_synth_seeded(self):
        first = self._path('a.csv')
        second = self._path('b.csv')
        for path in (first, second):
            os.environ['AQNN_SEED'] = '5'
            self.assertEqual(cli.cli_dispatch(
                ['synth', '--n-per-class', '3', '--out', path]), cli.EX_OK)
        with open(first, encoding='utf-8') as afile, \
                open(second, encoding='utf-8') as bfile:
            self.assertEqual(afile.read(), bfile.read())


class VerifyTesting(CliTestingBase):

    def test_unknown(self):
        self.assertEqual(cli.cli_dispatch(['verify', '-t', 'nothing']),
                         cli.EX_USAGE)

    @mock.patch('aqnn.ci.run_checks.Runner.main',
                return_value=run_checks.Result.EX_OK)
    def test_ok(self, *args):
        self.assertEqual(cli.cli_dispatch(['verify', '-t', 'engine']),
                         cli.EX_OK)
        args[0].assert_called_once_with(test='engine')

    @mock.patch('aqnn.ci.run_checks.Runner.main',
                return_value=run_checks.Result.EX_ERROR)
    def test_failed(self, *args):
        self.assertEqual(cli.cli_dispatch(['verify']), cli.EX_DATA)
        args[0].assert_called_once_with(test='all')


class LoggingTesting(unittest.TestCase):

    @mock.patch('logging.captureWarnings')
    @mock.patch('logging.config.fileConfig')
    @mock.patch('os.makedirs')
    def test_setup_logging(self, *args):
        with mock.patch.dict(os.environ, {'AQNN_RESULTS_DIR': '/tmp/aqnn',
                                          'AQNN_DEBUG': 'false'}), \
                mock.patch('os.path.isfile', return_value=False):
            cli.setup_logging()
        args[0].assert_called_once_with('/tmp/aqnn', exist_ok=True)
        args[1].assert_called_once_with(
            constants.INI_PATH_DEFAULT, defaults={
                'logfilename': '/tmp/aqnn/aqnn.log',
                'debuglogfilename': '/tmp/aqnn/aqnn.debug.log'},
            disable_existing_loggers=False)
        args[2].assert_called_once_with(True)

    @mock.patch('logging.captureWarnings')
    @mock.patch('logging.config.fileConfig')
    @mock.patch('os.makedirs')
    def test_setup_debug_logging(self, *args):
        with mock.patch.dict(os.environ, {'AQNN_RESULTS_DIR': '/tmp/aqnn',
                                          'AQNN_DEBUG': 'True'}), \
                mock.patch('os.path.isfile', return_value=False):
            cli.setup_logging()
        self.assertEqual(args[1].call_args[0][0],
                         constants.DEBUG_INI_PATH_DEFAULT)

    @mock.patch('aqnn.ci.cli.cli_dispatch', return_value=0)
    @mock.patch('aqnn.ci.cli.setup_logging')
    def test_main(self, *args):
        with mock.patch('sys.argv', ['aqnn', 'sensors']):
            self.assertEqual(cli.main(), 0)
        args[0].assert_called_once_with()
        args[1].assert_called_once_with(['sensors'])

    @mock.patch('aqnn.ci.cli.cli_dispatch')
    @mock.patch('aqnn.ci.cli.setup_logging', side_effect=PermissionError)
    def test_main_no_results_dir(self, *args):
        with mock.patch('sys.stderr', new_callable=io.StringIO):
            self.assertEqual(cli.main(), cli.EX_DATA)
        args[1].assert_not_called()


if __name__ == "__main__":
    logging.disable(logging.CRITICAL)
    unittest.main(verbosity=2)
