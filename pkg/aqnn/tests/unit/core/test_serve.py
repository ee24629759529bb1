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
import socket
import threading
import unittest

import mock
import numpy as np

from aqnn.core import data
from aqnn.core import nn
from aqnn.core import serve
from aqnn.utils import exceptions

SMOKY = np.array([0.05, 0.05, 0.85, 0.05], dtype=np.float32)
NORMAL = np.array([0.7, 0.1, 0.1, 0.1], dtype=np.float32)
WEAK = np.array([0.3, 0.0, 0.5, 0.2], dtype=np.float32)


class AlertTesting(unittest.TestCase):

    def setUp(self):
        self.automaton = serve.AlertAutomaton(serve.AlertRule())

    def _feed(self, trace):
        return [self.automaton.update(index, prob) for index, prob in trace]

    def test_fires_once(self):
        self.assertEqual(self._feed([(2, 0.9)] * 5), [0, 0, 3, 0, 0])

    def test_reset(self):
        self.assertEqual(
            self._feed([(2, 0.9), (2, 0.9), (0, 0.9), (2, 0.9), (2, 0.9),
                        (2, 0.9)]),
            [0, 0, 0, 0, 0, 3])

    def test_low_probability_breaks_run(self):
        self.assertEqual(
            self._feed([(2, 0.9), (2, 0.9), (2, 0.5), (2, 0.9), (2, 0.9)]),
            [0, 0, 0, 0, 0])

    def test_rearm(self):
        trace = [(2, 0.9)] * 3 + [(2, 0.5)] + [(2, 0.9)] * 3 + [(1, 0.6)] + \
            [(2, 0.8)] * 3
        self.assertEqual(self._feed(trace),
                         [0, 0, 3, 0, 0, 0, 0, 0, 0, 0, 3])

    def test_threshold_inclusive(self):
        automaton = serve.AlertAutomaton(serve.AlertRule(
            threshold=0.5, consecutive=1))
        self.assertEqual(automaton.update(2, 0.5), 1)

    def test_invalid_rule(self):
        for kwargs in ({'trigger': 4}, {'threshold': 0}, {'threshold': 1.5},
                       {'consecutive': 0}):
            with self.assertRaises(exceptions.InvalidArgumentError):
                serve.AlertRule(**kwargs)


class ParseTesting(unittest.TestCase):

    def test_csv(self):
        self.assertEqual(serve.ServeSession.parse(
            " 1,2,3,4,5,6.5\n").tolist(), [1, 2, 3, 4, 5, 6.5])

    def test_json(self):
        self.assertEqual(serve.ServeSession.parse(
            '{"readings": [1, 2, 3, 4, 5, 6]}').tolist(), [1, 2, 3, 4, 5, 6])

    def test_malformed(self):
        for line in ('a,b,c', '1,2,3', '1,2,3,4,5,6,7', '', '{}',
                     '{"readings": [1, 2, 3]}', '{"readings": "123456"}',
                     '{"readings": [1, 2, 3, 4, 5, true]}',
                     '{"readings": [1, 2, 3, 4, 5, null]}',
                     '1,2,3,4,5,nan', '{"readings": [1, 2, 3, 4, 5, 6]'):
            with self.assertRaises((ValueError, TypeError, KeyError)):
                serve.ServeSession.parse(line)

    def test_integer_overflow(self):
        with self.assertRaises(OverflowError):
            serve.ServeSession.parse(
                '{"readings": [1' + '0' * 400 + ', 0, 0, 0, 0, 0]}')


class SessionTesting(unittest.TestCase):

    def setUp(self):
        self.session = serve.ServeSession(
            nn.build_network(nn.REFERENCE_CNN),
            data.NormStats(np.zeros(6), np.ones(6)), clock=lambda: 12.5)

    @mock.patch('aqnn.core.serve.nn.network_predict', return_value=SMOKY)
    def test_alert(self, *args):
        outputs = []
        for _ in range(4):
            outputs += self.session.process_line('1,2,3,4,5,6')
        self.assertEqual(len(outputs), 5)
        self.assertEqual(outputs[3]['alert'], 'smoke')
        self.assertEqual(outputs[3]['consecutive'], 3)
        self.assertEqual(outputs[3]['ts'], 12500)
        self.assertAlmostEqual(outputs[3]['prob'], 0.85, places=6)
        self.assertEqual(self.session.alerts, 1)
        self.assertEqual(self.session.class_counts, [0, 0, 4, 0])
        self.assertEqual(args[0].call_count, 4)

    @mock.patch('aqnn.core.serve.nn.network_predict',
                side_effect=[SMOKY, SMOKY, WEAK, SMOKY, NORMAL])
    def test_no_alert(self, *args):
        for _ in range(5):
            self.assertEqual(len(self.session.process_line('1,2,3,4,5,6')), 1)
        self.assertEqual(self.session.alerts, 0)
        self.assertEqual(args[0].call_count, 5)

    def test_prediction(self):
        record, = self.session.process_line('{"readings": [1,2,3,4,5,6]}')
        self.assertEqual(record['class_index'], 0)
        self.assertEqual(record['class_name'], data.ACTIVITY_CLASSES[0])
        self.assertEqual(record['probs'], [0.25] * 4)
        self.assertEqual(record['readings'], [1, 2, 3, 4, 5, 6])
        self.assertGreater(record['latency_us'], 0)
        json.loads(serve.dumps(record))

    def test_parse_error(self):
        self.assertEqual(self.session.process_line('1,2,3,4,5,6'),
                         [mock.ANY])
        self.assertEqual(self.session.process_line('a,b,c'),
                         [{'error': 'parse', 'line': 2}])
        self.assertEqual(self.session.errors, 1)
        self.assertEqual(self.session.lines, 2)

    def test_errors_do_not_break_run(self):
        with mock.patch('aqnn.core.serve.nn.network_predict',
                        return_value=SMOKY):
            outputs = []
            for line in ('1,2,3,4,5,6', 'x', '1,2,3,4,5,6', '',
                         '1,2,3,4,5,6'):
                outputs += self.session.process_line(line)
        self.assertEqual(outputs[-1]['alert'], 'smoke')

    def test_metrics(self):
        metrics = serve.stream_metrics(self.session)
        self.assertEqual((metrics.lines, metrics.mean_latency_us,
                          metrics.p99_latency_us), (0, 0.0, 0.0))
        self.session.process_line('1,2,3,4,5,6')
        self.session.process_line('?')
        metrics = serve.StreamMetrics(self.session)
        self.assertEqual((metrics.lines, metrics.errors), (2, 1))
        self.assertEqual(metrics.class_counts[data.ACTIVITY_CLASSES[0]], 1)
        self.assertIn('parse errors', str(metrics))


class StreamTesting(unittest.TestCase):

    def setUp(self):
        self.net = nn.init_network(nn.REFERENCE_CNN, 1)
        self.norm = data.NormStats(np.full(6, 100.0), np.full(6, 10.0))

    def test_stream(self):
        instream = io.StringIO('1,2,3,4,5,6\nbad\n{"readings":[1,2,3,4,5,6]}\n')
        outstream = io.StringIO()
        session = serve.serve_stream(
            serve.ServeSession(self.net, self.norm), instream, outstream)
        lines = [json.loads(line)
                 for line in outstream.getvalue().splitlines()]
        self.assertEqual(len(lines), 3)
        self.assertEqual(lines[1], {'error': 'parse', 'line': 2})
        self.assertEqual(lines[0]['probs'], lines[2]['probs'])
        self.assertEqual(session.lines, 3)

    def test_extreme_readings(self):
        instream = io.StringIO(
            '1e300,0,0,0,0,0\n'
            '{"readings": [1' + '0' * 400 + ', 0, 0, 0, 0, 0]}\n'
            '180,140,230,95,110,410\n')
        outstream = io.StringIO()
        session = serve.serve_stream(
            serve.ServeSession(self.net, self.norm), instream, outstream)
        lines = [json.loads(line)
                 for line in outstream.getvalue().splitlines()]
        self.assertEqual(lines[:2], [{'error': 'parse', 'line': 1},
                                     {'error': 'parse', 'line': 2}])
        self.assertIn('class_index', lines[2])
        self.assertEqual((session.lines, session.errors), (3, 2))

    def test_decoded_lines(self):
        stream = io.TextIOWrapper(
            io.BytesIO(b'\xff\xfe\n1,2,3,4,5,6\n'), encoding='utf-8')
        self.assertIs(serve.decoded_lines(stream), stream)
        outstream = io.StringIO()
        serve.serve_stream(serve.ServeSession(self.net, self.norm), stream,
                           outstream)
        lines = [json.loads(line)
                 for line in outstream.getvalue().splitlines()]
        self.assertEqual(lines[0], {'error': 'parse', 'line': 1})
        self.assertEqual(len(lines), 2)

    def test_decoded_lines_after_read(self):
        stream = mock.Mock()
        stream.reconfigure.side_effect = [io.UnsupportedOperation, None]
        self.assertIs(serve.decoded_lines(stream), stream)
        stream.reconfigure.assert_has_calls([
            mock.call(encoding='utf-8', errors='replace'),
            mock.call(errors='replace')])

    def test_decoded_lines_text(self):
        stream = io.StringIO('1,2,3,4,5,6\n')
        self.assertIs(serve.decoded_lines(stream), stream)

    def test_stdio(self):
        outstream = io.StringIO()
        with mock.patch('aqnn.core.serve.stream_metrics') as metrics:
            session = serve.serve_stdio(
                self.net, self.norm, serve.AlertRule(),
                io.StringIO('1,2,3,4,5,6\n'), outstream)
        metrics.assert_called_once_with(session)
        self.assertEqual(len(outstream.getvalue().splitlines()), 1)

    def test_stdio_interrupted(self):
        instream = mock.MagicMock()
        instream.__iter__.side_effect = KeyboardInterrupt
        with mock.patch('aqnn.core.serve.stream_metrics') as metrics:
            serve.serve_stdio(self.net, self.norm, None, instream,
                              io.StringIO())
        metrics.assert_called_once()

    def test_tcp(self):
        server = serve.ServeServer(('127.0.0.1', 0), self.net, self.norm)
        thread = threading.Thread(target=server.serve_forever)
        thread.start()
        try:
            with socket.create_connection(server.server_address[:2]) as sock:
                sock.sendall(b'1,2,3,4,5,6\na,b,c\n')
                sock.shutdown(socket.SHUT_WR)
                received = b''
                while True:
                    chunk = sock.recv(4096)
                    if not chunk:
                        break
                    received += chunk
        finally:
            server.shutdown()
            server.server_close()
            thread.join()
        lines = [json.loads(line) for line in received.decode().splitlines()]
        self.assertEqual(len(lines), 2)
        self.assertIn('class_index', lines[0])
        self.assertEqual(lines[1], {'error': 'parse', 'line': 2})


if __name__ == "__main__":
    logging.disable(logging.CRITICAL)
    unittest.main(verbosity=2)
