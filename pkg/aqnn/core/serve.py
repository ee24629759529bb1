#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Line-delimited streaming inference with smoke alerts.

Every input line (six comma-separated readings, or a JSON object whose
"readings" key holds six numbers) yields exactly one JSON output line,
a prediction or {"error": "parse", "line": N}, possibly followed by an
alert line.
"""

import contextlib
import io
import json
import logging
import signal
import socketserver
import threading
import time

import numpy as np
import prettytable

from aqnn.core import data
from aqnn.core import nn
from aqnn.utils import exceptions

THRESHOLD = 0.8
CONSECUTIVE = 3
HOST = '127.0.0.1'
PORT = 5555

LOGGER = logging.getLogger(__name__)


def dumps(record):
    return json.dumps(record, separators=(',', ':'))


class PredictionRecord():
    # pylint: disable=too-few-public-methods,too-many-arguments
    """One classified sample."""

    def __init__(self, ts, readings, probs, latency_us):
        self.ts = ts
        self.readings = [float(value) for value in readings]
        self.probs = [float(value) for value in probs]
        self.class_index = int(np.argmax(probs))
        self.class_name = data.ACTIVITY_CLASSES[self.class_index]
        self.latency_us = latency_us

    def as_dict(self):
        return {'ts': self.ts, 'readings': self.readings,
                'class_index': self.class_index,
                'class_name': self.class_name, 'probs': self.probs,
                'latency_us': self.latency_us}


class AlertRule():
    # pylint: disable=too-few-public-methods
    """Fire after `consecutive` trigger-class predictions >= threshold."""

    def __init__(self, trigger=data.SMOKE, threshold=THRESHOLD,
                 consecutive=CONSECUTIVE):
        if trigger not in range(len(data.ACTIVITY_CLASSES)):
            raise exceptions.InvalidArgumentError(
                f"trigger class {trigger!r} not in 0..3")
        if not 0 < threshold <= 1:
            raise exceptions.InvalidArgumentError(
                f"threshold must be in (0, 1], got {threshold}")
        if not isinstance(consecutive, int) or consecutive < 1:
            raise exceptions.InvalidArgumentError(
                f"consecutive must be >= 1, got {consecutive!r}")
        self.trigger = trigger
        self.threshold = threshold
        self.consecutive = consecutive


class AlertAutomaton():
    """Counts hits and fires at most once per run.

    A hit is a trigger-class prediction with probability >= threshold.
    Any other prediction resets the counter; only a prediction of
    another class re-arms the automaton.
    """

    def __init__(self, rule):
        self.rule = rule
        self.run = 0
        self.armed = True

    def update(self, class_index, prob):
        """Return the consecutive-hit count when the alert fires, else 0"""
        if class_index == self.rule.trigger and prob >= self.rule.threshold:
            self.run += 1
            if self.armed and self.run >= self.rule.consecutive:
                self.armed = False
                return self.run
            return 0
        self.run = 0
        if class_index != self.rule.trigger:
            self.armed = True
        return 0


class ServeSession():
    """Per-stream state: line counter, alert automaton and metrics.

    The network is only read, through network_predict, so sessions of
    concurrent connections share it.
    """

    __logger = logging.getLogger(__name__)

    def __init__(self, net, norm, rule=None, clock=time.time):
        self.net = net
        self.norm = norm
        self.automaton = AlertAutomaton(rule or AlertRule())
        self.clock = clock
        self.lines = 0
        self.errors = 0
        self.alerts = 0
        self.class_counts = [0] * len(data.ACTIVITY_CLASSES)
        self.latencies_us = []

    @staticmethod
    def parse(line):
        """Return the six readings of a CSV or JSON line.

        Raises:
            ValueError, TypeError, KeyError or OverflowError on a malformed
            line
        """
        line = line.strip()
        if line.startswith('{'):
            values = json.loads(line)['readings']
            if not isinstance(values, list) or any(
                    isinstance(value, bool) or
                    not isinstance(value, (int, float)) for value in values):
                raise TypeError("readings must be an array of numbers")
        else:
            values = [float(field) for field in line.split(',')]
        return data.SensorSample(values).readings

    def predict(self, readings):
        features = self.norm.apply(readings)
        start = time.perf_counter_ns()
        probs = nn.network_predict(self.net, features)
        elapsed = max(time.perf_counter_ns() - start, 1)
        return PredictionRecord(
            int(self.clock() * 1000), readings, probs, elapsed / 1000.0)

    def process_line(self, line):
        """Return the output records (dicts) of one input line"""
        self.lines += 1
        try:
            record = self.predict(self.parse(line))
        except (ValueError, TypeError, KeyError, OverflowError) as exc:
            self.errors += 1
            self.__logger.debug("line %d rejected: %s", self.lines, exc)
            return [{'error': 'parse', 'line': self.lines}]
        self.class_counts[record.class_index] += 1
        self.latencies_us.append(record.latency_us)
        outputs = [record.as_dict()]
        prob = record.probs[self.automaton.rule.trigger]
        consecutive = self.automaton.update(record.class_index, prob)
        if consecutive:
            self.alerts += 1
            outputs.append({'ts': record.ts, 'alert': 'smoke',
                            'consecutive': consecutive, 'prob': prob})
            self.__logger.warning(
                "Smoke alert after %d consecutive predictions (p=%.3f)",
                consecutive, prob)
        return outputs


class StreamMetrics():
    # pylint: disable=too-few-public-methods
    """Summary of a serve session."""

    def __init__(self, session):
        self.lines = session.lines
        self.errors = session.errors
        self.alerts = session.alerts
        self.class_counts = dict(zip(
            data.ACTIVITY_CLASSES, session.class_counts))
        latencies = np.asarray(session.latencies_us, dtype=np.float64)
        self.mean_latency_us = float(latencies.mean()) if latencies.size \
            else 0.0
        self.p99_latency_us = float(np.percentile(latencies, 99)) if \
            latencies.size else 0.0

    def __str__(self):
        msg = prettytable.PrettyTable(
            header_style='upper', padding_width=5,
            field_names=['metric', 'value'])
        for name, count in self.class_counts.items():
            msg.add_row([name, count])
        msg.add_row(['parse errors', self.errors])
        msg.add_row(['alerts', self.alerts])
        msg.add_row(['mean latency (us)', f"{self.mean_latency_us:.1f}"])
        msg.add_row(['p99 latency (us)', f"{self.p99_latency_us:.1f}"])
        return msg.get_string()


def stream_metrics(session):
    """Log the session summary (to standard error via the console
    handler) and return it"""
    metrics = StreamMetrics(session)
    LOGGER.info("Served %d lines:\n%s", metrics.lines, metrics)
    return metrics


def decoded_lines(stream):
    """Switch a text stream to UTF-8 with undecodable bytes replaced by
    U+FFFD, so a bad line turns into a parse error record"""
    reconfigure = getattr(stream, 'reconfigure', None)
    if reconfigure is not None:
        try:
            reconfigure(encoding='utf-8', errors='replace')
        except io.UnsupportedOperation:
            # encoding is frozen once reading started
            reconfigure(errors='replace')
    return stream


def serve_stream(session, instream, outstream):
    """Process instream line by line until end of stream"""
    for line in instream:
        for record in session.process_line(line):
            outstream.write(dumps(record) + '\n')
        outstream.flush()
    return session


@contextlib.contextmanager
def terminate_on_sigterm(stop):
    """Call stop() on SIGTERM for the duration of the block"""
    previous = signal.signal(signal.SIGTERM, lambda signum, frame: stop())
    try:
        yield
    finally:
        signal.signal(signal.SIGTERM, previous)


def _interrupt():
    raise KeyboardInterrupt


def serve_stdio(net, norm, rule, instream, outstream):
    """Sequential stdin/stdout service; SIGTERM ends it gracefully"""
    session = ServeSession(net, norm, rule)
    try:
        with terminate_on_sigterm(_interrupt):
            serve_stream(session, instream, outstream)
    except KeyboardInterrupt:
        LOGGER.info("Service interrupted")
    finally:
        stream_metrics(session)
    return session


class ServeRequestHandler(socketserver.StreamRequestHandler):
    """One ServeSession per connection."""

    def handle(self):
        session = self.server.new_session()
        for raw in self.rfile:
            for record in session.process_line(
                    raw.decode('utf-8', errors='replace')):
                self.wfile.write((dumps(record) + '\n').encode('utf-8'))
            self.wfile.flush()
        LOGGER.info("Connection from %s:%s closed", *self.client_address[:2])
        stream_metrics(session)


class ServeServer(socketserver.ThreadingTCPServer):
    """Threaded TCP service sharing one read-only network."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, net, norm, rule=None):
        self.net = net
        self.norm = norm
        self.rule = rule or AlertRule()
        super().__init__(address, ServeRequestHandler)

    def new_session(self):
        return ServeSession(self.net, self.norm, self.rule)


def serve_tcp(net, norm, rule, host=HOST, port=PORT):
    """Serve until SIGTERM or Ctrl-C.

    Raises:
        OSError if the address cannot be bound
    """
    net.clear_cache()
    server = ServeServer((host, port), net, norm, rule)
    LOGGER.info("Serving on %s:%d", *server.server_address[:2])

    def stop():
        threading.Thread(target=server.shutdown).start()

    try:
        with terminate_on_sigterm(stop):
            server.serve_forever()
    except KeyboardInterrupt:
        LOGGER.info("Service interrupted")
    finally:
        server.server_close()
    LOGGER.info("Service stopped")
