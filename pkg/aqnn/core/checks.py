#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Acceptance checks run by `aqnn verify`.

Each check is a Feature loaded through the aqnn.check entry points and
configured by the run/args block of checks.yaml.
"""

import io
import json
import logging
import os
import time

import numpy as np

from aqnn.core import baselines
from aqnn.core import data
from aqnn.core import evaluation
from aqnn.core import feature
from aqnn.core import model_io
from aqnn.core import nn
from aqnn.core import oracles
from aqnn.core import serve
from aqnn.core import training
from aqnn.utils import env

KNN_REFERENCE_ACCURACY = 0.9632
TABLE_PRECISIONS = (0.95, 0.99, 1.00, 0.97)
TABLE_SUPPORTS = (122, 108, 41, 98)
TABLE_AVERAGES = (0.9775, 0.9726)
MALFORMED_LINES = ('a,b,c', '1,2,3', '{"readings": [1, 2]}', '{}',
                   '1,2,3,4,5,nan', 'not a sample', '',
                   '1e300,0,0,0,0,0',
                   '{"readings": [1' + '0' * 400 + ', 0, 0, 0, 0, 0]}')


def synthetic_splits(n_per_class=300, seed=7, split_seed=42):
    """Return (train, val, test, norm) of a synthetic dataset"""
    dataset = data.synth_generate(n_per_class, seed)
    train, val, test = data.shuffle_split(
        dataset, data.SplitSpec(seed=split_seed))
    return train, val, test, data.fit_normalizer(train)


def fit(net, train, val, norm, **kwargs):
    """Train net on raw splits; return (best checkpoint, history)"""
    return training.train(
        net, data.normalize(train, norm), data.normalize(val, norm),
        training.TrainConfig(**kwargs))


def on_time(start, details, max_seconds=None):
    """Record the seconds elapsed since start in details; False when
    they reach max_seconds"""
    details['duration'] = time.perf_counter() - start
    return max_seconds is None or details['duration'] < max_seconds


class GradientCheck(feature.Feature):
    """Analytic gradients against central finite differences."""

    __logger = logging.getLogger(__name__)

    def execute(self, **kwargs):
        start = time.perf_counter()
        pairs = kwargs.get('pairs', 10)
        tolerance = kwargs.get('tolerance', 1e-3)
        rng = np.random.default_rng(kwargs.get('seed', 0))
        errors = []
        for index in range(pairs):
            net = nn.init_network(nn.REFERENCE_CNN, seed=index)
            sample = rng.normal(size=net.input_shape).astype(nn.DTYPE)
            target = int(rng.integers(nn.N_CLASSES))
            errors.append(nn.grad_check(net, sample, target))
        self.details = {'pairs': pairs, 'tolerance': tolerance,
                        'max_relative_error': max(errors)}
        self.__logger.info("Worst relative gradient error: %.3g",
                           max(errors))
        within = on_time(start, self.details, kwargs.get('max_seconds'))
        return 0 if max(errors) < tolerance and within else 1


class ConvOracleCheck(feature.Feature):
    """conv1d_forward against a naive triple loop, bit for bit."""

    __logger = logging.getLogger(__name__)

    def execute(self, **kwargs):
        instances = kwargs.get('instances', 100)
        rng = np.random.default_rng(kwargs.get('seed', 0))
        mismatches = 0
        for _ in range(instances):
            layer = nn.Conv1D(int(rng.integers(1, 5)),
                              int(rng.integers(1, 9)),
                              int(rng.choice([1, 3, 5])))
            layer.weights[...] = rng.normal(size=layer.weights.shape)
            layer.bias[...] = rng.normal(size=layer.bias.shape)
            inputs = rng.normal(size=(
                int(rng.integers(1, 13)), layer.in_channels)).astype(
                    nn.DTYPE)
            if not np.array_equal(
                    nn.conv1d_forward(inputs, layer),
                    oracles.naive_conv1d(inputs, layer.weights, layer.bias)):
                mismatches += 1
        self.details = {'instances': instances, 'mismatches': mismatches}
        self.__logger.info("%d/%d convolutions differ from the oracle",
                           mismatches, instances)
        return 0 if not mismatches else 1


class KnnOracleCheck(feature.Feature):
    """knn_predict against a full sort of the training set."""

    __logger = logging.getLogger(__name__)

    def execute(self, **kwargs):
        queries = kwargs.get('queries', 200)
        rng = np.random.default_rng(kwargs.get('seed', 0))
        features = rng.normal(size=(kwargs.get('samples', 300),
                                    data.N_READINGS))
        labels = rng.integers(nn.N_CLASSES, size=len(features))
        model = baselines.KNNModel(
            features, labels, kwargs.get('k', baselines.K_NEIGHBORS))
        mismatches = 0
        for query in rng.normal(size=(queries, data.N_READINGS)):
            if baselines.knn_predict(model, query) != (
                    oracles.brute_force_knn(features, labels, query,
                                            model.k)):
                mismatches += 1
        self.details = {'queries': queries, 'mismatches': mismatches}
        self.__logger.info("%d/%d KNN predictions differ from the oracle",
                           mismatches, queries)
        return 0 if not mismatches else 1


class FootprintCheck(feature.Feature):
    """Parameter counts and model file size of the reference networks."""

    __logger = logging.getLogger(__name__)

    def execute(self, **kwargs):
        net = nn.init_network(nn.REFERENCE_CNN, seed=42)
        os.makedirs(self.res_dir, exist_ok=True)
        size = model_io.save_model(
            net, data.NormStats(np.zeros(data.N_READINGS),
                                np.ones(data.N_READINGS)),
            os.path.join(self.res_dir, 'reference.aqnn'))
        self.details = {
            'cnn_params': nn.count_params(net),
            'mlp_params': nn.count_params(baselines.build_mlp(42)),
            'file_bytes': size}
        self.__logger.info("Reference footprint: %s", self.details)
        return 0 if (
            self.details['cnn_params'] == kwargs.get('cnn_params', 5416) and
            self.details['mlp_params'] == kwargs.get('mlp_params', 9412) and
            size <= kwargs.get('max_bytes', model_io.SIZE_CEILING)) else 1


class MetricsCheck(feature.Feature):
    """Report identities on random predictions and the averaging
    arithmetic of the published classification report."""

    __logger = logging.getLogger(__name__)

    def execute(self, **kwargs):
        rng = np.random.default_rng(kwargs.get('seed', 0))
        sets = kwargs.get('sets', 1000)
        violations = 0
        for _ in range(sets):
            size = int(rng.integers(1, 200))
            truths = rng.integers(nn.N_CLASSES, size=size)
            preds = rng.integers(nn.N_CLASSES, size=size)
            cm = evaluation.confusion_matrix(truths, preds)
            report = evaluation.classification_report(cm)
            if (report.weighted['recall'] != report.accuracy or
                    report.accuracy != np.mean(truths == preds) or
                    not np.array_equal(report.support, cm.supports)):
                violations += 1
        averages = evaluation.macro_weighted(TABLE_PRECISIONS, TABLE_SUPPORTS)
        gap = max(abs(a - b) for a, b in zip(averages, TABLE_AVERAGES))
        self.details = {'sets': sets, 'violations': violations,
                        'macro_precision': averages[0],
                        'weighted_precision': averages[1]}
        self.__logger.info("%d identity violations, averaging gap %.2g",
                           violations, gap)
        return 0 if not violations and gap <= 5e-4 else 1


class SyntheticTrainingCheck(feature.Feature):
    """Train the reference CNN on the synthetic generator."""

    __logger = logging.getLogger(__name__)

    def execute(self, **kwargs):
        start = time.perf_counter()
        train, val, test, norm = synthetic_splits(
            kwargs.get('n_per_class', 300), kwargs.get('seed', 7))
        net = nn.init_network(nn.REFERENCE_CNN, seed=42)
        best, history = fit(net, train, val, norm,
                            epochs=kwargs.get('epochs', 200),
                            batch_size=kwargs.get('batch_size', 64))
        best.restore(net)
        _, report, loss = evaluation.evaluate(net, test, norm)
        windows = training.window_means([item.train_acc for item in history])
        self.details = {
            'best_epoch': best.epoch, 'test_accuracy': report.accuracy,
            'test_loss': loss, 'final_train_loss': history[-1].train_loss,
            'train_acc_windows': windows}
        self.__logger.info("Synthetic test accuracy %.4f (epoch %d)",
                           report.accuracy, best.epoch)
        within = on_time(start, self.details, kwargs.get('max_seconds'))
        return 0 if (
            report.accuracy >= kwargs.get('min_accuracy', 0.97) and
            windows[-1] >= windows[0] and
            history[-1].train_loss < kwargs.get('max_train_loss', 0.1) and
            within) else 1


class DeterminismCheck(feature.Feature):
    """Two identical trainings give identical model files and
    histories."""

    __logger = logging.getLogger(__name__)

    def _run_once(self, index, epochs):
        train, val, _, norm = synthetic_splits()
        net = nn.init_network(nn.REFERENCE_CNN, seed=42)
        best, history = fit(net, train, val, norm, epochs=epochs)
        best.restore(net)
        history_path = os.path.join(self.res_dir, f"history{index}.csv")
        training.export_history(history, history_path)
        with open(history_path, 'rb') as hfile:
            return model_io.encode_model(net, norm), hfile.read()

    def execute(self, **kwargs):
        epochs = kwargs.get('epochs', 20)
        os.makedirs(self.res_dir, exist_ok=True)
        first = self._run_once(1, epochs)
        second = self._run_once(2, epochs)
        self.details = {'epochs': epochs,
                        'identical_model': first[0] == second[0],
                        'identical_history': first[1] == second[1]}
        self.__logger.info("Determinism: %s", self.details)
        return 0 if first == second else 1


class CheckpointCheck(feature.Feature):
    """The persisted model scores the best validation accuracy of the
    history."""

    __logger = logging.getLogger(__name__)

    def execute(self, **kwargs):
        train, val, _, norm = synthetic_splits(
            kwargs.get('n_per_class', 100), kwargs.get('seed', 11))
        net = nn.init_network(nn.REFERENCE_CNN, seed=3)
        best, history = fit(net, train, val, norm,
                            epochs=kwargs.get('epochs', 30))
        best.restore(net)
        os.makedirs(self.res_dir, exist_ok=True)
        path = os.path.join(self.res_dir, 'best.aqnn')
        model_io.save_model(net, norm, path)
        loaded, loaded_norm = model_io.load_model(path)
        features, labels = data.normalize(val, loaded_norm)
        _, accuracy = training.measure(loaded, features, labels)
        expected = max(item.val_acc for item in history)
        self.details = {'best_epoch': best.epoch, 'history_best': expected,
                        'persisted_val_acc': accuracy}
        return 0 if accuracy == expected else 1


class LatencyCheck(feature.Feature):
    """Single-sample inference latency of the reference CNN."""

    __logger = logging.getLogger(__name__)

    def execute(self, **kwargs):
        _, _, test, norm = synthetic_splits(50)
        net = nn.init_network(nn.REFERENCE_CNN, seed=42)
        features, _ = data.normalize(test, norm)
        stats = evaluation.latency_benchmark(
            net, features, kwargs.get('iterations', 1000))
        limit = kwargs.get('max_seconds', 1e-3)
        self.details = {'count': stats.count, 'mean': stats.mean,
                        'p50': stats.p50, 'p99': stats.p99, 'max': stats.max}
        self.__logger.info("Latency:\n%s", stats)
        return 0 if stats.mean < limit and stats.p99 < limit else 1


def stream_lines(count, seed=0, malformed_rate=0.1):
    """Mixed serve input: runs of synthetic samples of the same class,
    CSV or JSON encoded, interleaved with malformed lines"""
    rng = np.random.default_rng(seed)
    pool = data.synth_generate(max(count // 4, 1), seed)
    by_class = [pool.readings[pool.labels == label]
                for label in range(nn.N_CLASSES)]
    lines = []
    while len(lines) < count:
        label = int(rng.integers(nn.N_CLASSES))
        for _ in range(int(rng.integers(1, 8))):
            if rng.random() < malformed_rate:
                lines.append(MALFORMED_LINES[
                    int(rng.integers(len(MALFORMED_LINES)))])
                continue
            readings = by_class[label][int(rng.integers(
                len(by_class[label])))]
            if rng.random() < 0.5:
                lines.append(','.join(repr(float(x)) for x in readings))
            else:
                lines.append(json.dumps({'readings': readings.tolist()}))
    return lines[:count]


def alert_runs(outputs, rule):
    """Return the alert count of every maximal run of hits"""
    runs = []
    in_run = False
    for record in outputs:
        if 'alert' in record:
            runs[-1] += 1
        elif 'class_index' in record:
            hit = (record['class_index'] == rule.trigger and
                   record['probs'][rule.trigger] >= rule.threshold)
            if hit and not in_run:
                runs.append(0)
            in_run = hit
    return runs


class ServeProtocolCheck(feature.Feature):
    """One output line per input line and alert hysteresis."""

    __logger = logging.getLogger(__name__)

    def execute(self, **kwargs):
        count = kwargs.get('lines', 10000)
        train, val, _, norm = synthetic_splits(100)
        net = nn.init_network(nn.REFERENCE_CNN, seed=42)
        best, _ = fit(net, train, val, norm,
                      epochs=kwargs.get('epochs', 20))
        best.restore(net)
        rule = serve.AlertRule()
        session = serve.ServeSession(net, norm, rule)
        outstream = io.StringIO()
        serve.serve_stream(
            session, io.StringIO('\n'.join(stream_lines(count)) + '\n'),
            outstream)
        outputs = [json.loads(line)
                   for line in outstream.getvalue().splitlines()]
        answers = sum(1 for record in outputs if 'alert' not in record)
        runs = alert_runs(outputs, rule)
        metrics = serve.stream_metrics(session)
        self.details = {'lines': count, 'answers': answers,
                        'errors': metrics.errors, 'alerts': metrics.alerts,
                        'hit_runs': len(runs),
                        'max_alerts_per_run': max(runs, default=0)}
        self.__logger.info("Serve protocol: %s", self.details)
        return 0 if answers == count and max(runs, default=0) <= 1 else 1


class DatasetReproductionCheck(feature.Feature):
    """Reference regime on the public dataset given by AQNN_DATA."""

    __logger = logging.getLogger(__name__)

    def check_requirements(self):
        path = env.get('AQNN_DATA')
        self.is_skipped = not path or not os.path.isfile(path)
        if self.is_skipped:
            self.__logger.info("No dataset at AQNN_DATA=%r", path)

    def execute(self, **kwargs):
        start = time.perf_counter()
        dataset = data.load_csv(env.get('AQNN_DATA'))
        train, val, test = data.shuffle_split(
            dataset, data.SplitSpec(seed=kwargs.get('seed', 42)))
        norm = data.fit_normalizer(train)
        net = nn.init_network(nn.REFERENCE_CNN, seed=kwargs.get('seed', 42))
        best, _ = fit(net, train, val, norm,
                      epochs=kwargs.get('epochs', 200),
                      batch_size=kwargs.get('batch_size', 64),
                      seed=kwargs.get('seed', 42))
        best.restore(net)
        _, report, loss = evaluation.evaluate(net, test, norm)
        _, knn_report = baselines.knn_evaluate(
            baselines.fit_knn(train, norm), test, norm)
        self.details = {'test_accuracy': report.accuracy, 'test_loss': loss,
                        'knn_accuracy': knn_report.accuracy,
                        'report': report.as_dict()}
        self.__logger.info("Test split:\n%s", report)
        within = on_time(start, self.details, kwargs.get('max_seconds'))
        return 0 if (
            report.accuracy >= kwargs.get('min_accuracy', 0.95) and
            loss <= kwargs.get('max_loss', 0.25) and
            abs(knn_report.accuracy - KNN_REFERENCE_ACCURACY) <=
            kwargs.get('knn_tolerance', 0.02) and
            within) else 1
