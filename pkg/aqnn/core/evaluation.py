#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Confusion matrix, classification report and latency benchmark.

Confusion matrices are indexed [true class][predicted class].
Undefined precision or recall (zero denominator) is reported as 0.0 and
listed in ClassificationReport.undefined.
"""

import csv
import logging
import time

import numpy as np
import prettytable
from sklearn import metrics

from aqnn.core import data
from aqnn.core import nn
from aqnn.utils import exceptions

METRICS = ('precision', 'recall', 'f1')
WARMUP = 10
MIN_ITERATIONS = 100

LOGGER = logging.getLogger(__name__)


def _class_names(n_classes):
    if n_classes == len(data.ACTIVITY_CLASSES):
        return list(data.ACTIVITY_CLASSES)
    return [str(index) for index in range(n_classes)]


class ConfusionMatrix():
    """Square count table, rows true class, columns predicted class."""

    def __init__(self, counts):
        self.counts = np.asarray(counts, dtype=np.int64)
        if (self.counts.ndim != 2 or
                self.counts.shape[0] != self.counts.shape[1] or
                np.any(self.counts < 0)):
            raise exceptions.InvalidArgumentError(
                f"invalid confusion matrix of shape {self.counts.shape}")

    @property
    def n_classes(self):
        return self.counts.shape[0]

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def supports(self):
        return self.counts.sum(axis=1)

    def to_csv(self, path):
        with open(path, 'w', newline='', encoding='utf-8') as cfile:
            writer = csv.writer(cfile, lineterminator='\n')
            names = _class_names(self.n_classes)
            writer.writerow(['true\\predicted'] + names)
            for name, row in zip(names, self.counts):
                writer.writerow([name] + row.tolist())

    def __str__(self):
        names = _class_names(self.n_classes)
        msg = prettytable.PrettyTable(
            header_style='upper', padding_width=2,
            field_names=['true \\ predicted'] + names)
        for name, row in zip(names, self.counts):
            msg.add_row([name] + row.tolist())
        return msg.get_string()


class ClassificationReport():
    # pylint: disable=too-few-public-methods,too-many-instance-attributes
    """Per-class and averaged precision, recall and F1."""

    def __init__(self, precision, recall, f1, support, accuracy, macro,
                 weighted, undefined):
        # pylint: disable=too-many-arguments
        self.precision = precision
        self.recall = recall
        self.f1 = f1
        self.support = support
        self.accuracy = accuracy
        self.macro = macro
        self.weighted = weighted
        self.undefined = undefined

    def as_dict(self):
        names = _class_names(len(self.support))
        return {
            'classes': {
                name: {'precision': float(self.precision[index]),
                       'recall': float(self.recall[index]),
                       'f1': float(self.f1[index]),
                       'support': int(self.support[index])}
                for index, name in enumerate(names)},
            'accuracy': self.accuracy,
            'macro_avg': self.macro,
            'weighted_avg': self.weighted,
            'total': int(np.sum(self.support)),
            'undefined': [f"{names[index]}:{metric}"
                          for index, metric in self.undefined]}

    def __str__(self):
        msg = prettytable.PrettyTable(
            header_style='upper', padding_width=2,
            field_names=['', 'precision', 'recall', 'f1-score', 'support'])
        msg.align[''] = 'l'
        total = int(np.sum(self.support))
        for index, name in enumerate(_class_names(len(self.support))):
            msg.add_row([name, f"{self.precision[index]:.2f}",
                         f"{self.recall[index]:.2f}",
                         f"{self.f1[index]:.2f}", int(self.support[index])])
        msg.add_row(['accuracy', '', '', f"{self.accuracy:.2f}", total])
        for label, averages in (('macro avg', self.macro),
                                ('weighted avg', self.weighted)):
            msg.add_row([label] + [
                f"{averages[metric]:.2f}" for metric in METRICS] + [total])
        return msg.get_string()


def confusion_matrix(truths, preds, n_classes=len(data.ACTIVITY_CLASSES)):
    """counts[t][p] = #{i : truths[i] = t and preds[i] = p}

    Raises:
        InvalidArgumentError on empty or unequal lists, or a class out of
        range
    """
    truths = np.asarray(truths, dtype=np.int64)
    preds = np.asarray(preds, dtype=np.int64)
    if truths.ndim != 1 or truths.shape != preds.shape or not truths.size:
        raise exceptions.InvalidArgumentError(
            f"expected equal-length non-empty lists, got {truths.size} "
            f"truths and {preds.size} predictions")
    for name, values in (('truth', truths), ('prediction', preds)):
        if np.any(values < 0) or np.any(values >= n_classes):
            raise exceptions.InvalidArgumentError(
                f"{name} outside 0..{n_classes - 1}")
    return ConfusionMatrix(metrics.confusion_matrix(
        truths, preds, labels=list(range(n_classes))))


def macro_weighted(values, supports):
    """Return (unweighted mean, support-weighted mean) of per-class values"""
    values = np.asarray(values, dtype=np.float64)
    supports = np.asarray(supports, dtype=np.float64)
    return float(values.mean()), float(
        np.sum(values * supports) / np.sum(supports))


def _pairs(cm):
    """Expand counts back into (truths, preds) label lists"""
    truths, preds = np.indices(cm.counts.shape)
    repeats = cm.counts.ravel()
    return np.repeat(truths.ravel(), repeats), np.repeat(
        preds.ravel(), repeats)


def classification_report(cm):
    """Derive the report from a confusion matrix.

    Raises:
        InvalidArgumentError on an all-zero matrix
    """
    if not cm.total:
        raise exceptions.InvalidArgumentError("all-zero confusion matrix")
    labels = list(range(cm.n_classes))
    precision, recall, f1, _ = metrics.precision_recall_fscore_support(
        *_pairs(cm), labels=labels, average=None, zero_division=0)
    support = cm.supports
    undefined = [
        (index, 'precision') for index in labels
        if not cm.counts[:, index].sum()] + [
        (index, 'recall') for index in labels if not support[index]]
    accuracy = float(np.trace(cm.counts) / cm.total)
    macro = {}
    weighted = {}
    for metric, values in zip(METRICS, (precision, recall, f1)):
        macro[metric], weighted[metric] = macro_weighted(values, support)
    # support-weighted recall reduces to trace / total
    weighted['recall'] = accuracy
    if undefined:
        LOGGER.warning("Undefined metrics reported as 0.0: %s", undefined)
    return ClassificationReport(
        np.asarray(precision, dtype=np.float64),
        np.asarray(recall, dtype=np.float64),
        np.asarray(f1, dtype=np.float64), support, accuracy, macro,
        weighted, undefined)


def evaluate(net, dataset, norm):
    """Classify a labeled dataset.

    Returns:
        (ConfusionMatrix, ClassificationReport, mean cross-entropy)

    Raises:
        InvalidArgumentError on unlabeled or empty data
    """
    if not dataset.labeled:
        raise exceptions.InvalidArgumentError("evaluate needs labeled data")
    if not len(dataset):  # pylint: disable=len-as-condition
        raise exceptions.InvalidArgumentError("evaluate on an empty dataset")
    features, labels = data.normalize(dataset, norm)
    probs, loss = nn.network_loss(net, features, labels)
    cm = confusion_matrix(labels, np.argmax(probs, axis=1))
    return cm, classification_report(cm), loss


class LatencyStats():
    # pylint: disable=too-few-public-methods
    """Single-sample inference durations in seconds."""

    def __init__(self, durations):
        durations = np.asarray(durations, dtype=np.float64)
        self.count = int(durations.size)
        self.mean = float(durations.mean())
        self.p50 = float(np.percentile(durations, 50))
        self.p99 = float(np.percentile(durations, 99))
        self.max = float(durations.max())

    def __str__(self):
        msg = prettytable.PrettyTable(
            header_style='upper', padding_width=5,
            field_names=['samples', 'mean (ms)', 'p50 (ms)', 'p99 (ms)',
                         'max (ms)'])
        msg.add_row([self.count] + [
            f"{1000 * value:.4f}" for value in (
                self.mean, self.p50, self.p99, self.max)])
        return msg.get_string()


def latency_benchmark(net, samples, iterations=1000, warmup=WARMUP):
    """Time network_predict on single samples, cycling through samples.

    The first warmup runs are discarded.

    Raises:
        InvalidArgumentError on an empty sample set or fewer than 100
        iterations
    """
    if not len(samples):  # pylint: disable=len-as-condition
        raise exceptions.InvalidArgumentError("no sample to benchmark")
    if iterations < MIN_ITERATIONS:
        raise exceptions.InvalidArgumentError(
            f"at least {MIN_ITERATIONS} iterations, got {iterations}")
    durations = []
    for index in range(warmup + iterations):
        sample = samples[index % len(samples)]
        start = time.perf_counter()
        nn.network_predict(net, sample)
        durations.append(time.perf_counter() - start)
    stats = LatencyStats(durations[warmup:])
    LOGGER.debug("Latency over %d runs:\n%s", iterations, stats)
    return stats
