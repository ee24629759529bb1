#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Six-sensor dataset: loading, normalization, splits and synthesis.

CSV rows hold the raw outputs of MQ2, MQ9, MQ135, MQ137, MQ138 and
MG-811, in that order, followed by the activity label (0 Normal
Situation, 1 Preparing Meals, 2 Presence of Smoke, 3 Cleaning).
"""

import csv
import logging
import math

import numpy as np
import prettytable

from aqnn.core import nn
from aqnn.utils import exceptions

SENSORS = ('MQ2', 'MQ9', 'MQ135', 'MQ137', 'MQ138', 'MG-811')
N_READINGS = len(SENSORS)

SENSOR_GASES = {
    'MQ2': ('Molecular Hydrogen', 'LPG', 'Natural Gas', 'Carbon Monoxide',
            'Alcohol', 'Propane'),
    'MQ9': ('Natural Gas', 'LPG', 'Carbon Monoxide'),
    'MQ135': ('Ammonia', 'Carbon Monoxide', 'Carbon Dioxide', 'Ethanol',
              'Toluene', 'Acetone'),
    'MQ137': ('Ammonia', 'Carbon Monoxide', 'Ethanol', 'Dimethyl ether'),
    'MQ138': ('n-Hexane', 'Benzene', 'Natural Gas', 'Carbon Monoxide',
              'Alcohol', 'Propane'),
    'MG-811': ('Carbon Dioxide',)}

ACTIVITY_CLASSES = (
    'Normal Situation', 'Preparing Meals', 'Presence of Smoke', 'Cleaning')
CLASS_SLUGS = ('normal', 'meals', 'smoke', 'cleaning')
SMOKE = 2

DEGENERATE_STD = 1e-9

# Synthetic generator: per-channel baseline, spread and per-class shifts.
# Every discriminating shift is at least 4 spreads.
SYNTH_BASELINE = (180.0, 140.0, 230.0, 95.0, 110.0, 410.0)
SYNTH_SPREAD = (8.0, 6.0, 10.0, 5.0, 6.0, 15.0)
SYNTH_SHIFTS = (
    (0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    (40.0, 30.0, 50.0, 25.0, 30.0, 75.0),
    (200.0, 150.0, 0.0, 0.0, 0.0, 0.0),
    (0.0, 0.0, 150.0, 90.0, 100.0, 0.0))

LOGGER = logging.getLogger(__name__)


def _check_label(label):
    if label is not None and label not in range(len(ACTIVITY_CLASSES)):
        raise exceptions.InvalidArgumentError(
            f"label {label!r} not in 0..{len(ACTIVITY_CLASSES) - 1}")


class SensorSample():
    """Six raw readings and an optional activity label."""

    def __init__(self, readings, label=None):
        self.readings = np.asarray(readings, dtype=np.float64)
        if self.readings.shape != (N_READINGS,):
            raise exceptions.InvalidArgumentError(
                f"expected {N_READINGS} readings, got {self.readings.size}")
        if not np.all(np.isfinite(self.readings)):
            raise exceptions.InvalidArgumentError("non-finite reading")
        _check_label(label)
        self.label = None if label is None else int(label)

    def __repr__(self):
        return f"SensorSample({self.readings.tolist()}, {self.label})"


class Dataset():
    """Samples stored column-wise: readings (n, 6) and labels (n,).

    labels is None for unlabeled data. origin keeps, for a partition,
    the indices of its samples in the dataset it was cut from.
    """

    def __init__(self, readings, labels=None, provenance='file',
                 origin=None):
        self.readings = np.asarray(readings, dtype=np.float64).reshape(
            -1, N_READINGS)
        if not np.all(np.isfinite(self.readings)):
            raise exceptions.InvalidArgumentError("non-finite reading")
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            if labels.shape != (len(self.readings),):
                raise exceptions.InvalidArgumentError(
                    f"{len(self.readings)} samples but {labels.size} labels")
            if np.any(labels < 0) or np.any(
                    labels >= len(ACTIVITY_CLASSES)):
                raise exceptions.InvalidArgumentError("label not in 0..3")
        if provenance not in ('file', 'synthetic'):
            raise exceptions.InvalidArgumentError(
                f"unknown provenance {provenance!r}")
        self.labels = labels
        self.provenance = provenance
        self.origin = origin

    @property
    def labeled(self):
        return self.labels is not None

    @property
    def samples(self):
        return [self[index] for index in range(len(self))]

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.readings[indices],
            None if self.labels is None else self.labels[indices],
            self.provenance, origin=indices)

    def __len__(self):
        return len(self.readings)

    def __getitem__(self, index):
        return SensorSample(
            self.readings[index],
            None if self.labels is None else int(self.labels[index]))


class NormStats():
    """Per-sensor z-score statistics, stored as float32."""

    def __init__(self, mean, std):
        self.mean = np.asarray(mean, dtype=np.float32).reshape(N_READINGS)
        self.std = np.asarray(std, dtype=np.float32).reshape(N_READINGS)
        if not np.all(np.isfinite(self.mean)) or not np.all(self.std > 0):
            raise exceptions.InvalidArgumentError(
                "mean must be finite and std strictly positive")

    def apply(self, readings):
        """(..., 6) raw readings -> (..., 6, 1) float32 feature maps"""
        readings = np.asarray(readings, dtype=np.float64)
        z = (readings - self.mean.astype(np.float64)) / self.std.astype(
            np.float64)
        return z.astype(nn.DTYPE)[..., np.newaxis]

    def invert(self, features):
        features = np.asarray(features, dtype=np.float64)
        return features.reshape(features.shape[:-1]) * self.std.astype(
            np.float64) + self.mean.astype(np.float64)


class SplitSpec():
    # pylint: disable=too-few-public-methods
    """Train/validation/test ratios and shuffle seed."""

    def __init__(self, train_ratio=0.7, val_ratio=0.2, test_ratio=0.1,
                 seed=42):
        ratios = (train_ratio, val_ratio, test_ratio)
        if any(not 0 < ratio < 1 for ratio in ratios):
            raise exceptions.InvalidArgumentError(
                f"ratios must be in (0, 1), got {ratios}")
        if abs(sum(ratios) - 1.0) > 1e-9:
            raise exceptions.InvalidArgumentError(
                f"ratios must sum to 1, got {sum(ratios)}")
        self.train_ratio = train_ratio
        self.val_ratio = val_ratio
        self.test_ratio = test_ratio
        self.seed = seed


class ClassDistribution():
    """Per-class sample counts."""

    def __init__(self, counts):
        self.counts = np.asarray(counts, dtype=np.int64)

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def empty_classes(self):
        return [ACTIVITY_CLASSES[index] for index, count in enumerate(
            self.counts) if count == 0]

    @property
    def has_empty_class(self):
        return bool(self.empty_classes)

    def __str__(self):
        msg = prettytable.PrettyTable(
            header_style='upper', padding_width=5,
            field_names=['class', 'activity', 'samples', 'share'])
        for index, count in enumerate(self.counts):
            share = f"{100 * count / self.total:.1f}%" if self.total else '-'
            msg.add_row([index, ACTIVITY_CLASSES[index], count, share])
        return msg.get_string()


def _is_number(field):
    try:
        float(field)
        return True
    except ValueError:
        return False


def _parse_row(lineno, row, labeled):
    expected = N_READINGS + 1 if labeled else N_READINGS
    if len(row) != expected:
        raise exceptions.ParseError(
            lineno, f"expected {expected} values, got {len(row)}")
    values = []
    for field in row:
        try:
            value = float(field)
        except ValueError as exc:
            raise exceptions.ParseError(
                lineno, f"non-numeric field {field.strip()!r}") from exc
        if not math.isfinite(value):
            raise exceptions.ParseError(
                lineno, f"non-finite field {field.strip()!r}")
        values.append(value)
    if not labeled:
        return values, None
    label = values.pop()
    if not label.is_integer() or not 0 <= label < len(ACTIVITY_CLASSES):
        raise exceptions.ParseError(
            lineno, f"label {row[-1].strip()!r} not in 0..3")
    return values, int(label)


def load_csv(path, labeled=True, drop_labels=False):
    """Load a dataset file.

    An optional header line (first field non-numeric) is skipped, as are
    blank lines.

    Args:
        path: CSV file, 7 columns (6 when labeled is False)
        labeled: expect the label as 7th column
        drop_labels: with labeled False, accept 7-column rows and
            discard their label

    Raises:
        OSError if the file cannot be read
        ParseError (LabeledDataError for unexpected labels)
    """
    readings = []
    labels = []
    header_checked = False
    with open(path, newline='', encoding='utf-8') as cfile:
        for lineno, row in enumerate(csv.reader(cfile), start=1):
            if not any(field.strip() for field in row):
                continue
            if not header_checked:
                header_checked = True
                if not _is_number(row[0]):
                    LOGGER.debug("Header skipped: %s", ','.join(row))
                    continue
            if not labeled and len(row) == N_READINGS + 1:
                if not drop_labels:
                    raise exceptions.LabeledDataError(
                        lineno, "labeled row where readings are expected")
                row = row[:N_READINGS]
            values, label = _parse_row(lineno, row, labeled)
            readings.append(values)
            labels.append(label)
    if not readings:
        raise exceptions.ParseError(0, f"no data row in {path}")
    LOGGER.info("%d samples loaded from %s", len(readings), path)
    return Dataset(readings, labels if labeled else None, 'file')


def save_csv(dataset, path):
    """Write a header line then one row per sample"""
    header = list(SENSORS) + (['label'] if dataset.labeled else [])
    with open(path, 'w', newline='', encoding='utf-8') as cfile:
        writer = csv.writer(cfile, lineterminator='\n')
        writer.writerow(header)
        for index, readings in enumerate(dataset.readings):
            row = [repr(float(value)) for value in readings]
            if dataset.labeled:
                row.append(int(dataset.labels[index]))
            writer.writerow(row)
    LOGGER.debug("%d samples written to %s", len(dataset), path)


def fit_normalizer(train):
    """Per-sensor mean and population std over the training split.

    Columns with std < 1e-9 get std 1.0.

    Raises:
        InvalidArgumentError on an empty dataset
    """
    if not len(train):  # pylint: disable=len-as-condition
        raise exceptions.InvalidArgumentError(
            "cannot fit a normalizer on an empty dataset")
    mean = train.readings.mean(axis=0)
    std = train.readings.std(axis=0)
    std[std < DEGENERATE_STD] = 1.0
    return NormStats(mean, std)


def apply_normalizer(sample, stats):
    """Return the (6, 1) float32 feature map of one sample"""
    readings = sample.readings if isinstance(
        sample, SensorSample) else np.asarray(sample, dtype=np.float64)
    return stats.apply(readings.reshape(N_READINGS))


def normalize(dataset, stats):
    """Return (features (n, 6, 1) float32, labels or None)"""
    return stats.apply(dataset.readings), dataset.labels


def shuffle_split(dataset, spec):
    """Seeded shuffle then train/val/test cut.

    Sizes are floor(n * train), floor(n * val) and the remainder.

    Raises:
        InvalidArgumentError on an empty dataset
    """
    size = len(dataset)
    if not size:
        raise exceptions.InvalidArgumentError("cannot split an empty dataset")
    order = np.random.default_rng(spec.seed).permutation(size)
    n_train = int(math.floor(size * spec.train_ratio + 1e-9))
    n_val = int(math.floor(size * spec.val_ratio + 1e-9))
    LOGGER.debug("Split of %d samples: %d/%d/%d", size, n_train, n_val,
                 size - n_train - n_val)
    return (dataset.subset(order[:n_train]),
            dataset.subset(order[n_train:n_train + n_val]),
            dataset.subset(order[n_train + n_val:]))


def class_distribution(dataset):
    """Count samples per activity class.

    Raises:
        InvalidArgumentError on unlabeled data
    """
    if not dataset.labeled:
        raise exceptions.InvalidArgumentError(
            "class distribution of an unlabeled dataset")
    distribution = ClassDistribution(
        np.bincount(dataset.labels, minlength=len(ACTIVITY_CLASSES)))
    if distribution.has_empty_class:
        LOGGER.warning("No sample for: %s",
                       ', '.join(distribution.empty_classes))
    return distribution


def synth_generate(n_per_class, seed):
    """Draw a labeled stand-in dataset from per-class Gaussians.

    Normal sits at the baseline, Preparing Meals is moderately raised on
    every sensor, Presence of Smoke is raised on MQ2/MQ9 and Cleaning on
    MQ135/MQ137/MQ138. Samples are shuffled.
    """
    if not isinstance(n_per_class, (int, np.integer)) or n_per_class < 1:
        raise exceptions.InvalidArgumentError(
            f"n_per_class must be >= 1, got {n_per_class!r}")
    rng = np.random.default_rng(seed)
    readings = []
    labels = []
    for label, shift in enumerate(SYNTH_SHIFTS):
        loc = np.add(SYNTH_BASELINE, shift)
        readings.append(rng.normal(
            loc, SYNTH_SPREAD, size=(n_per_class, N_READINGS)))
        labels.append(np.full(n_per_class, label, dtype=np.int64))
    order = rng.permutation(n_per_class * len(SYNTH_SHIFTS))
    return Dataset(np.concatenate(readings)[order],
                   np.concatenate(labels)[order], 'synthetic')
