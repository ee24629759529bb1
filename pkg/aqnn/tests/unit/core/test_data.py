#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

# pylint: disable=missing-docstring

import logging
import os
import tempfile
import unittest

import numpy as np

from aqnn.core import data
from aqnn.utils import exceptions

ROWS = "MQ2,MQ9,MQ135,MQ137,MQ138,MG-811,label\n" \
    "1,2,3,4,5,6,0\n" \
    "\n" \
    "3,2,3,4,5,6,2\n"


class CsvTesting(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmpdir.name, 'air.csv')

    def tearDown(self):
        self.tmpdir.cleanup()

    def _write(self, text):
        with open(self.path, 'w', encoding='utf-8') as cfile:
            cfile.write(text)

    def test_load(self):
        self._write(ROWS)
        dataset = data.load_csv(self.path)
        self.assertEqual(len(dataset), 2)
        self.assertEqual(dataset.labels.tolist(), [0, 2])
        self.assertEqual(dataset.readings[1].tolist(), [3, 2, 3, 4, 5, 6])
        self.assertEqual(dataset.provenance, 'file')

    def test_load_no_header(self):
        self._write("1,2,3,4,5,6,3\n")
        self.assertEqual(data.load_csv(self.path).labels.tolist(), [3])

    def test_wrong_arity(self):
        self._write(ROWS + "1,2,3,4,5,1\n")
        with self.assertRaises(exceptions.ParseError) as ctx:
            data.load_csv(self.path)
        self.assertEqual(ctx.exception.lineno, 5)

    def test_non_numeric(self):
        self._write("1,2,x,4,5,6,0\n")
        with self.assertRaises(exceptions.ParseError):
            data.load_csv(self.path)

    def test_non_finite(self):
        self._write("1,2,3,4,5,6,0\n1,2,nan,4,5,6,0\n")
        with self.assertRaises(exceptions.ParseError):
            data.load_csv(self.path)

    def test_bad_label(self):
        for label in ('4', '1.5', '-1'):
            self._write(f"1,2,3,4,5,6,{label}\n")
            with self.assertRaises(exceptions.ParseError):
                data.load_csv(self.path)

    def test_empty(self):
        self._write("MQ2,MQ9,MQ135,MQ137,MQ138,MG-811,label\n")
        with self.assertRaises(exceptions.ParseError):
            data.load_csv(self.path)

    def test_unlabeled(self):
        self._write("1,2,3,4,5,6\n")
        dataset = data.load_csv(self.path, labeled=False)
        self.assertFalse(dataset.labeled)

    def test_labels_where_readings_expected(self):
        self._write(ROWS)
        with self.assertRaises(exceptions.LabeledDataError):
            data.load_csv(self.path, labeled=False)

    def test_drop_labels(self):
        self._write(ROWS)
        dataset = data.load_csv(self.path, labeled=False, drop_labels=True)
        self.assertIsNone(dataset.labels)
        self.assertEqual(len(dataset), 2)

    def test_missing(self):
        with self.assertRaises(OSError):
            data.load_csv(os.path.join(self.tmpdir.name, 'missing.csv'))

    def test_save(self):
        dataset = data.synth_generate(3, 1)
        data.save_csv(dataset, self.path)
        loaded = data.load_csv(self.path)
        self.assertTrue(np.array_equal(loaded.readings, dataset.readings))
        self.assertTrue(np.array_equal(loaded.labels, dataset.labels))


class SampleTesting(unittest.TestCase):

    def test_sample(self):
        sample = data.SensorSample([1, 2, 3, 4, 5, 6], 1)
        self.assertEqual(sample.label, 1)

    def test_invalid_sample(self):
        for readings, label in (([1, 2, 3], None),
                                ([1, 2, 3, 4, 5, float('inf')], None),
                                ([1, 2, 3, 4, 5, 6], 4)):
            with self.assertRaises(exceptions.InvalidArgumentError):
                data.SensorSample(readings, label)

    def test_dataset_labels(self):
        with self.assertRaises(exceptions.InvalidArgumentError):
            data.Dataset(np.zeros((2, 6)), [0])
        with self.assertRaises(exceptions.InvalidArgumentError):
            data.Dataset(np.zeros((1, 6)), [7])

    def test_getitem(self):
        dataset = data.Dataset(np.ones((2, 6)), [1, 3])
        self.assertEqual(dataset[1].label, 3)
        self.assertEqual(len(dataset.samples), 2)


class NormalizerTesting(unittest.TestCase):

    def test_fit(self):
        readings = np.ones((2, 6))
        readings[:, 0] = [1, 3]
        stats = data.fit_normalizer(data.Dataset(readings, [0, 1]))
        self.assertEqual(stats.mean[0], 2.0)
        self.assertEqual(stats.std[0], 1.0)
        self.assertEqual(stats.std[1], 1.0)
        self.assertEqual(stats.mean.dtype, np.float32)

    def test_apply(self):
        readings = np.ones((2, 6))
        readings[:, 0] = [1, 3]
        stats = data.fit_normalizer(data.Dataset(readings, [0, 1]))
        features = data.apply_normalizer(data.SensorSample(readings[0]), stats)
        self.assertEqual(features.shape, (6, 1))
        self.assertEqual(features.dtype, np.float32)
        self.assertEqual(features[:, 0].tolist(), [-1, 0, 0, 0, 0, 0])

    def test_normalize(self):
        dataset = data.synth_generate(50, 0)
        features, labels = data.normalize(
            dataset, data.fit_normalizer(dataset))
        self.assertEqual(features.shape, (200, 6, 1))
        np.testing.assert_allclose(features.mean(axis=0), 0, atol=1e-5)
        np.testing.assert_allclose(features.std(axis=0), 1, atol=1e-4)
        self.assertIs(labels, dataset.labels)

    def test_invert(self):
        dataset = data.synth_generate(10, 0)
        stats = data.fit_normalizer(dataset)
        np.testing.assert_allclose(
            stats.invert(stats.apply(dataset.readings)), dataset.readings,
            rtol=1e-5)

    def test_empty(self):
        with self.assertRaises(exceptions.InvalidArgumentError):
            data.fit_normalizer(data.Dataset(np.zeros((0, 6)), []))

    def test_invalid_stats(self):
        with self.assertRaises(exceptions.InvalidArgumentError):
            data.NormStats(np.zeros(6), np.zeros(6))


class SplitTesting(unittest.TestCase):

    def _split(self, size, seed=42):
        dataset = data.Dataset(
            np.arange(size * 6, dtype=np.float64).reshape(size, 6),
            np.arange(size) % 4)
        return data.shuffle_split(dataset, data.SplitSpec(seed=seed))

    def test_sizes(self):
        self.assertEqual([len(part) for part in self._split(1845)],
                         [1291, 369, 185])
        self.assertEqual([len(part) for part in self._split(10)], [7, 2, 1])

    def test_partition(self):
        train, val, test = self._split(100)
        indices = np.concatenate([train.origin, val.origin, test.origin])
        self.assertEqual(sorted(indices.tolist()), list(range(100)))
        self.assertEqual(train.readings[0, 0], 6 * train.origin[0])

    def test_seeded(self):
        first = self._split(50)[0].origin
        self.assertTrue(np.array_equal(first, self._split(50)[0].origin))
        self.assertFalse(np.array_equal(first, self._split(50, 7)[0].origin))

    def test_empty(self):
        with self.assertRaises(exceptions.InvalidArgumentError):
            data.shuffle_split(data.Dataset(np.zeros((0, 6)), []),
                               data.SplitSpec())

    def test_invalid_split_spec(self):
        with self.assertRaises(exceptions.InvalidArgumentError):
            data.SplitSpec(0.7, 0.2, 0.2)
        with self.assertRaises(exceptions.InvalidArgumentError):
            data.SplitSpec(1.0, 0.0, 0.0)


class DistributionTesting(unittest.TestCase):

    def test_counts(self):
        distribution = data.class_distribution(
            data.Dataset(np.zeros((5, 6)), [0, 0, 1, 3, 3]))
        self.assertEqual(distribution.counts.tolist(), [2, 1, 0, 2])
        self.assertEqual(distribution.total, 5)
        self.assertEqual(distribution.empty_classes,
                         [data.ACTIVITY_CLASSES[2]])
        self.assertIn('40.0%', str(distribution))

    def test_unlabeled(self):
        with self.assertRaises(exceptions.InvalidArgumentError):
            data.class_distribution(data.Dataset(np.zeros((1, 6))))


class SynthTesting(unittest.TestCase):

    def test_generate(self):
        dataset = data.synth_generate(30, 5)
        self.assertEqual(len(dataset), 120)
        self.assertEqual(dataset.provenance, 'synthetic')
        self.assertEqual(np.bincount(dataset.labels).tolist(), [30] * 4)

    def test_seeded(self):
        self.assertTrue(np.array_equal(
            data.synth_generate(10, 3).readings,
            data.synth_generate(10, 3).readings))

    def test_invalid(self):
        with self.assertRaises(exceptions.InvalidArgumentError):
            data.synth_generate(0, 1)


if __name__ == "__main__":
    logging.disable(logging.CRITICAL)
    unittest.main(verbosity=2)
