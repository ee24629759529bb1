#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Reference classifiers compared with the CNN: KNN and a plain MLP."""

import logging

import numpy as np

from aqnn.core import data
from aqnn.core import evaluation
from aqnn.core import nn
from aqnn.utils import exceptions

K_NEIGHBORS = 5

REFERENCE_MLP = [
    {'layer': 'input', 'length': data.N_READINGS, 'channels': 1},
    {'layer': 'flatten'},
    {'layer': 'dense', 'units': 128},
    {'layer': 'relu'},
    {'layer': 'dense', 'units': 64},
    {'layer': 'relu'},
    {'layer': 'dense', 'units': nn.N_CLASSES},
    {'layer': 'softmax'}]

LOGGER = logging.getLogger(__name__)


class KNNModel():
    """Normalized training samples voting by Euclidean distance."""

    def __init__(self, features, labels, k=K_NEIGHBORS):
        self.features = np.asarray(features, dtype=np.float64)
        if not self.features.size:
            raise exceptions.InvalidArgumentError("empty KNN model")
        self.features = self.features.reshape(len(self.features), -1)
        self.labels = np.asarray(labels, dtype=np.int64)
        if self.labels.shape != (len(self.features),):
            raise exceptions.InvalidArgumentError(
                f"{len(self.features)} samples but {self.labels.size} labels")
        if (not isinstance(k, (int, np.integer)) or k < 1 or
                not k % 2):
            raise exceptions.InvalidArgumentError(
                f"k must be a positive odd integer, got {k!r}")
        if k > len(self.features):
            raise exceptions.InvalidArgumentError(
                f"k={k} exceeds the {len(self.features)} training samples")
        self.k = int(k)

    def __len__(self):
        return len(self.features)


def fit_knn(train, norm, k=K_NEIGHBORS):
    """Store the normalized labeled training split"""
    if not train.labeled:
        raise exceptions.InvalidArgumentError("KNN needs labeled data")
    features, labels = data.normalize(train, norm)
    return KNNModel(features, labels, k)


def knn_predict(model, query):
    """Majority label among the k nearest stored samples.

    Neighbors at equal distance are taken in storage order. A vote tie
    goes to the class with the smaller summed distance, then to the
    lower class index.
    """
    query = np.asarray(query, dtype=np.float64).reshape(-1)
    if query.shape != model.features.shape[1:]:
        raise exceptions.InvalidArgumentError(
            f"query of {query.size} values, expected "
            f"{model.features.shape[1]}")
    distances = np.sqrt(np.sum((model.features - query) ** 2, axis=1))
    nearest = np.argsort(distances, kind='stable')[:model.k]
    labels = model.labels[nearest]
    votes = np.bincount(labels, minlength=nn.N_CLASSES)
    summed = np.bincount(labels, weights=distances[nearest],
                         minlength=nn.N_CLASSES)
    candidates = np.flatnonzero(votes == votes.max())
    return int(min(candidates, key=lambda label: (summed[label], label)))


def knn_evaluate(model, dataset, norm):
    """Return (ConfusionMatrix, ClassificationReport) on a labeled split"""
    if not dataset.labeled:
        raise exceptions.InvalidArgumentError("knn_evaluate needs labels")
    features, labels = data.normalize(dataset, norm)
    preds = [knn_predict(model, query) for query in features]
    cm = evaluation.confusion_matrix(labels, preds)
    report = evaluation.classification_report(cm)
    LOGGER.debug("KNN (k=%d) accuracy %.4f on %d samples", model.k,
                 report.accuracy, len(labels))
    return cm, report


def build_mlp(seed):
    """Initialized Dense/ReLU network, trainable with training.train"""
    return nn.init_network(REFERENCE_MLP, seed)
