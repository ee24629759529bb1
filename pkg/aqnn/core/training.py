#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Mini-batch training with best-validation-accuracy checkpointing."""

import collections
import csv
import logging

import numpy as np

from aqnn.core import nn
from aqnn.core import optim
from aqnn.utils import exceptions

HISTORY_FIELDS = ('epoch', 'train_loss', 'train_acc', 'val_loss', 'val_acc')

EpochMetrics = collections.namedtuple('EpochMetrics', HISTORY_FIELDS)

PROGRESS = logging.getLogger('aqnn.progress')


class TrainConfig():
    # pylint: disable=too-few-public-methods,too-many-instance-attributes
    """Training regime, defaulting to 200 epochs of batch 64 with Adam."""

    def __init__(self, epochs=200, batch_size=64, lr=optim.LEARNING_RATE,
                 beta1=optim.BETA1, beta2=optim.BETA2,
                 epsilon=optim.EPSILON, seed=42, shuffle_each_epoch=True):
        # pylint: disable=too-many-arguments
        for name, value in (('epochs', epochs), ('batch_size', batch_size)):
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise exceptions.InvalidArgumentError(
                    f"{name} must be >= 1, got {value!r}")
        self.epochs = int(epochs)
        self.batch_size = int(batch_size)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.seed = seed
        self.shuffle_each_epoch = shuffle_each_epoch


class Checkpoint():
    """In-memory snapshot of the parameters at a given epoch."""

    def __init__(self, epoch, val_acc, val_loss, params):
        self.epoch = epoch
        self.val_acc = val_acc
        self.val_loss = val_loss
        self.params = np.array(params, copy=True)

    def restore(self, net):
        net.set_params(self.params)
        net.clear_cache()
        return net

    def __repr__(self):
        return (f"Checkpoint(epoch={self.epoch}, val_acc={self.val_acc:.4f}, "
                f"val_loss={self.val_loss:.4f})")


def _check_split(name, features, labels):
    if features is None or not len(features):
        raise exceptions.InvalidArgumentError(f"empty {name} split")
    if labels is None:
        raise exceptions.InvalidArgumentError(f"unlabeled {name} split")


def measure(net, features, labels):
    """Return (mean cross-entropy, accuracy) without touching net"""
    probs, loss = nn.network_loss(net, features, labels)
    accuracy = float(np.mean(np.argmax(probs, axis=1) == labels))
    return loss, accuracy


def train(net, train_set, val_set, cfg):
    """Train net in place.

    Args:
        net: initialized network
        train_set: (features (n, 6, 1) float32, labels)
        val_set: same layout, used for checkpoint selection
        cfg: TrainConfig

    Returns:
        (best Checkpoint, list of EpochMetrics)

    Raises:
        InvalidArgumentError on an empty or unlabeled split
        NumericDivergenceError on a non-finite loss
    """
    # pylint: disable=too-many-locals
    features, labels = train_set
    val_features, val_labels = val_set
    _check_split('train', features, labels)
    _check_split('validation', val_features, val_labels)
    labels = np.asarray(labels)
    rng = np.random.default_rng(cfg.seed)
    state = optim.AdamState(
        nn.count_params(net), cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon)
    params = net.get_params()
    size = len(features)
    best = None
    history = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(size) if cfg.shuffle_each_epoch else (
            np.arange(size))
        loss_sum = 0.0
        correct = 0
        for batch, start in enumerate(range(0, size, cfg.batch_size), 1):
            index = order[start:start + cfg.batch_size]
            probs = nn.network_forward(net, features[index])
            loss, grads = net.backward(labels[index])
            if not np.isfinite(loss):
                raise exceptions.NumericDivergenceError(epoch, batch, loss)
            loss_sum += loss * len(index)
            correct += int(np.sum(np.argmax(probs, axis=1) == labels[index]))
            params = optim.adam_step(params, grads, state)
            net.set_params(params)
        net.clear_cache()
        val_loss, val_acc = measure(net, val_features, val_labels)
        metrics = EpochMetrics(epoch, loss_sum / size, correct / size,
                               val_loss, val_acc)
        history.append(metrics)
        PROGRESS.info(
            "epoch=%d train_loss=%.6f train_acc=%.6f val_loss=%.6f "
            "val_acc=%.6f", *metrics)
        if best is None or val_acc > best.val_acc:
            best = Checkpoint(epoch, val_acc, val_loss, params)
    return best, history


def resolve_best(history, checkpoints):
    """Checkpoint of the first epoch reaching the best validation accuracy.

    Args:
        history: list of EpochMetrics
        checkpoints: Checkpoint objects (any iterable)
    """
    best_epoch = None
    best_acc = None
    for metrics in history:
        if best_acc is None or metrics.val_acc > best_acc:
            best_epoch, best_acc = metrics.epoch, metrics.val_acc
    for checkpoint in checkpoints:
        if checkpoint.epoch == best_epoch:
            return checkpoint
    return None


def export_history(history, path):
    """Write the per-epoch metrics as CSV.

    Raises:
        InvalidArgumentError on an empty history
        OSError if path is not writable
    """
    if not history:
        raise exceptions.InvalidArgumentError("empty history")
    with open(path, 'w', newline='', encoding='utf-8') as hfile:
        writer = csv.writer(hfile, lineterminator='\n')
        writer.writerow(HISTORY_FIELDS)
        for metrics in history:
            writer.writerow([metrics.epoch] + [
                repr(float(value)) for value in metrics[1:]])


def load_history(path):
    with open(path, newline='', encoding='utf-8') as hfile:
        reader = csv.DictReader(hfile)
        return [EpochMetrics(int(row['epoch']), *[
            float(row[field]) for field in HISTORY_FIELDS[1:]])
                for row in reader]


def window_means(values, window=10):
    """Means of consecutive non-overlapping windows (last one partial)"""
    values = np.asarray(values, dtype=np.float64)
    return [float(values[start:start + window].mean())
            for start in range(0, len(values), window)]
