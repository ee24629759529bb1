#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Naive reference implementations the engine is checked against."""

import math

import numpy as np


def naive_conv1d(inputs, weights, bias):
    """Triple loop over (position, filter, kernel tap x channel).

    Accumulates in the weights dtype, bias first then k and c ascending,
    out-of-range inputs counting as zero.

    Args:
        inputs: (length, channels)
        weights: (filters, kernel_size, channels)
        bias: (filters,)
    """
    length, channels = inputs.shape
    filters, kernel_size, _ = weights.shape
    dtype = weights.dtype.type
    pad = kernel_size // 2
    out = np.empty((length, filters), dtype=weights.dtype)
    for i in range(length):
        for f in range(filters):
            acc = dtype(bias[f])
            for k in range(kernel_size):
                j = i + k - pad
                for c in range(channels):
                    x = dtype(inputs[j, c]) if 0 <= j < length else dtype(0)
                    acc = dtype(acc + dtype(x * weights[f, k, c]))
            out[i, f] = acc
    return out


def brute_force_knn(features, labels, query, k):
    """Fully sort the training set by distance and vote"""
    ranked = sorted(
        (math.sqrt(sum((float(a) - float(b)) ** 2
                       for a, b in zip(row, query))), index)
        for index, row in enumerate(features))
    votes = {}
    summed = {}
    for distance, index in ranked[:k]:
        label = int(labels[index])
        votes[label] = votes.get(label, 0) + 1
        summed[label] = summed.get(label, 0.0) + distance
    return sorted(votes, key=lambda label: (
        -votes[label], summed[label], label))[0]
