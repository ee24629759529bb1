#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Adam optimizer over the flat parameter vector."""

import numpy as np

from aqnn.utils import exceptions

LEARNING_RATE = 0.001
BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-7


class AdamState():
    """First/second moment accumulators and step counter.

    Moments are kept in float64 whatever the parameter dtype.
    """

    def __init__(self, size, lr=LEARNING_RATE, beta1=BETA1, beta2=BETA2,
                 epsilon=EPSILON):
        # pylint: disable=too-many-arguments
        if lr <= 0 or epsilon <= 0:
            raise exceptions.InvalidArgumentError(
                f"lr and epsilon must be > 0, got {lr} and {epsilon}")
        if not 0 < beta1 < 1 or not 0 < beta2 < 1:
            raise exceptions.InvalidArgumentError(
                f"betas must be in (0, 1), got {beta1} and {beta2}")
        if size < 0:
            raise exceptions.InvalidArgumentError(f"negative size {size}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m = np.zeros(size, dtype=np.float64)
        self.v = np.zeros(size, dtype=np.float64)
        self.t = 0


def adam_step(params, grads, state):
    """Apply one bias-corrected Adam update.

    Args:
        params: flat parameter vector (left untouched)
        grads: flat gradient vector, same length
        state: AdamState updated in place (moments, t += 1)

    Returns:
        the updated parameters, in the dtype of params

    Raises:
        InvalidArgumentError on length mismatch
    """
    params = np.asarray(params)
    grads = np.asarray(grads, dtype=np.float64)
    if not params.shape == grads.shape == state.m.shape:
        raise exceptions.InvalidArgumentError(
            f"length mismatch: params {params.shape}, grads {grads.shape}, "
            f"state {state.m.shape}")
    state.t += 1
    state.m *= state.beta1
    state.m += (1.0 - state.beta1) * grads
    state.v *= state.beta2
    state.v += (1.0 - state.beta2) * (grads * grads)
    m_hat = state.m / (1.0 - state.beta1 ** state.t)
    v_hat = state.v / (1.0 - state.beta2 ** state.t)
    updated = params.astype(np.float64) - state.lr * m_hat / (
        np.sqrt(v_hat) + state.epsilon)
    return updated.astype(params.dtype)
