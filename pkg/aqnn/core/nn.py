#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Numerical engine of the activity classifier.

A feature map is a numpy array shaped (length, channels); batches add a
leading axis, (batch, length, channels). Every operation accepts both
ranks and answers with the rank it was given. Parameters and activations
are float32, losses are accumulated in float64.

The canonical flat parameter ordering is layer order, then weights before
bias, each array flattened row-major. Adam state and model files rely on
it.
"""

import copy
import logging
import math

import numpy as np
import prettytable

from aqnn.utils import exceptions

DTYPE = np.float32
N_CLASSES = 4

INPUT, CONV1D, RELU, FLATTEN, DENSE, SOFTMAX = range(6)

REFERENCE_CNN = [
    {'layer': 'input', 'length': 6, 'channels': 1},
    {'layer': 'conv1d', 'filters': 16, 'kernel_size': 3},
    {'layer': 'relu'},
    {'layer': 'conv1d', 'filters': 24, 'kernel_size': 3},
    {'layer': 'relu'},
    {'layer': 'flatten'},
    {'layer': 'dense', 'units': 28},
    {'layer': 'relu'},
    {'layer': 'dense', 'units': N_CLASSES},
    {'layer': 'softmax'}]

LOGGER = logging.getLogger(__name__)


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not isinstance(value, (int, np.integer)) or value < 1:
            raise exceptions.InvalidArgumentError(
                f"{name} must be a positive integer, got {value!r}")


def _as_batch(inputs, rank):
    """Return (array with batch axis, True if a batch axis was added)"""
    array = np.asarray(inputs)
    if array.ndim == rank:
        return array[np.newaxis], True
    if array.ndim == rank + 1:
        return array, False
    raise exceptions.InvalidArgumentError(
        f"expected rank {rank} or {rank + 1} input, got shape {array.shape}")


def _unbatch(array, single):
    return array[0] if single else array


class Conv1D():
    """1D convolution with same-zero padding, stride 1."""

    kind = CONV1D
    name = 'conv1d'

    def __init__(self, in_channels, filters, kernel_size=3, dtype=DTYPE):
        _check_positive(
            in_channels=in_channels, filters=filters, kernel_size=kernel_size)
        self.in_channels = int(in_channels)
        self.filters = int(filters)
        self.kernel_size = int(kernel_size)
        self.weights = np.zeros(
            (self.filters, self.kernel_size, self.in_channels), dtype=dtype)
        self.bias = np.zeros(self.filters, dtype=dtype)

    def params(self):
        return [self.weights, self.bias]

    def fans(self):
        return (self.kernel_size * self.in_channels,
                self.kernel_size * self.filters)

    def describe(self):
        return {'layer': self.name, 'in_channels': self.in_channels,
                'filters': self.filters, 'kernel_size': self.kernel_size}

    def output_shape(self, shape):
        if len(shape) != 2:
            raise exceptions.InvalidArgumentError(
                f"conv1d expects a (length, channels) input, got {shape}")
        if shape[1] != self.in_channels:
            raise exceptions.InvalidArgumentError(
                f"conv1d in_channels: expected {self.in_channels}, "
                f"got {shape[1]}")
        return (shape[0], self.filters)

    def forward(self, inputs):
        return conv1d_forward(inputs, self)

    def backward(self, grad_out, cached_input):
        grad_input, grad_weights, grad_bias = conv1d_backward(
            grad_out, cached_input, self)
        return grad_input, [grad_weights, grad_bias]


class Dense():
    """Fully connected layer, weights stored in_dim x out_dim."""

    kind = DENSE
    name = 'dense'

    def __init__(self, in_dim, out_dim, dtype=DTYPE):
        _check_positive(in_dim=in_dim, out_dim=out_dim)
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self.weights = np.zeros((self.in_dim, self.out_dim), dtype=dtype)
        self.bias = np.zeros(self.out_dim, dtype=dtype)

    def params(self):
        return [self.weights, self.bias]

    def fans(self):
        return (self.in_dim, self.out_dim)

    def describe(self):
        return {'layer': self.name, 'in_dim': self.in_dim,
                'units': self.out_dim}

    def output_shape(self, shape):
        if len(shape) != 1:
            raise exceptions.InvalidArgumentError(
                f"dense expects a flat input, got {shape}")
        if shape[0] != self.in_dim:
            raise exceptions.InvalidArgumentError(
                f"dense in_dim: expected {self.in_dim}, got {shape[0]}")
        return (self.out_dim,)

    def forward(self, inputs):
        return dense_forward(inputs, self)

    def backward(self, grad_out, cached_input):
        grad_input, grad_weights, grad_bias = dense_backward(
            grad_out, cached_input, self)
        return grad_input, [grad_weights, grad_bias]


class ReLU():
    # pylint: disable=missing-docstring,no-self-use

    kind = RELU
    name = 'relu'

    def params(self):
        return []

    def describe(self):
        return {'layer': self.name}

    def output_shape(self, shape):
        return shape

    def forward(self, inputs):
        return relu_forward(inputs)

    def backward(self, grad_out, cached_input):
        return relu_backward(grad_out, cached_input), []


class Flatten():
    # pylint: disable=missing-docstring,no-self-use

    kind = FLATTEN
    name = 'flatten'

    def params(self):
        return []

    def describe(self):
        return {'layer': self.name}

    def output_shape(self, shape):
        return (int(np.prod(shape)),)

    def forward(self, inputs):
        return inputs.reshape(inputs.shape[0], -1)

    def backward(self, grad_out, cached_input):
        return grad_out.reshape(cached_input.shape), []


class Softmax():
    """Output normalization; its gradient is fused with the loss."""
    # pylint: disable=no-self-use

    kind = SOFTMAX
    name = 'softmax'

    def params(self):
        return []

    def describe(self):
        return {'layer': self.name}

    def output_shape(self, shape):
        return shape

    def forward(self, inputs):
        return _softmax(inputs).astype(inputs.dtype)

    def backward(self, grad_out, cached_input):
        raise exceptions.StateError(
            "softmax is only differentiated through softmax_cross_entropy")


LAYERS = {cls.name: cls for cls in (Conv1D, ReLU, Flatten, Dense, Softmax)}


class Network():
    """Ordered layer stack with the caches of the last network_forward.

    A network is owned by a single trainer. Once trained, call
    clear_cache() and use network_predict(), which never writes to the
    instance, to share it between threads.
    """

    def __init__(self, layers=(), input_shape=None):
        self.layers = list(layers)
        self.input_shape = tuple(input_shape) if input_shape else None
        self.cache = None

    @property
    def dtype(self):
        for param in self.params():
            return param.dtype
        return np.dtype(DTYPE)

    def params(self):
        """Parameter arrays in canonical order (views, not copies)"""
        return [param for layer in self.layers for param in layer.params()]

    def get_params(self):
        params = self.params()
        if not params:
            return np.zeros(0, dtype=DTYPE)
        return np.concatenate([param.ravel() for param in params])

    def set_params(self, flat):
        flat = np.asarray(flat)
        if flat.ndim != 1 or flat.size != count_params(self):
            raise exceptions.InvalidArgumentError(
                f"expected {count_params(self)} parameters, got {flat.size}")
        offset = 0
        for param in self.params():
            param[...] = flat[offset:offset + param.size].reshape(
                param.shape)
            offset += param.size

    def validate(self):
        """Check shape compatibility layer after layer.

        Returns:
            the output shape

        Raises:
            InvalidArgumentError
        """
        if not self.input_shape:
            raise exceptions.InvalidArgumentError("no input shape")
        if not self.layers:
            raise exceptions.InvalidArgumentError("no layer")
        shape = self.input_shape
        for layer in self.layers:
            shape = layer.output_shape(shape)
        if shape != (N_CLASSES,):
            raise exceptions.InvalidArgumentError(
                f"final output must be ({N_CLASSES},), got {shape}")
        return shape

    def describe(self):
        """Architecture descriptor with explicit shapes"""
        length, channels = self.input_shape
        return [{'layer': 'input', 'length': length,
                 'channels': channels}] + [
                     layer.describe() for layer in self.layers]

    def forward(self, inputs):
        return network_forward(self, inputs)

    def predict(self, inputs):
        return network_predict(self, inputs)

    def backward(self, target):
        """Return (mean loss, flat gradient) of the cached forward pass"""
        return _backpropagate(self, target)

    def clear_cache(self):
        self.cache = None

    def astype(self, dtype):
        """Return an independent copy whose parameters are cast to dtype"""
        clone = copy.deepcopy(self)
        clone.cache = None
        for layer in clone.layers:
            if layer.params():
                layer.weights = layer.weights.astype(dtype)
                layer.bias = layer.bias.astype(dtype)
        return clone

    def __str__(self):
        msg = prettytable.PrettyTable(
            header_style='upper', padding_width=5,
            field_names=['layer', 'output shape', 'params'])
        shape = self.input_shape
        msg.add_row(['input', shape, 0])
        for layer in self.layers:
            shape = layer.output_shape(shape)
            msg.add_row([layer.name, shape,
                         sum(param.size for param in layer.params())])
        msg.add_row(['total', '', count_params(self)])
        return msg.get_string()


def conv1d_forward(inputs, layer):
    """Same-zero padded cross-correlation.

    out[i][f] = bias[f] + sum_{k,c} w[f][k][c] * x[i + k - kernel//2][c],
    out-of-range x being 0. Terms are accumulated k then c ascending,
    padding terms included.

    Raises:
        InvalidArgumentError on channel mismatch
    """
    x, single = _as_batch(inputs, 2)
    if x.shape[2] != layer.in_channels:
        raise exceptions.InvalidArgumentError(
            f"conv1d in_channels: expected {layer.in_channels}, "
            f"got {x.shape[2]}")
    dtype = np.result_type(x.dtype, layer.weights.dtype)
    batch, length, channels = x.shape
    pad = layer.kernel_size // 2
    xpad = np.zeros(
        (batch, length + layer.kernel_size - 1, channels), dtype=dtype)
    xpad[:, pad:pad + length, :] = x
    out = np.empty((batch, length, layer.filters), dtype=dtype)
    out[...] = layer.bias
    for k in range(layer.kernel_size):
        for c in range(channels):
            out += xpad[:, k:k + length, c, np.newaxis] * layer.weights[:, k, c]
    return _unbatch(out, single)


def conv1d_backward(grad_out, cached_input, layer):
    """Return (grad_input, grad_weights, grad_bias) of conv1d_forward.

    Gradients are summed over the batch axis.

    Raises:
        InvalidArgumentError on shape mismatch
    """
    grad, single = _as_batch(grad_out, 2)
    x, _ = _as_batch(cached_input, 2)
    expected = (x.shape[0], x.shape[1], layer.filters)
    if x.shape[2] != layer.in_channels or grad.shape != expected:
        raise exceptions.InvalidArgumentError(
            f"conv1d grad_out: expected {expected}, got {grad.shape}")
    length = x.shape[1]
    pad = layer.kernel_size // 2
    xpad = np.zeros(
        (x.shape[0], length + layer.kernel_size - 1, x.shape[2]),
        dtype=x.dtype)
    xpad[:, pad:pad + length, :] = x
    grad_weights = np.empty_like(layer.weights)
    grad_xpad = np.zeros_like(xpad, dtype=grad.dtype)
    for k in range(layer.kernel_size):
        grad_weights[:, k, :] = np.einsum(
            'bif,bic->fc', grad, xpad[:, k:k + length, :])
        grad_xpad[:, k:k + length, :] += grad @ layer.weights[:, k, :]
    grad_bias = grad.sum(axis=(0, 1)).astype(layer.bias.dtype)
    grad_input = grad_xpad[:, pad:pad + length, :]
    return _unbatch(grad_input, single), grad_weights, grad_bias


def dense_forward(inputs, layer):
    """out[j] = bias[j] + sum_i w[i][j] * x[i]

    Raises:
        InvalidArgumentError on length mismatch
    """
    x, single = _as_batch(inputs, 1)
    if x.shape[1] != layer.in_dim:
        raise exceptions.InvalidArgumentError(
            f"dense in_dim: expected {layer.in_dim}, got {x.shape[1]}")
    return _unbatch(x @ layer.weights + layer.bias, single)


def dense_backward(grad_out, cached_input, layer):
    """Return (grad_input, grad_weights, grad_bias) of dense_forward.

    Raises:
        InvalidArgumentError on shape mismatch
    """
    grad, single = _as_batch(grad_out, 1)
    x, _ = _as_batch(cached_input, 1)
    if (x.shape[1] != layer.in_dim or
            grad.shape != (x.shape[0], layer.out_dim)):
        raise exceptions.InvalidArgumentError(
            f"dense grad_out: expected {(x.shape[0], layer.out_dim)}, "
            f"got {grad.shape}")
    grad_weights = (x.T @ grad).astype(layer.weights.dtype)
    grad_bias = grad.sum(axis=0).astype(layer.bias.dtype)
    grad_input = grad @ layer.weights.T
    return _unbatch(grad_input, single), grad_weights, grad_bias


def relu_forward(inputs):
    inputs = np.asarray(inputs)
    return np.maximum(inputs, 0).astype(inputs.dtype, copy=False)


def relu_backward(grad_out, cached_input):
    grad_out = np.asarray(grad_out)
    return grad_out * (np.asarray(cached_input) > 0)


def _softmax(logits):
    """Max-subtracted softmax over the last axis, computed in float64"""
    shifted = np.asarray(logits, dtype=np.float64)
    shifted = shifted - shifted.max(axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits, target):
    """Fused softmax and categorical cross-entropy.

    Args:
        logits: vector (n_classes,) or batch (batch, n_classes)
        target: class index, or one index per batch row

    Returns:
        (probs, loss, grad_logits). loss is the mean cross-entropy as a
        Python float. grad_logits is probs - onehot(target) for a single
        vector, and the gradient of the mean loss for a batch.

    Raises:
        InvalidArgumentError if a target is not a valid class index
    """
    logits = np.asarray(logits)
    scores, single = _as_batch(logits, 1)
    targets = np.atleast_1d(np.asarray(target))
    n_classes = scores.shape[1]
    if targets.dtype.kind not in 'iu' or targets.shape != scores.shape[:1]:
        raise exceptions.InvalidArgumentError(
            f"expected {scores.shape[0]} integer target(s), got {target!r}")
    if np.any(targets < 0) or np.any(targets >= n_classes):
        raise exceptions.InvalidArgumentError(
            f"target {target!r} outside 0..{n_classes - 1}")
    shifted = scores.astype(np.float64)
    shifted = shifted - shifted.max(axis=1, keepdims=True)
    exps = np.exp(shifted)
    totals = exps.sum(axis=1)
    rows = np.arange(scores.shape[0])
    loss = float(np.mean(np.log(totals) - shifted[rows, targets]))
    probs = exps / totals[:, np.newaxis]
    grad = probs.copy()
    grad[rows, targets] -= 1.0
    if not single:
        grad /= scores.shape[0]
    dtype = logits.dtype if logits.dtype.kind == 'f' else DTYPE
    return (_unbatch(probs.astype(dtype), single), loss,
            _unbatch(grad.astype(dtype), single))


def _propagate(net, inputs, cache=None):
    """Forward pass; appends every layer input then the output to cache"""
    if not net.input_shape:
        raise exceptions.InvalidArgumentError("network has no input shape")
    x, single = _as_batch(inputs, len(net.input_shape))
    if x.shape[1:] != net.input_shape:
        raise exceptions.InvalidArgumentError(
            f"input shape {x.shape[1:]} does not match the network input "
            f"{net.input_shape}")
    x = x.astype(net.dtype, copy=False)
    if not np.all(np.isfinite(x)):
        raise exceptions.InvalidArgumentError("non-finite input value")
    for layer in net.layers:
        if cache is not None:
            cache.append(x)
        x = layer.forward(x)
    if cache is not None:
        cache.append(x)
    return _unbatch(x, single)


def network_forward(net, sample):
    """Forward pass populating the caches needed by network_backward.

    Returns:
        class probabilities, (4,) for a sample or (batch, 4) for a batch
    """
    cache = []
    net.cache = None
    output = _propagate(net, sample, cache)
    net.cache = cache
    return output


def network_predict(net, sample):
    """Forward pass that leaves the network untouched (thread-safe)"""
    return _propagate(net, sample)


def network_loss(net, sample, target):
    """Return (probs, mean cross-entropy) of a forward pass (thread-safe)"""
    cache = []
    _propagate(net, sample, cache)
    logits = cache[-2] if net.layers and isinstance(
        net.layers[-1], Softmax) else cache[-1]
    probs, loss, _ = softmax_cross_entropy(logits, target)
    return probs, loss


def _cached_logits(net):
    if net.cache is None:
        raise exceptions.StateError(
            "no forward cache: call network_forward first")
    if net.layers and isinstance(net.layers[-1], Softmax):
        return net.cache[-2], len(net.layers) - 2
    return net.cache[-1], len(net.layers) - 1


def _backpropagate(net, target):
    logits, last = _cached_logits(net)
    _, loss, grad = softmax_cross_entropy(logits, target)
    grads = []
    for index in range(last, -1, -1):
        grad, layer_grads = net.layers[index].backward(
            grad, net.cache[index])
        grads = layer_grads + grads
    if not grads:
        return loss, np.zeros(0, dtype=net.dtype)
    return loss, np.concatenate([item.ravel() for item in grads]).astype(
        net.dtype, copy=False)


def network_backward(net, target):
    """Gradient of the loss of the cached forward pass.

    For a batch, the loss is the mean over the batch.

    Returns:
        flat gradient in canonical parameter order

    Raises:
        StateError if network_forward was not called
    """
    return _backpropagate(net, target)[1]


def build_network(arch, dtype=DTYPE):
    """Build a zero-initialized network from an architecture descriptor.

    The descriptor is a list of dicts, the first one being
    {'layer': 'input', 'length': ..., 'channels': ...}. Input dimensions
    of conv1d/dense layers are inferred; when given explicitly
    ('in_channels', 'in_dim') they must match.

    Raises:
        InvalidArgumentError
    """
    if not arch or arch[0].get('layer') != 'input':
        raise exceptions.InvalidArgumentError(
            "architecture must start with an input record")
    _check_positive(
        length=arch[0].get('length'), channels=arch[0].get('channels'))
    input_shape = (arch[0]['length'], arch[0]['channels'])
    shape = input_shape
    layers = []
    for record in arch[1:]:
        kind = record.get('layer')
        if kind == 'conv1d':
            if len(shape) != 2:
                raise exceptions.InvalidArgumentError(
                    f"conv1d expects a (length, channels) input, got {shape}")
            layer = Conv1D(record.get('in_channels', shape[1]),
                           record.get('filters'),
                           record.get('kernel_size', 3), dtype=dtype)
        elif kind == 'dense':
            layer = Dense(record.get('in_dim', int(np.prod(shape))),
                          record.get('units'), dtype=dtype)
        elif kind in LAYERS:
            layer = LAYERS[kind]()
        else:
            raise exceptions.InvalidArgumentError(f"unknown layer {kind!r}")
        shape = layer.output_shape(shape)
        layers.append(layer)
    net = Network(layers, input_shape)
    net.validate()
    return net


def init_network(arch, seed):
    """Build and initialize a network.

    Weights of layers followed by a ReLU are He-uniform, the others
    Glorot-uniform; biases are zero. Draws follow the canonical
    parameter order from a PCG64 generator seeded with seed.
    """
    net = build_network(arch)
    rng = np.random.default_rng(seed)
    for index, layer in enumerate(net.layers):
        if not layer.params():
            continue
        fan_in, fan_out = layer.fans()
        if (index + 1 < len(net.layers) and
                isinstance(net.layers[index + 1], ReLU)):
            limit = math.sqrt(6.0 / fan_in)
        else:
            limit = math.sqrt(6.0 / (fan_in + fan_out))
        layer.weights[...] = rng.uniform(
            -limit, limit, size=layer.weights.shape)
        layer.bias[...] = 0
    LOGGER.debug("Network initialized with seed %s\n%s", seed, net)
    return net


def count_params(net):
    return int(sum(param.size for param in net.params()))


def _relu_masks(net):
    return [net.cache[index] > 0 for index, layer in enumerate(net.layers)
            if isinstance(layer, ReLU)]


def _masks_equal(first, second):
    return all(np.array_equal(a, b) for a, b in zip(first, second))


def grad_check(net, sample, target, eps=1e-3, max_params=None, seed=0):
    """Compare network_backward with central finite differences.

    Both run on a float64 copy of the network, so the 32-bit parameter
    values are used exactly. Parameters whose perturbation flips a ReLU
    mask are skipped. The relative error of one parameter is
    |a - n| / max(|a|, |n|, eps).

    Args:
        max_params: check a random subsample of that many parameters

    Returns:
        the worst relative error (0.0 if nothing was checked)
    """
    if eps <= 0:
        raise exceptions.InvalidArgumentError(f"eps must be > 0, got {eps}")
    work = net.astype(np.float64)
    network_forward(work, sample)
    analytic = np.asarray(network_backward(work, target), dtype=np.float64)
    masks = _relu_masks(work)
    flat = work.get_params()
    indices = np.arange(flat.size)
    if max_params is not None and max_params < flat.size:
        indices = np.sort(np.random.default_rng(seed).choice(
            flat.size, size=max_params, replace=False))
    worst = 0.0
    skipped = 0
    for index in indices:
        original = flat[index]
        losses = []
        kink = False
        for delta in (eps, -eps):
            flat[index] = original + delta
            work.set_params(flat)
            network_forward(work, sample)
            logits, _ = _cached_logits(work)
            losses.append(softmax_cross_entropy(logits, target)[1])
            kink = kink or not _masks_equal(masks, _relu_masks(work))
        flat[index] = original
        if kink:
            skipped += 1
            continue
        numeric = (losses[0] - losses[1]) / (2 * eps)
        error = abs(analytic[index] - numeric) / max(
            abs(analytic[index]), abs(numeric), eps)
        worst = max(worst, error)
    LOGGER.debug("Gradient check: %d parameters, %d skipped at a kink, "
                 "worst relative error %.3g", len(indices), skipped, worst)
    return worst
