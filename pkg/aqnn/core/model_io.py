#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Versioned binary model files.

Layout, little-endian throughout:

    magic b'AQNN' | version u16 | descriptor length u32 | descriptor |
    mean 6 x f32 | std 6 x f32 | parameter count u32 | parameters f32 |
    CRC-32 u32

The descriptor is a sequence of layer records, a kind byte followed by
u32 shape fields (input: length, channels; conv1d: filters,
kernel_size, in_channels; dense: in_dim, out_dim; none for relu,
flatten and softmax). The CRC covers every byte after the descriptor
length field, up to the checksum itself.
"""

import logging
import struct
import zlib

import numpy as np

from aqnn.core import data
from aqnn.core import nn
from aqnn.utils import exceptions

MAGIC = b'AQNN'
FORMAT_VERSION = 1
SIZE_CEILING = 114688

_HEADER = struct.Struct('<4sHI')
_KIND = struct.Struct('<B')
_U32 = struct.Struct('<I')
_FIELDS = {
    nn.INPUT: ('length', 'channels'),
    nn.CONV1D: ('filters', 'kernel_size', 'in_channels'),
    nn.RELU: (),
    nn.FLATTEN: (),
    nn.DENSE: ('in_dim', 'units'),
    nn.SOFTMAX: ()}
_NAMES = {
    nn.INPUT: 'input', nn.CONV1D: 'conv1d', nn.RELU: 'relu',
    nn.FLATTEN: 'flatten', nn.DENSE: 'dense', nn.SOFTMAX: 'softmax'}
_KINDS = {name: kind for kind, name in _NAMES.items()}
_NORM_BYTES = 2 * data.N_READINGS * 4

LOGGER = logging.getLogger(__name__)


def _encode_descriptor(net):
    chunks = []
    for record in net.describe():
        kind = _KINDS[record['layer']]
        chunks.append(_KIND.pack(kind))
        for field in _FIELDS[kind]:
            chunks.append(_U32.pack(record[field]))
    return b''.join(chunks)


def _decode_descriptor(blob):
    arch = []
    offset = 0
    while offset < len(blob):
        kind = blob[offset]
        offset += 1
        if kind not in _FIELDS:
            raise exceptions.ModelFormatError(f"unknown layer kind {kind}")
        record = {'layer': _NAMES[kind]}
        for field in _FIELDS[kind]:
            if offset + _U32.size > len(blob):
                raise exceptions.ModelCorruptionError("truncated descriptor")
            record[field] = _U32.unpack_from(blob, offset)[0]
            offset += _U32.size
        arch.append(record)
    return arch


def encode_model(net, norm):
    """Serialize a network and its normalization statistics to bytes.

    Raises:
        InvalidArgumentError on a network without layers or failing
        shape validation
    """
    if not net.layers:
        raise exceptions.InvalidArgumentError("cannot save an empty network")
    net.validate()
    descriptor = _encode_descriptor(net)
    params = net.get_params()
    body = b''.join([
        descriptor,
        norm.mean.astype('<f4').tobytes(),
        norm.std.astype('<f4').tobytes(),
        _U32.pack(params.size),
        params.astype('<f4').tobytes()])
    head = _HEADER.pack(MAGIC, FORMAT_VERSION, len(descriptor))
    crc = zlib.crc32(body) & 0xffffffff
    return head + body + _U32.pack(crc)


def decode_model(blob):
    """Rebuild (Network, NormStats) from bytes written by encode_model.

    The checksum is verified before any field of the payload is used.

    Raises:
        ModelFormatError, ModelVersionError, ModelCorruptionError
    """
    if blob[:len(MAGIC)] != MAGIC:
        if len(blob) < len(MAGIC) and MAGIC.startswith(blob):
            raise exceptions.ModelCorruptionError("truncated model file")
        raise exceptions.ModelFormatError("not an aqnn model file")
    if len(blob) < _HEADER.size:
        raise exceptions.ModelCorruptionError("truncated header")
    _, version, desc_len = _HEADER.unpack_from(blob)
    if version > FORMAT_VERSION:
        raise exceptions.ModelVersionError(
            f"format version {version} is newer than {FORMAT_VERSION}")
    minimum = _HEADER.size + desc_len + _NORM_BYTES + 2 * _U32.size
    if len(blob) < minimum:
        raise exceptions.ModelCorruptionError(
            f"truncated model file ({len(blob)} bytes)")
    body = blob[_HEADER.size:-_U32.size]
    stored_crc = _U32.unpack_from(blob, len(blob) - _U32.size)[0]
    if zlib.crc32(body) & 0xffffffff != stored_crc:
        raise exceptions.ModelCorruptionError("checksum mismatch")
    arch = _decode_descriptor(body[:desc_len])
    offset = desc_len
    stats = np.frombuffer(body, dtype='<f4', count=2 * data.N_READINGS,
                          offset=offset)
    offset += _NORM_BYTES
    count = _U32.unpack_from(body, offset)[0]
    offset += _U32.size
    if len(body) - offset != 4 * count:
        raise exceptions.ModelCorruptionError(
            f"{count} parameters announced, {(len(body) - offset) / 4} "
            f"stored")
    params = np.frombuffer(body, dtype='<f4', count=count, offset=offset)
    try:
        net = nn.build_network(arch)
        norm = data.NormStats(stats[:data.N_READINGS],
                              stats[data.N_READINGS:])
        net.set_params(params.astype(nn.DTYPE))
    except exceptions.InvalidArgumentError as exc:
        raise exceptions.ModelFormatError(
            f"inconsistent model description: {exc}") from exc
    return net, norm


def save_model(net, norm, path):
    """Write the model file.

    Returns:
        the number of bytes written

    Raises:
        InvalidArgumentError on an empty network
        OSError if path is not writable
    """
    blob = encode_model(net, norm)
    with open(path, 'wb') as mfile:
        mfile.write(blob)
    if len(blob) > SIZE_CEILING:
        LOGGER.warning("%s weighs %d bytes, above the %d bytes ceiling",
                       path, len(blob), SIZE_CEILING)
    LOGGER.info("Model saved to %s (%d parameters, %d bytes)",
                path, nn.count_params(net), len(blob))
    return len(blob)


def load_model(path):
    """Read a model file.

    Returns:
        (Network, NormStats)

    Raises:
        OSError if the file cannot be read
        ModelFormatError, ModelVersionError, ModelCorruptionError
    """
    with open(path, 'rb') as mfile:
        blob = mfile.read()
    net, norm = decode_model(blob)
    LOGGER.debug("Model loaded from %s\n%s", path, net)
    return net, norm
