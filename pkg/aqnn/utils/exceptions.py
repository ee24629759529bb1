#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Exceptions shared by the aqnn modules.

The command line maps any AqnnError (and OSError) to the data/model
error exit code.
"""


class AqnnError(Exception):
    """Base class of all aqnn errors"""


class InvalidArgumentError(AqnnError, ValueError):
    """Invalid shapes, lengths, ratios or hyperparameters"""


class StateError(AqnnError):
    """Operation called in the wrong state (e.g. no forward cache)"""


class ParseError(AqnnError):
    """Malformed dataset row"""

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class LabeledDataError(ParseError):
    """Labeled rows given where unlabeled readings are expected"""


class ModelFormatError(AqnnError):
    """Not an aqnn model file"""


class ModelVersionError(AqnnError):
    """Model file written by a newer format version"""


class ModelCorruptionError(AqnnError):
    """Truncated model file or checksum mismatch"""


class NumericDivergenceError(AqnnError):
    """Non-finite loss during training"""

    def __init__(self, epoch, batch, loss):
        super().__init__(
            f"non-finite loss {loss} at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch
