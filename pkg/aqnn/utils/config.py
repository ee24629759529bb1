#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Configuration lookup: flags > AQNN_* env vars > aqnn.yaml."""

import logging
import os

import yaml

from aqnn.utils import constants
from aqnn.utils import env

LOGGER = logging.getLogger(__name__)


def get_aqnn_config(filename, default):
    """Search aqnn configs (i.e. aqnn.yaml, checks.yaml, logging.ini)"""
    for path in constants.AQNN_PATHES:
        abspath = os.path.abspath(os.path.expanduser(path))
        if os.path.isfile(os.path.join(abspath, filename)):
            return os.path.join(abspath, filename)
    return default


def load(filename=None):
    """Load the YAML configuration holding the built-in defaults.

    Args:
        filename: explicit path, else the first aqnn.yaml found in
            AQNN_PATHES, else the packaged one.

    Returns:
        the configuration as a dict of sections
    """
    path = filename or get_aqnn_config(
        constants.CONFIG_FILE, constants.CONFIG_FILE_DEFAULT)
    with open(path, encoding='utf-8') as cfile:
        conf = yaml.safe_load(cfile) or {}
    LOGGER.debug("Configuration loaded from %s", path)
    return conf


def resolve(flag, env_var, default, cast=str):
    """Apply the precedence flag > environment > configuration file.

    Args:
        flag: value given on the command line (None if unset)
        env_var: name of the AQNN_* variable (None if not applicable)
        default: value from aqnn.yaml
        cast: conversion applied to the environment string

    Raises:
        ValueError if the environment value cannot be converted
    """
    if flag is not None:
        return flag
    if env_var and env.get(env_var) is not None:
        return cast(env.get(env_var))
    return default
