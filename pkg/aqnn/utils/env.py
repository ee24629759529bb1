#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

# pylint: disable=missing-docstring

import os
import textwrap

import prettytable

from aqnn.utils import constants

INPUTS = {
    'AQNN_DEBUG': 'false',
    'AQNN_RESULTS_DIR': constants.RESULTS_DIR_DEFAULT,
    'AQNN_DATA': None,
    'AQNN_MODEL': None,
    'AQNN_SEED': None,
    'AQNN_HOST': None,
    'AQNN_PORT': None,
    'AQNN_ALERT_THRESHOLD': None,
    'AQNN_ALERT_CONSECUTIVE': None
}


def get(env_var):
    # defaults to None if env_var is not found
    return os.environ.get(env_var, INPUTS.get(env_var))


def results_dir():
    return os.path.abspath(os.path.expanduser(get('AQNN_RESULTS_DIR')))


def string():
    msg = prettytable.PrettyTable(
        header_style='upper', padding_width=5,
        field_names=['env var', 'value'])
    for env_var in INPUTS:
        msg.add_row([env_var, textwrap.fill(get(env_var), width=50) if get(
            env_var) else ''])
    return msg
