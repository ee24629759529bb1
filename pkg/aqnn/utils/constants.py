#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

# pylint: disable=missing-docstring

import os
import sys

PACKAGE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

AQNN_PATHES = [
    "~/.aqnn", "/etc/aqnn", os.path.join(sys.prefix + "/etc/aqnn")]

CONFIG_FILE = 'aqnn.yaml'
CONFIG_FILE_DEFAULT = os.path.join(PACKAGE_DIR, 'ci', CONFIG_FILE)

CHECKS_DESCRIPTION = 'checks.yaml'
CHECKS_DESCRIPTION_DEFAULT = os.path.join(
    PACKAGE_DIR, 'ci', CHECKS_DESCRIPTION)

RESULTS_DIR_DEFAULT = '~/.aqnn/results'
LOG_NAME = 'aqnn.log'
DEBUG_LOG_NAME = 'aqnn.debug.log'

INI_PATH_DEFAULT = os.path.join(PACKAGE_DIR, 'ci', 'logging.ini')
DEBUG_INI_PATH_DEFAULT = os.path.join(PACKAGE_DIR, 'ci', 'logging.debug.ini')
