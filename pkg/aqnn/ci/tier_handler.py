#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

# pylint: disable=missing-docstring

"""Tier and Check classes to wrap the checks description file"""

import textwrap

import prettytable


class Tier():

    def __init__(self, name, description=""):
        self.checks = []
        self.skipped_checks = []
        self.name = name
        self.description = description

    def add_check(self, check):
        self.checks.append(check)

    def skip_check(self, check):
        self.skipped_checks.append(check)

    def get_checks(self):
        return list(self.checks)

    def get_skipped_checks(self):
        return self.skipped_checks

    def get_check_names(self):
        return [check.name for check in self.checks]

    def get_check(self, check_name):
        for check in self.checks + self.skipped_checks:
            if check.name == check_name:
                return check
        return None

    def is_check(self, check_name):
        return self.get_check(check_name) is not None

    def __str__(self):
        msg = prettytable.PrettyTable(
            header_style='upper', padding_width=5,
            field_names=['tiers', 'description', 'checks'])
        msg.add_row(
            [self.name, textwrap.fill(self.description, width=40),
             textwrap.fill(' '.join(self.get_check_names()), width=40)])
        return msg.get_string()


class Check():
    # pylint: disable=too-few-public-methods

    def __init__(self, name, enabled=True, skipped=False, criteria=100,
                 blocking=False, description=""):
        # pylint: disable=too-many-arguments
        self.name = name
        self.enabled = enabled
        self.skipped = skipped
        self.criteria = criteria
        self.blocking = blocking
        self.description = description

    def __str__(self):
        msg = prettytable.PrettyTable(
            header_style='upper', padding_width=5,
            field_names=['check', 'description', 'criteria'])
        msg.add_row([self.name, textwrap.fill(self.description, width=40),
                     self.criteria])
        return msg.get_string()
