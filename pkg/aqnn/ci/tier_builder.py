#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""TierBuilder class to parse the checks description file"""

import re

import yaml

from aqnn.ci import tier_handler
from aqnn.utils import env


class TierBuilder():
    # pylint: disable=missing-docstring

    def __init__(self, checks_file):
        self.checks_file = checks_file
        self.dic_tier_array = None
        self.tier_objects = []
        self.generate_tiers()

    def read_checks_yaml(self):
        with open(self.checks_file, encoding='utf-8') as cfile:
            checks_yaml = yaml.safe_load(cfile)
        self.dic_tier_array = list(checks_yaml.get('tiers', []))

    @staticmethod
    def dependencies_met(dic_check):
        """Each dependency maps an env var to a regex its value must
        match"""
        for dependency in dic_check.get('dependencies') or []:
            for kenv, regex in dependency.items():
                if not re.search(regex, env.get(kenv) or ''):
                    return False
        return True

    def generate_tiers(self):
        if self.dic_tier_array is None:
            self.read_checks_yaml()
        del self.tier_objects[:]
        for dic_tier in self.dic_tier_array:
            tier = tier_handler.Tier(
                name=dic_tier['name'],
                description=dic_tier.get('description', ''))
            for dic_check in dic_tier['checks']:
                check = tier_handler.Check(
                    name=dic_check['case_name'],
                    enabled=dic_check.get('enabled', True),
                    criteria=dic_check.get('criteria', 100),
                    blocking=dic_check.get('blocking', False),
                    description=dic_check.get('description', ''))
                if check.enabled and self.dependencies_met(dic_check):
                    tier.add_check(check)
                else:
                    check.skipped = True
                    tier.skip_check(check)
            self.tier_objects.append(tier)

    def get_tiers(self):
        return self.tier_objects

    def get_tier_names(self):
        return [tier.name for tier in self.tier_objects]

    def get_tier(self, tier_name):
        for tier in self.tier_objects:
            if tier.name == tier_name:
                return tier
        return None

    def get_tier_name(self, check_name):
        for tier in self.tier_objects:
            if tier.is_check(check_name):
                return tier.name
        return None

    def get_check(self, check_name):
        for tier in self.tier_objects:
            if tier.is_check(check_name):
                return tier.get_check(check_name)
        return None

    def get_dict(self, check_name):
        """Return the raw checks.yaml block of a check"""
        for dic_tier in self.dic_tier_array:
            for dic_check in dic_tier['checks']:
                if dic_check['case_name'] == check_name:
                    return dic_check
        return None

    def __str__(self):
        return '\n'.join(str(tier) for tier in self.tier_objects)
