#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

""" The acceptance campaign behind `aqnn verify`:
1) Parses aqnn/ci/checks.yaml to select the check(s) to be run
2) Runs every selected check and dumps its details
3) Returns the overall status
"""

import enum
import logging
import os
import textwrap

import prettytable
from stevedore import driver

from aqnn.ci import tier_builder
from aqnn.core import testcase
from aqnn.utils import config
from aqnn.utils import constants
from aqnn.utils import env

LOGGER = logging.getLogger('aqnn.ci.run_checks')

NAMESPACE = 'aqnn.check'


class Result(enum.Enum):
    """The overall result in enumerated type"""
    # pylint: disable=too-few-public-methods
    EX_OK = os.EX_OK
    EX_ERROR = -1


class BlockingCheckFailed(Exception):
    """Exception when a blocking check fails"""


class Runner():
    """Runner class"""

    def __init__(self, checks_file=None):
        self.executed_checks = {}
        self.overall_result = Result.EX_OK
        self.tiers = tier_builder.TierBuilder(
            checks_file or config.get_aqnn_config(
                constants.CHECKS_DESCRIPTION,
                constants.CHECKS_DESCRIPTION_DEFAULT))

    def get_run_dict(self, check_name):
        """Obtain the 'run' block of the check from checks.yaml"""
        dic_check = self.tiers.get_dict(check_name)
        if not dic_check:
            LOGGER.error("Cannot get %s's config options", check_name)
            return None
        return dic_check.get('run')

    def run_check(self, check):
        """Run one check"""
        if not check.enabled or check.skipped:
            msg = prettytable.PrettyTable(
                header_style='upper', padding_width=5,
                field_names=['check', 'project', 'duration', 'result'])
            msg.add_row([check.name, 'aqnn', "00:00", "SKIP"])
            LOGGER.info("Check result:\n\n%s\n", msg)
            return testcase.TestCase.EX_TESTCASE_SKIPPED
        result = testcase.TestCase.EX_TESTCASE_FAILED
        run_dict = self.get_run_dict(check.name)
        if not run_dict:
            raise ValueError(f"No run block for the check {check.name}")
        try:
            LOGGER.info("Loading check '%s'...", check.name)
            check_case = driver.DriverManager(
                namespace=NAMESPACE,
                name=run_dict['name'],
                invoke_on_load=True,
                invoke_kwds=self.tiers.get_dict(check.name)).driver
            self.executed_checks[check.name] = check_case
            check_case.check_requirements()
            if check_case.is_skipped:
                LOGGER.info("Skipping check '%s'...", check.name)
                LOGGER.info("Check result:\n\n%s\n", check_case)
                return testcase.TestCase.EX_TESTCASE_SKIPPED
            LOGGER.info("Running check '%s'...", check.name)
            check_case.run(**run_dict.get('args', {}))
            result = check_case.is_successful()
            LOGGER.info("Check result:\n\n%s\n", check_case)
            check_case.dump_details()
            check_case.clean()
        except Exception:  # pylint: disable=broad-except
            LOGGER.exception(
                "\n\nPlease fix the check %s.\n"
                "All exceptions should be caught by the check instead!\n\n",
                check.name)
        return result

    def run_tier(self, tier):
        """Run one tier"""
        checks = tier.get_checks()
        if not checks:
            LOGGER.info("There are no runnable checks in the tier %s",
                        tier.name)
            return self.overall_result
        for check in checks:
            result = self.run_check(check)
            if result == testcase.TestCase.EX_TESTCASE_FAILED:
                LOGGER.error("The check '%s' failed.", check.name)
                self.overall_result = Result.EX_ERROR
                if check.blocking:
                    raise BlockingCheckFailed(
                        f"The check {check.name} failed and is blocking")
        return self.overall_result

    def run_all(self):
        """Run all available checks"""
        msg = prettytable.PrettyTable(
            header_style='upper', padding_width=5,
            field_names=['tiers', 'description', 'checks'])
        for tier in self.tiers.get_tiers():
            msg.add_row([tier.name,
                         textwrap.fill(tier.description, width=40),
                         textwrap.fill(' '.join(tier.get_check_names()),
                                       width=40)])
        LOGGER.info("CHECKS TO BE EXECUTED:\n\n%s\n", msg)
        for tier in self.tiers.get_tiers():
            self.run_tier(tier)

    def is_known(self, name):
        return name == 'all' or bool(
            self.tiers.get_tier(name) or self.tiers.get_check(name))

    def main(self, test='all'):
        """Entry point of class Runner"""
        LOGGER.info("Environment:\n\n%s\n", env.string())
        try:
            if self.tiers.get_tier(test):
                self.run_tier(self.tiers.get_tier(test))
            elif self.tiers.get_check(test):
                if self.run_check(self.tiers.get_check(test)) == (
                        testcase.TestCase.EX_TESTCASE_FAILED):
                    LOGGER.error("The check '%s' failed.", test)
                    self.overall_result = Result.EX_ERROR
            elif test == 'all':
                self.run_all()
            else:
                LOGGER.error("Unknown check or tier '%s'", test)
                LOGGER.debug("Available tiers are:\n\n%s", self.tiers)
                return Result.EX_ERROR
        except BlockingCheckFailed:
            pass
        except Exception:  # pylint: disable=broad-except
            LOGGER.exception("Failures when running check(s)")
            self.overall_result = Result.EX_ERROR
        if not self.tiers.get_check(test):
            self.summary(self.tiers.get_tier(test))
        LOGGER.info("Execution exit value: %s", self.overall_result)
        return self.overall_result

    def summary(self, tier=None):
        """Log the PASS/FAIL/SKIP table of the campaign"""
        msg = prettytable.PrettyTable(
            header_style='upper', padding_width=5,
            field_names=['check', 'tier', 'duration', 'result'])
        tiers = [tier] if tier else self.tiers.get_tiers()
        for each_tier in tiers:
            for check in each_tier.get_checks():
                try:
                    check_case = self.executed_checks[check.name]
                except KeyError:
                    msg.add_row([check.name, each_tier.name, "00:00",
                                 "SKIP"])
                else:
                    if check_case.is_skipped:
                        result = 'SKIP'
                    else:
                        result = 'PASS' if (check_case.is_successful(
                            ) == check_case.EX_OK) else 'FAIL'
                    msg.add_row([check_case.case_name, each_tier.name,
                                 check_case.get_duration(), result])
            for check in each_tier.get_skipped_checks():
                msg.add_row([check.name, each_tier.name, "00:00", "SKIP"])
        LOGGER.info("aqnn report:\n\n%s\n", msg)
        return msg
