#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Define the parent class of all aqnn acceptance checks."""

import abc
from datetime import datetime
import json
import logging
import os

import prettytable

from aqnn.utils import env


class TestCase(metaclass=abc.ABCMeta):
    # pylint: disable=too-many-instance-attributes
    """Base model for a single acceptance check."""

    EX_OK = os.EX_OK
    """everything is OK"""

    EX_RUN_ERROR = os.EX_SOFTWARE
    """run() failed"""

    EX_DUMP_ERROR = os.EX_SOFTWARE - 1
    """dump_details() failed"""

    EX_TESTCASE_FAILED = os.EX_SOFTWARE - 2
    """results are false"""

    EX_TESTCASE_SKIPPED = os.EX_SOFTWARE - 3
    """requirements are unmet"""

    __logger = logging.getLogger(__name__)

    def __init__(self, **kwargs):
        self.details = {}
        self.project_name = kwargs.get('project_name', 'aqnn')
        self.case_name = kwargs.get('case_name', '')
        self.criteria = kwargs.get('criteria', 100)
        self.result = 0
        self.start_time = 0
        self.stop_time = 0
        self.is_skipped = False
        self.res_dir = os.path.join(env.results_dir(), self.case_name)

    def __str__(self):
        try:
            assert self.case_name
            if self.is_skipped:
                result = 'SKIP'
            else:
                result = 'PASS' if (self.is_successful(
                    ) == TestCase.EX_OK) else 'FAIL'
            msg = prettytable.PrettyTable(
                header_style='upper', padding_width=5,
                field_names=['check', 'project', 'duration', 'result'])
            msg.add_row([self.case_name, self.project_name,
                         self.get_duration(), result])
            return msg.get_string()
        except AssertionError:
            self.__logger.error("We cannot print invalid objects")
            return super().__str__()

    def get_duration(self):
        """Return the duration of the check.

        Returns:
            duration if start_time and stop_time are set
            "XX:XX" otherwise.
        """
        try:
            if self.is_skipped:
                return "00:00"
            assert self.start_time
            assert self.stop_time
            if self.stop_time < self.start_time:
                return "XX:XX"
            return (
                f"{str(int(self.stop_time - self.start_time) // 60).zfill(2)}:"
                f"{str(int(self.stop_time - self.start_time) % 60).zfill(2)}")
        except AssertionError:
            self.__logger.error("Please run check before getting the duration")
            return "XX:XX"

    def is_successful(self):
        """Interpret the result of the check.

        Returns:
            TestCase.EX_OK if result reaches criteria.
            TestCase.EX_TESTCASE_SKIPPED if the check is skipped.
            TestCase.EX_TESTCASE_FAILED otherwise.
        """
        try:
            if self.is_skipped:
                return TestCase.EX_TESTCASE_SKIPPED
            assert self.criteria
            assert self.result is not None
            if self.result >= self.criteria:
                return TestCase.EX_OK
        except AssertionError:
            self.__logger.error("Please run check before checking the results")
        return TestCase.EX_TESTCASE_FAILED

    def check_requirements(self):
        """Check the requirements of the check.

        It can be overriden on purpose.
        """
        self.is_skipped = False

    @abc.abstractmethod
    def run(self, **kwargs):
        """Run the check.

        The new implementation must set result, start_time and stop_time.

        Args:
            kwargs: Arbitrary keyword arguments.
        """

    def dump_details(self):
        """Write the outcome and details as JSON into res_dir.

        Returns:
            TestCase.EX_OK if the file was written.
            TestCase.EX_DUMP_ERROR otherwise.
        """
        try:
            assert self.case_name
            assert self.start_time
            assert self.stop_time
            os.makedirs(self.res_dir, exist_ok=True)
            payload = {
                "project_name": self.project_name,
                "case_name": self.case_name,
                "criteria": 'PASS' if self.is_successful(
                    ) == TestCase.EX_OK else 'FAIL',
                "result": self.result,
                "start_date": datetime.fromtimestamp(
                    self.start_time).strftime('%Y-%m-%d %H:%M:%S'),
                "stop_date": datetime.fromtimestamp(
                    self.stop_time).strftime('%Y-%m-%d %H:%M:%S'),
                "details": self.details}
            path = os.path.join(self.res_dir, f"{self.case_name}.json")
            with open(path, 'w', encoding='utf-8') as dfile:
                json.dump(payload, dfile, sort_keys=True, indent=2)
            self.__logger.debug("Details of %s written to %s",
                                self.case_name, path)
        except AssertionError:
            self.__logger.error("Please run check before dumping the details")
            return TestCase.EX_DUMP_ERROR
        except (OSError, TypeError, ValueError):
            self.__logger.exception("The details cannot be dumped")
            return TestCase.EX_DUMP_ERROR
        return TestCase.EX_OK

    def clean(self):
        """Clean the resources.

        It can be overriden if resources must be deleted after
        running the check.
        """
