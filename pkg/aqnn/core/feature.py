#!/usr/bin/env python

# Copyright (c) 2026 aqnn contributors and others.
#
# All rights reserved. This program and the accompanying materials
# are made available under the terms of the Apache License, Version 2.0
# which accompanies this distribution, and is available at
# http://www.apache.org/licenses/LICENSE-2.0

"""Define the parent class of the checks driven by a Python method."""

import abc
import logging
import time

from aqnn.core import testcase


class Feature(testcase.TestCase, metaclass=abc.ABCMeta):
    """Base model for a check implemented by execute()."""

    __logger = logging.getLogger(__name__)

    @abc.abstractmethod
    def execute(self, **kwargs):
        """Execute the Python method.

        The new implementation must return 0 if success or anything
        else if failure. It may fill details.

        Args:
            kwargs: Arbitrary keyword arguments.
        """

    def run(self, **kwargs):
        """Run the check by calling execute().

        It sets result (100 or 0), start_time and stop_time. An exception
        raised by execute() fails the check and is kept in details.

        Args:
            kwargs: Arbitrary keyword arguments.

        Returns:
            TestCase.EX_OK if execute() returns 0,
            TestCase.EX_RUN_ERROR otherwise.
        """
        self.start_time = time.time()
        exit_code = testcase.TestCase.EX_RUN_ERROR
        self.result = 0
        try:
            if self.execute(**kwargs) == 0:
                exit_code = testcase.TestCase.EX_OK
                self.result = 100
        except Exception as exc:  # pylint: disable=broad-except
            self.details["error"] = f"{type(exc).__name__}: {exc}"
            self.__logger.exception("Check %s raised", self.case_name)
        self.stop_time = time.time()
        return exit_code
