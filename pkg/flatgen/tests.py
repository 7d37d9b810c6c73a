#!/usr/bin/env python
# coding: utf8
"""
utilities for unit tests (using pytest) and logging setup
"""

__author__ = "Philippe Guglielmetti"
__copyright__ = "Copyright 2014-, Philippe Guglielmetti"
__license__ = "LGPL"

import logging
import os

import numpy as np

LOG_ENV = 'FLATGEN_LOG'


def setlog(level=None, fmt='%(levelname)s:%(filename)s:%(funcName)s: %(message)s'):
    """initializes logging
    :param level: logging level or its name, default from the FLATGEN_LOG environment variable
    :param fmt: string
    """
    if level is None:
        level = os.environ.get(LOG_ENV, 'WARNING')
    if isinstance(level, str):
        level = getattr(logging, level.upper(), None)
        if not isinstance(level, int):
            level = logging.WARNING
    logging.basicConfig(level=level, format=fmt)
    logger = logging.getLogger()
    logger.setLevel(level)
    logger.handlers[0].setFormatter(logging.Formatter(fmt))
    return logger


def assert_close(a, b, atol=1e-9, rtol=0):
    """numpy arrays comparison with a message showing the largest deviation"""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    err = np.max(np.abs(a - b)) if a.size else 0.
    assert np.allclose(a, b, atol=atol, rtol=rtol), 'max deviation %g > %g' % (err, atol)


def runmodule(level=logging.INFO, argv=None):
    """
    runs the current module as a test suite
    :param argv: optional list of string with additional options passed to pytest.main
    see https://docs.pytest.org/en/stable/how-to/usage.html
    """
    import sys
    import pytest
    module_name = sys.modules["__main__"].__file__
    setlog(level)
    return pytest.main([module_name] + (argv or []))
