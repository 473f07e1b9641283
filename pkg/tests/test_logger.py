import logging

import numpy as np
import pytest

from logger import LogfmtFormatter, logger, set_level


def test_logfmt_line_carries_extra_fields():
    record = logging.LogRecord("eulertop", logging.INFO, __file__, 12, "ran %s periods", (4,), None)
    record.bigj = 2.5
    line = LogfmtFormatter().format(record)
    assert line.startswith('level=info msg="ran 4 periods"')
    assert "line=12" in line
    assert "bigj=2.5" in line


def test_set_level_by_name():
    previous = logger.level
    try:
        set_level("debug")
        assert logger.level == logging.DEBUG
        set_level("WARNING")
        assert logger.level == logging.WARNING
    finally:
        logger.setLevel(previous)


def test_unknown_level_rejected():
    with pytest.raises(ValueError):
        set_level("chatty")


def test_import_leaves_numpy_printing_alone():
    assert np.get_printoptions()["threshold"] == 1000
