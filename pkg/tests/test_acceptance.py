"""Full-size acceptance suite, one test per criterion."""

import pytest

from anisotope.acceptance import CRITERIA


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{c.number}" for c in CRITERIA])
def test_criterion(criterion, record_line):
    result = criterion()
    line = result.line()
    print(line)
    record_line(line)
    assert result.passed, line
