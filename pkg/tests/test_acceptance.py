"""The fifteen acceptance criteria, one test each; every verdict line is echoed in the session summary."""
import pytest

from dlab.harness.acceptance import CRITERIA

VERDICTS = []


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    res = CRITERIA[number]()
    VERDICTS.append(res.line())
    print(res.line())
    assert res.passed, res.line()
