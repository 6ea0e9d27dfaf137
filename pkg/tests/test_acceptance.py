"""One pass/fail line per acceptance criterion, printed even when output is captured."""

import pytest

from su11net.verify import CHECKS


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__.removeprefix("check_") for c in CHECKS])
def test_acceptance(check, capsys):
    result = check()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
    assert result.seconds < result.budget, f"took {result.seconds:.2f}s, budget {result.budget}s"
