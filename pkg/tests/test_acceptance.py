"""The eleven acceptance checks, each at its stated tolerance.

Every check prints one ``[PASS]``/``[FAIL]`` line; the lines are also
collected into the terminal summary. The same checks back ``sica verify``.
"""
import pytest

from sica.verify import CHECKS

LINES = {}


@pytest.mark.parametrize("fn", [fn for _, fn in CHECKS], ids=[f"{k:02d}-{g}" for k, (g, _) in enumerate(CHECKS, 1)])
def test_acceptance(fn):
    check = fn()
    LINES[check.number] = check.line()
    print(check.line())
    assert check.passed, check.line()
