"""Acceptance criteria 1-12 at full size, plus the golden-record regression check.

Each check prints one PASS/FAIL line. Runtime limits are part of each
criterion and are enforced inside ``validation.run_check``.
"""

import pytest

from spherical_ensembles import validation


@pytest.mark.parametrize("number", [c[0] for c in validation.CHECKS], ids=[f"{c[0]}-{c[1].replace(' ', '_')}" for c in validation.CHECKS])
def test_acceptance(number, capsys):
    result = validation.run_check(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
