"""Acceptance criteria 1-13, one pass/fail line each.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines; the same
checks back ``curvspec validate``.
"""

import pytest

from curvspec import validation

FULL = validation.Settings(fast=False)


@pytest.fixture(scope="module")
def lines():
    out = []
    yield out
    print("\nacceptance summary")
    for line in out:
        print(line)


@pytest.mark.parametrize("number, check", list(enumerate(validation.CHECKS, 1)),
                         ids=[c.__name__.removeprefix("check_") for c in validation.CHECKS])
def test_criterion(number, check, lines):
    res = validation.run_check(check, FULL)
    line = f"criterion {number:2d} {res.line()}"
    lines.append(line)
    print(line)
    assert res.passed, res.as_dict()


def test_negative_control_perturbed_b():
    res = validation.run_check(validation.check_euclidean_interval,
                               validation.Settings(fast=True, b_offset=1e-3))
    assert not res.passed
