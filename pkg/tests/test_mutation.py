"""The acceptance checks must notice a corrupted constant."""

import pytest

from fadingrate import checks, specfun

# a transposed digit is below Monte Carlo resolution but not below the
# deterministic checks; a gross error must also show up in the Wishart moments
SMALL = 0.5772166649015329  # one digit off at 1e-6
GROSS = 0.6


def corrupt(monkeypatch, value):
    monkeypatch.setattr(specfun, "EULER_GAMMA", value)


@pytest.mark.parametrize("fn", [checks.criterion_special_functions, checks.criterion_ergodic,
                                checks.criterion_wishart])
def test_checks_pass_on_clean_constant(fn):
    assert checks.run_criterion(fn, level="fast").passed


@pytest.mark.parametrize("fn", [checks.criterion_special_functions, checks.criterion_ergodic])
def test_deterministic_checks_catch_small_corruption(fn, monkeypatch):
    corrupt(monkeypatch, SMALL)
    crit = checks.run_criterion(fn, level="fast")
    assert not crit.passed and crit.failures()


@pytest.mark.parametrize("level", ["fast", "full"])
def test_wishart_check_catches_gross_corruption(level, monkeypatch):
    corrupt(monkeypatch, GROSS)
    crit = checks.run_criterion(checks.criterion_wishart, level=level)
    assert not crit.passed
    assert any("mean" in c.name for c in crit.failures())


def test_corruption_reaches_digamma(monkeypatch):
    corrupt(monkeypatch, SMALL)
    assert specfun.digamma_int(1) == -SMALL
