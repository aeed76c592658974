"""Recompute the frozen reference values with mpmath."""
import mpmath
import pytest

import oracles as O


@pytest.fixture(autouse=True)
def _precision():
    with mpmath.workdps(40):
        yield


def _rho(n, tau=0):
    n = mpmath.mpf(n)
    return 2 * mpmath.exp(-n / 100) + mpmath.sqrt(mpmath.log(20) / n) + tau


def test_recompute():
    got = {
        "THRESHOLD_N1000_A01": mpmath.sqrt(mpmath.log(20) / 1000),
        "PVALUE_U08_N100": 2 * mpmath.exp(-100 * mpmath.mpf("0.3") ** 2),
        "RHO_N1000": _rho(1000),
        "RHO_N5000": _rho(5000),
        "ODC_LINEAR_PINNED": 2 / mpmath.pi * mpmath.atan((mpmath.sqrt(33) - 1) / (mpmath.sqrt(33) + 1)),
        "ODC_BINARY_PINNED": mpmath.ncdf(1) - mpmath.mpf(1) / 2,
        "TV_UNIT_SHIFT": 2 * mpmath.ncdf(mpmath.sqrt(2) / 2) - 1,
    }
    t = mpmath.tan(mpmath.pi * _rho(1000) / 2)
    got["MIN_GAP_LINEAR"] = 2 * t / (1 - 2 * t) * 2
    # Phi^-1(1/2 + r) = sqrt(2) erfinv(2r)
    got["MIN_GAP_BINARY"] = mpmath.sqrt(2) * mpmath.erfinv(2 * _rho(5000)) * mpmath.sqrt(2) * mpmath.sqrt(2) / 2
    for name, value in got.items():
        assert float(value) == pytest.approx(getattr(O, name), rel=1e-15), name


@pytest.mark.parametrize("name", sorted(O.QUOTED))
def test_quoted_short_forms(name):
    quoted, slack = O.QUOTED[name]
    assert abs(getattr(O, name) - quoted) <= slack
