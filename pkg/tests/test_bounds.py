import math

import numpy as np
import pytest

from accelreg.bounds import BoundCheck, VerifyConfig, _Worst, jacobi_checks, nu_slope_checks, verify_suite


def test_worst_tracks_location_and_allowance():
    w = _Worst("x", tol=1e-9)
    w.update(1, np.array([0.1, 0.2]), np.array([-1.0, -0.5]))
    w.update(2, np.array([0.1, 0.2]), np.array([1e-10, -2.0]), allowance=0.0)
    c = w.result()
    assert (c.t, c.sigma, c.margin) == (2, 0.1, 1e-10) and c.passed
    w = _Worst("y")
    w.update(3, np.array([0.5]), np.array([1e-13]), allowance=1e-12)
    assert w.result().passed
    w = _Worst("z")
    w.update(3, np.array([0.5]), np.array([np.inf]))
    assert not w.result().passed


def test_check_line_format():
    line = BoundCheck("demo", -0.5, t=4, sigma=0.25).line()
    assert line == "PASS  demo: worst margin -0.5 at t=4, sigma=0.25"
    assert BoundCheck("demo", math.nan).line().startswith("FAIL")


def test_short_suite_passes():
    checks = verify_suite(VerifyConfig(T=300, slopes=False, jacobi=False))
    assert all(c.passed for c in checks), [c.line() for c in checks if not c.passed]


@pytest.mark.parametrize("kappa2", [0.5, 4.0])
def test_suite_scales_with_kappa2(kappa2):
    checks = verify_suite(VerifyConfig(kappa2=kappa2, T=200, slopes=False, jacobi=False))
    assert all(c.passed for c in checks if not c.name.startswith("nu:") or kappa2 <= 1)


def test_nesterov_qualification_violated_by_large_step():
    checks = verify_suite(VerifyConfig(T=200, nesterov_alpha=1.5, slopes=False, jacobi=False))
    assert not all(c.passed for c in checks if c.name.startswith("nesterov"))


def test_nu_slopes_and_jacobi():
    assert all(c.passed for c in nu_slope_checks())
    assert jacobi_checks(top=4)[0].passed
