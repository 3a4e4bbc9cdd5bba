import numpy as np
import pytest
from numpy.testing import assert_allclose

from maxgraphs.curve import (Bank, CurveError, OnCutError, eval_w,
                             eval_w_many, eval_w_on_slit,
                             laurent_at_infinity, make_curve)


def test_make_curve_basic():
    curve = make_curve([-3, -1, 1, 3])
    assert curve.n == 1
    assert curve.a == (-3.0, -1.0, 1.0, 3.0)
    assert curve.slits == ((-3.0, -1.0), (1.0, 3.0))
    assert curve.scale == 6.0
    assert curve.rscale == 3.0
    assert curve.min_gap == 2.0
    assert curve.min_slit_len == 2.0


@pytest.mark.parametrize("a", [
    [1.0],                      # odd count
    [1.0, 1.0],                 # repeated
    [2.0, 1.0],                 # unsorted
    [0.0, float("nan")],
    [],
])
def test_make_curve_rejects(a):
    with pytest.raises(CurveError):
        make_curve(a)


def test_eval_w_frozen():
    curve = make_curve([-3, -1, 1, 3])
    # (10-(-3))(10-(-1))(10-1)(10-3) = 13*11*9*7 = 9009, branch w ~ -z^2
    assert_allclose(eval_w(curve, 10.0 + 0j), -np.sqrt(9009), rtol=1e-15)
    # between the slits two factors have flipped: w(0) = +3
    assert_allclose(eval_w(curve, 0.0 + 0j), 3.0, rtol=1e-14)


def test_eval_w_squares_to_product():
    curve = make_curve([-2.0, -0.5, 0.25, 1.75])
    rng = np.random.default_rng(7)
    z = rng.normal(size=40) + 1j * rng.normal(size=40)
    z = z[np.abs(z.imag) > 1e-3] * 2.0
    w = eval_w_many(curve, z)
    prod = np.ones_like(z)
    for aj in curve.a:
        prod *= z - aj
    assert_allclose(w**2, prod, rtol=1e-13)


def test_eval_w_branch_at_infinity():
    curve = make_curve([-1.0, 1.0])
    for ang in (0.2, 1.7, 3.0, -2.4):
        z = 1e6 * np.exp(1j * ang)
        assert_allclose(eval_w(curve, z), -z, rtol=1e-10)


def test_eval_w_continuous_across_gap():
    # the real axis between slits is not a cut
    curve = make_curve([-3, -1, 1, 3])
    up = eval_w(curve, 0.0 + 1e-9j)
    dn = eval_w(curve, 0.0 - 1e-9j)
    assert abs(up - dn) < 1e-7
    assert_allclose(up.real, 3.0, atol=1e-7)


def test_eval_w_jumps_across_slit():
    curve = make_curve([-3, -1, 1, 3])
    up = eval_w(curve, 2.0 + 1e-9j)
    dn = eval_w(curve, 2.0 - 1e-9j)
    # purely imaginary opposite limits on the two banks
    assert_allclose(up, -dn, rtol=1e-5)
    assert abs(up.real) < 1e-5


def test_eval_w_on_slit_banks():
    curve = make_curve([-3, -1, 1, 3])
    pN = curve.slit_point(2, 2.0, Bank.NORTH)
    pS = curve.slit_point(2, 2.0, Bank.SOUTH)
    wN = eval_w_on_slit(curve, pN)
    wS = eval_w_on_slit(curve, pS)
    assert_allclose(wN, -wS, rtol=1e-14)
    assert wN.real == 0.0
    # |w|^2 = |(2+3)(2+1)(2-1)(2-3)| = 15
    assert_allclose(abs(wN), np.sqrt(15.0), rtol=1e-14)
    # bank limit matches the off-slit approach
    assert_allclose(eval_w(curve, 2.0 + 1e-9j), wN, rtol=1e-6)


def test_on_cut_rejected():
    curve = make_curve([-3, -1, 1, 3])
    with pytest.raises(OnCutError):
        eval_w(curve, 2.0 + 0j)
    # branch point endpoints are unambiguous: w = 0 there
    assert eval_w(curve, -3.0 + 0j) == 0.0
    # between and outside the slits the axis is fine
    eval_w(curve, 0.0 + 0j)
    eval_w(curve, 5.0 + 0j)


def test_slit_containing():
    curve = make_curve([-3, -1, 1, 3])
    assert curve.slit_containing(2.0) == 2
    assert curve.slit_containing(-2.0) == 1
    assert curve.slit_containing(0.0) is None
    assert curve.slit_containing(3.05) is None
    assert curve.slit_containing(3.05, slack=0.1) == 2


def test_dist_to_slits():
    curve = make_curve([-3, -1, 1, 3])
    assert_allclose(curve.dist_to_slits(2.0 + 0.5j), 0.5)
    assert_allclose(curve.dist_to_slits(0.0 + 0j), 1.0)
    assert_allclose(curve.dist_to_slits(4.0 + 0j), 1.0)
    assert_allclose(curve.dist_to_slits(-3.0 - 2.0j), 2.0)


def test_laurent_at_infinity_matches_eval():
    curve = make_curve([-2.0, -0.5, 0.25, 1.75])
    e = laurent_at_infinity(curve, 8)
    z = 40.0 * np.exp(0.7j)
    series = -z**2 * (1 + sum(ek / z**(k + 1) for k, ek in enumerate(e)))
    assert_allclose(eval_w(curve, z), series, rtol=1e-12)
    # leading coefficient is -(sum of branch points)/2
    assert_allclose(e[0], -sum(curve.a) / 2.0, rtol=1e-14)
