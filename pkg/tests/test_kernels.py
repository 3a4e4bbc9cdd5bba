"""Backend agreement: the compiled kernels must match the numpy ones."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from maxgraphs import _kernels_py as kpy

kc = pytest.importorskip("maxgraphs._kernels",
                         reason="compiled extension not built")

B = np.array([-3.0, 1.0])
C = np.array([-1.0, 3.0])


def _random_points(m, seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(scale=4.0, size=m) + 1j * rng.normal(scale=2.0, size=m)
    return z[np.abs(z.imag) > 1e-6]


def test_backend_marker():
    assert kpy.BACKEND == "python"
    assert kc.BACKEND == "compiled"


def test_branch_prod_agree():
    z = _random_points(200, 11)
    assert_allclose(kc.branch_prod(C, B, z), kpy.branch_prod(C, B, z),
                    rtol=1e-14)
    # and with an empty denominator
    assert_allclose(kc.branch_prod(C, np.empty(0), z),
                    kpy.branch_prod(C, np.empty(0), z), rtol=1e-14)


@pytest.mark.parametrize("upper", [True, False])
def test_branch_prod_slit_agree(upper):
    x = np.linspace(-2.95, 2.95, 173)
    assert_allclose(kc.branch_prod_slit(C, B, x, upper),
                    kpy.branch_prod_slit(C, B, x, upper), rtol=1e-14)


def test_panel_forms_line_agree():
    z0, z1 = 3.0 + 0.5j, -2.0 + 2.5j
    Ic, Ec = kc.panel_forms_line(B, C, 0.8, 0.6, 1.3, z0, z1)
    Ip, Ep = kpy.panel_forms_line(B, C, 0.8, 0.6, 1.3, z0, z1)
    assert_allclose(Ic, Ip, rtol=1e-13)
    # error estimates amplify summation-order differences; loose compare
    assert_allclose(Ec, Ep, rtol=1e-6, atol=1e-18)


def test_panel_forms_sqrt_agree():
    # endpoint substitution panel starting at the branch point e = 1
    Ic, Ec = kc.panel_forms_sqrt(B, C, 1.0, 0.0, 0.7, 1.0 + 0j, 1.0 + 1.5j,
                                 0.0, 1.0)
    Ip, Ep = kpy.panel_forms_sqrt(B, C, 1.0, 0.0, 0.7, 1.0 + 0j, 1.0 + 1.5j,
                                  0.0, 1.0)
    assert_allclose(Ic, Ip, rtol=1e-13)
    assert_allclose(Ec, Ep, rtol=1e-6, atol=1e-18)


def test_slit_limit_matches_interior_limit():
    # bank values are the vertical limits of the off-slit product
    x = np.linspace(-2.9, -1.1, 37)
    lim = kpy.branch_prod(C, B, x + 1e-10j)
    bank = kpy.branch_prod_slit(C, B, x, True)
    assert_allclose(lim, bank, rtol=1e-5)


def test_gk_panel_exact_on_polynomial():
    # the embedded 7-point Gauss rule integrates degree 13 exactly, so the
    # error estimate on a cubic must be at roundoff level
    z0, z1 = -1.0 + 1j, 2.0 + 1j

    def poly_int(z):
        return z**4 / 4.0

    b = np.empty(0)
    c = np.empty(0)
    # f3 = A (S - 1/S) with empty products is 0; use f1 at theta = 0 which is
    # the constant -2iA, integrated exactly by any rule
    I, err = kpy.panel_forms_line(b, c, 1.0, 0.0, 1.0, z0, z1)
    assert_allclose(I[0], -2j * (z1 - z0), rtol=1e-15)
    assert err[0] < 1e-14
