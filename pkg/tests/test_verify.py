import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from maxgraphs.curve import make_curve
from maxgraphs.verify import (VerifySettings, complement_reflection_residual,
                              count_preimages, interior_samples,
                              verify_family, verify_surface)
from maxgraphs.weierstrass import (SpinChoice, build_data,
                                   build_data_from_endpoints,
                                   enumerate_admissible)

CAT = make_curve([-1.0, 1.0])
TWO = make_curve([-3.0, -1.0, 1.0, 3.0])


def cat_data(theta=0.0, A=1.0):
    return build_data(CAT, SpinChoice(CAT, (False,)), theta=theta, A=A)


def test_verify_surface_catenoid_passes():
    rep = verify_surface(cat_data())
    assert rep.passed
    assert rep["conformality"].value < 1e-12
    assert rep["degree-count"].passed
    assert "PASS" in rep.to_text()
    assert "FAIL" not in rep.to_text()


def test_report_deterministic():
    t1 = verify_surface(cat_data(theta=0.3)).to_text()
    t2 = verify_surface(cat_data(theta=0.3)).to_text()
    assert t1 == t2


def test_verify_family_counts():
    fam = verify_family(TWO)
    assert fam.passed
    assert fam.family["admissible-count"].value == 4
    assert fam.family["class-count"].value == 2
    assert fam.surfaces == []
    fam2 = verify_family(CAT, per_surface=True)
    assert len(fam2.surfaces) == 1
    assert fam2.passed


def test_broken_branch_fails_slit_constancy():
    broken = dataclasses.replace(cat_data(), debug_break_branch=True)
    rep = verify_surface(broken)
    assert not rep.passed
    assert not rep["slit-constancy"].passed


def test_inadmissible_fails_graph_checks():
    bad = build_data_from_endpoints(TWO, (-3.0, -1.0), theta=0.0, A=1.0)
    rep = verify_surface(bad)
    assert not rep.passed
    names = {r.name for r in rep.failures()}
    assert "g-interior-bound" in names
    assert "degree-count" in names
    assert "boundary-one-preimage" in names


def test_inadmissible_other_slit_pair():
    # the mirrored bad selection: both endpoints from the right slit
    bad = build_data_from_endpoints(TWO, (1.0, 3.0), theta=0.0, A=1.0)
    rep = verify_surface(bad)
    assert not rep.passed


def test_raw_endpoints_must_be_branch_points():
    from maxgraphs.curve import CurveError
    with pytest.raises(CurveError):
        build_data_from_endpoints(TWO, (-2.5, 2.0))


@pytest.mark.parametrize("a, n", [
    ([-1.0, 1.0], 0),
    ([-3.0, -1.0, 1.0, 3.0], 1),
    ([-5.0, -4.0, -1.0, 1.0, 4.0, 6.0], 2),
])
def test_count_preimages_equals_cone_count(a, n):
    curve = make_curve(a)
    data = build_data(curve, SpinChoice(curve, (False,) * (n + 1)))
    rng = np.random.default_rng(31)
    for _ in range(3):
        zeta = np.sqrt(rng.uniform(0.05, 0.9)) * np.exp(
            2j * np.pi * rng.uniform())
        assert count_preimages(data, zeta) == n + 1


def test_count_preimages_rejects_bad_target():
    data = cat_data()
    with pytest.raises(ValueError):
        count_preimages(data, 1.2 + 0j)
    with pytest.raises(ValueError):
        count_preimages(data, 0.0 + 0j)


def test_complement_reflection_residual():
    for ch in enumerate_admissible(TWO):
        data = build_data(TWO, ch, theta=0.25, A=1.5)
        assert complement_reflection_residual(data) < 1e-9


def test_interior_samples_deterministic_and_off_slit():
    s1 = interior_samples(TWO, 500)
    s2 = interior_samples(TWO, 500)
    assert np.array_equal(s1, s2)
    d = np.array([TWO.dist_to_slits(z) for z in s1])
    assert d.min() > 1e-3 * TWO.scale * 0.999
    assert np.max(np.abs(s1)) <= 1.5 * TWO.rscale + 1e-9


def test_settings_control_sections():
    s = VerifySettings(check_mesh=False, check_pde=False,
                       check_growth=False, check_degree=False)
    rep = verify_surface(cat_data(), settings=s)
    names = {r.name for r in rep.records}
    assert "fold-count" not in names
    assert "pde-order" not in names
    assert "growth-fit" not in names
    assert "degree-count" not in names
    assert rep.passed


def test_report_value_lines_have_fixed_shape():
    rep = verify_surface(cat_data())
    for line in rep.to_text().splitlines()[1:-1]:
        assert line.startswith(("PASS", "FAIL"))
        assert "value=" in line and "threshold=" in line
