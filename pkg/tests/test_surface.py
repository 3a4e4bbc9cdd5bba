import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

from maxgraphs.curve import Bank, SlitPoint, make_curve
from maxgraphs.surface import (GraphEvaluator, SlitCollapseError, build_graph,
                               default_z0, eval_X, gradient_norm,
                               harmonic_residual_orders, log_growth_fit,
                               pde_residual_orders, project_to_graph,
                               sample_X, sample_mesh, singular_points)
from maxgraphs.weierstrass import (SpinChoice, build_data,
                                   build_data_from_endpoints, eval_g_many)

CAT = make_curve([-1.0, 1.0])
TWO = make_curve([-3.0, -1.0, 1.0, 3.0])


def cat_data(theta=0.0, A=1.0):
    return build_data(CAT, SpinChoice(CAT, (False,)), theta=theta, A=A)


def two_data(bits=(False, False), theta=0.0, A=1.0):
    return build_data(TWO, SpinChoice(TWO, bits), theta=theta, A=A)


# frozen cone vertex of the rotational n = 0 surface anchored at z0 = 3:
# q = (0, -4 sqrt(2), -2 log(3 + 2 sqrt(2)))
Q_CAT = np.array([0.0, -4.0 * np.sqrt(2.0),
                  -2.0 * np.log(3.0 + 2.0 * np.sqrt(2.0))])


def test_default_z0():
    assert default_z0(CAT) == 3.0 + 0j
    assert default_z0(TWO) == 9.0 + 0j


def test_catenoid_cone_vertex_frozen():
    sing = singular_points(cat_data())
    assert sing.shape == (1, 3)
    assert_allclose(sing[0], Q_CAT, atol=1e-10)


def test_two_slit_cone_vertices_frozen():
    graph = build_graph(two_data())
    assert_allclose(graph.singularities,
                    [[0.0, -20.225737, -7.273786],
                     [0.0, -14.850320, -7.273786]], atol=2e-6)
    assert graph.growth == 4.0


def test_eval_X_at_base():
    data = cat_data()
    X = eval_X(data, 3.0 + 0j)
    assert_allclose(X, [0.0, 0.0, 0.0], atol=1e-14)
    # shifted base is honored
    X2 = eval_X(data, 3.0 + 0j, base=(1.0, 2.0, 3.0))
    assert_allclose(X2, [1.0, 2.0, 3.0], atol=1e-14)


def test_sample_X_path_independence():
    data = two_data((False, True), theta=0.4, A=1.1)
    pts = np.array([4.0 + 1j, -4.0 - 1j, 0.0 + 2j, 0.5 - 0.1j])
    fwd = sample_X(data, pts, tol=1e-11)
    bwd = sample_X(data, pts[::-1], tol=1e-11)[::-1]
    assert_allclose(fwd, bwd, atol=1e-9)


def test_slit_point_values_agree_across_banks():
    # the conelike singularity: both banks land on the same vertex
    data = two_data()
    pN = TWO.slit_point(1, -2.3, Bank.NORTH)
    pS = TWO.slit_point(1, -2.3, Bank.SOUTH)
    assert_allclose(eval_X(data, pN), eval_X(data, pS), atol=1e-9)


def test_singular_points_collapse_residual():
    _, spreads = singular_points(cat_data(), full=True)
    assert spreads.max() < 1e-10


def test_inadmissible_selection_still_collapses_but_not_spacelike():
    # both endpoints on one slit: the slits still shrink to points, but the
    # Gauss map escapes the disk, so the result is not a spacelike graph
    bad = build_data_from_endpoints(TWO, (-3.0, -1.0), theta=0.0, A=1.0)
    sing = singular_points(bad)
    assert sing.shape == (2, 3)
    rng = np.random.default_rng(2)
    z = rng.normal(scale=3.0, size=400) + 1j * rng.normal(scale=3.0, size=400)
    z = z[np.abs(z.imag) > 1e-6]
    assert np.max(np.abs(eval_g_many(bad, z))) > 1.0


def test_broken_branch_fails_collapse():
    broken = dataclasses.replace(cat_data(), debug_break_branch=True)
    with pytest.raises(SlitCollapseError):
        singular_points(broken)


def test_gradient_norm_catenoid():
    # rotational surface: |grad u| = 2 rho / (1 + rho^2) with rho = |g|
    data = cat_data()
    z = np.array([3.0 + 0j, 0.0 + 2j, -5.0 + 0.5j])
    rho = np.abs([-1.0 / (zz + np.sqrt(zz * zz - 1.0 + 0j)) for zz in z])
    assert_allclose(gradient_norm(data, z), 2 * rho / (1 + rho**2),
                    rtol=1e-12)
    assert np.all(gradient_norm(data, z) < 1.0)


def test_harmonic_residual_orders():
    orders = harmonic_residual_orders(two_data((True, False)))
    assert orders.shape == (5,)
    assert np.all(np.abs(orders - 2.0) < 0.3)


def test_mesh_counts_and_indexing():
    mesh = sample_mesh(cat_data())
    # 12 rings x (2*12 edge + 2*12 cap) + 8 far circles x 64 angles
    assert len(mesh.vertices) == 12 * 48 + 8 * 64
    assert len(mesh.faces) == 11 * 48 + 7 * 64
    assert mesh.faces.min() == 0
    assert mesh.faces.max() == len(mesh.vertices) - 1
    assert mesh.z.shape == (len(mesh.vertices),)
    assert set(mesh.bank) <= {"N", "S", "-"}
    # region 0 is the far field, region j >= 1 the rings around slit j,
    # ring 0 the innermost ring
    d = np.array([CAT.dist_to_slits(z) for z in mesh.z])
    near = mesh.region == 1
    assert d[near & (mesh.ring == 0)].max() < d[near & (mesh.ring == 11)].min()
    assert d[mesh.region == 0].min() > d[near].max()


def test_mesh_two_slits_regions():
    mesh = sample_mesh(two_data(), rings_per_slit=4, n_cap=6, n_edge=6,
                       far_circles=3, far_angles=24)
    assert set(mesh.region) == {0, 1, 2}
    assert len(mesh.vertices) == 2 * 4 * 24 + 3 * 24


def test_project_to_graph_no_folds():
    mesh = sample_mesh(cat_data())
    fn = project_to_graph(mesh)
    assert fn.fold_pairs == 0
    assert fn.chord_margin > 0
    # the fitted plane slopes are descriptive only; away from the cones
    # they track the true gradient, which stays below one
    far = mesh.region == 0
    assert np.all(np.hypot(fn.grad[far, 0], fn.grad[far, 1]) < 1.0)


def test_graph_evaluator_against_rotational_profile():
    # height relative to the cone vertex is 2 arcsinh(r / 2)
    data = cat_data()
    graph = build_graph(data)
    ev = GraphEvaluator(graph)
    q = graph.singularities[0]
    rng = np.random.default_rng(12)
    for r in (0.5, 2.0, 7.0):
        ang = rng.uniform(0.0, 2.0 * np.pi)
        x1 = q[0] + r * np.cos(ang)
        x2 = q[1] + r * np.sin(ang)
        u = ev.height(x1, x2)
        assert_allclose(u - q[2], 2.0 * np.arcsinh(r / 2.0), atol=1e-9)


def test_graph_evaluator_heights_vectorized():
    graph = build_graph(cat_data())
    ev = GraphEvaluator(graph)
    q = graph.singularities[0]
    xy = q[:2] + np.array([[3.0, 0.0], [0.0, 4.0], [-2.0, 2.0]])
    u = ev.heights(xy)
    r = np.hypot(*(xy - q[:2]).T)
    assert_allclose(u - q[2], 2.0 * np.arcsinh(r / 2.0), atol=1e-9)


def test_log_growth_fit():
    data = two_data((False, False), theta=0.2, A=1.3)
    slope, _ = log_growth_fit(data)
    assert_allclose(slope, 5.2, rtol=1e-3)


def test_log_growth_fit_balanced():
    # growth 0: the height stays bounded along the end
    slope, _ = log_growth_fit(two_data((False, True)))
    assert abs(slope) < 1e-3


def test_pde_residual_orders():
    graph = build_graph(cat_data())
    orders = pde_residual_orders(graph)
    assert orders.shape == (5,)
    assert np.all((orders > 1.7) & (orders < 2.3))


def test_complement_is_height_reflection():
    data = two_data((False, True), theta=0.8, A=1.6)
    comp = build_data(TWO, data.tau.complement(), theta=0.8, A=1.6)
    pts = np.array([4.0 + 1j, -1.0 + 2j, 0.2 - 3j])
    X = sample_X(data, pts, tol=1e-11)
    Xc = sample_X(comp, pts, tol=1e-11)
    assert_allclose(Xc, X * np.array([1.0, 1.0, -1.0]), atol=1e-9)
