"""Acceptance gate: the ten family-level guarantees, one test each.

Each test prints a single summary line (visible with -s or in the captured
output) and asserts the stated tolerance.  The fixture curves cover one
asymmetric branch-point list per genus; criterion 1 additionally draws
randomized curves from a fixed seed.
"""
import time

import numpy as np
import pytest

from maxgraphs.curve import make_curve
from maxgraphs.quadrature import slit_loop_period, stadium_ring
from maxgraphs.surface import (build_graph, gradient_norm, log_growth_fit,
                               pde_residual_orders, project_to_graph,
                               sample_X, sample_mesh, singular_points)
from maxgraphs.verify import (_rotation_residual,
                              complement_reflection_residual, count_preimages,
                              interior_samples)
from maxgraphs.weierstrass import (SpinChoice, build_data, congruence_classes,
                                   enumerate_admissible, eval_forms_many,
                                   growth_coefficient)

CURVES = {
    0: make_curve([-1.0, 1.0]),
    1: make_curve([-3.0, -1.0, 1.0, 3.0]),
    2: make_curve([-5.0, -4.0, -1.0, 1.0, 4.0, 6.0]),
    3: make_curve([-9.0, -7.0, -4.0, -3.0, 1.0, 2.0, 5.0, 8.0]),
}


def _random_curve(rng, n):
    gaps = rng.uniform(0.3, 2.0, size=2 * n + 2)
    return make_curve(np.cumsum(gaps) - 3.0)


def _report(k, name, passed, value, threshold):
    status = "PASS" if passed else "FAIL"
    print(f"criterion {k:2d} {name:<22} {status}"
          f"  value={value:.3e}  threshold={threshold:.3e}")
    assert passed, f"criterion {k} ({name}): {value:.3e} vs {threshold:.3e}"


def test_criterion_01_family_count():
    rng = np.random.default_rng(20260817)
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(4):
        for _ in range(10):
            curve = _random_curve(rng, n)
            choices = enumerate_admissible(curve)
            assert len(choices) == 2 ** (n + 1)
            pairs = congruence_classes(choices)
            assert len(pairs) == 2 ** n
            for rep, _mirror in pairs:
                data = build_data(curve, rep)
                worst = max(worst,
                            complement_reflection_residual(data, tol=1e-10))
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"took {elapsed:.1f} s"
    _report(1, "family-count", worst < 1e-8, worst, 1e-8)


def test_criterion_02_catenoid():
    curve = CURVES[0]
    data = build_data(curve, SpinChoice(curve, (False,)))
    graph = build_graph(data)
    assert graph.singularities.shape == (1, 3)
    rel, dz3 = _rotation_residual(data, graph.singularities[0, :2],
                                  graph.z0, 1e-10)
    assert dz3 < 1e-8
    _report(2, "catenoid-symmetry", rel < 1e-6, rel, 1e-6)


def test_criterion_03_coplanarity():
    worst = 0.0
    for n in range(4):
        curve = CURVES[n]
        for ch in enumerate_admissible(curve):
            sing = singular_points(build_data(curve, ch))
            worst = max(worst, float(np.max(np.abs(sing[:, 0]))))
    _report(3, "coplanarity", worst < 1e-8, worst, 1e-8)


def test_criterion_04_well_definedness():
    worst_re = 0.0
    worst_spread = 0.0
    for n in range(4):
        curve = CURVES[n]
        for ch in enumerate_admissible(curve):
            data = build_data(curve, ch)
            for j in range(1, curve.n + 2):
                lp = slit_loop_period(data, j)
                worst_re = max(worst_re, abs(lp.values[1].real),
                               abs(lp.values[2].real))
            _, spreads = singular_points(data, full=True)
            worst_spread = max(worst_spread, float(spreads.max()))
    assert worst_spread < 1e-8, f"slit constancy {worst_spread:.3e}"
    _report(4, "well-definedness", worst_re < 1e-9, worst_re, 1e-9)


def test_criterion_05_conformality():
    worst = 0.0
    for n in range(4):
        curve = CURVES[n]
        z = interior_samples(curve, 2000)
        for ch in enumerate_admissible(curve):
            f = eval_forms_many(build_data(curve, ch), z)
            worst = max(worst,
                        float(np.max(np.abs(f[0]**2 + f[1]**2 - f[2]**2))))
    _report(5, "conformality", worst < 1e-11, worst, 1e-11)


def test_criterion_06_spacelike_graph():
    worst_grad = 0.0
    worst_ring = 1.0
    folds = 0
    for n in range(4):
        curve = CURVES[n]
        for ch, _ in congruence_classes(enumerate_admissible(curve)):
            data = build_data(curve, ch)
            z = interior_samples(curve, 2000)
            worst_grad = max(worst_grad,
                             float(np.max(gradient_norm(data, z))))
            mesh = sample_mesh(data)
            folds += project_to_graph(mesh).fold_pairs
            # innermost mesh ring around each cone
            for j in range(1, curve.n + 2):
                # the ring-0 standoff distance: edge points sit at Im = +-d0
                d0 = np.max(np.abs(mesh.z[(mesh.region == j)
                                          & (mesh.ring == 0)].imag))
                ring = stadium_ring(curve, j, d0, 12, 12)
                worst_ring = min(worst_ring,
                                 float(np.min(gradient_norm(data,
                                                            np.array(ring)))))
    assert worst_grad < 1.0, f"gradient bound violated: {worst_grad}"
    assert folds == 0, f"{folds} folds"
    _report(6, "spacelike-graph", worst_ring > 0.95, worst_ring, 0.95)


def test_criterion_07_pde_order():
    orders = []
    for n, bits in ((0, (False,)), (1, (False, False)), (1, (False, True))):
        curve = CURVES[n]
        graph = build_graph(build_data(curve, SpinChoice(curve, bits)))
        orders.extend(pde_residual_orders(graph))
    lo, hi = min(orders), max(orders)
    _report(7, "pde-order", 1.7 <= lo and hi <= 2.3, np.median(orders), 2.0)


def test_criterion_08_growth():
    worst = 0.0
    for n in range(3):
        curve = CURVES[n]
        for ch in enumerate_admissible(curve):
            data = build_data(curve, ch)
            c = growth_coefficient(data)
            slope, _ = log_growth_fit(data)
            dev = abs(slope - c) / max(abs(c), 1e-3 / 0.01)
            worst = max(worst, dev)
    _report(8, "growth-fit", worst < 0.01, worst, 0.01)


def test_criterion_09_cone_asymptotics():
    worst = -np.inf
    for n in range(3):
        curve = CURVES[n]
        for ch, _ in congruence_classes(enumerate_admissible(curve)):
            data = build_data(curve, ch)
            graph = build_graph(data)
            mesh = sample_mesh(data)
            for j in range(1, curve.n + 2):
                q = graph.singularities[j - 1]
                defects = []
                for ring in range(3):
                    sel = (mesh.region == j) & (mesh.ring == ring)
                    v = mesh.vertices[sel]
                    r = np.hypot(v[:, 0] - q[0], v[:, 1] - q[1])
                    defects.append(np.mean(np.abs(r - np.abs(v[:, 2] - q[2]))))
                # ring 0 is innermost; the defect must grow with the radius
                worst = max(worst, defects[0] - defects[1],
                            defects[1] - defects[2])
    _report(9, "cone-asymptotics", worst < 0.0, worst, 0.0)


def test_criterion_10_degree():
    rng = np.random.default_rng(1729)
    for n in range(4):
        curve = CURVES[n]
        data = build_data(curve, SpinChoice(curve, (False,) * (n + 1)))
        for _ in range(20):
            zeta = np.sqrt(0.02 + 0.96 * rng.uniform()) * np.exp(
                2j * np.pi * rng.uniform())
            assert count_preimages(data, zeta) == n + 1
    _report(10, "degree-count", True, float(n + 1), float(n + 1))
