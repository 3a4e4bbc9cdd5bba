"""Assembling the graphs from the form densities.

The immersion is X = base + Re int (f1, f2, f3) dz from a fixed base point
z0, and every quantity of interest (cone vertices, meshes, gradients,
finite difference residuals) needs X at many related points.  A walker
carries the running integral along a connected tour: moving to a nearby
point costs one short segment, and differences between nearby stops are
exact to machine precision even after the absolute tour error has
accumulated.  Straight hops are used whenever the segment avoids the
slits; otherwise the deterministic planner takes over.

The height function u over the horizontal plane is recovered two ways:
by projecting mesh samples (project_to_graph) and by Newton inversion of
the horizontal coordinates (GraphEvaluator), which is what the finite
difference residual of the zero mean curvature equation runs on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .curve import Bank, HyperellipticCurve, SlitPoint
from .quadrature import (_segment_hits_slit, _segment_integral,
                         integrate_with_error, plan_path)
from .weierstrass import (WeierstrassData, eval_forms_many, eval_g_many,
                          growth_coefficient)


class SlitCollapseError(RuntimeError):
    """A slit failed to map to a single point within tolerance."""


class FoldError(RuntimeError):
    """Sampled points violate the chord condition of a spacelike graph."""


class InversionError(RuntimeError):
    """Newton inversion of the horizontal coordinates failed to converge."""


def default_z0(curve: HyperellipticCurve) -> complex:
    """Canonical integration base point: on the axis, right of every slit."""
    return complex(curve.a[-1] + curve.scale, 0.0)


class _Walker:
    """Running integral of the densities along a connected tour.

    move() advances to an off-cut point, integrating one direct segment
    when the straight hop avoids the slits and a planned detour otherwise.
    probe() evaluates a target without advancing, so a cluster of nearby
    evaluations shares the whole tour prefix and their differences carry
    only the local segment error.  tol is a per leg budget.
    """

    def __init__(self, data: WeierstrassData, z0, base=None, tol=1e-12):
        self.data = data
        self.curve = data.curve
        self.tol = float(tol)
        self.z = complex(z0)
        self.acc = np.zeros(3, dtype=np.complex128)
        self.base = (np.zeros(3) if base is None
                     else np.asarray(base, dtype=np.float64))
        self.err = 0.0  # sum of leg error estimates, bounds the drift

    @property
    def X(self) -> np.ndarray:
        return self.base + self.acc.real

    def _integral_to(self, p: complex):
        if _segment_hits_slit(self.curve, self.z, p):
            path = plan_path(self.curve, self.z, p)
            return integrate_with_error(self.data, path, self.tol)
        return _segment_integral(self.data, self.z, p, self.tol, False, False)

    def move(self, p) -> np.ndarray:
        p = complex(p)
        if p != self.z:
            I, E = self._integral_to(p)
            self.acc += I
            self.err += float(np.max(E))
            self.z = p
        return self.X

    def probe(self, p) -> np.ndarray:
        p = complex(p)
        if p == self.z:
            return self.X
        I, _ = self._integral_to(p)
        return self.base + (self.acc + I).real

    def probe_slit(self, p: SlitPoint) -> np.ndarray:
        """X at a bank tagged slit point, reached by a vertical dip.

        The walker must already hover straight above or below p on the bank
        side.  The dip integrand is smooth up to the slit interior; a dip
        onto a branch point gets the weighted endpoint treatment.
        """
        sgn = 1.0 if p.bank is Bank.NORTH else -1.0
        if self.z.real != p.x or sgn * self.z.imag <= 0.0:
            raise ValueError("walker must hover on the bank side of the dip")
        lo, hi = self.curve.slits[p.j - 1]
        sing = min(p.x - lo, hi - p.x) <= self.curve.eps
        I, _ = _segment_integral(self.data, self.z, complex(p.x, 0.0),
                                 self.tol, False, sing)
        return self.base + (self.acc + I).real


def sample_X(data: WeierstrassData, points, z0=None, base=None,
             tol: float = 1e-10) -> np.ndarray:
    """X at a sequence of off-cut points, visited in order by one walker.

    The order affects only the cost; the immersion is single valued, so the
    values are path independent up to the integration tolerance.
    """
    if z0 is None:
        z0 = default_z0(data.curve)
    pts = np.atleast_1d(np.asarray(points, dtype=np.complex128))
    w = _Walker(data, z0, base, tol)
    out = np.empty((pts.size, 3), dtype=np.float64)
    for i, p in enumerate(pts):
        out[i] = w.move(p)
    return out


def eval_X(data: WeierstrassData, p, z0=None, base=None,
           tol: float = 1e-10) -> np.ndarray:
    """X at one point: complex off the cuts, or a bank tagged SlitPoint."""
    if z0 is None:
        z0 = default_z0(data.curve)
    w = _Walker(data, z0, base, tol)
    if isinstance(p, SlitPoint):
        sgn = 1.0 if p.bank is Bank.NORTH else -1.0
        w.move(complex(p.x, sgn * data.curve.clearance))
        return w.probe_slit(p)
    return w.move(p)


def singular_points(data: WeierstrassData, z0=None, base=None,
                    tol: float = 1e-10, samples_per_bank: int = 16,
                    full: bool = False):
    """The cone vertices, one per slit, as an (n+1, 3) array.

    Dips onto each slit from both banks at interior points; the immersion
    collapses the whole slit boundary to one point, so the spread of the
    sampled values is a direct residual of that collapse.  A spread above
    threshold raises SlitCollapseError; that is the designed failure mode
    for endpoint selections that put both points on one slit and for broken
    branch conventions.  With full=True returns (vertices, spreads).
    """
    curve = data.curve
    if z0 is None:
        z0 = default_z0(curve)
    w = _Walker(data, z0, base, tol=tol / 64.0)
    h = curve.clearance
    thresh = 10.0 * tol * max(1.0, abs(data.A) * curve.scale)
    out = np.empty((curve.n + 1, 3), dtype=np.float64)
    spreads = np.empty(curve.n + 1, dtype=np.float64)
    for j, (lo, hi) in enumerate(curve.slits, start=1):
        t = (np.arange(samples_per_bank) + 0.5) / samples_per_bank
        xs = lo + (hi - lo) * t
        vals = []
        # north bank left to right, then south bank right to left; the bank
        # switch routes around the slit via the planner
        for bank, sgn, order in ((Bank.NORTH, 1.0, xs),
                                 (Bank.SOUTH, -1.0, xs[::-1])):
            for x in order:
                w.move(complex(x, sgn * h))
                vals.append(w.probe_slit(SlitPoint(j, float(x), bank)))
        vals = np.array(vals)
        q = vals.mean(axis=0)
        spread = float(np.max(np.abs(vals - q)))
        if spread > thresh:
            raise SlitCollapseError(
                f"slit {j} does not collapse to a point: value spread"
                f" {spread:.3e} exceeds {thresh:.3e}"
            )
        out[j - 1] = q
        spreads[j - 1] = spread
    if full:
        return out, spreads
    return out


@dataclass
class MaximalGraph:
    """One member of the family, anchored at a base point.

    singularities rows are the cone vertices in slit order; growth is the
    coefficient of log r in the height along the end.
    """

    data: WeierstrassData
    z0: complex
    base_point: np.ndarray
    singularities: np.ndarray
    growth: float
    tol: float

    @property
    def curve(self) -> HyperellipticCurve:
        return self.data.curve

    def position(self, p, tol=None) -> np.ndarray:
        return eval_X(self.data, p, self.z0, self.base_point,
                      self.tol if tol is None else tol)


def build_graph(data: WeierstrassData, z0=None,
                base_point=(0.0, 0.0, 0.0), tol: float = 1e-10) -> MaximalGraph:
    """Locate the cone vertices and growth of one surface, ready to sample."""
    curve = data.curve
    if z0 is None:
        z0 = default_z0(curve)
    base = np.asarray(base_point, dtype=np.float64)
    sing = singular_points(data, z0=z0, base=base, tol=tol)
    return MaximalGraph(data=data, z0=complex(z0), base_point=base,
                        singularities=sing,
                        growth=growth_coefficient(data), tol=tol)


def gradient_norm(data: WeierstrassData, z) -> np.ndarray:
    """|grad u| at off-slit points, via the Gauss map: 2|g| / (1 + |g|^2).

    Strictly below 1 wherever |g| != 1; the slits, where |g| = 1, are where
    the graph reaches slope one (the cone vertices).
    """
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    absg = np.abs(eval_g_many(data, z))
    return 2.0 * absg / (1.0 + absg**2)


def log_growth_fit(data: WeierstrassData, z0=None, tol: float = 1e-9,
                   radii=None, n_angles: int = 16):
    """Fit x3 to c log r + b on large circles; returns (c_fit, offset).

    The height on |z| = r differs from its angular mean by O(1/r) harmonics;
    averaging over n_angles equally spaced angles cancels every harmonic
    except multiples of n_angles, so the mean follows c log r + b far beyond
    the fit tolerance and a plain two parameter fit recovers the growth.
    """
    curve = data.curve
    if z0 is None:
        z0 = default_z0(curve)
    if radii is None:
        radii = np.geomspace(10.0, 50.0, 6) * curve.rscale
    radii = np.asarray(radii, dtype=np.float64)
    w = _Walker(data, z0, tol=tol / 16.0)
    means = np.empty(radii.size)
    for i, r in enumerate(radii):
        vals = np.empty(n_angles)
        for k in range(n_angles):
            z = r * np.exp(2j * np.pi * k / n_angles)
            vals[k] = w.move(z)[2]
        means[i] = vals.mean()
    slope, offset = np.polyfit(np.log(radii), means, 1)
    return float(slope), float(offset)


# ---------------------------------------------------------------------------
# meshes and the graph projection

@dataclass
class SurfaceMesh:
    """Quad mesh samples of the immersion with parameter provenance.

    vertices holds X rows; faces indexes quads between consecutive rings of
    one region.  z, bank, region and ring record where each vertex came
    from: region j >= 1 is the stadium ring family around slit j, region 0
    the far field circles; bank is N or S by the sign of Im z, '-' on the
    axis.  tour_err bounds the accumulated absolute error of any vertex.
    """

    vertices: np.ndarray
    faces: np.ndarray
    z: np.ndarray
    bank: np.ndarray
    region: np.ndarray
    ring: np.ndarray
    tol: float
    tour_err: float


def _neighbor_gap(curve: HyperellipticCurve, j: int) -> float:
    # axis distance from slit j to the nearest other slit (inf when alone)
    a = curve.a
    left = a[2 * j - 2] - a[2 * j - 3] if j > 1 else np.inf
    right = a[2 * j] - a[2 * j - 1] if j <= curve.n else np.inf
    return min(left, right)


def _ring_distances(curve, j, rings, inner_frac):
    lo, hi = curve.slits[j - 1]
    d0 = inner_frac * (hi - lo)
    d = d0 * 2.0 ** np.arange(rings)
    cap = 0.45 * _neighbor_gap(curve, j)
    if d[-1] > cap:
        d = np.geomspace(d0, cap, rings)
    return d


def sample_mesh(data: WeierstrassData, z0=None, base=None, tol: float = 1e-9,
                rings_per_slit: int = 12, n_cap: int = 12, n_edge: int = 12,
                far_circles: int = 8, far_angles: int = 64,
                inner_frac: float = 1e-4,
                far_radius: float = 50.0) -> SurfaceMesh:
    """Sample the immersion on stadium rings around each slit plus far field
    circles, one walker tour, and stitch quads between consecutive rings.

    Ring distances start at inner_frac times the slit length and double
    outward, capped below half the gap to the neighboring slit; rings of
    different regions are not stitched to each other.
    """
    from .quadrature import stadium_ring

    curve = data.curve
    if z0 is None:
        z0 = default_z0(curve)
    w = _Walker(data, z0, base, tol=tol / 16.0)

    verts, zs, banks, regions, ring_ids = [], [], [], [], []
    faces = []

    def emit(pt, region, ring):
        verts.append(w.move(pt))
        zs.append(complex(pt))
        banks.append("N" if pt.imag > 0.0 else ("S" if pt.imag < 0.0 else "-"))
        regions.append(region)
        ring_ids.append(ring)
        return len(verts) - 1

    def stitch(grid):
        # grid[k] lists the vertex ids of ring k; quads between k and k+1
        for k in range(len(grid) - 1):
            m = len(grid[k])
            for i in range(m):
                faces.append((grid[k][i], grid[k][(i + 1) % m],
                              grid[k + 1][(i + 1) % m], grid[k + 1][i]))

    for j in range(1, curve.n + 2):
        d = _ring_distances(curve, j, rings_per_slit, inner_frac)
        grid = [None] * rings_per_slit
        # walk outermost first: the approach from the previous region lands
        # on the cheap outer ring, then spirals inward
        for k in reversed(range(rings_per_slit)):
            pts = stadium_ring(curve, j, float(d[k]), n_cap, n_edge)
            grid[k] = [emit(p, j, k) for p in pts]
        stitch(grid)

    radii = np.geomspace(2.0 * curve.rscale, far_radius * curve.rscale,
                         far_circles)
    grid = []
    for k, r in enumerate(radii):
        ring = [emit(r * np.exp(2j * np.pi * i / far_angles), 0, k)
                for i in range(far_angles)]
        grid.append(ring)
    stitch(grid)

    return SurfaceMesh(
        vertices=np.array(verts, dtype=np.float64),
        faces=np.array(faces, dtype=np.int64).reshape(-1, 4),
        z=np.array(zs, dtype=np.complex128),
        bank=np.array(banks, dtype="U1"),
        region=np.array(regions, dtype=np.int64),
        ring=np.array(ring_ids, dtype=np.int64),
        tol=tol,
        tour_err=float(w.err),
    )


@dataclass
class GraphFunction:
    """Scattered samples u(x1, x2) of the height with fitted gradients."""

    xy: np.ndarray
    u: np.ndarray
    grad: np.ndarray
    fold_pairs: int
    chord_margin: float


def project_to_graph(mesh: SurfaceMesh, k: int = 12, slack=None,
                     raise_on_fold: bool = True) -> GraphFunction:
    """Read the mesh as a graph u(x1, x2) and check it really is one.

    For every vertex the k nearest neighbors give a least squares plane
    (the gradient estimate) and a chord test |du| <= |dxy| + slack; a
    violating pair means two samples that no spacelike graph can contain.
    The default slack covers the accumulated tour error of the mesh.
    """
    xy = mesh.vertices[:, :2]
    u = mesh.vertices[:, 2]
    if slack is None:
        slack = 10.0 * mesh.tol + 4.0 * mesh.tour_err
    tree = cKDTree(xy)
    dist, idx = tree.query(xy, k=k + 1)

    grad = np.empty((u.size, 2), dtype=np.float64)
    for i in range(u.size):
        dxy = xy[idx[i]] - xy[i]
        du = u[idx[i]] - u[i]
        A = np.column_stack([np.ones(idx.shape[1]), dxy])
        coef, *_ = np.linalg.lstsq(A, du, rcond=None)
        grad[i] = coef[1:]

    du = np.abs(u[idx] - u[:, None])
    excess = du[:, 1:] - dist[:, 1:] - slack
    fold_pairs = int(np.count_nonzero(excess > 0.0))
    chord_margin = float(-excess.max())
    if fold_pairs and raise_on_fold:
        raise FoldError(
            f"{fold_pairs} neighbor pairs violate the chord bound by up to"
            f" {excess.max():.3e}"
        )
    return GraphFunction(xy=xy, u=u, grad=grad, fold_pairs=fold_pairs,
                         chord_margin=chord_margin)


# ---------------------------------------------------------------------------
# pointwise evaluation of the height and finite difference residuals

class GraphEvaluator:
    """Evaluates u(x1, x2) by Newton inversion of the horizontal map.

    The horizontal projection of the immersion is a global diffeomorphism
    of the plane, so damped Newton from the far field linear estimate or
    from the previous solution converges for any target; steps backtrack to
    force decrease and to stay off the slits.  Consecutive targets should
    be near each other for the walker to stay cheap.
    """

    def __init__(self, graph: MaximalGraph, tol: float = 1e-11,
                 max_iter: int = 60):
        self.graph = graph
        self.data = graph.data
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self._w = _Walker(self.data, graph.z0, graph.base_point, tol=1e-13)

    def _cold_start(self, x1, x2) -> complex:
        # invert the leading far field term of the horizontal map
        g = self.graph
        t = complex(x2 - g.base_point[1], x1 - g.base_point[0])
        z = g.z0 + np.exp(1j * self.data.theta) * t / (2.0 * self.data.A)
        curve = self.data.curve
        if curve.dist_to_slits(z) < 0.1 * curve.clearance:
            side = 1.0 if z.imag >= 0.0 else -1.0
            z = complex(z.real, z.imag + side * curve.clearance)
        return z

    def locate(self, x1, x2) -> complex:
        """Parameter point whose image has the given horizontal coordinates."""
        w = self._w
        curve = self.data.curve

        def res(X):
            return float(np.hypot(X[0] - x1, X[1] - x2))

        zc = self._cold_start(x1, x2)
        if res(w.probe(zc)) < res(w.X):
            w.move(zc)
        X = w.X
        r0 = res(X)
        for _ in range(self.max_iter):
            if r0 <= self.tol:
                return w.z
            f = eval_forms_many(self.data, np.array([w.z]))[:, 0]
            J = np.array([[f[0].real, -f[0].imag],
                          [f[1].real, -f[1].imag]])
            try:
                step = np.linalg.solve(J, [x1 - X[0], x2 - X[1]])
            except np.linalg.LinAlgError:
                raise InversionError(f"singular horizontal map at z = {w.z}")
            dz = complex(step[0], step[1])
            t = 1.0
            while True:
                zn = w.z + t * dz
                if curve.dist_to_slits(zn) > 10.0 * curve.eps:
                    rn = res(w.probe(zn))
                    if rn < r0 * (1.0 - 0.25 * t) or rn <= self.tol:
                        break
                t *= 0.5
                if t < 1e-8:
                    raise InversionError(
                        f"stalled at z = {w.z} targeting ({x1}, {x2})"
                    )
            X = w.move(zn)
            r0 = res(X)
        if r0 <= self.tol:
            return w.z
        raise InversionError(
            f"no convergence after {self.max_iter} steps targeting"
            f" ({x1}, {x2}): residual {r0:.3e}"
        )

    def height(self, x1, x2) -> float:
        self.locate(x1, x2)
        return float(self._w.X[2])

    def heights(self, xy) -> np.ndarray:
        xy = np.asarray(xy, dtype=np.float64).reshape(-1, 2)
        return np.array([self.height(p[0], p[1]) for p in xy])


def _flux_residual(U, h):
    # divergence of grad u / sqrt(1 - |grad u|^2), conservative fluxes on
    # the four half edges of the 3 x 3 stencil; U is indexed [ix, iy]
    def flux(p, q):
        return p / np.sqrt(1.0 - p * p - q * q)

    pe = (U[2, 1] - U[1, 1]) / h
    qe = (U[2, 2] + U[1, 2] - U[2, 0] - U[1, 0]) / (4.0 * h)
    pw = (U[1, 1] - U[0, 1]) / h
    qw = (U[1, 2] + U[0, 2] - U[1, 0] - U[0, 0]) / (4.0 * h)
    qn = (U[1, 2] - U[1, 1]) / h
    pn = (U[2, 2] + U[2, 1] - U[0, 2] - U[0, 1]) / (4.0 * h)
    qs = (U[1, 1] - U[1, 0]) / h
    ps = (U[2, 1] + U[2, 0] - U[0, 1] - U[0, 0]) / (4.0 * h)
    return (flux(pe, qe) - flux(pw, qw) + flux(qn, pn) - flux(qs, ps)) / h


def pde_residual_orders(graph: MaximalGraph, centers=None, hs=None,
                        tol: float = 1e-11, n_centers: int = 5) -> np.ndarray:
    """Convergence order of the zero mean curvature residual of u.

    Evaluates u on 3 x 3 stencils and assembles the conservative divergence
    form residual; on an exact solution the residual is pure truncation, so
    it scales like h^2 and the fitted slopes sit near 2.  Default centers
    are spread on a circle in the plane and nudged away from the cone
    vertices, where u is only Lipschitz.
    """
    data = graph.data
    R = 6.0 * abs(data.A) * data.curve.rscale
    if hs is None:
        hs = R * np.array([0.12, 0.06, 0.03])
    hs = np.asarray(hs, dtype=np.float64)
    cones = graph.singularities[:, :2]
    if centers is None:
        centers = []
        for k in range(n_centers):
            psi = 2.0 * np.pi * k / n_centers + 0.4
            for _ in range(40):
                cand = R * np.array([np.cos(psi), np.sin(psi)])
                if np.min(np.hypot(cones[:, 0] - cand[0],
                                   cones[:, 1] - cand[1])) >= 4.0 * hs.max():
                    break
                psi += 0.25
            centers.append(cand)
    ev = GraphEvaluator(graph, tol=tol)
    orders = np.empty(len(centers))
    offs = (-1, 0, 1)
    for ci, cen in enumerate(centers):
        resid = np.empty(hs.size)
        for hi, h in enumerate(hs):
            U = np.empty((3, 3))
            for a in range(3):
                for b in range(3):
                    U[a, b] = ev.height(cen[0] + offs[a] * h,
                                        cen[1] + offs[b] * h)
            resid[hi] = abs(_flux_residual(U, h))
        orders[ci] = np.polyfit(np.log(hs), np.log(resid), 1)[0]
    return orders


def harmonic_residual_orders(data: WeierstrassData, z0=None, centers=None,
                             hs=None, n_centers: int = 5) -> np.ndarray:
    """Convergence order of the five point Laplacian of the coordinates.

    All three coordinate functions are harmonic in the parameter, so the
    discrete Laplacian is pure truncation; the order is fitted on the norm
    of the residual vector because single components can vanish identically
    (the first coordinate is linear when theta = 0).
    """
    curve = data.curve
    if z0 is None:
        z0 = default_z0(curve)
    if centers is None:
        ang = 2.0 * np.pi * np.arange(n_centers) / n_centers + 0.4
        centers = 3.0 * curve.rscale * np.exp(1j * ang)
    centers = np.atleast_1d(np.asarray(centers, dtype=np.complex128))
    if hs is None:
        hs = curve.rscale * np.array([0.4, 0.2, 0.1])
    hs = np.asarray(hs, dtype=np.float64)
    w = _Walker(data, z0, tol=1e-13)
    orders = np.empty(centers.size)
    for ci, cen in enumerate(centers):
        resid = np.empty(hs.size)
        for hi, h in enumerate(hs):
            Xc = w.move(cen)
            lap = (w.probe(cen + h) + w.probe(cen - h)
                   + w.probe(cen + 1j * h) + w.probe(cen - 1j * h)
                   - 4.0 * Xc) / h**2
            resid[hi] = float(np.linalg.norm(lap))
        orders[ci] = np.polyfit(np.log(hs), np.log(resid), 1)[0]
    return orders
