"""Contour integration of the form densities along slit-avoiding paths.

Paths are polylines in the z-plane whose segment interiors stay off the
closed slits; endpoints may lie on a slit (as bank-tagged points) only at
the very start or end.  Each segment gets adaptive 15-point Gauss-Kronrod
panels; a segment ending at a branch point is reparametrized by
z = endpoint + s^2 (other - endpoint), which turns the inverse square root
edge singularity of the densities into an analytic integrand.

Planning is deterministic: a fixed clearance and a fixed homotopy convention
(detour through the half plane of the endpoints, or around the rightmost
branch point when the endpoints straddle the axis), so repeated runs produce
identical paths and identical imaginary parts (the real parts of closed-loop
periods vanish; the imaginary parts depend on the homotopy class).
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from . import kernels
from .curve import Bank, HyperellipticCurve, SlitPoint
from .weierstrass import WeierstrassData


class PathError(ValueError):
    """Polyline violates the slit-avoidance rules."""


class ToleranceError(RuntimeError):
    """Adaptive refinement stalled above the requested tolerance."""

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


def _segment_hits_slit(curve, p, q, skip_start=False, skip_end=False):
    """True if the open segment (p, q), or a non-exempt endpoint, meets a slit.

    skip_start/skip_end exempt the corresponding endpoint (used for path
    endpoints that legitimately lie on a slit).
    """
    eps = curve.eps
    py, qy = p.imag, q.imag
    if abs(py) <= eps and abs(qy) <= eps:
        # horizontal segment on the axis: overlap test against each slit
        lo_x, hi_x = sorted((p.real, q.real))
        for lo, hi in curve.slits:
            if hi_x > lo - eps and lo_x < hi + eps:
                # touching only at an exempt endpoint is fine
                inner_lo = max(lo_x, lo)
                inner_hi = min(hi_x, hi)
                if inner_hi - inner_lo > eps:
                    return True
                touch = 0.5 * (inner_lo + inner_hi)
                start_touch = abs(touch - p.real) <= eps and skip_start
                end_touch = abs(touch - q.real) <= eps and skip_end
                if not (start_touch or end_touch):
                    return True
        return False
    if py * qy > eps * eps and abs(py) > eps and abs(qy) > eps:
        return False  # strictly one side of the axis
    # one crossing (or touching) point of the axis
    if abs(py - qy) <= eps:
        return False
    t = py / (py - qy)
    x = p.real + t * (q.real - p.real)
    j = curve.slit_containing(x, slack=eps)
    if j is None:
        return False
    if t <= eps and skip_start:
        return False
    if t >= 1.0 - eps and skip_end:
        return False
    return True


@dataclass(frozen=True)
class IntegrationPath:
    """Validated polyline with optional bank tags for on-slit endpoints."""

    curve: HyperellipticCurve
    vertices: tuple
    start_bank: Bank | None = None
    end_bank: Bank | None = None

    def __post_init__(self):
        v = self.vertices
        if len(v) < 2:
            raise PathError("path needs at least two vertices")
        eps = self.curve.eps
        for i in range(1, len(v)):
            if abs(v[i] - v[i - 1]) <= eps:
                raise PathError(f"consecutive vertices {i - 1}, {i} coincide")
        for i, z in enumerate(v[1:-1], start=1):
            if abs(z.imag) <= eps and self.curve.slit_containing(z.real, slack=eps):
                raise PathError(
                    f"interior vertex {i} lies on a slit; on-slit points are"
                    " allowed only as path endpoints"
                )
        for i in range(len(v) - 1):
            if _segment_hits_slit(self.curve, v[i], v[i + 1],
                                  skip_start=(i == 0),
                                  skip_end=(i == len(v) - 2)):
                raise PathError(f"segment {i} crosses a slit")


def _as_plane_point(curve, p):
    """(complex position, bank-or-None) for a complex or SlitPoint argument."""
    if isinstance(p, SlitPoint):
        lo, hi = curve.slits[p.j - 1]
        if not lo <= p.x <= hi:
            raise PathError(f"x = {p.x} outside slit {p.j}")
        return complex(p.x, 0.0), p.bank
    z = complex(p)
    if abs(z.imag) <= curve.eps:
        j = curve.slit_containing(z.real)
        if j is not None:
            lo, hi = curve.slits[j - 1]
            if min(z.real - lo, hi - z.real) > curve.eps:
                raise PathError(
                    f"endpoint {z} lies inside slit {j}; pass a SlitPoint"
                    " with a bank"
                )
    return z, None


def _side(z, bank):
    if bank is not None:
        return 1.0 if bank == Bank.NORTH else -1.0
    if z.imag > 0.0:
        return 1.0
    if z.imag < 0.0:
        return -1.0
    return 0.0  # real off-slit point: reachable from either half plane


def plan_path(curve: HyperellipticCurve, frm, to) -> IntegrationPath:
    """Deterministic slit-avoiding polyline from frm to to.

    Same-side endpoints take a horizontal detour at height
    max(clearance, |Im| of the endpoints) in their half plane; endpoints on
    opposite sides go around the rightmost branch point, crossing the axis
    at a_{2n+2} + clearance.  On-slit endpoints are approached by a vertical
    segment from the bank side.
    """
    zf, bank_f = _as_plane_point(curve, frm)
    zt, bank_t = _as_plane_point(curve, to)
    d = curve.clearance
    sf, st_ = _side(zf, bank_f), _side(zt, bank_t)
    if sf == 0.0:
        sf = st_ if st_ != 0.0 else 1.0
    if st_ == 0.0:
        st_ = sf

    verts: list
    if sf == st_:
        level = sf * max(d, abs(zf.imag), abs(zt.imag))
        verts = [zf,
                 complex(zf.real, level),
                 complex(zt.real, level),
                 zt]
    else:
        xr = curve.a[-1] + d
        lf = sf * max(d, abs(zf.imag))
        lt = st_ * max(d, abs(zt.imag))
        verts = [zf,
                 complex(zf.real, lf),
                 complex(xr, lf),
                 complex(xr, lt),
                 complex(zt.real, lt),
                 zt]

    eps = curve.eps
    dedup = [verts[0]]
    for z in verts[1:]:
        if abs(z - dedup[-1]) > eps:
            dedup.append(z)
    if len(dedup) == 1:
        # degenerate request (frm == to): keep a minimal out-and-back hop
        hop = dedup[0] + complex(0.0, sf * d)
        dedup = [dedup[0], hop, dedup[0]]
    return IntegrationPath(curve=curve, vertices=tuple(dedup),
                           start_bank=bank_f, end_bank=bank_t)


# ---------------------------------------------------------------------------
# adaptive integration

_MAX_PANELS = 4096


def _adapt(panel, a, b, tol, ctx):
    """Adaptive bisection driven by the largest per-panel error estimate.

    panel(a, b) -> (I[3], E[3]).  Returns (I[3], E[3]) for [a, b]; raises
    ToleranceError when the panel budget runs out first.
    """
    I, E = panel(a, b)
    total_i = I.copy()
    total_e = E.copy()
    heap = [(-float(E.max()), 0, a, b, I, E)]
    count = 1
    while float(total_e.max()) > tol and heap:
        if count >= _MAX_PANELS:
            raise ToleranceError(
                f"quadrature tolerance not met on {ctx}: achieved"
                f" {float(total_e.max()):.3e} > {tol:.3e}"
                f" with {count} panels",
                achieved=float(total_e.max()),
            )
        _, _, pa, pb, pi, pe = heapq.heappop(heap)
        total_i -= pi
        total_e -= pe
        mid = 0.5 * (pa + pb)
        for lo, hi in ((pa, mid), (mid, pb)):
            I, E = panel(lo, hi)
            total_i += I
            total_e += E
            count += 1
            heapq.heappush(heap, (-float(E.max()), count, lo, hi, I, E))
    return total_i, total_e


def _segment_integral(data, z0, z1, tol, sing0, sing1):
    """Integral of the three densities over one segment with error estimate."""
    ct, st = np.cos(data.theta), np.sin(data.theta)
    I, E = _segment_clean(data, z0, z1, tol, sing0, sing1)
    if data.debug_break_branch and (z0.imag + z1.imag) < 0.0:
        # fault hook: flipping the sign of the branch ratio sends the density
        # vector f to d - f with constant d, so the broken segment value falls
        # out of the clean one; segments never straddle the axis mid-span
        d = np.array([-4j * data.A * ct, -4j * data.A * st, 0.0])
        I = d * (z1 - z0) - I
    return I, E


def _segment_clean(data, z0, z1, tol, sing0, sing1):
    b, c = data.b_array, data.c_array
    ct, st = np.cos(data.theta), np.sin(data.theta)
    A = data.A
    if sing0 and sing1:
        mid = 0.5 * (z0 + z1)
        i1, e1 = _segment_clean(data, z0, mid, 0.5 * tol, True, False)
        i2, e2 = _segment_clean(data, mid, z1, 0.5 * tol, False, True)
        return i1 + i2, e1 + e2
    if sing0:
        panel = lambda s0, s1: kernels.panel_forms_sqrt(b, c, ct, st, A,
                                                        z0, z1, s0, s1)
        return _adapt(panel, 0.0, 1.0, tol, f"segment {z0} -> {z1}")
    if sing1:
        panel = lambda s0, s1: kernels.panel_forms_sqrt(b, c, ct, st, A,
                                                        z1, z0, s0, s1)
        I, E = _adapt(panel, 0.0, 1.0, tol, f"segment {z0} -> {z1}")
        return -I, E
    panel = lambda p0, p1: kernels.panel_forms_line(b, c, ct, st, A, p0, p1)
    return _adapt(panel, z0, z1, tol, f"segment {z0} -> {z1}")


def _is_branch_point(curve, z):
    return abs(z.imag) <= curve.eps and any(
        abs(z.real - a) <= curve.eps for a in curve.a
    )


def integrate_with_error(data: WeierstrassData, path: IntegrationPath,
                         tol: float = 1e-10):
    """(integrals (3,) complex, error estimates (3,) float) along the path."""
    v = path.vertices
    nseg = len(v) - 1
    seg_tol = tol / nseg
    total_i = np.zeros(3, dtype=np.complex128)
    total_e = np.zeros(3, dtype=np.float64)
    curve = data.curve
    for i in range(nseg):
        sing0 = i == 0 and _is_branch_point(curve, v[0])
        sing1 = i == nseg - 1 and _is_branch_point(curve, v[-1])
        I, E = _segment_integral(data, v[i], v[i + 1], seg_tol, sing0, sing1)
        total_i += I
        total_e += E
    return total_i, total_e


def integrate_forms(data: WeierstrassData, path: IntegrationPath,
                    tol: float = 1e-10) -> np.ndarray:
    """(int f1 dz, int f2 dz, int f3 dz) along the path, abs error below tol.

    tol is a per-component absolute budget for the whole path, split evenly
    across segments; a stall raises ToleranceError with the achieved error.
    """
    I, _ = integrate_with_error(data, path, tol)
    return I


@dataclass(frozen=True)
class LoopPeriod:
    """Periods of the three densities around one slit (counterclockwise)."""

    j: int
    values: tuple
    errors: tuple


def stadium_ring(curve: HyperellipticCurve, j: int, d: float,
                 n_cap: int = 8, n_edge: int = 8):
    """Vertices of a stadium-shaped loop at distance d around slit j.

    Counterclockwise, starting below the left endpoint; the list is open
    (no repeated first vertex).  Polygonal caps inscribed in the distance-d
    circles stay within cos(pi/(2 n_cap)) * d of the branch points, which is
    ample clearance for the integrand bound.
    """
    lo, hi = curve.slits[j - 1]
    pts = []
    for k in range(n_edge):
        t = k / n_edge
        pts.append(complex(lo + t * (hi - lo), -d))
    for k in range(n_cap):
        ang = -0.5 * np.pi + np.pi * k / n_cap
        pts.append(hi + d * np.exp(1j * ang))
    for k in range(n_edge):
        t = k / n_edge
        pts.append(complex(hi - t * (hi - lo), d))
    for k in range(n_cap):
        ang = 0.5 * np.pi + np.pi * k / n_cap
        pts.append(lo + d * np.exp(1j * ang))
    return pts


def slit_loop_period(data: WeierstrassData, j: int,
                     tol: float = 1e-10) -> LoopPeriod:
    """Counterclockwise loop periods around slit j with error estimates.

    All three periods are purely imaginary (single-valuedness of the real
    immersion), and the combination cos(theta) f1 + sin(theta) f2 has zero
    period because its density is constant.  The f3 periods sum to 2 pi i
    times the growth coefficient over all slits (residue at infinity,
    counterclockwise convention).
    """
    curve = data.curve
    if not 1 <= j <= curve.n + 1:
        raise ValueError(f"slit index {j} out of range 1..{curve.n + 1}")
    ring = stadium_ring(curve, j, curve.clearance)
    verts = tuple(ring + [ring[0]])
    path = IntegrationPath(curve=curve, vertices=verts)
    values, errors = integrate_with_error(data, path, tol)
    return LoopPeriod(j=j, values=tuple(complex(v) for v in values),
                      errors=tuple(float(e) for e in errors))
