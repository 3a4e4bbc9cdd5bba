"""Hyperelliptic curve w^2 = prod_j (z - a_j) restricted to a single sheet.

The branch points a_1 < ... < a_{2n+2} are real, so the curve carries an
antiholomorphic involution and the natural cuts are the n+1 disjoint real
intervals S_j = [a_{2j-1}, a_{2j}], called slits here.  On the slit
complement the square root has a single-valued branch; we fix it by the
normalization w(z) / z^{n+1} -> -1 as |z| -> infinity.  Points on a slit are
two-sided: approaching from Im z > 0 (North bank) or Im z < 0 (South bank)
gives opposite, purely imaginary limits of w.

Everything downstream (the meromorphic data, the contour integrals, the
surface itself) reduces to branch-stable evaluation of products of square
roots, which lives in the kernels module; this module owns the geometry of
the slits and the branch bookkeeping.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels


class CurveError(ValueError):
    """Invalid branch point data."""


class OnCutError(ValueError):
    """Evaluation requested on a slit interior without bank information."""


class Bank(enum.Enum):
    """Side from which a slit is approached."""

    NORTH = "N"  # limit from Im z > 0
    SOUTH = "S"  # limit from Im z < 0


@dataclass(frozen=True)
class SlitPoint:
    """A point on a slit, tagged with the approach side.

    j is the 1-based slit index, x the real coordinate inside
    [a_{2j-1}, a_{2j}].  At the two endpoints both banks represent the same
    point of the curve (w vanishes there).
    """

    j: int
    x: float
    bank: Bank


@dataclass(frozen=True)
class HyperellipticCurve:
    """Branch points plus derived slit geometry.  Immutable.

    Use make_curve to construct one; the constructor performs no validation.
    """

    a: tuple
    n: int

    @property
    def slits(self):
        """The n+1 closed intervals [a_{2j-1}, a_{2j}] as (lo, hi) pairs."""
        return tuple((self.a[2 * j], self.a[2 * j + 1]) for j in range(self.n + 1))

    @property
    def scale(self) -> float:
        return self.a[-1] - self.a[0]

    @property
    def rscale(self) -> float:
        """Radius of the branch point hull around the origin."""
        return max(abs(self.a[0]), abs(self.a[-1]))

    @property
    def min_gap(self) -> float:
        """Smallest distance between consecutive slits (inf when n = 0)."""
        gaps = [self.a[2 * j + 2] - self.a[2 * j + 1] for j in range(self.n)]
        return min(gaps) if gaps else np.inf

    @property
    def min_slit_len(self) -> float:
        return min(hi - lo for lo, hi in self.slits)

    @property
    def clearance(self) -> float:
        """Default standoff distance for paths and loops around the slits."""
        return 0.25 * min(self.min_gap, 0.5 * self.min_slit_len)

    @property
    def eps(self) -> float:
        # on-cut tolerance: below this distance a point counts as lying on the axis
        return 1e-13 * self.scale

    def slit_containing(self, x: float, slack: float = 0.0):
        """1-based index of the slit whose closed interval contains x, else None."""
        for j, (lo, hi) in enumerate(self.slits, start=1):
            if lo - slack <= x <= hi + slack:
                return j
        return None

    def dist_to_slits(self, z: complex) -> float:
        """Euclidean distance from z to the union of the closed slits."""
        x, y = z.real, z.imag
        best = np.inf
        for lo, hi in self.slits:
            dx = 0.0 if lo <= x <= hi else min(abs(x - lo), abs(x - hi))
            best = min(best, np.hypot(dx, y))
        return best

    def slit_point(self, j: int, x: float, bank: Bank) -> SlitPoint:
        """Validated SlitPoint on slit j."""
        lo, hi = self.slits[j - 1]
        if not lo <= x <= hi:
            raise CurveError(f"x = {x} outside slit {j} = [{lo}, {hi}]")
        return SlitPoint(j, float(x), bank)


def make_curve(a) -> HyperellipticCurve:
    """Build the curve from its real branch points.

    a must be a strictly increasing sequence of even length >= 2; the genus
    is n = len(a)/2 - 1 and the slits are consecutive pairs.  Offending
    entries are reported by index.
    """
    pts = [float(v) for v in a]
    if len(pts) < 2:
        raise CurveError(f"need at least 2 branch points, got {len(pts)}")
    for i, v in enumerate(pts):
        if not np.isfinite(v):
            raise CurveError(f"branch point a[{i}] = {v} is not finite")
    if len(pts) % 2 != 0:
        raise CurveError(f"need an even number of branch points, got {len(pts)}")
    for i in range(1, len(pts)):
        if pts[i] == pts[i - 1]:
            raise CurveError(f"duplicate branch point at index {i}")
        if pts[i] < pts[i - 1]:
            raise CurveError(
                f"branch points must be strictly increasing: a[{i}] = {pts[i]}"
                f" < a[{i - 1}] = {pts[i - 1]}"
            )
    return HyperellipticCurve(a=tuple(pts), n=len(pts) // 2 - 1)


def _check_off_cut(curve: HyperellipticCurve, z: complex) -> None:
    if abs(z.imag) <= curve.eps:
        j = curve.slit_containing(z.real)
        if j is not None:
            lo, hi = curve.slits[j - 1]
            # endpoints are unambiguous (w = 0), interiors are not
            if min(z.real - lo, hi - z.real) > curve.eps:
                raise OnCutError(
                    f"on-cut ambiguity: z = {z} lies on slit {j} = [{lo}, {hi}];"
                    " pass a SlitPoint with a bank instead"
                )


def eval_w(curve: HyperellipticCurve, z: complex) -> complex:
    """The branch of sqrt(prod (z - a_j)) with w(z)/z^{n+1} -> -1 at infinity.

    Single-valued and continuous on the slit complement; w(a_j) = 0.  The
    branch cuts fall exactly on the slits: crossing the real axis flips the
    sign of an odd number of square root factors only there.  Conjugation
    symmetry: w(conj z) = conj(w(z)).
    """
    z = complex(z)
    _check_off_cut(curve, z)
    return complex(eval_w_many(curve, np.array([z]))[0])


def eval_w_many(curve: HyperellipticCurve, z: np.ndarray) -> np.ndarray:
    """Vector form of eval_w without the on-cut guard."""
    a = np.asarray(curve.a, dtype=np.float64)
    return -kernels.branch_prod(a, np.empty(0), np.ascontiguousarray(z, dtype=np.complex128))


def eval_w_on_slit(curve: HyperellipticCurve, p: SlitPoint) -> complex:
    """Bank limit of w on a slit: purely imaginary, opposite across banks.

    North and South limits are complex conjugates (equivalently negatives):
    w_N = conj(w_S) = -w_S.
    """
    lo, hi = curve.slits[p.j - 1]
    if not lo <= p.x <= hi:
        raise CurveError(f"x = {p.x} outside slit {p.j} = [{lo}, {hi}]")
    a = np.asarray(curve.a, dtype=np.float64)
    out = -kernels.branch_prod_slit(
        a, np.empty(0), np.array([p.x], dtype=np.float64), p.bank == Bank.NORTH
    )
    return complex(out[0])


def laurent_at_infinity(curve: HyperellipticCurve, num_terms: int):
    """Coefficients e_1, ..., e_{num_terms} of w = -z^{n+1}(1 + e_1/z + ...).

    Computed by exponentiating the logarithmic series: log(-w/z^{n+1}) =
    (1/2) sum_j log(1 - a_j/z) has coefficient -(sum_j a_j^m)/(2m) at z^{-m},
    and the exponential is recovered by the standard convolution recurrence.
    """
    if num_terms < 1:
        raise CurveError(f"num_terms must be >= 1, got {num_terms}")
    a = np.asarray(curve.a, dtype=np.float64)
    q = np.array([-np.sum(a**m) / (2.0 * m) for m in range(1, num_terms + 1)])
    e = np.zeros(num_terms + 1)
    e[0] = 1.0
    for k in range(1, num_terms + 1):
        e[k] = sum(m * q[m - 1] * e[k - m] for m in range(1, k + 1)) / k
    return [complex(v) for v in e[1:]]
