"""Spin choices and the closed-form Weierstrass data (g, phi3).

A spin choice tau picks one endpoint b_j from each slit [a_{2j-1}, a_{2j}];
the complementary endpoints are c_j.  With P(z) = prod (z - b_j) and
C(z) = prod (z - c_j) the data is

    g = e^{i theta} (w + P) / (w - P),      phi3 = A (w/P - P/w) dz,

and the whole integrand triple of the representation formula collapses to
algebraic expressions in S = w/P alone:

    f1 = -2iA cos(theta) + A sin(theta) (S + 1/S)
    f2 = -2iA sin(theta) - A cos(theta) (S + 1/S)
    f3 = A (S - 1/S)

S itself factors exactly as -prod_k sqrt(z - c_k)/sqrt(z - b_k) with
principal roots, which is branch-stable on the slit complement and has no
0/0 anywhere; this identity is what all evaluators use.  Each choice and its
bitwise complement produce congruent surfaces (the complement negates g and
phi3, reflecting the height), which cuts the 2^{n+1} choices down to 2^n
congruence classes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .curve import Bank, CurveError, HyperellipticCurve, SlitPoint


class EndpointSingularityError(ValueError):
    """Forms evaluated at a branch point, where they blow up like 1/sqrt."""


@dataclass(frozen=True)
class SpinChoice:
    """One endpoint per slit: bit j False -> b_j = a_{2j-1}, True -> a_{2j}."""

    curve: HyperellipticCurve
    bits: tuple

    def __post_init__(self):
        if len(self.bits) != self.curve.n + 1:
            raise CurveError(
                f"need {self.curve.n + 1} bits, got {len(self.bits)}"
            )

    @property
    def b(self):
        """Selected endpoints, one per slit, automatically increasing."""
        a = self.curve.a
        return tuple(a[2 * j + 1] if bit else a[2 * j]
                     for j, bit in enumerate(self.bits))

    @property
    def c(self):
        """The complementary endpoints."""
        a = self.curve.a
        return tuple(a[2 * j] if bit else a[2 * j + 1]
                     for j, bit in enumerate(self.bits))

    @property
    def bitstring(self) -> str:
        return "".join("1" if bit else "0" for bit in self.bits)

    def complement(self) -> "SpinChoice":
        return SpinChoice(self.curve, tuple(not bit for bit in self.bits))


def enumerate_admissible(curve: HyperellipticCurve):
    """All 2^{n+1} one-endpoint-per-slit choices, in lexicographic bit order."""
    return [SpinChoice(curve, bits)
            for bits in itertools.product((False, True), repeat=curve.n + 1)]


def congruence_classes(choices):
    """Pair every choice with its bitwise complement: 2^n congruence classes.

    The representative of each pair is the choice with bit 1 unset (b_1 =
    a_1).  Raises if the input is not closed under complementation.
    """
    by_bits = {ch.bits: ch for ch in choices}
    if len(by_bits) != len(choices):
        raise ValueError("duplicate choices in input")
    for ch in choices:
        if ch.complement().bits not in by_bits:
            raise ValueError(
                f"choices not closed under complementation: missing partner"
                f" of {ch.bitstring}"
            )
    pairs = []
    for ch in choices:
        if not ch.bits[0]:
            pairs.append((ch, by_bits[ch.complement().bits]))
    return pairs


@dataclass(frozen=True)
class WeierstrassData:
    """Evaluators for g and the three form densities of one (curve, tau).

    P and C are the monic real polynomials with roots b and c; their product
    is the full branch point polynomial.  theta rotates the data (a vertical
    rotation of the surface), A scales it (a homothety).  Instances are
    immutable and safe for concurrent reads.
    """

    curve: HyperellipticCurve
    tau: SpinChoice | None
    theta: float
    A: float
    b: tuple
    c: tuple
    P_coeffs: tuple
    C_coeffs: tuple
    # test hook: deliberately negate S below the real axis, breaking the
    # branch convention; used by the fault-injection path of the CLI
    debug_break_branch: bool = field(default=False, compare=False)

    @property
    def b_array(self) -> np.ndarray:
        return np.asarray(self.b, dtype=np.float64)

    @property
    def c_array(self) -> np.ndarray:
        return np.asarray(self.c, dtype=np.float64)


def _validate_poly_split(curve, b, c):
    P = np.poly(b)
    C = np.poly(c)
    full = np.poly(curve.a)
    prod = np.polymul(P, C)
    scale = np.max(np.abs(full))
    if np.max(np.abs(prod - full)) > 1e-12 * max(scale, 1.0):
        raise CurveError("endpoint split does not factor the branch polynomial")
    return tuple(P), tuple(C)


def _validate_simplified_forms(data, npts=100, tol=1e-11):
    """Simplified form densities must agree with the g-based expressions.

    Checked at deterministic off-slit sample points; the two computations
    share only the square root products, not the algebra on top.
    """
    rng = np.random.default_rng(90291)
    curve = data.curve
    R = 1.5 * curve.rscale
    pts = []
    while len(pts) < npts:
        zs = (rng.uniform(-R, R, 4 * npts)
              + 1j * rng.uniform(-R, R, 4 * npts))
        for z in zs:
            if curve.dist_to_slits(complex(z)) > 1e-2 * curve.scale:
                pts.append(complex(z))
            if len(pts) == npts:
                break
    z = np.array(pts)
    f = eval_forms_many(data, z)
    S = _S_many(data, z)
    h = data.A * (S - 1.0 / S)
    g = np.exp(1j * data.theta) * (S + 1.0) / (S - 1.0)
    raw = np.stack([
        0.5j * (1.0 / g - g) * h,
        -0.5 * (1.0 / g + g) * h,
        h,
    ])
    scale = np.maximum(np.abs(raw), 1.0)
    worst = float(np.max(np.abs(f - raw) / scale))
    if worst > tol:
        raise CurveError(
            f"simplified forms disagree with the defining expressions:"
            f" max relative difference {worst:.3e}"
        )


def build_data(curve: HyperellipticCurve, tau: SpinChoice,
               theta: float = 0.0, A: float = 1.0) -> WeierstrassData:
    """Weierstrass data for an admissible choice.  A must be nonzero."""
    if A == 0.0:
        raise ValueError("homothety factor A must be nonzero")
    if tau.curve != curve:
        raise CurveError("spin choice belongs to a different curve")
    P, C = _validate_poly_split(curve, tau.b, tau.c)
    data = WeierstrassData(curve=curve, tau=tau, theta=float(theta), A=float(A),
                           b=tau.b, c=tau.c, P_coeffs=P, C_coeffs=C)
    _validate_simplified_forms(data)
    return data


def build_data_from_endpoints(curve: HyperellipticCurve, b_points,
                              theta: float = 0.0, A: float = 1.0) -> WeierstrassData:
    """Raw entry point: split the branch points into b and c by value.

    Unlike build_data this does not require one endpoint per slit, so it can
    express inadmissible selections (for negative tests: such data fails the
    one-boundary-point criterion downstream).  b_points must be distinct
    branch points; the complement becomes c.
    """
    if A == 0.0:
        raise ValueError("homothety factor A must be nonzero")
    b = tuple(sorted(float(v) for v in b_points))
    if len(set(b)) != len(b):
        raise CurveError("repeated endpoint in b_points")
    if 2 * len(b) != len(curve.a):
        raise CurveError(
            f"need {len(curve.a) // 2} endpoints, got {len(b)}"
        )
    remaining = list(curve.a)
    for v in b:
        if v not in remaining:
            raise CurveError(f"{v} is not a branch point of the curve")
        remaining.remove(v)
    c = tuple(remaining)
    P, C = _validate_poly_split(curve, b, c)
    data = WeierstrassData(curve=curve, tau=None, theta=float(theta), A=float(A),
                           b=b, c=c, P_coeffs=P, C_coeffs=C)
    _validate_simplified_forms(data)
    return data


# ---------------------------------------------------------------------------
# evaluation

def _S_many(data: WeierstrassData, z: np.ndarray) -> np.ndarray:
    """S = w/P = -prod sqrt(z - c_k)/sqrt(z - b_k) at off-slit points."""
    z = np.ascontiguousarray(z, dtype=np.complex128)
    S = -kernels.branch_prod(data.c_array, data.b_array, z)
    if data.debug_break_branch:
        S = np.where(z.imag < 0.0, -S, S)
    return S


def _S_slit_many(data: WeierstrassData, x: np.ndarray, north: bool) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    S = -kernels.branch_prod_slit(data.c_array, data.b_array, x, north)
    if data.debug_break_branch and not north:
        S = -S
    return S


def eval_g_many(data: WeierstrassData, z: np.ndarray) -> np.ndarray:
    """g at off-slit points, stable at every branch point.

    Uses g = e^{i theta}(S + 1)/(S - 1) where the complement product
    dominates and the reciprocal form g = e^{i theta}(1 + T)/(1 - T),
    T = 1/S, where the selected product does; the switch keys on the nearest
    branch point, so g(b_j) = e^{i theta} and g(c_j) = -e^{i theta} exactly.
    """
    z = np.ascontiguousarray(z, dtype=np.complex128)
    db = np.min(np.abs(z[..., None] - data.b_array), axis=-1)
    dc = np.min(np.abs(z[..., None] - data.c_array), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        S = _S_many(data, z)
        T = -kernels.branch_prod(data.b_array, data.c_array, z)
        if data.debug_break_branch:
            T = np.where(z.imag < 0.0, -T, T)
        g = np.where(db <= dc, (1.0 + T) / (1.0 - T), (S + 1.0) / (S - 1.0))
        g = np.exp(1j * data.theta) * g
    return g


def eval_g_slit_many(data: WeierstrassData, x: np.ndarray, north: bool) -> np.ndarray:
    """g along one bank of the slits; |g| = 1 there."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    db = np.min(np.abs(x[..., None] - data.b_array), axis=-1)
    dc = np.min(np.abs(x[..., None] - data.c_array), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        S = _S_slit_many(data, x, north)
        T = kernels.branch_prod_slit(data.b_array, data.c_array, x, north)
        T = -T
        if data.debug_break_branch and not north:
            T = -T
        g = np.where(db <= dc, (1.0 + T) / (1.0 - T), (S + 1.0) / (S - 1.0))
    return np.exp(1j * data.theta) * g


def eval_g(data: WeierstrassData, p) -> complex:
    """g at a point of the closed slit complement (complex or SlitPoint)."""
    if isinstance(p, SlitPoint):
        return complex(
            eval_g_slit_many(data, np.array([p.x]), p.bank == Bank.NORTH)[0]
        )
    z = complex(p)
    if abs(z.imag) <= data.curve.eps and data.curve.slit_containing(z.real):
        # on the axis inside a slit: endpoints are fine (g has a limit there
        # from either side), interiors need a bank
        j = data.curve.slit_containing(z.real)
        lo, hi = data.curve.slits[j - 1]
        if min(z.real - lo, hi - z.real) > data.curve.eps:
            from .curve import OnCutError

            raise OnCutError(
                f"g on slit {j} interior needs a bank; pass a SlitPoint"
            )
        z = complex(z.real, 0.0)
    return complex(eval_g_many(data, np.array([z]))[0])


def _forms_from_S(data: WeierstrassData, S: np.ndarray) -> np.ndarray:
    T = 1.0 / S
    plus = S + T
    ct, st, A = np.cos(data.theta), np.sin(data.theta), data.A
    f = np.empty((3,) + S.shape, dtype=np.complex128)
    f[0] = -2j * A * ct + A * st * plus
    f[1] = -2j * A * st - A * ct * plus
    f[2] = A * (S - T)
    return f


def eval_forms_many(data: WeierstrassData, z: np.ndarray) -> np.ndarray:
    """The densities (f1, f2, f3) at off-slit points, stacked (3, ...)."""
    return _forms_from_S(data, _S_many(data, np.asarray(z, dtype=np.complex128)))


def eval_forms_slit_many(data: WeierstrassData, x: np.ndarray, north: bool) -> np.ndarray:
    """Bank limits of the densities on slit interiors."""
    return _forms_from_S(data, _S_slit_many(data, x, north))


def eval_forms(data: WeierstrassData, p):
    """(f1, f2, f3) at one point; branch points are rejected.

    The densities carry an inverse square root singularity at every branch
    point, so evaluation there signals an error; the quadrature module
    integrates across such endpoints with a weighted substitution instead.
    """
    curve = data.curve
    if isinstance(p, SlitPoint):
        lo, hi = curve.slits[p.j - 1]
        if min(abs(p.x - lo), abs(p.x - hi)) <= curve.eps:
            raise EndpointSingularityError(
                f"endpoint singularity at x = {p.x}; use weighted quadrature"
            )
        f = eval_forms_slit_many(data, np.array([p.x]), p.bank == Bank.NORTH)
        return (complex(f[0, 0]), complex(f[1, 0]), complex(f[2, 0]))
    z = complex(p)
    if min(abs(z - a) for a in curve.a) <= curve.eps:
        raise EndpointSingularityError(
            f"endpoint singularity at z = {z}; use weighted quadrature"
        )
    from .curve import _check_off_cut

    _check_off_cut(curve, z)
    f = eval_forms_many(data, np.array([z]))
    return (complex(f[0, 0]), complex(f[1, 0]), complex(f[2, 0]))


def growth_coefficient(data: WeierstrassData) -> float:
    """Residue of f3 at infinity: c = A (sum c_j - sum b_j).

    The height grows like c log|z| along the end; the complement choice
    negates c (a reflected surface).
    """
    return float(data.A * (np.sum(data.c_array) - np.sum(data.b_array)))
