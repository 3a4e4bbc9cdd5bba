"""Numpy implementation of the numerical kernels.

Same API as the compiled extension _kernels; kernels.py picks one at import
time.  Hot spots: products of principal square roots (the branch-stable
algebraic functions) and fused 15-point Gauss-Kronrod panels evaluating the
three Weierstrass form densities at once.

All branch products use principal square roots factor by factor, which puts
every cut on the real axis between paired points; the product of an even
number of factors then has its cuts exactly on the slits.
"""
import numpy as np

BACKEND = "python"

# 15-point Kronrod abscissae with the embedded 7-point Gauss rule at the odd
# indices; classic double precision constants.
_XGK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])


def branch_prod(num, den, z):
    """prod_k sqrt(z - num[k]) / prod_k sqrt(z - den[k]), principal roots."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.ones_like(z)
    for p in num:
        out = out * np.sqrt(z - p)
    for p in den:
        out = out / np.sqrt(z - p)
    return out


def branch_prod_slit(num, den, x, upper):
    """Bank limit of branch_prod on the real axis.

    For a factor with point p > x the limit of sqrt(x - p) is +i sqrt(p - x)
    from above the axis and -i sqrt(p - x) from below; for p <= x the factor
    is the plain real root.
    """
    x = np.asarray(x, dtype=np.float64)
    side = 1j if upper else -1j
    out = np.ones(x.shape, dtype=np.complex128)
    for p in num:
        d = x - p
        out = out * np.where(d >= 0.0, np.sqrt(np.maximum(d, 0.0)) + 0j,
                             side * np.sqrt(np.maximum(-d, 0.0)))
    for p in den:
        d = x - p
        out = out / np.where(d >= 0.0, np.sqrt(np.maximum(d, 0.0)) + 0j,
                             side * np.sqrt(np.maximum(-d, 0.0)))
    return out


def _forms(b, c, cos_t, sin_t, A, z):
    """The three form densities at off-slit points, stacked (3, m).

    S = w/P = -prod sqrt(z - c_k) / sqrt(z - b_k) (an exact identity on the
    slit complement), and
        f1 = -2iA cos(theta) + A sin(theta) (S + 1/S)
        f2 = -2iA sin(theta) - A cos(theta) (S + 1/S)
        f3 = A (S - 1/S)
    """
    S = -branch_prod(c, b, z)
    T = 1.0 / S
    plus = S + T
    minus = S - T
    f = np.empty((3,) + np.shape(z), dtype=np.complex128)
    f[0] = -2j * A * cos_t + A * sin_t * plus
    f[1] = -2j * A * sin_t - A * cos_t * plus
    f[2] = A * minus
    return f


def _gk_panel(fvals, half):
    """Kronrod value, with the stabilized |K - G| error estimate, per row."""
    I = (fvals * _WGK).sum(axis=-1) * half
    G = (fvals[..., 1::2] * _WG).sum(axis=-1) * half
    err = np.abs(I - G)
    mean = I / (2.0 * half)
    resasc = (np.abs(fvals - mean[..., None]) * _WGK).sum(axis=-1) * abs(half)
    scale = np.where(resasc > 0.0, resasc, 1.0)
    err = np.where(
        (resasc > 0.0) & (err > 0.0),
        scale * np.minimum(1.0, (200.0 * err / scale) ** 1.5),
        err,
    )
    return I, err


def panel_forms_line(b, c, cos_t, sin_t, A, z0, z1):
    """One Gauss-Kronrod panel of the three forms along the segment z0 -> z1.

    Returns (I, err): complex (3,) integrals and real (3,) error estimates.
    """
    mid = 0.5 * (z0 + z1)
    half = 0.5 * (z1 - z0)
    fvals = _forms(b, c, cos_t, sin_t, A, mid + half * _XGK)
    return _gk_panel(fvals, half)


def panel_forms_sqrt(b, c, cos_t, sin_t, A, e, v, s0, s1):
    """Panel in the parameter s of z = e + s^2 (v - e), s in [s0, s1].

    The substitution absorbs an inverse-square-root singularity of the forms
    at the branch point e; the s-integrand is analytic.  dz = 2 s (v - e) ds.
    """
    mid = 0.5 * (s0 + s1)
    half = 0.5 * (s1 - s0)
    s = mid + half * _XGK
    z = e + s * s * (v - e)
    fvals = _forms(b, c, cos_t, sin_t, A, z) * (2.0 * s * (v - e))
    return _gk_panel(fvals, half)
