# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled numerical kernels: branch-stable square root products and fused
Gauss-Kronrod panels for the three Weierstrass form densities.

Mirrors _kernels_py exactly; see that module for the semantics.
"""
import numpy as np

from libc.math cimport fabs, sqrt

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double cabs(double complex)

BACKEND = "compiled"

cdef double[15] XGK
cdef double[15] WGK
cdef double[7] WG

XGK[0] = -0.991455371120812639206854697526329
XGK[1] = -0.949107912342758524526189684047851
XGK[2] = -0.864864423359769072789712788640926
XGK[3] = -0.741531185599394439863864773280788
XGK[4] = -0.586087235467691130294144838258730
XGK[5] = -0.405845151377397166906606412076961
XGK[6] = -0.207784955007898467600689403773245
XGK[7] = 0.0
XGK[8] = 0.207784955007898467600689403773245
XGK[9] = 0.405845151377397166906606412076961
XGK[10] = 0.586087235467691130294144838258730
XGK[11] = 0.741531185599394439863864773280788
XGK[12] = 0.864864423359769072789712788640926
XGK[13] = 0.949107912342758524526189684047851
XGK[14] = 0.991455371120812639206854697526329

WGK[0] = 0.022935322010529224963732008058970
WGK[1] = 0.063092092629978553290700663189204
WGK[2] = 0.104790010322250183839876322541518
WGK[3] = 0.140653259715525918745189590510238
WGK[4] = 0.169004726639267902826583426598550
WGK[5] = 0.190350578064785409913256402421014
WGK[6] = 0.204432940075298892414161999234649
WGK[7] = 0.209482141084727828012999174891714
WGK[8] = 0.204432940075298892414161999234649
WGK[9] = 0.190350578064785409913256402421014
WGK[10] = 0.169004726639267902826583426598550
WGK[11] = 0.140653259715525918745189590510238
WGK[12] = 0.104790010322250183839876322541518
WGK[13] = 0.063092092629978553290700663189204
WGK[14] = 0.022935322010529224963732008058970

WG[0] = 0.129484966168869693270611432679082
WG[1] = 0.279705391489276667901467771423780
WG[2] = 0.381830050505118944950369775488975
WG[3] = 0.417959183673469387755102040816327
WG[4] = 0.381830050505118944950369775488975
WG[5] = 0.279705391489276667901467771423780
WG[6] = 0.129484966168869693270611432679082


cdef inline double complex _sprod(const double* num, Py_ssize_t nn,
                                  const double* den, Py_ssize_t nd,
                                  double complex z) nogil:
    # pointer arguments: passing memoryviews costs atomic refcounts per call,
    # which dominates a loop this small.  One complex division at the end.
    cdef double complex pn = 1.0
    cdef double complex pd = 1.0
    cdef Py_ssize_t k
    for k in range(nn):
        pn = pn * csqrt(z - num[k])
    for k in range(nd):
        pd = pd * csqrt(z - den[k])
    return pn / pd


cdef inline double complex _sprod_slit(const double* num, Py_ssize_t nn,
                                       const double* den, Py_ssize_t nd,
                                       double x, bint upper) nogil:
    # on the axis every factor is real or purely imaginary, so carry the
    # magnitude as a plain product of |x - p| and the phase as a power of i;
    # a single sqrt at the end replaces one per factor (sqrt is the only slow
    # op here, and magnitudes cannot land on a branch cut)
    cdef double pn = 1.0, pd = 1.0
    cdef double d, r
    cdef int m = 0
    cdef Py_ssize_t k
    for k in range(nn):
        d = x - num[k]
        pn = pn * fabs(d)
        m += d < 0.0
    for k in range(nd):
        d = x - den[k]
        pd = pd * fabs(d)
        m -= d < 0.0
    r = sqrt(pn / pd)
    if not upper:
        m = -m
    m = m & 3
    if m == 0:
        return r
    elif m == 1:
        return r * 1j
    elif m == 2:
        return -r
    return -r * 1j


cdef inline const double* _data(const double[::1] v) nogil:
    if v.shape[0] == 0:
        return NULL
    return &v[0]


def branch_prod(num, den, z):
    """prod_k sqrt(z - num[k]) / prod_k sqrt(z - den[k]), principal roots."""
    cdef double[::1] nv = np.ascontiguousarray(num, dtype=np.float64)
    cdef double[::1] dv = np.ascontiguousarray(den, dtype=np.float64)
    z_arr = np.ascontiguousarray(z, dtype=np.complex128)
    shape = z_arr.shape
    flat = z_arr.reshape(-1)
    out = np.empty(flat.shape[0], dtype=np.complex128)
    cdef double complex[::1] zv = flat
    cdef double complex[::1] ov = out
    cdef const double* np_ = _data(nv)
    cdef const double* dp = _data(dv)
    cdef Py_ssize_t nn = nv.shape[0], nd = dv.shape[0]
    cdef Py_ssize_t i
    with nogil:
        for i in range(zv.shape[0]):
            ov[i] = _sprod(np_, nn, dp, nd, zv[i])
    return out.reshape(shape)


def branch_prod_slit(num, den, x, upper):
    """Bank limit of branch_prod on the real axis (see _kernels_py)."""
    cdef double[::1] nv = np.ascontiguousarray(num, dtype=np.float64)
    cdef double[::1] dv = np.ascontiguousarray(den, dtype=np.float64)
    x_arr = np.ascontiguousarray(x, dtype=np.float64)
    shape = x_arr.shape
    flat = x_arr.reshape(-1)
    out = np.empty(flat.shape[0], dtype=np.complex128)
    cdef double[::1] xv = flat
    cdef double complex[::1] ov = out
    cdef const double* np_ = _data(nv)
    cdef const double* dp = _data(dv)
    cdef Py_ssize_t nn = nv.shape[0], nd = dv.shape[0]
    cdef bint up = bool(upper)
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _sprod_slit(np_, nn, dp, nd, xv[i], up)
    return out.reshape(shape)


cdef void _panel_reduce(double complex f[3][15], double complex half,
                        double complex *I_out, double *E_out) nogil:
    cdef double complex resk, resg, mean
    cdef double errk, resasc, t, t15
    cdef int k, i
    for k in range(3):
        resk = 0.0
        resg = 0.0
        for i in range(15):
            resk = resk + WGK[i] * f[k][i]
        for i in range(7):
            resg = resg + WG[i] * f[k][2 * i + 1]
        I_out[k] = resk * half
        errk = cabs((resk - resg) * half)
        mean = resk * 0.5
        resasc = 0.0
        for i in range(15):
            resasc = resasc + WGK[i] * cabs(f[k][i] - mean)
        resasc = resasc * cabs(half)
        if resasc > 0.0 and errk > 0.0:
            t = 200.0 * errk / resasc
            t15 = t * sqrt(t)
            errk = resasc * (t15 if t15 < 1.0 else 1.0)
        E_out[k] = errk


cdef inline void _form_node(const double* b, Py_ssize_t nb,
                            const double* c, Py_ssize_t nc,
                            double ct, double st, double A, double complex z,
                            double complex jac, double complex f[3][15],
                            int i) nogil:
    cdef double complex S = -_sprod(c, nc, b, nb, z)
    cdef double complex T = 1.0 / S
    cdef double complex plus = S + T
    f[0][i] = (A * st * plus - 2j * A * ct) * jac
    f[1][i] = (-A * ct * plus - 2j * A * st) * jac
    f[2][i] = (A * (S - T)) * jac


def panel_forms_line(b, c, cos_t, sin_t, A, z0, z1):
    """One Gauss-Kronrod panel of the three forms along the segment z0 -> z1."""
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double ct = cos_t, st = sin_t, Av = A
    cdef double complex zz0 = z0, zz1 = z1
    cdef double complex mid = 0.5 * (zz0 + zz1)
    cdef double complex half = 0.5 * (zz1 - zz0)
    cdef double complex f[3][15]
    cdef double complex I_out[3]
    cdef double E_out[3]
    cdef const double* bp = _data(bv)
    cdef const double* cp = _data(cv)
    cdef Py_ssize_t nb = bv.shape[0], nc = cv.shape[0]
    cdef int i
    with nogil:
        for i in range(15):
            _form_node(bp, nb, cp, nc, ct, st, Av, mid + half * XGK[i], 1.0, f, i)
        _panel_reduce(f, half, I_out, E_out)
    I = np.array([I_out[0], I_out[1], I_out[2]], dtype=np.complex128)
    E = np.array([E_out[0], E_out[1], E_out[2]], dtype=np.float64)
    return I, E


def panel_forms_sqrt(b, c, cos_t, sin_t, A, e, v, s0, s1):
    """Panel in s for z = e + s^2 (v - e): square root substitution at e."""
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef double ct = cos_t, st = sin_t, Av = A
    cdef double complex ev = e, vv = v
    cdef double mid = 0.5 * (s0 + s1)
    cdef double half = 0.5 * (s1 - s0)
    cdef double complex f[3][15]
    cdef double complex I_out[3]
    cdef double E_out[3]
    cdef double complex chalf = half
    cdef const double* bp = _data(bv)
    cdef const double* cp = _data(cv)
    cdef Py_ssize_t nb = bv.shape[0], nc = cv.shape[0]
    cdef double s
    cdef int i
    with nogil:
        for i in range(15):
            s = mid + half * XGK[i]
            _form_node(bp, nb, cp, nc, ct, st, Av, ev + s * s * (vv - ev),
                       2.0 * s * (vv - ev), f, i)
        _panel_reduce(f, chalf, I_out, E_out)
    I = np.array([I_out[0], I_out[1], I_out[2]], dtype=np.complex128)
    E = np.array([E_out[0], E_out[1], E_out[2]], dtype=np.float64)
    return I, E
