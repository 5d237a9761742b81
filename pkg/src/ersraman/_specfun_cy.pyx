# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled modified-Bessel backend, name-for-name mirror of _specfun_py.

Same two-regime scheme (Maclaurin series below X_CUT, Chebyshev fit of the
scaled function above) with scalar C kernels and a flat loop for arrays.
"""

import numpy as np

from libc.math cimport exp, sqrt

BACKEND = "compiled"
X_CUT = 7.75

cdef double _X_CUT = 7.75
cdef int _SERIES_TERMS = 30

cdef double[27] _C0
cdef double[27] _C1

_COEFS_I0 = (
    0.4023589034301764,
    0.0034876771026373706,
    7.40856222573413e-05,
    3.249942531669863e-06,
    2.4299531430552774e-07,
    2.8370482604934725e-08,
    4.332640055461383e-09,
    5.778732074243006e-10,
    -2.277520588805752e-11,
    -5.335508698299919e-11,
    -1.8182100469122763e-11,
    -1.2407659913065849e-12,
    1.4248818166844845e-12,
    5.084265101214693e-13,
    -4.221924226785864e-14,
    -6.879179225202733e-14,
    -6.50689883615322e-15,
    8.044848744159226e-15,
    1.8216936221655667e-15,
    -9.718437613574041e-16,
    -3.3181841137768624e-16,
    1.328570351286924e-16,
    5.470329831726796e-17,
    -2.1398114949027165e-17,
    -8.613439444637474e-18,
    3.982500816801355e-18,
    1.2636168163012256e-18,
)

_COEFS_I1 = (
    0.3889652895678091,
    -0.010091634942457324,
    -0.00011873064644536223,
    -4.3551263727098725e-06,
    -2.972147842531525e-07,
    -3.28898802201904e-08,
    -4.9019559448187365e-09,
    -6.61010468300519e-10,
    1.5686239109594132e-11,
    5.5732704850739584e-11,
    1.9607170434654482e-11,
    1.5366938004600487e-12,
    -1.4602093517341085e-12,
    -5.462182622320129e-13,
    3.6822769784580534e-14,
    7.177758764171029e-14,
    7.657860064363602e-15,
    -8.232743113127712e-15,
    -1.9904989213014403e-15,
    9.800773691191897e-16,
    3.5560883120142706e-16,
    -1.3282158117783507e-16,
    -5.820910021966794e-17,
    2.136719272074224e-17,
    9.163660899364023e-18,
    -3.99560920600273e-18,
    -1.3540971357376954e-18,
)

cdef int _k
for _k in range(27):
    _C0[_k] = _COEFS_I0[_k]
    _C1[_k] = _COEFS_I1[_k]


cdef double _series(double x, int order) nogil:
    # I_nu(x) = (x/2)^nu sum_k (x^2/4)^k / (k! (k+nu)!), nu in {0, 1}
    cdef double q = 0.25 * x * x
    cdef double term = 1.0
    cdef double acc = 1.0
    cdef int k
    for k in range(1, _SERIES_TERMS):
        term *= q / (k * (k + order))
        acc += term
    if order == 1:
        acc *= 0.5 * x
    return acc


cdef double _cheb(const double* c, double s) nogil:
    cdef double b0 = 0.0
    cdef double b1 = 0.0
    cdef double tmp
    cdef int k
    for k in range(26, 0, -1):
        tmp = 2.0 * s * b0 - b1 + c[k]
        b1 = b0
        b0 = tmp
    return s * b0 - b1 + c[0]


cdef double _ieval(double x, int order, bint scaled) nogil:
    cdef double v
    if x < _X_CUT:
        v = _series(x, order)
        if scaled:
            v *= exp(-x)
        return v
    if order == 0:
        v = _cheb(&_C0[0], 15.5 / x - 1.0) / sqrt(x)
    else:
        v = _cheb(&_C1[0], 15.5 / x - 1.0) / sqrt(x)
    if not scaled:
        v *= exp(x)
    return v


cdef double _phi1_val(double q) nogil:
    cdef double r = sqrt(q)
    if r == 0.0:
        return 1.0
    return _ieval(2.0 * r, 1, False) / r


cdef double _fdiff_val(double x) nogil:
    cdef double a = _ieval(x, 0, True)
    cdef double b = _ieval(x, 1, True)
    return (a - b) * (a + b) * exp(2.0 * x)


cdef double _apply(double x, int mode) nogil:
    if mode == 0:
        return _ieval(x, 0, False)
    if mode == 1:
        return _ieval(x, 1, False)
    if mode == 2:
        return _ieval(x, 0, True)
    if mode == 3:
        return _ieval(x, 1, True)
    if mode == 4:
        return _ieval(2.0 * sqrt(x), 0, False)
    if mode == 5:
        return _phi1_val(x)
    if mode == 6:
        return _fdiff_val(x)
    return _fdiff_val(2.0 * sqrt(x))


def _dispatch(x, int mode):
    shape = np.shape(x)
    flat = np.ascontiguousarray(x, dtype=np.float64).ravel()
    out = np.empty(flat.shape[0], dtype=np.float64)
    cdef double[::1] xi = flat
    cdef double[::1] yo = out
    cdef Py_ssize_t i
    cdef Py_ssize_t n = xi.shape[0]
    with nogil:
        for i in range(n):
            yo[i] = _apply(xi[i], mode)
    return out.reshape(shape)


def i0(x):
    return _dispatch(x, 0)


def i1(x):
    return _dispatch(x, 1)


def i0e(x):
    return _dispatch(x, 2)


def i1e(x):
    return _dispatch(x, 3)


def i0_2sqrt(q):
    return _dispatch(q, 4)


def phi1(q):
    return _dispatch(q, 5)


def i0sq_minus_i1sq(x):
    return _dispatch(x, 6)


def i0sq_minus_i1sq_2sqrt(q):
    return _dispatch(q, 7)
