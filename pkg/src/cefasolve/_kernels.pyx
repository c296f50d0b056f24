# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the functions in ``_kernels_py``."""

from math import gcd as _pygcd

from cpython.dict cimport PyDict_Copy, PyDict_GetItem, PyDict_SetItem, PyDict_DelItem
from cpython.ref cimport PyObject


cdef extern from *:
    """
    static inline int k_mul(long long a, long long b, long long *r) { return __builtin_mul_overflow(a, b, r); }
    static inline int k_sub(long long a, long long b, long long *r) { return __builtin_sub_overflow(a, b, r); }
    """
    int k_mul(long long a, long long b, long long *r)
    int k_sub(long long a, long long b, long long *r)


cdef extern from "Python.h":
    long long PyLong_AsLongLongAndOverflow(object o, int *overflow) except? -1


cdef inline bint _small(object a, long long *out):
    cdef int ovf = 0
    if type(a) is not int:
        return False
    out[0] = PyLong_AsLongLongAndOverflow(a, &ovf)
    # LLONG_MIN is excluded so that negation stays in range
    return ovf == 0 and out[0] != (-9223372036854775807 - 1)


cdef inline object _mulsub(object a, object f, object v):
    """``a - f * v`` in machine integers when nothing overflows."""
    cdef long long ca, cf, cv, t, r
    if _small(a, &ca) and _small(f, &cf) and _small(v, &cv):
        if not k_mul(cf, cv, &t) and not k_sub(ca, t, &r):
            return r
    return a - f * v


cdef inline object _gcd2(object a, object b):
    cdef long long x, y, t
    if _small(a, &x) and _small(b, &y):
        if x < 0:
            x = -x
        if y < 0:
            y = -y
        while y:
            t = x % y
            x = y
            y = t
        return x
    return _pygcd(a, b)


def combine(dict row, object rhs, object m, dict prow, object prhs, object f):
    """Sparse ``m * row - f * prow`` (and the same on the right-hand sides)."""
    cdef dict new
    cdef object j, v, x
    cdef PyObject *cur
    if m == 1:
        new = PyDict_Copy(row)
    else:
        new = {j: v * m for j, v in row.items()}
    for j, v in prow.items():
        cur = PyDict_GetItem(new, j)
        if cur is NULL:
            x = _mulsub(0, f, v)
            if x:
                PyDict_SetItem(new, j, x)
        else:
            x = _mulsub(<object>cur, f, v)
            if x:
                PyDict_SetItem(new, j, x)
            else:
                PyDict_DelItem(new, j)
    return new, rhs * m - f * prhs


def eliminate_column(list rows, list rhs, list den, Py_ssize_t r, object c):
    """Clear column ``c`` from every row but ``r`` in place, keeping rows in lowest terms."""
    cdef dict prow = rows[r]
    cdef object p = prow[c]
    cdef object prhs = rhs[r]
    cdef Py_ssize_t i, n = len(rows)
    cdef dict row, new
    cdef PyObject *fp
    cdef object f, nrhs, d, g, j, v
    for i in range(n):
        if i == r:
            continue
        row = <dict>rows[i]
        fp = PyDict_GetItem(row, c)
        if fp is NULL:
            continue
        f = <object>fp
        if not f:
            continue
        new, nrhs = combine(row, rhs[i], p, prow, prhs, f)
        d = den[i] * p
        g = _gcd2(d, nrhs)
        if g != 1:
            for v in new.values():
                g = _gcd2(g, v)
                if g == 1:
                    break
        if g != 1 and g != 0:
            new = {j: v // g for j, v in new.items()}
            nrhs = nrhs // g
            d = d // g
        rows[i] = new
        rhs[i] = nrhs
        den[i] = d
