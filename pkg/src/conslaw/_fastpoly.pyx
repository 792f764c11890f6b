# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sparse polynomial kernel; same contract as ``_purepoly``."""
from fractions import Fraction

BACKEND = "cython"


cdef inline object _c(object x):
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


cpdef tuple mono_mul(tuple a, tuple b):
    cdef Py_ssize_t la = len(a), lb = len(b), i = 0, j = 0
    cdef long x, y, e
    if la == 0:
        return b
    if lb == 0:
        return a
    out = []
    while i < la and j < lb:
        x = a[i]
        y = b[j]
        if x < y:
            out.append(x)
            out.append(a[i + 1])
            i += 2
        elif y < x:
            out.append(y)
            out.append(b[j + 1])
            j += 2
        else:
            e = <long>a[i + 1] + <long>b[j + 1]
            if e != 0:
                out.append(x)
                out.append(e)
            i += 2
            j += 2
    while i < la:
        out.append(a[i])
        i += 1
    while j < lb:
        out.append(b[j])
        j += 1
    return tuple(out)


cpdef tuple mono_pow(tuple a, long k):
    cdef Py_ssize_t n, la = len(a)
    if k == 0:
        return ()
    out = []
    for n in range(la):
        if n & 1:
            out.append(<long>a[n] * k)
        else:
            out.append(a[n])
    return tuple(out)


cpdef tuple mono_inv(tuple a):
    return mono_pow(a, -1)


cpdef long mono_exponent(tuple a, long aid):
    cdef Py_ssize_t n, la = len(a)
    cdef long x
    for n in range(0, la, 2):
        x = a[n]
        if x == aid:
            return a[n + 1]
        if x > aid:
            break
    return 0


cpdef tuple mono_with(tuple a, long aid, long e):
    cdef Py_ssize_t n, la = len(a)
    cdef long x
    cdef bint placed = False
    out = []
    for n in range(0, la, 2):
        x = a[n]
        if x == aid:
            if e != 0:
                out.append(x)
                out.append(e)
            placed = True
        else:
            if not placed and x > aid:
                if e != 0:
                    out.append(aid)
                    out.append(e)
                placed = True
            out.append(x)
            out.append(a[n + 1])
    if not placed and e != 0:
        out.append(aid)
        out.append(e)
    return tuple(out)


cpdef dict poly_add(dict p, dict q):
    if len(p) < len(q):
        p, q = q, p
    cdef dict out = dict(p)
    for m, c in q.items():
        v = out.get(m)
        if v is None:
            out[m] = c
        else:
            v = _c(v + c)
            if v:
                out[m] = v
            else:
                del out[m]
    return out


cpdef dict poly_sub(dict p, dict q):
    cdef dict out = dict(p)
    for m, c in q.items():
        v = out.get(m)
        if v is None:
            out[m] = -c
        else:
            v = _c(v - c)
            if v:
                out[m] = v
            else:
                del out[m]
    return out


cpdef dict poly_scale(dict p, object c):
    if not c:
        return {}
    if c == 1:
        return dict(p)
    return {m: _c(v * c) for m, v in p.items()}


cpdef poly_iadd_term(dict acc, dict p, tuple mono, object c):
    if not c:
        return None
    for m, v in p.items():
        mm = mono_mul(<tuple>m, mono)
        w = _c(v * c)
        old = acc.get(mm)
        if old is None:
            acc[mm] = w
        else:
            w = _c(old + w)
            if w:
                acc[mm] = w
            else:
                del acc[mm]
    return None


cpdef dict poly_mul_term(dict p, tuple mono, object c):
    cdef dict acc = {}
    poly_iadd_term(acc, p, mono, c)
    return acc


cpdef dict poly_mul(dict p, dict q):
    if len(p) < len(q):
        p, q = q, p
    cdef dict acc = {}
    for m, c in q.items():
        poly_iadd_term(acc, p, <tuple>m, c)
    return acc


cpdef dict row_combine(object a, dict ra, object b, dict rb):
    cdef dict out = {k: a * v for k, v in ra.items()}
    for k, v in rb.items():
        w = out.get(k, 0) - b * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out
