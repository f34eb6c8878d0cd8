# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sparse polynomial kernels; same contract as ``_pykernel``."""

from fractions import Fraction

BACKEND = "cython"

cdef object _Fraction = Fraction


cdef inline object _norm(object c):
    if type(c) is _Fraction and c.denominator == 1:
        return c.numerator
    return c


def norm(c):
    return _norm(c)


cdef inline tuple _addexp(tuple ka, tuple kb):
    cdef Py_ssize_t i, n = len(ka)
    cdef list out = [0] * n
    for i in range(n):
        out[i] = <long>ka[i] + <long>kb[i]
    return tuple(out)


def add(dict a, dict b):
    cdef dict out
    cdef object k, v, w
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for k, v in b.items():
        w = out.get(k)
        if w is None:
            out[k] = v
        else:
            w = _norm(w + v)
            if w:
                out[k] = w
            else:
                del out[k]
    return out


def sub(dict a, dict b):
    cdef dict out = dict(a)
    cdef object k, v, w
    for k, v in b.items():
        w = out.get(k)
        if w is None:
            out[k] = -v
        else:
            w = _norm(w - v)
            if w:
                out[k] = w
            else:
                del out[k]
    return out


def scale(dict a, c):
    c = _norm(c)
    if not c:
        return {}
    if c == 1:
        return dict(a)
    return {k: _norm(v * c) for k, v in a.items()}


def mul(dict a, dict b):
    cdef dict out
    cdef tuple ka, kb, k
    cdef object va, vb, w
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    out = {}
    for kb, vb in b.items():
        for ka, va in a.items():
            k = _addexp(ka, kb)
            w = out.get(k)
            if w is None:
                out[k] = va * vb
            else:
                out[k] = w + va * vb
    return {k: _norm(w) for k, w in out.items() if w}


def deriv(dict a, Py_ssize_t i):
    cdef dict out = {}
    cdef tuple k
    cdef object v
    cdef long e
    for k, v in a.items():
        e = k[i]
        if e:
            out[k[:i] + (e - 1,) + k[i + 1:]] = _norm(v * e)
    return out
