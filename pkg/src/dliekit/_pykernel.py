"""Pure-Python sparse polynomial kernels.

A polynomial is a ``dict`` mapping exponent tuples to nonzero rational
coefficients.  Integral coefficients are kept as ``int`` and everything else
as ``Fraction``; every kernel returns a fresh dict in that normal form.
The compiled module ``_ckernel`` exports the same functions.
"""

from fractions import Fraction

BACKEND = "python"


def norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for k, v in b.items():
        w = out.get(k)
        if w is None:
            out[k] = v
        else:
            w = norm(w + v)
            if w:
                out[k] = w
            else:
                del out[k]
    return out


def sub(a, b):
    out = dict(a)
    for k, v in b.items():
        w = out.get(k)
        if w is None:
            out[k] = -v
        else:
            w = norm(w - v)
            if w:
                out[k] = w
            else:
                del out[k]
    return out


def scale(a, c):
    c = norm(c)
    if not c:
        return {}
    if c == 1:
        return dict(a)
    return {k: norm(v * c) for k, v in a.items()}


def mul(a, b):
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    for kb, vb in b.items():
        for ka, va in a.items():
            k = tuple([x + y for x, y in zip(ka, kb)])
            w = get(k)
            out[k] = va * vb if w is None else w + va * vb
    return {k: norm(v) for k, v in out.items() if v}


def deriv(a, i):
    out = {}
    for k, v in a.items():
        e = k[i]
        if e:
            kk = k[:i] + (e - 1,) + k[i + 1:]
            out[kk] = norm(v * e)
    return out
