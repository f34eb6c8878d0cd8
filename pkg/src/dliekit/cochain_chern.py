"""Cup powers, curvature cochains and trace Chern cochains.

The cup power of a 2-cochain is the signed sum over (2, .., 2)-shuffles

    f^k(x_1..x_2k) = sum_sigma sgn(sigma) prod_i f(x_sigma(2i-1), x_sigma(2i)),

with no factorial normalization.  Matrix cochains use the same sum with the
factors multiplied in block order.  Curvature cochains live on the
generators u_1..u_n of the D-Lie algebra (R vanishes on D when psi = Id).
All identities below are exact cochain identities.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .connection import Connection, curvature, curvature_matrix, curvature_type_check
from .lie_rinehart import Elem, ScalarCochain, _sort_sign
from .poly_core import Poly, PolyMatrix
from .report import Verdict


class PreconditionError(ValueError):
    pass


@lru_cache(maxsize=None)
def shuffles(k: int) -> tuple:
    """((sign, ((a1, b1), .., (ak, bk))), ..) over all (2,..,2)-shuffles of 0..2k-1."""
    out = []

    def rec(remaining: tuple, blocks: tuple):
        if not remaining:
            perm = [p for blk in blocks for p in blk]
            _, sign = _sort_sign(perm)
            out.append((sign, blocks))
            return
        for a, b in itertools.combinations(remaining, 2):
            rest = tuple(p for p in remaining if p not in (a, b))
            rec(rest, blocks + ((a, b),))

    rec(tuple(range(2 * k)), ())
    return tuple(out)


class MatrixCochain:
    """Alternating cochain with r x r matrix values, stored on sorted generator tuples."""

    __slots__ = ("nvars", "rank", "degree", "r", "values")

    def __init__(self, nvars: int, rank: int, degree: int, r: int, values: dict | None = None):
        self.nvars, self.rank, self.degree, self.r = nvars, rank, degree, r
        self.values = {}
        for key, M in (values or {}).items():
            skey, sign = _sort_sign(tuple(key))
            if sign == 0:
                if not M.is_zero():
                    raise ValueError(f"nonzero value on repeated indices {key}")
                continue
            M = M if sign == 1 else -M
            if skey in self.values and self.values[skey] != M:
                raise ValueError(f"inconsistent values for {skey}")
            if not M.is_zero():
                self.values[skey] = M

    @classmethod
    def scalar_identity(cls, g: ScalarCochain, r: int) -> "MatrixCochain":
        return cls(g.nvars, g.rank, g.degree, r,
                   {k: PolyMatrix.scalar(g.nvars, r, v) for k, v in g.values.items()})

    def on_gens(self, idx: Sequence[int]) -> PolyMatrix:
        skey, sign = _sort_sign(tuple(idx))
        M = self.values.get(skey) if sign else None
        if M is None:
            return PolyMatrix.zero(self.nvars, self.r)
        return M if sign == 1 else -M

    def __call__(self, *elems: Elem) -> PolyMatrix:
        acc = PolyMatrix.zero(self.nvars, self.r)
        supports = [[(i, a) for i, a in enumerate(e) if a] for e in elems]
        for combo in itertools.product(*supports):
            M = self.on_gens([i for i, _ in combo])
            if M.is_zero():
                continue
            c = Poly.one(self.nvars)
            for _, a in combo:
                c = c * a
            acc = acc + M.scale(c)
        return acc

    def trace(self) -> ScalarCochain:
        return ScalarCochain(self.nvars, self.rank, self.degree, {k: M.trace() for k, M in self.values.items()})

    def __eq__(self, other):
        if not isinstance(other, MatrixCochain):
            return NotImplemented
        return (self.rank, self.degree, self.r, self.values) == (other.rank, other.degree, other.r, other.values)

    def __str__(self):
        if not self.values:
            return "0"
        return ", ".join(f"{tuple(k + 1 for k in key)}: {M}" for key, M in sorted(self.values.items()))


def cup_power(c, k: int):
    """k-th cup power of a degree-2 ScalarCochain or MatrixCochain."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if c.degree != 2:
        raise ValueError("cup powers are taken of 2-cochains")
    if k == 1:
        return c
    sh = shuffles(k)
    matrix = isinstance(c, MatrixCochain)
    vals = {}
    for idx in itertools.combinations(range(c.rank), 2 * k):
        if matrix:
            acc = PolyMatrix.zero(c.nvars, c.r)
        else:
            acc = Poly.zero(c.nvars)
        for sign, blocks in sh:
            term = None
            for a, b in blocks:
                v = c.on_gens((idx[a], idx[b]))
                if v.is_zero():
                    term = None
                    break
                term = v if term is None else term * v
            if term is not None:
                acc = acc + term if sign == 1 else acc - term
        if not acc.is_zero():
            vals[idx] = acc
    if matrix:
        return MatrixCochain(c.nvars, c.rank, 2 * k, c.r, vals)
    return ScalarCochain(c.nvars, c.rank, 2 * k, vals)


def cup_power_bruteforce(f: ScalarCochain, k: int, idx: Sequence[int]) -> Poly:
    """(1 / 2^k) sum over all permutations; independent oracle for ``cup_power``."""
    acc = Poly.zero(f.nvars)
    for perm in itertools.permutations(range(2 * k)):
        _, sign = _sort_sign(perm)
        term = Poly.one(f.nvars)
        for i in range(k):
            term = term * f.on_gens((idx[perm[2 * i]], idx[perm[2 * i + 1]]))
        acc = acc + term * sign
    return acc * Fraction(1, 2**k)


def curvature_cochain(rho: Connection, verify_samples: int = 10, seed: int = 0) -> MatrixCochain:
    """(u_i, u_j) -> R(u_i, u_j) on u_1..u_n, with antisymmetry verified on random pairs."""
    if not rho.is_identity:
        raise ValueError("curvature cochains need psi = Id")
    T = rho.source
    vals = {}
    for i, j in itertools.combinations(range(1, T.rank), 2):
        M = curvature_matrix(rho, T.basis(i), T.basis(j))
        if not M.is_zero():
            vals[(i - 1, j - 1)] = M
    rng = random.Random(seed)
    for _ in range(verify_samples):
        u, v = T.random_elem(rng, 1), T.random_elem(rng, 1)
        if curvature(rho, u, v) != -curvature(rho, v, u):
            raise ArithmeticError("curvature is not antisymmetric")
    return MatrixCochain(T.nvars, T.n, 2, rho.r, vals)


def chern_cochain(rho: Connection, k: int) -> ScalarCochain:
    """c_k = tr(R^k)."""
    return cup_power(curvature_cochain(rho), k).trace()


def chern_relation_check(rho: Connection, f: ScalarCochain, k: int, require_curvature_type: bool = True) -> Verdict:
    """r^(k-1) c_k - c_1^k = 0 on every generator 2k-tuple; witness is a 1-based tuple."""
    if require_curvature_type:
        v = curvature_type_check(rho, f)
        if not v:
            raise PreconditionError(f"connection is not of curvature type f: {v.witness}")
    c1 = chern_cochain(rho, 1)
    ck = chern_cochain(rho, k)
    diff = ck.scale(rho.r ** (k - 1)) - cup_power(c1, k)
    if diff.is_zero():
        return Verdict(True)
    key, val = diff.items()[0]
    return Verdict(False, {"tuple": key, "value": str(val)})
