"""Free Lie-Rinehart algebras L = A^n over A = Q[x1..xm] and their cochains.

An element of L is a tuple of n polynomials (its coefficients on e_1..e_n).
Generator indices are 0-based in code and 1-based in printed output.

Chevalley-Eilenberg-Rinehart differential (standard convention):

    (df)(x_0..x_p) = sum_a (-1)^a alpha(x_a) f(..^a..)
                   + sum_{a<b} (-1)^{a+b} f([x_a, x_b], ..^a..^b..)
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Sequence

from .poly_core import (
    Derivation,
    Poly,
    VariableMismatch,
    as_poly,
    bracket_derivations,
    random_poly,
)
from .report import Report, Verdict

Elem = tuple  # tuple[Poly, ...]


def elem_zero(nvars: int, n: int) -> Elem:
    return (Poly.zero(nvars),) * n


def elem_basis(nvars: int, n: int, i: int) -> Elem:
    return tuple(Poly.const(nvars, 1 if j == i else 0) for j in range(n))


def elem_add(u: Elem, v: Elem) -> Elem:
    return tuple(a + b for a, b in zip(u, v))


def elem_sub(u: Elem, v: Elem) -> Elem:
    return tuple(a - b for a, b in zip(u, v))


def elem_scale(c, u: Elem) -> Elem:
    return tuple(c * a for a in u)


def elem_is_zero(u: Elem) -> bool:
    return not any(a.terms for a in u)


def elem_str(u: Elem, names: Sequence[str] | None = None) -> str:
    names = names or [f"e{i + 1}" for i in range(len(u))]
    parts = [f"({a})*{names[i]}" for i, a in enumerate(u) if a]
    return " + ".join(parts) if parts else "0"


def random_elem(rng: random.Random, nvars: int, n: int, max_deg: int = 2) -> Elem:
    return tuple(random_poly(rng, nvars, max_deg=max_deg) for _ in range(n))


class LieRinehartPresentation:
    """(L, alpha) with L free on e_1..e_n.

    ``brackets`` maps 0-based pairs (i, j) to coefficient tuples of [e_i, e_j];
    missing pairs are zero and the (j, i) entry is filled by antisymmetry
    unless it was given explicitly (then the check suite compares them).
    """

    def __init__(self, nvars: int, anchor: Sequence[Derivation], brackets: dict | None = None, name: str = "L"):
        self.nvars = nvars
        self.anchor = tuple(anchor)
        self.rank = len(self.anchor)
        self.name = name
        for d in self.anchor:
            if d.nvars != nvars:
                raise VariableMismatch("anchor over a different ring")
        self._raw = {}
        for (i, j), vals in (brackets or {}).items():
            vals = tuple(as_poly(v, nvars) for v in vals)
            if len(vals) != self.rank:
                raise ValueError(f"bracket ({i},{j}) has {len(vals)} entries, rank is {self.rank}")
            self._raw[(i, j)] = vals
        self._table = {}
        zero = elem_zero(nvars, self.rank)
        for i in range(self.rank):
            for j in range(self.rank):
                if (i, j) in self._raw:
                    self._table[(i, j)] = self._raw[(i, j)]
                elif (j, i) in self._raw:
                    self._table[(i, j)] = elem_scale(-1, self._raw[(j, i)])
                else:
                    self._table[(i, j)] = zero

    @classmethod
    def der(cls, nvars: int, name: str = "Der") -> "LieRinehartPresentation":
        """Der_k(A) itself, free on the partial derivatives."""
        return cls(nvars, [Derivation.partial(nvars, i) for i in range(nvars)], {}, name)

    def struct(self, i: int, j: int) -> Elem:
        return self._table[(i, j)]

    def basis(self, i: int) -> Elem:
        return elem_basis(self.nvars, self.rank, i)

    def zero(self) -> Elem:
        return elem_zero(self.nvars, self.rank)

    def anchor_of(self, u: Elem) -> Derivation:
        acc = Derivation.zero(self.nvars)
        for a, d in zip(u, self.anchor):
            if a:
                acc = acc + d.scale(a)
        return acc

    def bracket(self, u: Elem, v: Elem) -> Elem:
        return extended_bracket(self, u, v)

    def random_elem(self, rng: random.Random, max_deg: int = 2) -> Elem:
        return random_elem(rng, self.nvars, self.rank, max_deg)

    def check(self, samples: int = 50, max_deg: int = 2, seed: int = 0) -> Report:
        """Structure-function antisymmetry, anchor homomorphism, Jacobi."""
        rep = Report(f"lie_rinehart[{self.name}]", seed)
        bad = None
        for (i, j), vals in self._raw.items():
            if (j, i) in self._raw and self._raw[(j, i)] != elem_scale(-1, vals):
                bad = (i + 1, j + 1)
            if i == j and not elem_is_zero(vals):
                bad = (i + 1, j + 1)
        rep.record("antisymmetry", bad is None, bad)
        bad = None
        for i, j in itertools.combinations(range(self.rank), 2):
            lhs = self.anchor_of(self.struct(i, j))
            rhs = bracket_derivations(self.anchor[i], self.anchor[j])
            if lhs != rhs:
                bad = (i + 1, j + 1, str(lhs), str(rhs))
                break
        rep.record("anchor_homomorphism", bad is None, bad)
        gens = [self.basis(i) for i in range(self.rank)]
        bad = None
        for a, b, c in itertools.combinations(range(self.rank), 3):
            j = jacobiator(self, gens[a], gens[b], gens[c])
            if not elem_is_zero(j):
                bad = (a + 1, b + 1, c + 1, elem_str(j))
                break
        rep.record("jacobi_generators", bad is None, bad)
        rng = random.Random(seed)
        bad = None
        for _ in range(samples):
            u, v, w = (self.random_elem(rng, max_deg) for _ in range(3))
            j = jacobiator(self, u, v, w)
            if not elem_is_zero(j):
                bad = (elem_str(u), elem_str(v), elem_str(w))
                break
        rep.record("jacobi_random", bad is None, bad, samples)
        return rep


def extended_bracket(L: LieRinehartPresentation, u: Elem, v: Elem) -> Elem:
    """[u, v] extended by [x, c y] = c[x, y] + alpha(x)(c) y."""
    if len(u) != L.rank or len(v) != L.rank:
        raise ValueError("rank mismatch")
    out = [Poly.zero(L.nvars)] * L.rank
    for i in range(L.rank):
        for j in range(i + 1, L.rank):
            c = u[i] * v[j] - u[j] * v[i]
            if c:
                s = L.struct(i, j)
                for k in range(L.rank):
                    if s[k]:
                        out[k] = out[k] + c * s[k]
    du = L.anchor_of(u)
    dv = L.anchor_of(v)
    for k in range(L.rank):
        out[k] = out[k] + du(v[k]) - dv(u[k])
    return tuple(out)


def jacobiator(L, u: Elem, v: Elem, w: Elem) -> Elem:
    b = L.bracket
    return elem_add(elem_add(b(u, b(v, w)), b(v, b(w, u))), b(w, b(u, v)))


# cochains ------------------------------------------------------------------


def _sort_sign(idx: Sequence[int]):
    """Sorted tuple and permutation sign; sign 0 on a repeated index."""
    idx = list(idx)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return tuple(idx), 0
    return tuple(idx), sign


class ScalarCochain:
    """Alternating A-multilinear p-form on a rank-n free module, A-valued."""

    __slots__ = ("nvars", "rank", "degree", "values")

    def __init__(self, nvars: int, rank: int, degree: int, values: dict | None = None):
        self.nvars = nvars
        self.rank = rank
        self.degree = degree
        self.values = {}
        for key, val in (values or {}).items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"key {key} does not have {degree} indices")
            if any(not 0 <= k < rank for k in key):
                raise IndexError(f"key {key} outside 0..{rank - 1}")
            skey, sign = _sort_sign(key)
            val = as_poly(val, nvars)
            if sign == 0:
                if val:
                    raise ValueError(f"nonzero value on repeated indices {key}")
                continue
            val = val * sign
            old = self.values.get(skey)
            if old is not None and old != val:
                raise ValueError(f"inconsistent values for {skey}")
            if val:
                self.values[skey] = val

    @classmethod
    def zero(cls, nvars: int, rank: int, degree: int) -> "ScalarCochain":
        return cls(nvars, rank, degree)

    @classmethod
    def from_one_based(cls, nvars: int, rank: int, degree: int, values: dict) -> "ScalarCochain":
        return cls(nvars, rank, degree, {tuple(k - 1 for k in key): v for key, v in values.items()})

    def on_gens(self, idx: Sequence[int]) -> Poly:
        skey, sign = _sort_sign(idx)
        if sign == 0:
            return Poly.zero(self.nvars)
        v = self.values.get(skey)
        if v is None:
            return Poly.zero(self.nvars)
        return v if sign == 1 else -v

    def __call__(self, *elems: Elem) -> Poly:
        """Evaluate on A-combinations by multilinear expansion."""
        if len(elems) != self.degree:
            raise ValueError(f"{self.degree}-cochain given {len(elems)} arguments")
        if self.degree == 0:
            return self.values.get((), Poly.zero(self.nvars))
        acc = Poly.zero(self.nvars)
        supports = [[(i, a) for i, a in enumerate(e) if a] for e in elems]
        for combo in itertools.product(*supports):
            idx = [i for i, _ in combo]
            v = self.on_gens(idx)
            if v:
                c = v
                for _, a in combo:
                    c = c * a
                acc = acc + c
        return acc

    def _combine(self, other, op) -> "ScalarCochain":
        if (self.nvars, self.rank, self.degree) != (other.nvars, other.rank, other.degree):
            raise ValueError("cochains of different shape")
        keys = set(self.values) | set(other.values)
        z = Poly.zero(self.nvars)
        return ScalarCochain(
            self.nvars, self.rank, self.degree,
            {k: op(self.values.get(k, z), other.values.get(k, z)) for k in keys},
        )

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def scale(self, c) -> "ScalarCochain":
        return ScalarCochain(self.nvars, self.rank, self.degree, {k: c * v for k, v in self.values.items()})

    def is_zero(self) -> bool:
        return not self.values

    def __eq__(self, other):
        if not isinstance(other, ScalarCochain):
            return NotImplemented
        return (self.nvars, self.rank, self.degree, self.values) == (
            other.nvars, other.rank, other.degree, other.values)

    def __hash__(self):
        return hash((self.rank, self.degree, frozenset(self.values.items())))

    def items(self):
        """(1-based index tuple, value) pairs in index order."""
        return [(tuple(k + 1 for k in key), self.values[key]) for key in sorted(self.values)]

    def __str__(self):
        if not self.values:
            return "0"
        return ", ".join(f"{key}: {v}" for key, v in self.items())

    __repr__ = __str__


def random_cochain(rng: random.Random, nvars: int, rank: int, degree: int, max_deg: int = 2) -> ScalarCochain:
    vals = {
        key: random_poly(rng, nvars, max_deg=max_deg)
        for key in itertools.combinations(range(rank), degree)
    }
    return ScalarCochain(nvars, rank, degree, vals)


def ce_differential(L: LieRinehartPresentation, c: ScalarCochain) -> ScalarCochain:
    """The degree p+1 cochain dc."""
    if c.rank != L.rank or c.nvars != L.nvars:
        raise ValueError("cochain does not live on this presentation")
    p = c.degree
    gens = [L.basis(i) for i in range(L.rank)]
    out = {}
    for key in itertools.combinations(range(L.rank), p + 1):
        acc = Poly.zero(L.nvars)
        for a in range(p + 1):
            rest = key[:a] + key[a + 1:]
            val = c.on_gens(rest)
            if val:
                term = L.anchor[key[a]](val)
                acc = acc + term if a % 2 == 0 else acc - term
        for a, b in itertools.combinations(range(p + 1), 2):
            br = L.struct(key[a], key[b])
            if any(br):
                rest = [gens[k] for t, k in enumerate(key) if t not in (a, b)]
                term = c(br, *rest)
                acc = acc + term if (a + b) % 2 == 0 else acc - term
        if acc:
            out[key] = acc
    return ScalarCochain(L.nvars, L.rank, p + 1, out)


def is_cocycle(L: LieRinehartPresentation, f: ScalarCochain) -> Verdict:
    """True iff df vanishes; the witness is a 1-based generator triple and value."""
    df = ce_differential(L, f)
    if df.is_zero():
        return Verdict(True)
    key, val = df.items()[0]
    return Verdict(False, (key, str(val)))


def pullback_cocycle(f: ScalarCochain, L: LieRinehartPresentation) -> ScalarCochain:
    """alpha^*(f)(x_1..x_p) = f(alpha(x_1)..alpha(x_p)) for f on Der_k(A)."""
    if f.rank != L.nvars:
        raise ValueError("f must be a cochain on Der_k(A) (rank = number of variables)")
    imgs = [d.coeffs for d in L.anchor]
    vals = {}
    for key in itertools.combinations(range(L.rank), f.degree):
        v = f(*[imgs[k] for k in key])
        if v:
            vals[key] = v
    return ScalarCochain(L.nvars, L.rank, f.degree, vals)


def one_cochain(L: LieRinehartPresentation, values: Iterable) -> ScalarCochain:
    """Degree-1 cochain with the given values on e_1..e_n."""
    return ScalarCochain(L.nvars, L.rank, 1, {(i,): v for i, v in enumerate(values)})
