"""D-Lie algebras: the model D^1_f(A), abelian extensions L(alpha^*(f)), axioms, morphisms.

A D-Lie algebra is stored by structure functions on generators u_0 = D,
u_1..u_n.  Elements are left A-combinations (tuples of n+1 polynomials,
slot 0 is the D coefficient).  The right action is

    u c = c u + pi(u)(c) D.
"""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from .lie_rinehart import (
    Elem,
    LieRinehartPresentation,
    ScalarCochain,
    elem_add,
    elem_basis,
    elem_is_zero,
    elem_scale,
    elem_str,
    elem_sub,
    elem_zero,
    extended_bracket,
    is_cocycle,
    pullback_cocycle,
    random_elem,
)
from .poly_core import Derivation, Poly, as_poly, bracket_derivations, random_poly
from .report import Report


class NotACocycle(ValueError):
    pass


D1Elem = tuple  # (Poly scalar part a, Derivation x) standing for a*I + x


def d1f_bracket(u: D1Elem, v: D1Elem, f: ScalarCochain) -> D1Elem:
    """[aI + x, bI + y] = (x(b) - y(a) + f(x, y)) I + [x, y] in D^1_f(A)."""
    a, x = u
    b, y = v
    scalar = x(b) - y(a) + f(x.coeffs, y.coeffs)
    return scalar, bracket_derivations(x, y)


def d1f_right_action(u: D1Elem, c: Poly) -> D1Elem:
    """(aI + x) c = (ac + x(c)) I + c x."""
    a, x = u
    return a * c + x(c), x.scale(c)


def _d1_add(u: D1Elem, v: D1Elem) -> D1Elem:
    return u[0] + v[0], u[1] + v[1]


class DLieAlgebra:
    """Finitely presented D-Lie algebra on u_0 = D, u_1..u_n."""

    def __init__(
        self,
        nvars: int,
        pi: Sequence[Derivation],
        brackets: dict | None = None,
        *,
        alpha_tilde: Sequence[D1Elem] | None = None,
        f_der: ScalarCochain | None = None,
        cocycle: ScalarCochain | None = None,
        base: LieRinehartPresentation | None = None,
        name: str = "T",
    ):
        self.nvars = nvars
        self.pi = tuple(pi)
        self.rank = len(self.pi)
        self.n = self.rank - 1
        self.name = name
        self.alpha_tilde = None if alpha_tilde is None else tuple(alpha_tilde)
        self.f_der = f_der
        self.cocycle = cocycle
        self.base = base
        self._raw = {}
        for (i, j), vals in (brackets or {}).items():
            vals = tuple(as_poly(v, nvars) for v in vals)
            if len(vals) != self.rank:
                raise ValueError(f"bracket ({i},{j}) needs {self.rank} entries")
            self._raw[(i, j)] = vals
        zero = elem_zero(nvars, self.rank)
        self._table = {}
        for i in range(self.rank):
            for j in range(self.rank):
                if (i, j) in self._raw:
                    self._table[(i, j)] = self._raw[(i, j)]
                elif (j, i) in self._raw:
                    self._table[(i, j)] = elem_scale(-1, self._raw[(j, i)])
                else:
                    self._table[(i, j)] = zero

    # elements -------------------------------------------------------------
    def struct(self, i: int, j: int) -> Elem:
        return self._table[(i, j)]

    def basis(self, i: int) -> Elem:
        return elem_basis(self.nvars, self.rank, i)

    def D(self) -> Elem:
        return self.basis(0)

    def zero(self) -> Elem:
        return elem_zero(self.nvars, self.rank)

    def names(self) -> list[str]:
        return ["D"] + [f"u{i}" for i in range(1, self.rank)]

    def fmt(self, u: Elem) -> str:
        return elem_str(u, self.names())

    def anchor_of(self, u: Elem) -> Derivation:
        acc = Derivation.zero(self.nvars)
        for a, d in zip(u, self.pi):
            if a:
                acc = acc + d.scale(a)
        return acc

    def bracket(self, u: Elem, v: Elem) -> Elem:
        return extended_bracket(self, u, v)

    def right_action(self, u: Elem, c: Poly) -> Elem:
        out = list(elem_scale(c, u))
        out[0] = out[0] + self.anchor_of(u)(c)
        return tuple(out)

    def alpha_tilde_of(self, u: Elem) -> D1Elem | None:
        if self.alpha_tilde is None:
            return None
        acc = (Poly.zero(self.nvars), Derivation.zero(self.nvars))
        for a, (s, d) in zip(u, self.alpha_tilde):
            if a:
                acc = _d1_add(acc, (a * s, d.scale(a)))
        return acc

    def random_elem(self, rng: random.Random, max_deg: int = 2) -> Elem:
        return random_elem(rng, self.nvars, self.rank, max_deg)

    def lie_part(self, u: Elem) -> Elem:
        """The L-component x of u = a z + x (drops the D slot)."""
        return tuple(u[1:])

    def __repr__(self):
        return f"DLieAlgebra({self.name}, n={self.n}, m={self.nvars})"


def d1f_presentation(nvars: int, f: ScalarCochain, name: str = "D1f") -> DLieAlgebra:
    """D^1_f(A) itself: D = I and u_i = d/dx_i with [u_i, u_j] = f(d_i, d_j) I."""
    pi = [Derivation.zero(nvars)] + [Derivation.partial(nvars, i) for i in range(nvars)]
    br = {}
    for i, j in itertools.combinations(range(nvars), 2):
        v = f.on_gens((i, j))
        if v:
            br[(i + 1, j + 1)] = (v,) + (Poly.zero(nvars),) * nvars
    at = [(Poly.one(nvars), Derivation.zero(nvars))] + [
        (Poly.zero(nvars), Derivation.partial(nvars, i)) for i in range(nvars)
    ]
    return DLieAlgebra(nvars, pi, br, alpha_tilde=at, f_der=f, cocycle=f, name=name)


def extension_from_cochain(L: LieRinehartPresentation, g: ScalarCochain, name: str | None = None) -> DLieAlgebra:
    """A z + L with [a z + x, b z + y] = (x(b) - y(a) + g(x, y)) z + [x, y].

    ``g`` is a 2-cocycle on L itself.  No map into a D^1_f model is recorded.
    """
    v = is_cocycle(L, g)
    if not v:
        raise NotACocycle(f"d g is nonzero on generators {v.witness[0]}: {v.witness[1]}")
    return _extension(L, g, None, None, name or f"{L.name}(g)")


def build_extension(L: LieRinehartPresentation, f: ScalarCochain, name: str | None = None) -> DLieAlgebra:
    """The extension L(alpha^*(f)) for a 2-cocycle f on Der_k(A)."""
    if f.degree != 2 or f.rank != L.nvars or f.nvars != L.nvars:
        raise ValueError(f"f must be a 2-form on Der_k(A) with {L.nvars} generators")
    der = LieRinehartPresentation.der(L.nvars)
    v = is_cocycle(der, f)
    if not v:
        raise NotACocycle(f"f is not a cocycle on Der_k(A): generators {v.witness[0]} give {v.witness[1]}")
    g = pullback_cocycle(f, L)
    at = [(Poly.one(L.nvars), Derivation.zero(L.nvars))] + [
        (Poly.zero(L.nvars), d) for d in L.anchor
    ]
    return _extension(L, g, f, at, name or f"{L.name}(f)")


def _extension(L, g, f_der, at, name) -> DLieAlgebra:
    m, n = L.nvars, L.rank
    pi = [Derivation.zero(m)] + list(L.anchor)
    br = {}
    for i, j in itertools.combinations(range(n), 2):
        vals = (g.on_gens((i, j)),) + tuple(L.struct(i, j))
        if any(vals):
            br[(i + 1, j + 1)] = vals
    return DLieAlgebra(m, pi, br, alpha_tilde=at, f_der=f_der, cocycle=g, base=L, name=name)


# axiom suite ---------------------------------------------------------------


def check_dlie_axioms(T: DLieAlgebra, samples: int = 50, max_deg: int = 2, seed: int = 0) -> Report:
    """Centrality of D, pi(D) = 0, al1, al3, Jacobi, anchor morphism, [u, vc] identity."""
    rep = Report(f"dlie_axioms[{T.name}]", seed)
    rng = random.Random(seed)
    gens = [T.basis(i) for i in range(T.rank)]
    D = T.D()
    br = T.bracket

    bad = None
    for i in range(T.rank):
        if not elem_is_zero(T.struct(0, i)):
            bad = (f"[D, {T.names()[i]}]", T.fmt(T.struct(0, i)))
            break
    rep.record("D_central", bad is None, bad)
    rep.record("pi_D_zero", T.pi[0].is_zero(), str(T.pi[0]))

    bad = None
    for i, j in itertools.product(range(T.rank), repeat=2):
        if (i, j) in T._raw and (j, i) in T._raw and T._raw[(j, i)] != elem_scale(-1, T._raw[(i, j)]):
            bad = (i, j)
    rep.record("antisymmetry", bad is None, bad)

    samples_u = [T.random_elem(rng, max_deg) for _ in range(samples)]
    samples_v = [T.random_elem(rng, max_deg) for _ in range(samples)]
    samples_w = [T.random_elem(rng, max_deg) for _ in range(samples)]
    cs = [random_poly(rng, T.nvars, max_deg=max_deg) for _ in range(samples)]
    cs2 = [random_poly(rng, T.nvars, max_deg=max_deg) for _ in range(samples)]

    # centrality on A-combinations
    bad = None
    for u in samples_u:
        if not elem_is_zero(br(D, u)):
            bad = ("D", T.fmt(u))
            break
    rep.record("D_central_random", bad is None, bad, samples)

    # al1: u c = c u + pi(u)(c) D gives a right module compatible with the left one
    bad = None
    for u, c, c2 in zip(samples_u, cs, cs2):
        lhs = T.right_action(T.right_action(u, c), c2)
        rhs = T.right_action(u, c * c2)
        lhs2 = T.right_action(elem_scale(c2, u), c)
        rhs2 = elem_scale(c2, T.right_action(u, c))
        if lhs != rhs or lhs2 != rhs2:
            bad = (T.fmt(u), str(c), str(c2))
            break
    rep.record("al1_bimodule", bad is None, bad, samples)

    # al3: [u, c v] = c [u, v] + pi(u)(c) v
    bad = None
    for u, v, c in zip(samples_u, samples_v, cs):
        lhs = br(u, elem_scale(c, v))
        rhs = elem_add(elem_scale(c, br(u, v)), elem_scale(T.anchor_of(u)(c), v))
        if lhs != rhs:
            bad = (T.fmt(u), T.fmt(v), str(c))
            break
    rep.record("al3", bad is None, bad, samples)

    # Jacobi on generators and samples
    bad = None
    for a, b, c in itertools.combinations(range(T.rank), 3):
        j = _jac(T, gens[a], gens[b], gens[c])
        if not elem_is_zero(j):
            bad = (T.names()[a], T.names()[b], T.names()[c], T.fmt(j))
            break
    if bad is None:
        for u, v, w in zip(samples_u, samples_v, samples_w):
            j = _jac(T, u, v, w)
            if not elem_is_zero(j):
                bad = (T.fmt(u), T.fmt(v), T.fmt(w), T.fmt(j))
                break
    rep.record("jacobi", bad is None, bad, samples)

    # anchor morphism
    bad = None
    pairs = [(gens[i], gens[j]) for i, j in itertools.combinations(range(T.rank), 2)]
    for u, v in pairs + list(zip(samples_u, samples_v)):
        lhs = T.anchor_of(br(u, v))
        rhs = bracket_derivations(T.anchor_of(u), T.anchor_of(v))
        if lhs != rhs:
            bad = (T.fmt(u), T.fmt(v), str(lhs), str(rhs))
            break
    rep.record("anchor_homomorphism", bad is None, bad, samples)

    # [u, v c] = c[u, v] + pi(u)(c) v + pi(u)pi(v)(c) D
    bad = None
    for u, v, c in zip(samples_u, samples_v, cs):
        lhs = br(u, T.right_action(v, c))
        pu, pv = T.anchor_of(u), T.anchor_of(v)
        rhs = elem_add(elem_scale(c, br(u, v)), elem_scale(pu(c), v))
        rhs = elem_add(rhs, elem_scale(pu(pv(c)), D))
        if lhs != rhs:
            bad = (T.fmt(u), T.fmt(v), str(c))
            break
    rep.record("derived_identity", bad is None, bad, samples)

    if T.alpha_tilde is None:
        rep.skip("alpha_tilde", "no map into D^1_f(A) (pre-D-Lie algebra)")
    else:
        f = T.f_der
        bad = None
        at = T.alpha_tilde_of
        if at(D) != (Poly.one(T.nvars), Derivation.zero(T.nvars)):
            bad = ("alpha(D) != I", str(at(D)))
        for u, v in pairs + list(zip(samples_u, samples_v)):
            if bad:
                break
            if at(br(u, v)) != d1f_bracket(at(u), at(v), f):
                bad = ("bracket", T.fmt(u), T.fmt(v))
            elif at(u)[1] != T.anchor_of(u):
                bad = ("pi o alpha != pi", T.fmt(u))
        for u, c in zip(samples_u, cs):
            if bad:
                break
            if at(T.right_action(u, c)) != d1f_right_action(at(u), c):
                bad = ("right linearity", T.fmt(u), str(c))
        rep.record("alpha_tilde", bad is None, bad, samples)
    return rep


def _jac(T, u, v, w):
    b = T.bracket
    return elem_add(elem_add(b(u, b(v, w)), b(v, b(w, u))), b(w, b(u, v)))


# morphisms -----------------------------------------------------------------


def apply_map(images: Sequence[Elem], u: Elem) -> Elem:
    """Left A-linear extension of a generator map."""
    acc = None
    for a, img in zip(u, images):
        term = elem_scale(a, img)
        acc = term if acc is None else elem_add(acc, term)
    return acc


def compose_maps(outer: Sequence[Elem], inner: Sequence[Elem]) -> list[Elem]:
    return [apply_map(outer, img) for img in inner]


def induced_morphism(lie_images: Sequence[Elem], source: DLieAlgebra, target: DLieAlgebra) -> list[Elem]:
    """phi_f(a z + x) = a z' + phi(x) for a Lie-Rinehart map phi given on e_i."""
    m = target.nvars
    z = Poly.zero(m)
    out = [target.D()]
    for img in lie_images:
        if len(img) != target.n:
            raise ValueError("image must be an element of the target L")
        out.append((z,) + tuple(img))
    if len(out) != source.rank:
        raise ValueError("one image per source generator is required")
    return out


def cohomologous_map(g1: ScalarCochain, T: DLieAlgebra) -> list[Elem]:
    """Generator map for a z + x -> (a - g(x)) z + x, from L(f) to L(f + d g)."""
    out = [T.D()]
    for i in range(T.n):
        e = list(T.basis(i + 1))
        e[0] = -g1.on_gens((i,))
        out.append(tuple(e))
    return out


def morphism_apply_and_check(
    images: Sequence[Elem],
    source: DLieAlgebra,
    target: DLieAlgebra,
    samples: int = 20,
    max_deg: int = 2,
    seed: int = 0,
) -> Report:
    rep = Report(f"morphism[{source.name}->{target.name}]", seed)
    rng = random.Random(seed)
    phi = lambda u: apply_map(images, u)  # noqa: E731
    rep.record("D_to_D", phi(source.D()) == target.D(), target.fmt(phi(source.D())))

    us = [source.random_elem(rng, max_deg) for _ in range(samples)]
    vs = [source.random_elem(rng, max_deg) for _ in range(samples)]
    cs = [random_poly(rng, source.nvars, max_deg=max_deg) for _ in range(samples)]
    bad = None
    for u, c in zip(us, cs):
        if phi(source.right_action(u, c)) != target.right_action(phi(u), c):
            bad = (source.fmt(u), str(c))
            break
    rep.record("right_linear", bad is None, bad, samples)

    gens = [source.basis(i) for i in range(source.rank)]
    pairs = [(gens[i], gens[j]) for i, j in itertools.combinations(range(source.rank), 2)]
    bad = None
    for u, v in pairs + list(zip(us, vs)):
        lhs = phi(source.bracket(u, v))
        rhs = target.bracket(phi(u), phi(v))
        if lhs != rhs:
            bad = (source.fmt(u), source.fmt(v), target.fmt(lhs), target.fmt(rhs))
            break
    rep.record("bracket", bad is None, bad, samples)

    bad = None
    for u in gens + us:
        if target.anchor_of(phi(u)) != source.anchor_of(u):
            bad = source.fmt(u)
            break
    rep.record("anchor", bad is None, bad)

    if source.alpha_tilde is not None and target.alpha_tilde is not None and source.f_der == target.f_der:
        bad = None
        for u in gens + us:
            if target.alpha_tilde_of(phi(u)) != source.alpha_tilde_of(u):
                bad = source.fmt(u)
                break
        rep.record("alpha_tilde", bad is None, bad)
    else:
        rep.skip("alpha_tilde", "different D^1_f models; compared through pi only")
    return rep


def map_difference(a: Sequence[Elem], b: Sequence[Elem]) -> list[Elem]:
    return [elem_sub(x, y) for x, y in zip(a, b)]
