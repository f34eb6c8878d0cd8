"""The non-abelian extension End(L~, E) = End_A(E) + L~ of a connection with psi = Id.

Bracket:

    [(phi, u), (phi', v)] = ([phi, phi'] + [rho(u), phi'] - [rho(v), phi] + R(u, v), [u, v]).

As a left A-module End(L~, E) is free on D, u_1..u_n and the matrix units
E_ij, so it is also presented as a ``DLieAlgebra`` whose structure
functions are read off the bracket above; the generic axiom suite then
applies unchanged.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable

from .connection import Connection, DiffOperator, curvature, diff_order
from .dlie import DLieAlgebra, check_dlie_axioms
from .lie_rinehart import Elem, elem_add, elem_is_zero, elem_scale, elem_str
from .poly_core import Derivation, Poly, PolyMatrix, bracket_derivations, monomials_upto, random_matrix, random_poly
from .report import Report


@dataclass(frozen=True)
class EndExtElement:
    phi: PolyMatrix
    u: Elem

    def __add__(self, other: "EndExtElement") -> "EndExtElement":
        return EndExtElement(self.phi + other.phi, elem_add(self.u, other.u))

    def __sub__(self, other: "EndExtElement") -> "EndExtElement":
        return self + other.scale(-1)

    def scale(self, c) -> "EndExtElement":
        return EndExtElement(self.phi.scale(c), elem_scale(c, self.u))

    def is_zero(self) -> bool:
        return self.phi.is_zero() and elem_is_zero(self.u)

    def __str__(self):
        return f"({self.phi}, {elem_str(self.u)})"


def _require_id(rho: Connection):
    if not rho.is_identity:
        raise ValueError("End(L~, E) needs a connection with psi = Id")


def _op_matrix(op: DiffOperator, what: str) -> PolyMatrix:
    if diff_order(op, 0) != 0:
        raise ArithmeticError(f"{what} is not A-linear")
    return op.matrix()


def end_zero(rho: Connection) -> EndExtElement:
    return EndExtElement(PolyMatrix.zero(rho.nvars, rho.r), rho.source.zero())


def d_tilde(rho: Connection) -> EndExtElement:
    return EndExtElement(PolyMatrix.zero(rho.nvars, rho.r), rho.source.D())


def end_bracket(z: EndExtElement, zp: EndExtElement, rho: Connection, r_sign: int = 1) -> EndExtElement:
    """Bracket of End(L~, E); ``r_sign = -1`` corrupts the curvature term (negative control)."""
    _require_id(rho)
    phi, u = z.phi, z.u
    psi, v = zp.phi, zp.u
    Mpsi = DiffOperator.from_matrix(psi)
    Mphi = DiffOperator.from_matrix(phi)
    a = _op_matrix(rho.rho(u).commutator(Mpsi), "[rho(u), phi']")
    b = _op_matrix(rho.rho(v).commutator(Mphi), "[rho(v), phi]")
    R = _op_matrix(curvature(rho, u, v), "R(u, v)")
    part = phi.commutator(psi) + a - b + R.scale(r_sign)
    return EndExtElement(part, rho.source.bracket(u, v))


def end_right_action(z: EndExtElement, c: Poly, rho: Connection) -> EndExtElement:
    """z c = c z + pi(u)(c) D~."""
    T = rho.source
    return EndExtElement(z.phi.scale(c), T.right_action(z.u, c))


def end_anchor(z: EndExtElement, rho: Connection) -> Derivation:
    return rho.source.anchor_of(z.u)


def random_end_elem(rng: random.Random, rho: Connection, max_deg: int = 2) -> EndExtElement:
    return EndExtElement(random_matrix(rng, rho.nvars, rho.r, max_deg=max_deg), rho.source.random_elem(rng, max_deg))


# presentation ----------------------------------------------------------------


def _to_elem(z: EndExtElement, rho: Connection) -> Elem:
    return tuple(z.u) + tuple(z.phi[i, j] for i in range(rho.r) for j in range(rho.r))


def _from_elem(e: Elem, rho: Connection) -> EndExtElement:
    k = rho.source.rank
    r = rho.r
    phi = PolyMatrix([[e[k + i * r + j] for j in range(r)] for i in range(r)])
    return EndExtElement(phi, tuple(e[:k]))


def end_generators(rho: Connection) -> list[EndExtElement]:
    """D, u_1..u_n, then E_11, E_12, .., E_rr."""
    T, m, r = rho.source, rho.nvars, rho.r
    Z = PolyMatrix.zero(m, r)
    gens = [EndExtElement(Z, T.basis(i)) for i in range(T.rank)]
    gens += [EndExtElement(PolyMatrix.unit(m, r, i, j), T.zero()) for i in range(r) for j in range(r)]
    return gens


def end_presentation(rho: Connection, bracket: Callable | None = None) -> DLieAlgebra:
    """End(L~, E) as a finitely presented D-Lie algebra."""
    _require_id(rho)
    br = bracket or (lambda a, b: end_bracket(a, b, rho))
    T, m, r = rho.source, rho.nvars, rho.r
    gens = end_generators(rho)
    pi = list(T.pi) + [Derivation.zero(m)] * (r * r)
    table = {}
    for i, j in itertools.combinations(range(len(gens)), 2):
        val = _to_elem(br(gens[i], gens[j]), rho)
        if any(val):
            table[(i, j)] = val
    P = DLieAlgebra(m, pi, table, name=f"End({T.name},E)")
    names = T.names() + [f"E{i + 1}{j + 1}" for i in range(r) for j in range(r)]
    P.names = lambda: names
    return P


def check_end_dlie_axioms(
    rho: Connection,
    samples: int = 50,
    max_deg: int = 2,
    seed: int = 0,
    bracket: Callable | None = None,
) -> Report:
    """D-Lie suite on End(L~, E); ``bracket`` overrides the bracket (e.g. a corrupted one)."""
    _require_id(rho)
    br = bracket or (lambda a, b: end_bracket(a, b, rho))
    P = end_presentation(rho, br)
    base = check_dlie_axioms(P, samples=samples, max_deg=max_deg, seed=seed)
    rep = Report(f"end_ext_axioms[{rho.name}]", seed, list(base.checks))
    rng = random.Random(seed + 1)
    Dt = d_tilde(rho)
    zs = [random_end_elem(rng, rho, max_deg) for _ in range(samples)]
    ws = [random_end_elem(rng, rho, max_deg) for _ in range(samples)]
    ys = [random_end_elem(rng, rho, max_deg) for _ in range(samples)]
    cs = [random_poly(rng, rho.nvars, max_deg=max_deg) for _ in range(samples)]

    bad = next((str(z) for z in zs if not br(Dt, z).is_zero()), None)
    rep.record("D_tilde_central_direct", bad is None, bad, samples)

    bad = None
    for z, w in zip(zs, ws):
        if not (br(z, w) + br(w, z)).is_zero():
            bad = (str(z), str(w))
            break
    rep.record("antisymmetry_direct", bad is None, bad, samples)

    bad = None
    for z, w, y in zip(zs, ws, ys):
        j = br(z, br(w, y)) + br(w, br(y, z)) + br(y, br(z, w))
        if not j.is_zero():
            bad = (str(z), str(w), str(y), str(j))
            break
    rep.record("jacobi_direct", bad is None, bad, samples)

    # [z, w c] = c [z, w] + pi(z)(c) w + pi(z) pi(w)(c) D~
    bad = None
    for z, w, c in zip(zs, ws, cs):
        lhs = br(z, end_right_action(w, c, rho))
        pz, pw = end_anchor(z, rho), end_anchor(w, rho)
        rhs = br(z, w).scale(c) + w.scale(pz(c)) + Dt.scale(pz(pw(c)))
        if lhs != rhs:
            bad = (str(z), str(w), str(c))
            break
    rep.record("right_action_compat", bad is None, bad, samples)

    bad = None
    for z, w in zip(zs, ws):
        lhs = end_anchor(br(z, w), rho)
        if lhs != bracket_derivations(end_anchor(z, rho), end_anchor(w, rho)):
            bad = (str(z), str(w))
            break
    rep.record("anchor_compat", bad is None, bad, samples)

    bad = None
    for z, w in zip(zs[:10], ws[:10]):
        direct = br(z, w)
        pres = _from_elem(P.bracket(_to_elem(z, rho), _to_elem(w, rho)), rho)
        if direct != pres:
            bad = (str(z), str(w))
            break
    rep.record("direct_equals_presentation", bad is None, bad, 10)
    return rep


# rho^! -------------------------------------------------------------------------


def rho_shriek(z: EndExtElement, rho: Connection) -> DiffOperator:
    """phi + rho(u), an operator of order <= 1."""
    _require_id(rho)
    return DiffOperator.from_matrix(z.phi) + rho.rho(z.u)


def end_basis(rho: Connection, max_deg: int = 2) -> list[EndExtElement]:
    """Monomial multiples of the free generators of End(L~, E)."""
    out = []
    mons = monomials_upto(rho.nvars, max_deg)
    for g in end_generators(rho):
        for mono in mons:
            out.append(g.scale(Poly.monomial(mono)))
    return out


def rho_shriek_hom_check(
    rho: Connection, samples: int = 50, max_deg: int = 2, seed: int = 0, exhaustive: bool = False
) -> Report:
    """rho^!([z, z']) = [rho^!(z), rho^!(z')] and order(rho^!(z)) <= 1."""
    rep = Report(f"rho_shriek[{rho.name}]", seed)
    rng = random.Random(seed)
    pairs = [(random_end_elem(rng, rho, max_deg), random_end_elem(rng, rho, max_deg)) for _ in range(samples)]
    bad = bad_order = None
    for z, w in pairs:
        lhs = rho_shriek(end_bracket(z, w, rho), rho)
        rhs = rho_shriek(z, rho).commutator(rho_shriek(w, rho))
        if lhs != rhs and bad is None:
            bad = (str(z), str(w))
        if diff_order(rho_shriek(z, rho), 1) is None and bad_order is None:
            bad_order = str(z)
    rep.record("hom_law", bad is None, bad, samples)
    rep.record("order_le_1", bad_order is None, bad_order, samples)
    if exhaustive:
        basis = end_basis(rho, 2)
        imgs = [rho_shriek(z, rho) for z in basis]
        bad = None
        count = 0
        for a, b in itertools.combinations(range(len(basis)), 2):
            count += 1
            lhs = rho_shriek(end_bracket(basis[a], basis[b], rho), rho)
            if lhs != imgs[a].commutator(imgs[b]):
                bad = (str(basis[a]), str(basis[b]))
                break
        rep.record("hom_law_exhaustive", bad is None, bad, count)
    return rep


def image_order_check(rho: Connection, degree: int = 3, samples: int = 30, seed: int = 0, max_deg: int = 1) -> Report:
    """Products P of i images and Q of j images (i + j <= degree + 1):
    order(P) <= i, order(Q) <= j, order([P, Q]) <= i + j - 1.
    """
    _require_id(rho)
    rep = Report(f"image_orders[{rho.name}]", seed)
    rng = random.Random(seed)
    shapes = [(i, j) for i in range(1, degree + 1) for j in range(1, degree + 1) if i + j <= degree + 1]
    bad = None
    mismatch = None
    count = 0
    for s in range(samples):
        i, j = shapes[s % len(shapes)]
        P = _random_product(rng, rho, i, max_deg)
        Q = _random_product(rng, rho, j, max_deg)
        C = P.commutator(Q)
        oP, oQ, oC = diff_order(P, i), diff_order(Q, j), diff_order(C, max(i + j - 1, 0))
        count += 1
        if (oP is None or oQ is None or oC is None) and bad is None:
            bad = {"i": i, "j": j, "orders": [oP, oQ, oC]}
        for op, o in ((P, oP), (Q, oQ), (C, oC)):
            if o is not None and max(op.order(), 0) != o and mismatch is None:
                mismatch = {"canonical": op.order(), "commutator": o}
    # P = Q gives a zero commutator
    P = _random_product(rng, rho, 2, max_deg)
    rep.record("orders", bad is None, bad, count)
    rep.record("self_commutator_zero", P.commutator(P).is_zero())
    rep.record("canonical_degree_agrees", mismatch is None, mismatch, count)
    return rep


def _random_product(rng, rho, i, max_deg) -> DiffOperator:
    op = DiffOperator.identity(rho.nvars, rho.r)
    for _ in range(i):
        op = op.compose(rho_shriek(random_end_elem(rng, rho, max_deg), rho))
    return op
