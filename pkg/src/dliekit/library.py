"""Bundled examples: Lie-Rinehart algebras, cocycles, connections, projective bases."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .connection import Connection, ProjectiveBasis
from .dlie import (
    DLieAlgebra,
    build_extension,
    cohomologous_map,
    morphism_apply_and_check,
)
from .lie_rinehart import (
    LieRinehartPresentation,
    ScalarCochain,
    ce_differential,
    one_cochain,
    pullback_cocycle,
)
from .poly_core import Derivation, Poly, PolyMatrix
from .report import Report


def _x(m: int, i: int) -> Poly:
    return Poly.var(m, i)


def der(m: int) -> LieRinehartPresentation:
    return LieRinehartPresentation.der(m, name=f"Der{m}")


def split_plane() -> LieRinehartPresentation:
    """<d/dx, y d/dy> over Q[x, y]; the generators commute."""
    y = _x(2, 1)
    anchor = [Derivation.partial(2, 0), Derivation.of(2, [0, y])]
    return LieRinehartPresentation(2, anchor, {}, name="Split2")


def affine_line() -> LieRinehartPresentation:
    """<d/dx, x d/dx> over Q[x] with [e1, e2] = e1."""
    x = _x(1, 0)
    anchor = [Derivation.partial(1, 0), Derivation.of(1, [x])]
    return LieRinehartPresentation(1, anchor, {(0, 1): (1, 0)}, name="Aff1")


def two_form(m: int, values: dict) -> ScalarCochain:
    """A 2-form on Der_k(A) from 1-based index pairs."""
    return ScalarCochain.from_one_based(m, m, 2, values)


def exact_form() -> tuple[ScalarCochain, ScalarCochain]:
    """(g, d g) with g(d/dx) = y^2, g(d/dy) = x y on Q[x, y]; d g(d/dx, d/dy) = -y."""
    x, y = _x(2, 0), _x(2, 1)
    g = one_cochain(der(2), [y * y, x * y])
    return g, ce_differential(der(2), g)


@dataclass(frozen=True)
class Pair:
    name: str
    lie: LieRinehartPresentation
    f: ScalarCochain

    def extension(self) -> DLieAlgebra:
        return _extension(self.name)


def _pairs() -> dict[str, Pair]:
    x = _x(2, 0)
    _, dg = exact_form()
    d1, d2, sp, af = der(1), der(2), split_plane(), affine_line()
    items = [
        Pair("der1_zero", d1, ScalarCochain.zero(1, 1, 2)),
        Pair("der2_zero", d2, ScalarCochain.zero(2, 2, 2)),
        Pair("der2_const", d2, two_form(2, {(1, 2): 1})),
        Pair("der2_x", d2, two_form(2, {(1, 2): x})),
        Pair("der2_exact", d2, dg),
        Pair("split2_x", sp, two_form(2, {(1, 2): x})),
        Pair("aff1_zero", af, ScalarCochain.zero(1, 1, 2)),
    ]
    return {p.name: p for p in items}


@lru_cache(maxsize=None)
def pairs() -> dict[str, Pair]:
    return _pairs()


@lru_cache(maxsize=None)
def _extension(name: str) -> DLieAlgebra:
    p = pairs()[name]
    return build_extension(p.lie, p.f, name=name)


def extension(name: str) -> DLieAlgebra:
    return _extension(name)


# connections ---------------------------------------------------------------


@lru_cache(maxsize=None)
def connections() -> dict[str, Connection]:
    """Library connections; all have psi = Id."""
    m = 2
    x, y = _x(m, 0), _x(m, 1)
    Z2 = PolyMatrix.zero(m, 2)
    out = {}

    def add(name, pair, gammas, psi=None):
        out[name] = Connection(extension(pair), gammas, psi, name=name)

    add("nilpotent", "der2_x", [PolyMatrix.of(m, [[0, 1], [0, 0]]), PolyMatrix.of(m, [[0, 0], [y, 0]])])
    add("curvature_type", "der2_zero", [Z2, PolyMatrix.scalar(m, 2, x)])
    add("trivial_const", "der2_const", [Z2, Z2])
    add("diagonal_exact", "der2_exact", [PolyMatrix.of(m, [[x, 0], [0, 0]]), PolyMatrix.of(m, [[0, 0], [0, y]])])
    add("split_rank1", "split2_x", [PolyMatrix.of(m, [[y]]), PolyMatrix.of(m, [[x]])])
    x1 = _x(1, 0)
    add("affine_rank1", "aff1_zero", [PolyMatrix.of(1, [[x1]]), PolyMatrix.of(1, [[1]])])
    return out


def connection(name: str) -> Connection:
    try:
        return connections()[name]
    except KeyError:
        raise KeyError(f"unknown library connection {name!r}") from None


@lru_cache(maxsize=None)
def psi_variants() -> dict[str, Connection]:
    """The ``nilpotent`` Christoffel data with psi != Id."""
    m = 2
    x = _x(m, 0)
    base = connection("nilpotent")
    T = base.source
    return {
        "nilpotent_psi2": Connection(T, base.gammas, PolyMatrix.scalar(m, 2, 2), name="nilpotent_psi2"),
        "nilpotent_psi_shear": Connection(T, base.gammas, PolyMatrix.of(m, [[1, x], [0, 1]]), name="nilpotent_psi_shear"),
    }


def curvature_type_form(name: str) -> ScalarCochain | None:
    """The form f on u_1..u_n with R = f Id, for library connections of curvature type."""
    if name == "curvature_type":
        return ScalarCochain.from_one_based(2, 2, 2, {(1, 2): 1})
    if name == "trivial_const":
        return ScalarCochain.from_one_based(2, 2, 2, {(1, 2): -1})
    if name == "diagonal_exact":
        return ScalarCochain.from_one_based(2, 2, 2, {(1, 2): _x(2, 1)})
    return None


# Chern examples ------------------------------------------------------------


def chern_example(m: int, curvature_type: bool = True) -> tuple[Connection, ScalarCochain]:
    """Rank-2 connection over Der(Q[x1..xm]) (m even).

    Gamma_{2i} = x_{2i-1} Id gives curvature type f = sum dx_{2i-1} ^ dx_{2i}.
    With ``curvature_type=False`` the blocks alternate diag(1, 0), diag(0, 1).
    """
    if m % 2:
        raise ValueError("m must be even")
    T = build_extension(der(m), ScalarCochain.zero(m, m, 2), name=f"Der{m}_zero")
    gammas = [PolyMatrix.zero(m, 2) for _ in range(m)]
    for b in range(m // 2):
        xv = _x(m, 2 * b)
        if curvature_type:
            gammas[2 * b + 1] = PolyMatrix.scalar(m, 2, xv)
        else:
            diag = [[xv, 0], [0, 0]] if b % 2 == 0 else [[0, 0], [0, xv]]
            gammas[2 * b + 1] = PolyMatrix.of(m, diag)
    f = ScalarCochain.from_one_based(m, m, 2, {(2 * b + 1, 2 * b + 2): 1 for b in range(m // 2)})
    return Connection(T, gammas, name=f"chern{m}{'' if curvature_type else '_split'}"), f


# projective bases ----------------------------------------------------------


def projective_bases() -> dict[str, ProjectiveBasis]:
    m = 2
    x, y = _x(m, 0), _x(m, 1)
    one = Poly.one(m)
    return {
        "uw": ProjectiveBasis.from_uw([one, x], [1 - x * y, y], name="uw"),
        "diag": ProjectiveBasis.from_idempotent(PolyMatrix.of(m, [[1, 0], [0, 0]]), name="diag"),
        "lower": ProjectiveBasis.from_idempotent(PolyMatrix.of(m, [[1, 0], [x, 0]]), name="lower"),
        "free2": ProjectiveBasis.free(m, 2, name="free2"),
    }


# cohomologous cocycles -----------------------------------------------------


def cohomologous_report(lie: LieRinehartPresentation, f: ScalarCochain, g: ScalarCochain, seed: int = 0) -> Report:
    """az + x -> (a - g(x)) z + x is a morphism L(alpha^*(f)) -> L(alpha^*(f + d g))."""
    dg = ce_differential(der(lie.nvars), g)
    source = build_extension(lie, f, name="source")
    target = build_extension(lie, f + dg, name="target")
    images = cohomologous_map(pullback_cocycle(g, lie), source)
    return morphism_apply_and_check(images, source, target, seed=seed)
