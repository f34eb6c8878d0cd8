import random

import pytest
from hypothesis import given

from dliekit import library as lib
from dliekit.dlie import (
    DLieAlgebra,
    NotACocycle,
    build_extension,
    check_dlie_axioms,
    d1f_presentation,
    extension_from_cochain,
)
from dliekit.lie_rinehart import (
    LieRinehartPresentation,
    ScalarCochain,
    ce_differential,
    is_cocycle,
    pullback_cocycle,
    random_cochain,
)
from dliekit.poly_core import Derivation, Poly

from conftest import seeds

X, Y = Poly.var(2, 0), Poly.var(2, 1)
ALGEBRAS = [lib.der(1), lib.der(2), lib.split_plane(), lib.affine_line()]


@pytest.mark.parametrize("L", ALGEBRAS, ids=lambda L: L.name)
def test_library_algebras_are_lie_rinehart(L):
    assert L.check(samples=20).passed


def test_bad_anchor_is_caught():
    # anchor not a Lie map: [e1, e2] = 0 but [d/dx, x d/dy] = d/dy
    L = LieRinehartPresentation(2, [Derivation.partial(2, 0), Derivation.of(2, [0, X])], {})
    assert not L.check(samples=5).passed


@pytest.mark.parametrize("L", ALGEBRAS, ids=lambda L: L.name)
@pytest.mark.parametrize("degree", [0, 1, 2])
@given(seed=seeds)
def test_ce_differential_squares_to_zero(L, degree, seed):
    c = random_cochain(random.Random(seed), L.nvars, L.rank, degree)
    dd = ce_differential(L, ce_differential(L, c))
    assert dd.is_zero()


def test_exact_form_oracle():
    g, dg = lib.exact_form()
    # d g(d/dx, d/dy) = d/dx(x y) - d/dy(y^2) = y - 2 y
    assert dg.on_gens((0, 1)) == -Y
    assert ce_differential(lib.der(2), g.scale(0)).is_zero()


def test_cocycle_detection():
    f = ScalarCochain(3, 3, 2, {(0, 1): Poly.var(3, 2)})
    v = is_cocycle(lib.der(3), f)
    assert not v and v.witness[0] == (1, 2, 3)
    assert is_cocycle(lib.der(2), lib.pairs()["der2_x"].f)


@given(seed=seeds)
def test_pullback_preserves_cocycles(seed):
    rng = random.Random(seed)
    f = random_cochain(rng, 2, 2, 2)
    for L in (lib.split_plane(), lib.der(2)):
        assert is_cocycle(L, pullback_cocycle(f, L))


@pytest.mark.parametrize("name", sorted(lib.pairs()))
def test_library_extensions_pass_axioms(name):
    rep = check_dlie_axioms(lib.extension(name), samples=20)
    assert rep.passed, rep.failures()


def test_d1f_model_and_plain_extension():
    f = lib.pairs()["der2_const"].f
    assert check_dlie_axioms(d1f_presentation(2, f), samples=10).passed
    rep = check_dlie_axioms(extension_from_cochain(lib.split_plane(), lib.two_form(2, {(1, 2): 1})), samples=10)
    assert rep.passed
    assert rep.get("alpha_tilde").status == "n/a"


def test_non_cocycle_is_rejected():
    f = ScalarCochain(3, 3, 2, {(0, 1): Poly.var(3, 2)})
    with pytest.raises(NotACocycle):
        build_extension(lib.der(3), f)
    with pytest.raises(ValueError):
        build_extension(lib.der(2), ScalarCochain(2, 2, 3))


def test_jacobi_failure_is_reported():
    m = 3
    pi = [Derivation.zero(m)] + [Derivation.partial(m, i) for i in range(m)]
    z = Poly.zero(m)
    T = DLieAlgebra(m, pi, {(1, 2): (Poly.var(m, 2), z, z, z)}, name="broken")
    rep = check_dlie_axioms(T, samples=5)
    assert rep.get("jacobi").status == "fail"
    assert rep.get("jacobi").witness is not None


def test_extension_bracket_oracle():
    T = lib.extension("der2_x")
    u1, u2 = T.basis(1), T.basis(2)
    # [u1, u2] = f(d/dx, d/dy) D = x D
    assert T.bracket(u1, u2) == (X, Poly.zero(2), Poly.zero(2))
    # [u1, u2 y] = [u1, u2] y + d/dx(y) u2 = x y D
    assert T.bracket(u1, T.right_action(u2, Y)) == (X * Y, Poly.zero(2), Poly.zero(2))


@pytest.mark.parametrize("pair", ["der2_x", "der2_const", "split2_x"])
def test_cohomologous_cocycles_give_isomorphic_extensions(pair):
    g, _ = lib.exact_form()
    p = lib.pairs()[pair]
    assert lib.cohomologous_report(p.lie, p.f, g).passed
