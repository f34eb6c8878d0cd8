import random

import pytest
from hypothesis import given, settings

from dliekit import library as lib
from dliekit.connection import (
    Connection,
    DiffOperator,
    InvalidProjectiveBasis,
    ProjectiveBasis,
    correspondence_report,
    curvature,
    curvature_matrix,
    curvature_transfer_check,
    curvature_type_check,
    diff_order,
    idempotent_curvature_check,
    lift_cochain,
    psi_correspondence,
    psi_from_connection,
    ring_map_check,
    rkl_antisymmetry_check,
)
from dliekit.poly_core import Derivation, Poly, PolyMatrix, random_poly

from conftest import seeds

X, Y = Poly.var(2, 0), Poly.var(2, 1)
DX, DY = Derivation.partial(2, 0), Derivation.partial(2, 1)
ALL = {**lib.connections(), **lib.psi_variants()}


def test_weyl_relation():
    d = DiffOperator.derivation(DX)
    x = DiffOperator.multiplication(2, 1, X)
    assert d @ x == x @ d + DiffOperator.identity(2, 1)
    assert d.commutator(x) == DiffOperator.identity(2, 1)
    assert (d @ d @ x).order() == 2


def test_operator_application():
    op = DiffOperator.derivation(DX) @ DiffOperator.multiplication(2, 1, Y)
    assert op.apply((X * X,)) == (2 * X * Y,)


@given(seed=seeds)
@settings(max_examples=40)
def test_diff_order_matches_canonical_degree(seed):
    rng = random.Random(seed)
    op = DiffOperator.identity(2, 1)
    for _ in range(rng.randint(0, 3)):
        if rng.random() < 0.5:
            op = op @ DiffOperator.derivation(Derivation.of(2, [random_poly(rng, 2, 1), random_poly(rng, 2, 1)]))
        else:
            op = op @ DiffOperator.multiplication(2, 1, random_poly(rng, 2))
    expected = max(op.order(), 0)
    assert diff_order(op, 4) == expected
    assert diff_order(op, 4, random_multipliers=True, rng=rng) == expected
    if expected > 0:
        assert diff_order(op, expected - 1) is None


def test_zero_operator_order():
    assert diff_order(DiffOperator.zero(2, 2), 0) == 0


def test_nilpotent_curvature_oracle():
    rho = lib.connection("nilpotent")
    T = rho.source
    # dx G2 - dy G1 + [G1, G2] - f(dx, dy) Id with f = x
    assert curvature_matrix(rho, T.basis(1), T.basis(2)) == PolyMatrix.of(2, [[Y - X, 0], [0, -X - Y]])
    assert curvature(rho, T.D(), T.basis(1)).is_zero()


@pytest.mark.parametrize("name", sorted(ALL))
def test_curvature_transfer(name):
    rep = curvature_transfer_check(ALL[name], samples=20)
    assert rep.passed, rep.failures()


def test_short_transfer_form_needs_psi_identity():
    rep = curvature_transfer_check(lib.psi_variants()["nilpotent_psi_shear"], samples=5)
    assert {c.name for c in rep.checks} == {"transfer_on_L", "transfer_general"}


@pytest.mark.parametrize("name", sorted(ALL))
def test_psi_correspondence_round_trip(name):
    rep = correspondence_report(ALL[name], samples=10)
    assert rep.passed, rep.failures()


def test_psi_correspondence_explicit():
    rho = lib.connection("diagonal_exact")
    nabla = psi_from_connection(rho)
    back = psi_correspondence(nabla, lib.pairs()["der2_exact"].f, target=rho.source)
    assert back.gammas == rho.gammas and back.psi == rho.psi


@pytest.mark.parametrize("name", ["curvature_type", "trivial_const", "diagonal_exact"])
def test_curvature_type_examples(name):
    rho = lib.connection(name)
    f = lib.curvature_type_form(name)
    assert curvature_type_check(rho, f)
    assert not curvature_type_check(rho, f.scale(2))


def test_curvature_type_accepts_forms_on_der():
    rho = lib.connection("curvature_type")
    f = lib.two_form(2, {(1, 2): 1})
    assert curvature_type_check(rho, lift_cochain(rho.source, f))


def test_connection_shape_errors():
    T = lib.extension("der2_zero")
    with pytest.raises(ValueError):
        Connection(T, [PolyMatrix.zero(2, 2)])
    with pytest.raises(ValueError):
        Connection(T, [PolyMatrix.zero(2, 2), PolyMatrix.zero(2, 3)])


def test_uw_idempotent_curvature_oracle():
    pb = lib.projective_bases()["uw"]
    phi = pb.phi
    assert phi == PolyMatrix.of(2, [[1 - X * Y, Y], [X - X * X * Y, X * Y]])
    rep = idempotent_curvature_check(pb, DX, DY)
    assert rep.passed, rep.failures()
    # hand-computed [dx phi, dy phi]
    assert rep.M == PolyMatrix.of(2, [[2 * X * Y - 1, -2 * Y], [2 * X * X * Y - 2 * X, 1 - 2 * X * Y]])
    assert rep.M == phi.derive(DX).commutator(phi.derive(DY))


@pytest.mark.parametrize("name", ["uw", "diag", "lower", "free2"])
def test_projective_bases(name):
    pb = lib.projective_bases()[name]
    assert idempotent_curvature_check(pb, DX, DY).passed
    assert rkl_antisymmetry_check(pb, DX, DY)


def test_rho_is_not_a_ring_map_on_uw():
    assert not ring_map_check(lib.projective_bases()["uw"])
    assert ring_map_check(lib.projective_bases()["free2"])


def test_invalid_projective_basis():
    with pytest.raises(InvalidProjectiveBasis):
        ProjectiveBasis.from_idempotent(PolyMatrix.of(2, [[1, 1], [1, 1]]))
