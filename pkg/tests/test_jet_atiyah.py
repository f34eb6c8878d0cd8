import random

import pytest
from hypothesis import given, settings

from dliekit import library as lib
from dliekit.jet_atiyah import (
    JetElement,
    atiyah_sequence_check,
    connection_from_splitting,
    jet_left_action,
    jet_right_action,
    random_jet,
    splitting_from_connection,
    splitting_report,
    splitting_round_trip,
)
from dliekit.poly_core import Poly, PolyMatrix

from conftest import seeds

ALL = {**lib.connections(), **lib.psi_variants()}
X = Poly.var(2, 0)
ONE, ZERO = Poly.one(2), Poly.zero(2)


def test_right_action_oracle():
    T = lib.extension("der2_x")
    j = JetElement.make((ZERO, ZERO), {1: (ONE, ZERO)})
    # (0, u1 (x) e1) x = (d/dx(x) e1, u1 (x) x e1)
    assert jet_right_action(j, X, T) == JetElement.make((ONE, ZERO), {1: (X, ZERO)})


def test_left_action_oracle():
    T = lib.extension("der2_x")
    j = JetElement.make((ZERO, ZERO), {1: (ONE, ZERO)})
    # (x u1) (x) e1 = u1 (x) x e1 - D (x) e1
    assert jet_left_action(X, j, T) == JetElement.make((ZERO, ZERO), {1: (X, ZERO), 0: (-ONE, ZERO)})


@pytest.mark.parametrize("pair", ["der2_x", "split2_x", "aff1_zero"])
def test_atiyah_sequence(pair):
    assert atiyah_sequence_check(lib.extension(pair), 2, samples=10).passed


@given(seed=seeds)
@settings(max_examples=20)
def test_jet_addition_is_abelian(seed):
    rng = random.Random(seed)
    T = lib.extension("der2_x")
    a, b = random_jet(rng, T, 2), random_jet(rng, T, 2)
    assert a + b == b + a
    assert (a - a) == JetElement.make((ZERO, ZERO))


@pytest.mark.parametrize("name", sorted(ALL))
def test_round_trip(name):
    assert splitting_round_trip(ALL[name])


@pytest.mark.parametrize("name", sorted(lib.connections()))
def test_psi_identity_gives_bimodule_splitting(name):
    rho = lib.connection(name)
    assert splitting_report(splitting_from_connection(rho), rho.source, rho.r, samples=10).passed


def test_right_linearity_forces_psi_identity():
    rho = lib.psi_variants()["nilpotent_psi2"]
    rep = splitting_report(splitting_from_connection(rho), rho.source, rho.r, samples=5)
    assert rep.get("left_linear").status == "pass"
    assert rep.get("section").status == "pass"
    assert rep.get("right_linear").status == "fail"
    reading = connection_from_splitting(splitting_from_connection(rho), rho.source, rho.r)
    assert reading.psi == PolyMatrix.scalar(2, 2, 2)


def test_non_splitting_is_rejected():
    rho = lib.connection("nilpotent")
    T = rho.source

    def s(i, y):
        # not additive in y: squares the entries
        return JetElement.make(tuple(a * a for a in y), {i: tuple(y)})

    reading = connection_from_splitting(s, T, 2)
    assert reading.connection is None
    assert not reading.report.passed
