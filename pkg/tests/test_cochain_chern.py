import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from dliekit import library as lib
from dliekit.cochain_chern import (
    MatrixCochain,
    PreconditionError,
    chern_cochain,
    chern_relation_check,
    cup_power,
    cup_power_bruteforce,
    curvature_cochain,
    shuffles,
)
from dliekit.lie_rinehart import ScalarCochain, random_cochain
from dliekit.poly_core import Poly

from conftest import seeds


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_shuffle_count(k):
    assert len(shuffles(k)) == math.factorial(2 * k) // 2**k


def test_symplectic_square():
    f = ScalarCochain.from_one_based(4, 4, 2, {(1, 2): 1, (3, 4): 1})
    assert cup_power(f, 2).on_gens((0, 1, 2, 3)) == Poly.const(4, 2)


@given(seed=seeds, k=st.sampled_from([2, 3]))
@settings(max_examples=10)
def test_cup_power_matches_bruteforce(seed, k):
    f = random_cochain(random.Random(seed), 1, 2 * k, 2, max_deg=1)
    fk = cup_power(f, k)
    idx = tuple(range(2 * k))
    assert fk.on_gens(idx) == cup_power_bruteforce(f, k, idx)


@given(seed=seeds)
@settings(max_examples=10)
def test_cup_power_is_alternating(seed):
    rng = random.Random(seed)
    f = random_cochain(rng, 1, 5, 2, max_deg=1)
    f2 = cup_power(f, 2)
    idx = rng.sample(range(5), 4)
    srt, perm_sign = sorted(idx), 1
    for a, b in itertools.combinations(range(4), 2):
        if idx[a] > idx[b]:
            perm_sign = -perm_sign
    assert f2.on_gens(idx) == f2.on_gens(srt) * perm_sign


def test_trace_of_scalar_identity():
    f = ScalarCochain.from_one_based(2, 2, 2, {(1, 2): Poly.var(2, 0)})
    assert MatrixCochain.scalar_identity(f, 3).trace() == f.scale(3)


@pytest.mark.parametrize("m,k,value", [(4, 2, 4), (6, 3, 12)])
def test_chern_relation(m, k, value):
    rho, f = lib.chern_example(m)
    assert chern_relation_check(rho, f, k)
    assert chern_cochain(rho, k).on_gens(tuple(range(2 * k))) == Poly.const(m, value)
    assert chern_cochain(rho, 1) == f.scale(2)


def test_chern_negative_control():
    rho, f = lib.chern_example(4, curvature_type=False)
    with pytest.raises(PreconditionError):
        chern_relation_check(rho, f, 2)
    v = chern_relation_check(rho, f, 2, require_curvature_type=False)
    assert not v
    assert v.witness == {"tuple": (1, 2, 3, 4), "value": "-2"}


def test_curvature_cochain_oracle():
    rho = lib.connection("nilpotent")
    R = curvature_cochain(rho)
    x = Poly.var(2, 0)
    assert R.on_gens((0, 1)).trace() == -2 * x
    assert R.on_gens((1, 0)) == -R.on_gens((0, 1))
    with pytest.raises(ValueError):
        curvature_cochain(lib.psi_variants()["nilpotent_psi2"])
