import random

import pytest
from hypothesis import given, settings

from dliekit import library as lib
from dliekit.poly_core import Poly
from dliekit.tensor_env import (
    AlgebraMismatch,
    QuotientKind,
    StepBudgetExceeded,
    almost_comm_witness,
    curvature_generators,
    evaluate,
    filtration_degree,
    ideal_annihilation_check,
    multiply,
    normal_form,
    normal_form_ex,
    parse_tensor,
    random_tensor,
)
from dliekit.poly_core import ParseError

from conftest import seeds

KINDS = list(QuotientKind)
TILDE = [k for k in KINDS if k.tilde]
ALGEBRAS = ["der2_const", "der2_x", "split2_x", "aff1_zero"]
X = Poly.var(2, 0)


def nf(text, kind, algebra="der2_const", **kw):
    T = lib.extension(algebra)
    return normal_form(parse_tensor(text, T), kind, check_measure=True, **kw)


def el(text, algebra="der2_const"):
    return parse_tensor(text, lib.extension(algebra))


def same(a, b, kind):
    return normal_form(a, kind) == normal_form(b, kind)


@pytest.mark.parametrize("kind", TILDE)
def test_reordering_uses_the_cocycle(kind):
    # u2 u1 = u1 u2 - [u1, u2] = u1 u2 - f(d/dx, d/dy) D, and D acts as 1
    assert same(nf("u2 ⊗ u1", kind), el("u1 ⊗ u2 - 1"), kind)
    assert same(nf("u2 ⊗ u1", kind, "der2_x"), el("u1 ⊗ u2 - (x1)*D", "der2_x"), kind)
    assert nf("D", kind) == el("1")


@pytest.mark.parametrize("kind", KINDS)
def test_coefficients_move_left(kind):
    # u1 x = x u1 + d/dx(x) D
    assert same(nf("u1 ⊗ (x1)*u2", kind), el("u2 + (x1)*u1 ⊗ u2"), kind)


@pytest.mark.parametrize("kind", [QuotientKind.UTensor, QuotientKind.URho])
def test_plain_kinds_keep_letter_order(kind):
    assert nf("u2 ⊗ u1", kind) == el("u2 ⊗ u1")


def test_rho_rule_identifies_d_with_one():
    for kind in KINDS:
        assert same(el("u1 ⊗ D"), el("u1"), kind)


def test_parse_errors():
    T = lib.extension("der2_const")
    for bad in ("u1 @ @ u2", "u7", "(x1 *u1", "u1 ⊗ (x9)*u2"):
        with pytest.raises(ParseError):
            parse_tensor(bad, T)


def test_step_budget():
    with pytest.raises(StepBudgetExceeded):
        normal_form_ex(el("u2 ⊗ (x1)*u1"), QuotientKind.UTensor, budget=0)
    assert normal_form_ex(el("u2 ⊗ u1"), QuotientKind.UTensor, budget=0).steps == 0


def test_truncation_is_opt_in():
    e = el("u2 ⊗ u1 ⊗ u2 + u1")
    assert normal_form(e, QuotientKind.UTensor).degree() == 3
    assert normal_form(e, QuotientKind.UTensor, max_degree=1) == el("u1")


def test_filtration_degree_of_zero():
    assert filtration_degree(el("u1 - u1"), QuotientKind.UTensorTilde) == -1


@pytest.mark.parametrize("algebra", ALGEBRAS)
@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.value)
@given(seed=seeds)
@settings(max_examples=15)
def test_normal_form_is_idempotent(algebra, kind, seed):
    T = lib.extension(algebra)
    x = random_tensor(random.Random(seed), T, max_len=4)
    n = normal_form(x, kind, check_measure=True)
    assert normal_form(n, kind) == n


@pytest.mark.parametrize("algebra", ALGEBRAS)
@pytest.mark.parametrize("kind", TILDE, ids=lambda k: k.value)
@given(seed=seeds)
@settings(max_examples=15)
def test_strategies_agree(algebra, kind, seed):
    T = lib.extension(algebra)
    x = random_tensor(random.Random(seed), T, max_len=4)
    assert normal_form(x, kind, "leftmost") == normal_form(x, kind, "rightmost")


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.value)
@given(seed=seeds)
@settings(max_examples=15)
def test_normal_form_respects_products(kind, seed):
    rng = random.Random(seed)
    T = lib.extension("der2_x")
    a, b = random_tensor(rng, T, 2), random_tensor(rng, T, 2)
    assert normal_form(multiply(a, b), kind) == normal_form(multiply(normal_form(a, kind), b), kind)


@given(seed=seeds)
@settings(max_examples=15)
def test_utensor_and_urho_agree(seed):
    x = random_tensor(random.Random(seed), lib.extension("der2_x"))
    assert normal_form(x, QuotientKind.UTensor) == normal_form(x, QuotientKind.URho)


@pytest.mark.parametrize("name", sorted(lib.connections()))
@given(seed=seeds)
@settings(max_examples=5)
def test_evaluation_invariance(name, seed):
    rho = lib.connection(name)
    x = random_tensor(random.Random(seed), rho.source, max_len=3, max_coeff_deg=2)
    for kind in (QuotientKind.UTensor, QuotientKind.URho):
        assert evaluate(normal_form(x, kind), rho) == evaluate(x, rho)


def test_evaluation_rejects_foreign_algebra():
    with pytest.raises(AlgebraMismatch):
        evaluate(el("u1"), lib.connection("nilpotent"))


@pytest.mark.parametrize("kind", TILDE)
@given(seed=seeds)
@settings(max_examples=20)
def test_almost_commutativity(kind, seed):
    rng = random.Random(seed)
    T = lib.extension("der2_x")
    x, y = random_tensor(rng, T, 3, 2), random_tensor(rng, T, 3, 2)
    assert almost_comm_witness(x, y, kind)["ok"]


def test_almost_commutativity_requires_tilde():
    with pytest.raises(ValueError):
        almost_comm_witness(el("u1"), el("u2"), QuotientKind.UTensor)


def test_annihilator_ideal():
    rho = lib.connection("curvature_type")
    T = rho.source
    f = lib.curvature_type_form("curvature_type")
    assert ideal_annihilation_check(rho, curvature_generators(T, f))
    assert not ideal_annihilation_check(rho, curvature_generators(T))
