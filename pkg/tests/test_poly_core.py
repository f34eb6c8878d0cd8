from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dliekit import _pykernel
from dliekit.poly_core import (
    BACKEND,
    Derivation,
    ParseError,
    Poly,
    PolyMatrix,
    VariableMismatch,
    apply_derivation,
    bracket_derivations,
    parse_poly,
)

from conftest import polys

X, Y = Poly.var(2, 0), Poly.var(2, 1)
points = st.tuples(st.integers(-4, 4), st.integers(-4, 4))


def test_binomial_expansion():
    assert (X + Y) ** 3 == parse_poly("x1^3 + 3*x1^2*x2 + 3*x1*x2^2 + x2^3", 2)


def test_parse_rationals_and_powers():
    p = parse_poly("(1/2)*x1**2 - x2/3 + 4", 2)
    assert p.evaluate([2, 3]) == Fraction(2) - 1 + 4
    assert parse_poly("-(x1 - x2)", 2) == Y - X


@pytest.mark.parametrize("text,pos", [("x1 +", 4), ("x3", 0), ("(x1", 3), ("x1 $ 2", 3)])
def test_parse_error_positions(text, pos):
    with pytest.raises(ParseError) as e:
        parse_poly(text, 2)
    assert e.value.pos == pos


def test_variable_mismatch():
    with pytest.raises(VariableMismatch):
        Poly.var(2, 0) + Poly.var(3, 0)


def test_backend_is_reported():
    assert BACKEND in ("python", "cython")


@given(polys(), polys(), points)
def test_evaluation_is_a_ring_map(p, q, pt):
    assert (p * q).evaluate(pt) == p.evaluate(pt) * q.evaluate(pt)
    assert (p - q).evaluate(pt) == p.evaluate(pt) - q.evaluate(pt)


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p - p == Poly.zero(2)


@given(polys(), polys(), st.lists(polys(max_deg=2, max_terms=2), min_size=2, max_size=2))
def test_derivation_leibniz(p, q, cs):
    d = Derivation.of(2, cs)
    assert apply_derivation(d, p * q) == apply_derivation(d, p) * q + p * apply_derivation(d, q)


@given(*[st.lists(polys(max_deg=2, max_terms=2), min_size=2, max_size=2) for _ in range(3)])
def test_derivation_bracket_jacobi(a, b, c):
    d1, d2, d3 = (Derivation.of(2, v) for v in (a, b, c))
    total = (
        bracket_derivations(d1, bracket_derivations(d2, d3))
        .__add__(bracket_derivations(d2, bracket_derivations(d3, d1)))
        .__add__(bracket_derivations(d3, bracket_derivations(d1, d2)))
    )
    assert total.is_zero()


@given(polys(), polys())
def test_kernels_agree(p, q):
    try:
        from dliekit import _ckernel
    except ImportError:
        pytest.skip("compiled kernel not built")
    a, b = dict(p.terms), dict(q.terms)
    for name in ("add", "sub", "mul"):
        assert getattr(_ckernel, name)(a, b) == getattr(_pykernel, name)(a, b)
    assert _ckernel.deriv(a, 1) == _pykernel.deriv(a, 1)
    assert _ckernel.scale(a, Fraction(2, 3)) == _pykernel.scale(a, Fraction(2, 3))


def test_matrix_identities():
    M = PolyMatrix.of(2, [[X, 1], [0, Y]])
    N = PolyMatrix.of(2, [[1, Y], [X, 0]])
    assert (M * N).trace() == (N * M).trace()
    assert M.commutator(N).trace() == Poly.zero(2)
    assert PolyMatrix.identity(2, 2) * M == M
    assert M.derive(Derivation.partial(2, 0)) == PolyMatrix.of(2, [[1, 0], [0, 0]])
