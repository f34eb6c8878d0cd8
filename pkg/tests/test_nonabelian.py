import random

import pytest
from hypothesis import given, settings

from dliekit import library as lib
from dliekit.connection import curvature_matrix
from dliekit.nonabelian import (
    EndExtElement,
    check_end_dlie_axioms,
    end_bracket,
    end_presentation,
    image_order_check,
    random_end_elem,
    rho_shriek,
    rho_shriek_hom_check,
)
from dliekit.poly_core import PolyMatrix

from conftest import seeds

RHO = lib.connection("nilpotent")
T = RHO.source
ZERO = PolyMatrix.zero(2, 2)
N = PolyMatrix.of(2, [[0, 1], [0, 0]])
E11 = PolyMatrix.unit(2, 2, 0, 0)


def test_bracket_oracles():
    a = EndExtElement(E11, T.zero())
    b = EndExtElement(N, T.zero())
    assert end_bracket(a, b, RHO) == EndExtElement(E11.commutator(N), T.zero())
    # [u1, E11] = dx(E11) + [Gamma_1, E11] = -N
    u1 = EndExtElement(ZERO, T.basis(1))
    assert end_bracket(u1, a, RHO) == EndExtElement(-N, T.zero())
    u2 = EndExtElement(ZERO, T.basis(2))
    R = curvature_matrix(RHO, T.basis(1), T.basis(2))
    assert end_bracket(u1, u2, RHO) == EndExtElement(R, T.bracket(T.basis(1), T.basis(2)))


@pytest.mark.parametrize("name", ["nilpotent", "curvature_type", "diagonal_exact"])
def test_end_extension_axioms(name):
    rep = check_end_dlie_axioms(lib.connection(name), samples=15)
    assert rep.passed, rep.failures()


def test_corrupted_curvature_breaks_jacobi():
    bad = lambda a, b: end_bracket(a, b, RHO, r_sign=-1)
    rep = check_end_dlie_axioms(RHO, samples=5, bracket=bad)
    assert rep.get("jacobi").status == "fail"


def test_presentation_rank():
    P = end_presentation(RHO)
    assert P.rank == T.rank + 4
    assert P.names()[-1] == "E22"


@given(seed=seeds)
@settings(max_examples=20)
def test_rho_shriek_is_a_bracket_homomorphism(seed):
    rng = random.Random(seed)
    z, w = random_end_elem(rng, RHO), random_end_elem(rng, RHO)
    assert rho_shriek(end_bracket(z, w, RHO), RHO) == rho_shriek(z, RHO).commutator(rho_shriek(w, RHO))


def test_hom_law_exhaustive():
    rep = rho_shriek_hom_check(RHO, samples=5, exhaustive=True)
    assert rep.passed
    assert rep.get("hom_law_exhaustive").count > 800


def test_image_orders():
    assert image_order_check(RHO, degree=3, samples=12).passed


def test_psi_identity_required():
    with pytest.raises(ValueError):
        end_presentation(lib.psi_variants()["nilpotent_psi2"])
