"""Exact computations with D-Lie algebras, their connections and universal rings."""

from .poly_core import BACKEND, Derivation, Poly, PolyMatrix, parse_poly
from .lie_rinehart import LieRinehartPresentation, ScalarCochain, ce_differential, is_cocycle
from .dlie import DLieAlgebra, build_extension, check_dlie_axioms
from .connection import Connection, DiffOperator, ProjectiveBasis, curvature, diff_order
from .tensor_env import QuotientKind, TensorElement, normal_form, parse_tensor
from .nonabelian import check_end_dlie_axioms, end_bracket, rho_shriek
from .jet_atiyah import JetElement, splitting_from_connection, connection_from_splitting
from .cochain_chern import MatrixCochain, chern_cochain, chern_relation_check, cup_power
from .report import Check, Report, Verdict

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Derivation", "Poly", "PolyMatrix", "parse_poly",
    "LieRinehartPresentation", "ScalarCochain", "ce_differential", "is_cocycle",
    "DLieAlgebra", "build_extension", "check_dlie_axioms",
    "Connection", "DiffOperator", "ProjectiveBasis", "curvature", "diff_order",
    "QuotientKind", "TensorElement", "normal_form", "parse_tensor",
    "check_end_dlie_axioms", "end_bracket", "rho_shriek",
    "JetElement", "splitting_from_connection", "connection_from_splitting",
    "MatrixCochain", "chern_cochain", "chern_relation_check", "cup_power",
    "Check", "Report", "Verdict",
]
