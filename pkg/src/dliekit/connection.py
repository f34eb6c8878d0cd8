"""Connections on E = A^r, curvature, differential operators, projective bases.

A ``DiffOperator`` is kept in canonical form sum_beta C_beta d^beta with the
matrix coefficients on the left, so two operators are equal exactly when
their canonical forms are equal.
"""

from __future__ import annotations

import itertools
import random
from math import comb
from typing import Callable, Sequence

from .dlie import DLieAlgebra, build_extension
from .lie_rinehart import (
    Elem,
    LieRinehartPresentation,
    ScalarCochain,
    elem_str,
    pullback_cocycle,
)
from .poly_core import Derivation, Poly, PolyMatrix, VariableMismatch, bracket_derivations, random_poly
from .report import Report, Verdict


def _sub_multi(beta, delta):
    return tuple(b - d for b, d in zip(beta, delta))


def _add_multi(beta, gamma):
    return tuple(b + g for b, g in zip(beta, gamma))


def _below(beta):
    return itertools.product(*[range(b + 1) for b in beta])


def _binom(beta, delta) -> int:
    out = 1
    for b, d in zip(beta, delta):
        out *= comb(b, d)
    return out


class DiffOperator:
    """sum_beta C_beta d^beta acting on column vectors; C_beta is rows x cols."""

    __slots__ = ("nvars", "rows", "cols", "terms", "_hash")

    def __init__(self, nvars: int, rows: int, cols: int, terms: dict | None = None):
        self.nvars = nvars
        self.rows = rows
        self.cols = cols
        self.terms = {}
        self._hash = None
        for beta, C in (terms or {}).items():
            beta = tuple(beta)
            if len(beta) != nvars:
                raise VariableMismatch("multi-index length differs from variable count")
            if C.shape() != (rows, cols):
                raise ValueError(f"coefficient shape {C.shape()} for a {rows}x{cols} operator")
            if not C.is_zero():
                self.terms[beta] = C

    @classmethod
    def from_matrix(cls, M: PolyMatrix) -> "DiffOperator":
        return cls(M.nvars, M.rows, M.cols, {(0,) * M.nvars: M})

    @classmethod
    def identity(cls, nvars: int, r: int) -> "DiffOperator":
        return cls.from_matrix(PolyMatrix.identity(nvars, r))

    @classmethod
    def zero(cls, nvars: int, rows: int, cols: int | None = None) -> "DiffOperator":
        return cls(nvars, rows, rows if cols is None else cols)

    @classmethod
    def multiplication(cls, nvars: int, r: int, a: Poly) -> "DiffOperator":
        return cls.from_matrix(PolyMatrix.scalar(nvars, r, a))

    @classmethod
    def derivation(cls, d: Derivation, r: int = 1, psi: PolyMatrix | None = None) -> "DiffOperator":
        """psi * d acting entrywise (psi defaults to the identity)."""
        m = d.nvars
        psi = PolyMatrix.identity(m, r) if psi is None else psi
        terms = {}
        for i, c in enumerate(d.coeffs):
            if c:
                beta = tuple(1 if j == i else 0 for j in range(m))
                terms[beta] = psi.scale(c)
        return cls(m, psi.rows, psi.cols, terms)

    @classmethod
    def scalar(cls, nvars: int, coeffs: dict) -> "DiffOperator":
        """Scalar operator on A from {multi-index: Poly}."""
        return cls(nvars, 1, 1, {b: PolyMatrix([[c]]) for b, c in coeffs.items()})

    def _check(self, other: "DiffOperator"):
        if (self.nvars, self.rows, self.cols) != (other.nvars, other.rows, other.cols):
            raise ValueError("operators of different shape")

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        self._check(other)
        terms = dict(self.terms)
        for b, C in other.terms.items():
            terms[b] = terms[b] + C if b in terms else C
        return DiffOperator(self.nvars, self.rows, self.cols, terms)

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def __neg__(self):
        return DiffOperator(self.nvars, self.rows, self.cols, {b: -C for b, C in self.terms.items()})

    def scale(self, c: Poly) -> "DiffOperator":
        """Left multiplication by a scalar polynomial."""
        return DiffOperator(self.nvars, self.rows, self.cols, {b: C.scale(c) for b, C in self.terms.items()})

    def left_matrix(self, M: PolyMatrix) -> "DiffOperator":
        return DiffOperator(self.nvars, M.rows, self.cols, {b: M * C for b, C in self.terms.items()})

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """self o other, by the Leibniz rule d^beta E = sum binom * d^(beta-delta)(E) d^delta."""
        if self.cols != other.rows or self.nvars != other.nvars:
            raise ValueError("operators cannot be composed")
        acc: dict = {}
        for beta, C in self.terms.items():
            for gamma, E in other.terms.items():
                for delta in _below(beta):
                    dE = E.partial(_sub_multi(beta, delta))
                    if dE.is_zero():
                        continue
                    term = C * dE
                    k = _binom(beta, delta)
                    if k != 1:
                        term = term.scale(k)
                    key = _add_multi(delta, gamma)
                    acc[key] = acc[key] + term if key in acc else term
        return DiffOperator(self.nvars, self.rows, other.cols, acc)

    __matmul__ = compose

    def commutator(self, other: "DiffOperator") -> "DiffOperator":
        return self.compose(other) - other.compose(self)

    def order(self) -> int:
        """Top |beta| of the canonical form; -1 for the zero operator."""
        return max((sum(b) for b in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def matrix(self) -> PolyMatrix:
        """The coefficient matrix of an A-linear (order <= 0) operator."""
        if self.order() > 0:
            raise ValueError("operator is not A-linear")
        return self.terms.get((0,) * self.nvars, PolyMatrix.zero(self.nvars, self.rows, self.cols))

    def apply(self, vec: Sequence[Poly]) -> tuple:
        """Act on a vector; entries may live in a ring with extra variables."""
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for an operator on A^{self.cols}")
        n = max(v.nvars for v in vec)
        out = [Poly.zero(n)] * self.rows
        for beta, C in self.terms.items():
            dv = [v.partial(beta) for v in vec]
            img = C.apply(dv)
            out = [a + b for a, b in zip(out, img)]
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (self.rows, self.cols, self.terms) == (other.rows, other.cols, other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, frozenset(self.terms.items())))
        return self._hash

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for beta in sorted(self.terms, key=lambda b: (sum(b), b), reverse=True):
            d = "*".join(f"d{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(beta) if k)
            parts.append(f"{self.terms[beta]}" + (f"*{d}" if d else ""))
        return " + ".join(parts)

    __repr__ = __str__


def diff_order(
    op: DiffOperator,
    bound: int,
    random_multipliers: bool = False,
    rng: random.Random | None = None,
) -> int | None:
    """Least l <= bound with every (l+1)-fold commutator [..[op, a_1], .., a_{l+1}] zero.

    The multipliers a_i are the coordinates x_1..x_m (times the identity);
    ``random_multipliers`` adds three random low-degree polynomials.
    Returns None when the order exceeds ``bound``.
    """
    m, r = op.nvars, op.cols
    mults = [Poly.var(m, i) for i in range(m)]
    if random_multipliers:
        rng = rng or random.Random(0)
        mults += [random_poly(rng, m, max_deg=2) for _ in range(3)]
    left = [DiffOperator.multiplication(m, op.rows, a) for a in mults]
    right = [DiffOperator.multiplication(m, r, a) for a in mults]
    level = {op} if not op.is_zero() else set()
    for l in range(bound + 1):
        nxt = set()
        for c in level:
            for L_, R_ in zip(left, right):
                k = c.compose(R_) - L_.compose(c)
                if not k.is_zero():
                    nxt.add(k)
        if not nxt:
            return l
        level = nxt
    return None


# connections ---------------------------------------------------------------


class Connection:
    """rho: L~ -> End_k(A^r), rho(u_i) e = Gamma_i e + psi * pi(u_i)(e), rho(D) = psi."""

    def __init__(self, source: DLieAlgebra, gammas: Sequence[PolyMatrix], psi: PolyMatrix | None = None, name: str = "rho"):
        self.source = source
        self.gammas = tuple(gammas)
        if len(self.gammas) != source.n:
            raise ValueError(f"need {source.n} Christoffel matrices, got {len(self.gammas)}")
        self.r = self.gammas[0].rows if self.gammas else (psi.rows if psi else 1)
        self.nvars = source.nvars
        self.psi = PolyMatrix.identity(self.nvars, self.r) if psi is None else psi
        for G in self.gammas + (self.psi,):
            if G.shape() != (self.r, self.r) or G.nvars != self.nvars:
                raise ValueError("Christoffel matrices and psi must be r x r over A")
        self.is_identity = self.psi.is_identity()
        self.name = name
        self._gen = {}

    def rho_gen(self, i: int) -> DiffOperator:
        op = self._gen.get(i)
        if op is None:
            if i == 0:
                op = DiffOperator.from_matrix(self.psi)
            else:
                op = DiffOperator.from_matrix(self.gammas[i - 1]) + DiffOperator.derivation(
                    self.source.pi[i], self.r, self.psi)
            self._gen[i] = op
        return op

    def rho(self, u: Elem) -> DiffOperator:
        acc = DiffOperator.zero(self.nvars, self.r)
        for i, a in enumerate(u):
            if a:
                acc = acc + self.rho_gen(i).scale(a)
        return acc

    def apply(self, u: Elem, e: Sequence[Poly]) -> tuple:
        if len(e) != self.r:
            raise ValueError(f"rank mismatch: vector of length {len(e)}, E = A^{self.r}")
        return self.rho(u).apply(e)

    def curvature(self, u: Elem, v: Elem) -> DiffOperator:
        return curvature(self, u, v)

    def __repr__(self):
        return f"Connection({self.name}, r={self.r}, psi={'Id' if self.is_identity else self.psi})"


def curvature(rho: Connection, u: Elem, v: Elem) -> DiffOperator:
    """R(u, v) = [rho(u), rho(v)] - rho([u, v])."""
    return rho.rho(u).commutator(rho.rho(v)) - rho.rho(rho.source.bracket(u, v))


def curvature_matrix(rho: Connection, u: Elem, v: Elem) -> PolyMatrix:
    """Curvature as an A-linear matrix; certified order 0 by iterated commutators."""
    R = curvature(rho, u, v)
    if diff_order(R, 0) != 0:
        raise ValueError(f"curvature is not A-linear (psi = {rho.psi})")
    return R.matrix()


class PsiConnection:
    """nabla: L -> End_k(A^r) with nabla(x)(a e) = a nabla(x)(e) + alpha(x)(a) psi(e)."""

    def __init__(self, lie: LieRinehartPresentation, gammas: Sequence[PolyMatrix], psi: PolyMatrix | None = None):
        self.lie = lie
        self.gammas = tuple(gammas)
        self.r = self.gammas[0].rows
        self.psi = PolyMatrix.identity(lie.nvars, self.r) if psi is None else psi

    def nabla(self, x: Elem) -> DiffOperator:
        m = self.lie.nvars
        acc = DiffOperator.zero(m, self.r)
        for i, a in enumerate(x):
            if a:
                op = DiffOperator.from_matrix(self.gammas[i]) + DiffOperator.derivation(
                    self.lie.anchor[i], self.r, self.psi)
                acc = acc + op.scale(a)
        return acc

    def __eq__(self, other):
        if not isinstance(other, PsiConnection):
            return NotImplemented
        return self.lie is other.lie and self.gammas == other.gammas and self.psi == other.psi


def psi_correspondence(nabla: PsiConnection, f: ScalarCochain, target: DLieAlgebra | None = None) -> Connection:
    """rho(a z + x) := a psi + nabla(x) on L(alpha^*(f))."""
    T = target if target is not None else build_extension(nabla.lie, f)
    if T.base is not nabla.lie:
        raise ValueError("target extension is not built over the connection's Lie-Rinehart algebra")
    return Connection(T, nabla.gammas, nabla.psi, name="rho_f")


def psi_from_connection(rho: Connection) -> PsiConnection:
    """Inverse direction: nabla = rho o i and psi = rho(z)."""
    if rho.source.base is None:
        raise ValueError("connection source is not an extension L(alpha^*(f))")
    return PsiConnection(rho.source.base, rho.gammas, rho.psi)


def correspondence_report(rho: Connection, samples: int = 20, max_deg: int = 2, seed: int = 0) -> Report:
    """Round trip plus the right-linearity certificate rho(u c) = rho(u) o c."""
    rep = Report(f"psi_correspondence[{rho.name}]", seed)
    T = rho.source
    nab = psi_from_connection(rho)
    back = psi_correspondence(nab, T.cocycle, target=T)
    rep.record("round_trip", back.gammas == rho.gammas and back.psi == rho.psi)
    rng = random.Random(seed)
    bad = None
    bad_formula = None
    for _ in range(samples):
        u = T.random_elem(rng, max_deg)
        c = random_poly(rng, T.nvars, max_deg=max_deg)
        lhs = rho.rho(T.right_action(u, c))
        rhs = rho.rho(u).compose(DiffOperator.multiplication(T.nvars, rho.r, c))
        if lhs != rhs and bad is None:
            bad = (T.fmt(u), str(c))
        formula = DiffOperator.from_matrix(rho.psi).scale(u[0]) + nab.nabla(T.lie_part(u))
        if formula != rho.rho(u) and bad_formula is None:
            bad_formula = T.fmt(u)
    rep.record("right_linear", bad is None, bad, samples)
    rep.record("rho_equals_a_psi_plus_nabla", bad_formula is None, bad_formula, samples)
    # psi-connection law for nabla
    bad = None
    L = nab.lie
    for _ in range(samples):
        x = L.random_elem(rng, max_deg)
        c = random_poly(rng, T.nvars, max_deg=max_deg)
        lhs = nab.nabla(x).compose(DiffOperator.multiplication(T.nvars, rho.r, c))
        rhs = nab.nabla(x).scale(c) + DiffOperator.from_matrix(rho.psi).scale(L.anchor_of(x)(c))
        if lhs != rhs:
            bad = (elem_str(x), str(c))
            break
    rep.record("psi_leibniz", bad is None, bad, samples)
    return rep


def curvature_transfer_check(rho: Connection, samples: int = 50, max_deg: int = 2, seed: int = 0) -> Report:
    """R_rho(u, v) = R_{rho o i}(x, y) - alpha^*(f)(u, v) psi for u = a z + x, v = b z + y.

    The short identity is exact when psi = Id, and for every psi when u, v lie
    in L.  In general the difference is

        b [nabla(x), psi] - a [nabla(y), psi] + (x(b) - y(a)) (psi^2 - psi),

    which is verified as ``transfer_general``.
    """
    T = rho.source
    if T.base is None or T.cocycle is None:
        raise ValueError("curvature transfer needs a connection on an extension L(alpha^*(f))")
    rep = Report(f"curvature_transfer[{rho.name}]", seed)
    L, g = T.base, T.cocycle
    nab = psi_from_connection(rho)
    m = T.nvars
    psi_op = DiffOperator.from_matrix(rho.psi)
    psi_defect = DiffOperator.from_matrix(rho.psi * rho.psi - rho.psi)
    rng = random.Random(seed)
    gens = [T.basis(i) for i in range(T.rank)]
    pairs = [(gens[i], gens[j]) for i, j in itertools.combinations(range(T.rank), 2)]
    pairs += [(T.random_elem(rng, max_deg), T.random_elem(rng, max_deg)) for _ in range(samples)]
    bad_short = bad_L = bad_gen = None
    for u, v in pairs:
        a, x = u[0], T.lie_part(u)
        b, y = v[0], T.lie_part(v)
        R = curvature(rho, u, v)
        nx, ny = nab.nabla(x), nab.nabla(y)
        R_i = nx.commutator(ny) - nab.nabla(L.bracket(x, y))
        short = R_i - psi_op.scale(g(x, y))
        corr = (nx.commutator(psi_op).scale(b) - ny.commutator(psi_op).scale(a)
                + psi_defect.scale(L.anchor_of(x)(b) - L.anchor_of(y)(a)))
        if R != short + corr and bad_gen is None:
            bad_gen = (T.fmt(u), T.fmt(v))
        if R != short:
            if rho.is_identity and bad_short is None:
                bad_short = (T.fmt(u), T.fmt(v), str(R), str(short))
        # z-free parts: the short identity must hold for every psi
        if not rho.is_identity:
            R_L = curvature(rho, (Poly.zero(m),) + x, (Poly.zero(m),) + y)
            if R_L != short and bad_L is None:
                bad_L = (elem_str(x), elem_str(y))
    if rho.is_identity:
        rep.record("transfer", bad_short is None, bad_short, len(pairs))
    else:
        rep.record("transfer_on_L", bad_L is None, bad_L, len(pairs))
    rep.record("transfer_general", bad_gen is None, bad_gen, len(pairs))
    return rep


def diff_order_report(rho: "Connection", seed: int = 0, samples: int = 10, max_len: int = 3) -> Report:
    """rho(u) order <= 1, curvature order 0 (psi = Id) or <= 1, products of i images order <= i."""
    T = rho.source
    rep = Report(f"diff_orders[{rho.name}]", seed)
    rng = random.Random(seed)
    us = [T.basis(i) for i in range(T.rank)] + [T.random_elem(rng, 2) for _ in range(samples)]
    bad = next((T.fmt(u) for u in us if diff_order(rho.rho(u), 1) is None), None)
    rep.record("rho_order_le_1", bad is None, bad, len(us))
    bound = 0 if rho.is_identity else 1
    bad = None
    for u, v in itertools.combinations(us[: T.rank + 4], 2):
        R = curvature(rho, u, v)
        o = diff_order(R, bound)
        if o is None or (R.order() > bound):
            bad = (T.fmt(u), T.fmt(v), R.order())
            break
    rep.record(f"curvature_order_le_{bound}", bad is None, bad)
    bad = None
    for i in range(1, max_len + 1):
        for _ in range(3):
            op = DiffOperator.identity(rho.nvars, rho.r)
            for _ in range(i):
                op = op.compose(rho.rho(T.random_elem(rng, 1)))
            o = diff_order(op, i)
            if o is None or o != max(op.order(), 0):
                bad = {"length": i, "commutator_order": o, "canonical_order": op.order()}
    rep.record("products_order_le_length", bad is None, bad, max_len * 3)
    return rep


def lift_cochain(T: DLieAlgebra, f: ScalarCochain) -> ScalarCochain:
    """A cochain on Der_k(A) pulled back along pi to the generators u_1..u_n."""
    lie = LieRinehartPresentation(T.nvars, T.pi[1:], {}, name="pi")
    return pullback_cocycle(f, lie)


def curvature_type_check(rho: Connection, f: ScalarCochain) -> Verdict:
    """R(u_i, u_j) = f(u_i, u_j) Id on all generator pairs (f lives on u_1..u_n)."""
    if not rho.is_identity:
        raise ValueError("curvature type is defined for psi = Id only")
    T = rho.source
    if f.rank != T.n or f.degree != 2:
        raise ValueError(f"f must be a 2-cochain on the {T.n} generators u_1..u_n")
    Id = PolyMatrix.identity(rho.nvars, rho.r)
    for i, j in itertools.combinations(range(T.rank), 2):
        R = curvature_matrix(rho, T.basis(i), T.basis(j))
        val = f.on_gens((i - 1, j - 1)) if i > 0 else Poly.zero(rho.nvars)
        if R != Id.scale(val):
            names = T.names()
            return Verdict(False, ((names[i], names[j]), str(R), str(val)))
    return Verdict(True)


# projective bases ----------------------------------------------------------


class InvalidProjectiveBasis(ValueError):
    pass


class ProjectiveBasis:
    """Functionals x_1..x_s (rows of X, s x r) and vectors e_1..e_s (columns of V, r x s).

    The module is E = {e in A^r : sum_i x_i(e) e_i = e}; phi = X V.
    """

    def __init__(self, functionals: PolyMatrix, vectors: PolyMatrix, name: str = "pb"):
        if functionals.cols != vectors.rows or functionals.rows != vectors.cols:
            raise ValueError("functionals must be s x r and vectors r x s")
        self.X = functionals
        self.V = vectors
        self.s = functionals.rows
        self.r = functionals.cols
        self.nvars = functionals.nvars
        self.name = name
        self.phi = functionals * vectors
        self.projector = vectors * functionals
        self.validate()

    @classmethod
    def from_uw(cls, u: Sequence[Poly], w: Sequence[Poly], name: str = "uw") -> "ProjectiveBasis":
        """E = A with x_i(e) = u_i e and e_j = w_j, so phi = u w."""
        return cls(PolyMatrix([[a] for a in u]), PolyMatrix([list(w)]), name)

    @classmethod
    def from_idempotent(cls, phi: PolyMatrix, name: str = "idem") -> "ProjectiveBasis":
        """E = image of phi in A^s with coordinate functionals and e_j = phi column j."""
        return cls(PolyMatrix.identity(phi.nvars, phi.rows), phi, name)

    @classmethod
    def free(cls, nvars: int, r: int, name: str = "free") -> "ProjectiveBasis":
        I = PolyMatrix.identity(nvars, r)
        return cls(I, I, name)

    def validate(self):
        if self.phi * self.phi != self.phi:
            raise InvalidProjectiveBasis(f"phi is not idempotent: phi = {self.phi}")
        if self.V * self.phi != self.V:
            raise InvalidProjectiveBasis("sum_i x_i(e_j) e_i != e_j")

    def restrict(self, op: DiffOperator) -> DiffOperator:
        """op on E, represented as op o P with P the projector onto E."""
        return op.compose(DiffOperator.from_matrix(self.projector))

    def p(self, v: Sequence[Poly]) -> tuple:
        """The surjection A^s -> E, v -> sum_j v_j e_j."""
        return self.V.apply(v)

    def coords(self, e: Sequence[Poly]) -> tuple:
        return self.X.apply(e)


def _as_scalar_op(D, nvars: int) -> DiffOperator:
    if isinstance(D, DiffOperator):
        if D.rows != 1 or D.cols != 1:
            raise ValueError("expected a scalar operator on A")
        return D
    if isinstance(D, Derivation):
        return DiffOperator.derivation(D, 1)
    if isinstance(D, Poly):
        return DiffOperator.multiplication(nvars, 1, D)
    raise TypeError(f"not an operator on A: {D!r}")


def tensor_identity(D: DiffOperator, s: int) -> DiffOperator:
    """D acting entrywise on A^s."""
    return DiffOperator(D.nvars, s, s, {b: PolyMatrix.scalar(D.nvars, s, C[0, 0]) for b, C in D.terms.items()})


def projective_connection(pb: ProjectiveBasis) -> Callable[..., DiffOperator]:
    """D -> (e -> sum_i D(x_i(e)) e_i) for scalar operators D on A."""
    pb.validate()
    X = DiffOperator.from_matrix(pb.X)
    V = DiffOperator.from_matrix(pb.V)

    def rho(D) -> DiffOperator:
        Dop = _as_scalar_op(D, pb.nvars)
        return V.compose(tensor_identity(Dop, pb.s)).compose(X)

    return rho


def rkl_curvature(pb: ProjectiveBasis, D, Dp) -> DiffOperator:
    """R^{k,l}(D, D') = rho(D D') - rho(D) rho(D'), restricted to E."""
    rho = projective_connection(pb)
    Dop, Dpop = _as_scalar_op(D, pb.nvars), _as_scalar_op(Dp, pb.nvars)
    out = rho(Dop.compose(Dpop)) - rho(Dop).compose(rho(Dpop))
    return pb.restrict(out)


def rkl_antisymmetry_check(pb: ProjectiveBasis, u: Derivation, v: Derivation) -> Verdict:
    """rho([u, v]) - [rho(u), rho(v)] = R^{1,1}(u, v) - R^{1,1}(v, u) on E."""
    rho = projective_connection(pb)
    lhs = pb.restrict(rho(bracket_derivations(u, v)) - rho(u).commutator(rho(v)))
    rhs = rkl_curvature(pb, u, v) - rkl_curvature(pb, v, u)
    return Verdict(lhs == rhs, None if lhs == rhs else (str(lhs), str(rhs)))


def ring_map_check(pb: ProjectiveBasis, max_order: int = 1) -> Verdict:
    """All R^{k,l} with k, l <= max_order vanish on E (coordinate operators)."""
    m = pb.nvars
    ops = [DiffOperator.identity(m, 1)]
    ops += [DiffOperator.multiplication(m, 1, Poly.var(m, i)) for i in range(m)]
    if max_order >= 1:
        ops += [DiffOperator.derivation(Derivation.partial(m, i)) for i in range(m)]
    for D, Dp in itertools.product(ops, repeat=2):
        R = rkl_curvature(pb, D, Dp)
        if not R.is_zero():
            return Verdict(False, (str(D), str(Dp), str(R)))
    return Verdict(True)


def _symbolic_vector(nvars: int, s: int) -> tuple:
    """Fresh indeterminates t_1..t_s adjoined after x1..xm."""
    n = nvars + s
    return tuple(Poly.var(n, nvars + j) for j in range(s))


def idempotent_curvature_check(pb: ProjectiveBasis, delta: Derivation, eta: Derivation) -> Report:
    """M = [delta(phi), eta(phi)] preserves image and kernel and equals R_nabla on the image."""
    if pb.phi * pb.phi != pb.phi:
        raise InvalidProjectiveBasis("phi^2 != phi")
    rep = Report(f"idempotent_curvature[{pb.name}]")
    phi = pb.phi
    M = phi.derive(delta) * phi.derive(eta) - phi.derive(eta) * phi.derive(delta)
    m, s = pb.nvars, pb.s
    v = _symbolic_vector(m, s)
    one_minus = PolyMatrix.identity(m, s) - phi
    img = phi.apply(v)
    # image: (phi M phi - M phi) v = 0
    lhs = tuple(a - b for a, b in zip(phi.apply(M.apply(img)), M.apply(img)))
    rep.record("image_preserved", all(not a for a in lhs), [str(a) for a in lhs])
    # kernel: M (1 - phi) v lies in ker(p)
    kv = M.apply(one_minus.apply(v))
    pk = pb.p(kv)
    rep.record("kernel_preserved", all(not a for a in pk), [str(a) for a in pk])
    # direct curvature on E, compared on p(phi v)
    rho = projective_connection(pb)
    R = rho(delta).commutator(rho(eta)) - rho(bracket_derivations(delta, eta))
    e = pb.p(img)
    Re = R.apply(e)
    direct = pb.coords(Re)
    formula = M.apply(img)
    ok = all(a == b for a, b in zip(direct, formula)) and all(
        a == b for a, b in zip(Re, pb.p(formula)))
    rep.record("curvature_equals_M", ok, {"direct": [str(a) for a in direct], "M_phi_v": [str(a) for a in formula]})
    rep.M = M
    rep.R = R
    return rep
