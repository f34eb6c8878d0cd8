"""First-order jets J^1(E) = E + L~ (x)_A E, the D-Atiyah sequence, splittings.

Tensor parts are stored as sum_i u_i (x) y_i with all A-coefficients moved
onto the vectors.  A left coefficient is moved across by

    (a u_i) (x) y = u_i (x) (a y) - D (x) (pi(u_i)(a) y),

which follows from u a = a u + pi(u)(a) D.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .connection import Connection
from .dlie import DLieAlgebra
from .lie_rinehart import Elem
from .poly_core import Poly, PolyMatrix, random_poly
from .report import Report

Vec = tuple  # tuple[Poly, ...]


def _vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def _vscale(c, a: Vec) -> Vec:
    return tuple(c * x for x in a)


def _vzero(v: Vec) -> bool:
    return all(not x for x in v)


@dataclass(frozen=True)
class JetElement:
    """(e, sum_i u_i (x) y_i) with ``tensor`` a sorted tuple of (i, y_i), y_i != 0."""

    e: Vec
    tensor: tuple = field(default=())

    @classmethod
    def make(cls, e: Sequence[Poly], tensor: dict | None = None) -> "JetElement":
        items = tuple(sorted((i, tuple(y)) for i, y in (tensor or {}).items() if not _vzero(y)))
        return cls(tuple(e), items)

    def tdict(self) -> dict:
        return dict(self.tensor)

    def __add__(self, other: "JetElement") -> "JetElement":
        t = self.tdict()
        for i, y in other.tensor:
            t[i] = _vadd(t[i], y) if i in t else y
        return JetElement.make(_vadd(self.e, other.e), t)

    def __sub__(self, other: "JetElement") -> "JetElement":
        return self + other.scale_const(-1)

    def scale_const(self, k) -> "JetElement":
        return JetElement.make(_vscale(k, self.e), {i: _vscale(k, y) for i, y in self.tensor})

    def __str__(self):
        t = " + ".join(f"u{i} (x) [{', '.join(map(str, y))}]" for i, y in self.tensor) or "0"
        return f"([{', '.join(map(str, self.e))}], {t})"


def tensor_term(T: DLieAlgebra, u: Elem, y: Vec) -> dict:
    """Normalized sum_i u_i (x) y_i for a left combination u (x) y."""
    out: dict = {}
    for i, a in enumerate(u):
        if not a:
            continue
        terms = [(i, _vscale(a, y))]
        da = T.pi[i](a)
        if da:
            terms.append((0, _vscale(-da, y)))
        for k, v in terms:
            out[k] = _vadd(out[k], v) if k in out else v
    return out


def jet_right_action(j: JetElement, a: Poly, T: DLieAlgebra) -> JetElement:
    """(x, u (x) y) a = (x a + pi(u)(a) y, u (x) (y a))."""
    e = _vscale(a, j.e)
    t = {}
    for i, y in j.tensor:
        e = _vadd(e, _vscale(T.pi[i](a), y))
        t[i] = _vscale(a, y)
    return JetElement.make(e, t)


def jet_left_action(a: Poly, j: JetElement, T: DLieAlgebra) -> JetElement:
    e = _vscale(a, j.e)
    t: dict = {}
    for i, y in j.tensor:
        u = tuple(a if k == i else Poly.zero(T.nvars) for k in range(T.rank))
        for k, v in tensor_term(T, u, y).items():
            t[k] = _vadd(t[k], v) if k in t else v
    return JetElement.make(e, t)


def inclusion(e: Vec) -> JetElement:
    return JetElement.make(e)


def projection(j: JetElement) -> dict:
    return j.tdict()


def _rand_vec(rng, m, r, max_deg=2) -> Vec:
    return tuple(random_poly(rng, m, max_deg=max_deg) for _ in range(r))


def random_jet(rng, T: DLieAlgebra, r: int, max_deg: int = 2) -> JetElement:
    t = {i: _rand_vec(rng, T.nvars, r, max_deg) for i in range(T.rank) if rng.random() < 0.6}
    return JetElement.make(_rand_vec(rng, T.nvars, r, max_deg), t)


def atiyah_sequence_check(T: DLieAlgebra, r: int, samples: int = 30, seed: int = 0) -> Report:
    """0 -> E -> J^1(E) -> L~ (x) E -> 0 at the level of canonical forms, plus bimodule laws."""
    rep = Report(f"atiyah_sequence[{T.name}]", seed)
    rng = random.Random(seed)
    m = T.nvars
    bad = {}
    for _ in range(samples):
        e = _rand_vec(rng, m, r)
        j = random_jet(rng, T, r)
        a, b = random_poly(rng, m), random_poly(rng, m)
        if projection(inclusion(e)):
            bad.setdefault("compose_zero", str(e))
        if projection(JetElement.make(tuple(Poly.zero(m) for _ in range(r)), j.tdict())) != j.tdict():
            bad.setdefault("projection_surjective", str(j))
        if jet_right_action(jet_right_action(j, a, T), b, T) != jet_right_action(j, a * b, T):
            bad.setdefault("right_associative", (str(j), str(a), str(b)))
        if jet_left_action(a, jet_right_action(j, b, T), T) != jet_right_action(jet_left_action(a, j, T), b, T):
            bad.setdefault("bimodule", (str(j), str(a), str(b)))
        if jet_right_action(inclusion(e), a, T) != inclusion(_vscale(a, e)):
            bad.setdefault("inclusion_right_linear", str(e))
        if projection(jet_right_action(j, a, T)) != {i: _vscale(a, y) for i, y in j.tensor if not _vzero(_vscale(a, y))}:
            bad.setdefault("projection_right_linear", str(j))
    for name in ("compose_zero", "projection_surjective", "right_associative", "bimodule",
                 "inclusion_right_linear", "projection_right_linear"):
        rep.record(name, name not in bad, bad.get(name), samples)
    return rep


# splittings <-> connections ------------------------------------------------


def splitting_from_connection(rho: Connection) -> Callable[[int, Vec], JetElement]:
    """s(u_i (x) y) = (rho(u_i)(y), u_i (x) y)."""

    def s(i: int, y: Vec) -> JetElement:
        u = rho.source.basis(i)
        return JetElement.make(rho.apply(u, y), {i: tuple(y)})

    return s


def _split_on(s, T: DLieAlgebra, t: dict, r: int) -> JetElement:
    acc = JetElement.make(tuple(Poly.zero(T.nvars) for _ in range(r)))
    for i, y in t.items():
        acc = acc + s(i, y)
    return acc


def splitting_report(
    s: Callable[[int, Vec], JetElement], T: DLieAlgebra, r: int, samples: int = 30, seed: int = 0
) -> Report:
    """Left A-linearity, section property and right linearity of a candidate splitting."""
    rep = Report(f"splitting[{T.name}]", seed)
    rng = random.Random(seed)
    m = T.nvars
    bad = {}
    xs = [Poly.var(m, k) for k in range(m)]
    cases = []
    for i in range(T.rank):
        for k in range(r):
            y = tuple(Poly.one(m) if q == k else Poly.zero(m) for q in range(r))
            for a in xs:
                cases.append(({i: y}, a))
    for _ in range(samples):
        cases.append((random_jet(rng, T, r).tdict(), random_poly(rng, m)))
    for t, a in cases:
        st = _split_on(s, T, t, r)
        if projection(st) != {i: y for i, y in t.items() if not _vzero(y)}:
            bad.setdefault("section", str(t))
        # left linearity: s(a t) = a s(t)
        at = jet_left_action(a, JetElement.make(st.e, t), T).tdict()
        if _split_on(s, T, at, r) != jet_left_action(a, st, T):
            bad.setdefault("left_linear", (str(t), str(a)))
        # right linearity: s(t a) = s(t) a
        ta = {i: _vscale(a, y) for i, y in t.items()}
        if _split_on(s, T, ta, r) != jet_right_action(st, a, T):
            bad.setdefault("right_linear", ({k: [str(q) for q in v] for k, v in t.items()}, str(a)))
    for name in ("left_linear", "section", "right_linear"):
        rep.record(name, name not in bad, bad.get(name), len(cases))
    return rep


@dataclass
class SplittingReading:
    connection: Connection | None
    report: Report
    psi: PolyMatrix | None = None


def connection_from_splitting(
    s: Callable[[int, Vec], JetElement], T: DLieAlgebra, r: int, samples: int = 30, seed: int = 0
) -> SplittingReading:
    """Read Gamma_i from s(u_i (x) e_j) and psi from s(D (x) e_j), then verify."""
    m = T.nvars
    rep = Report(f"connection_from_splitting[{T.name}]", seed)
    basis = [tuple(Poly.one(m) if q == k else Poly.zero(m) for q in range(r)) for k in range(r)]

    def columns(i):
        cols = [s(i, e).e for e in basis]
        return PolyMatrix([[cols[j][k] for j in range(r)] for k in range(r)])

    psi = columns(0)
    gammas = [columns(i) for i in range(1, T.rank)]
    rho = Connection(T, gammas, psi)
    rng = random.Random(seed)
    bad = None
    for _ in range(samples):
        i = rng.randrange(T.rank)
        y = _rand_vec(rng, m, r)
        a = random_poly(rng, m)
        out = s(i, y)
        if out.e != rho.apply(T.basis(i), y) or out.tdict() != {i: y} and not _vzero(y):
            bad = {"reconstruction": (i, [str(q) for q in y])}
            break
        defect = _vadd(s(i, _vscale(a, y)).e, _vscale(-a, out.e))
        expect = _vscale(T.pi[i](a), psi.apply(y))
        if defect != expect:
            bad = {"defect": (i, [str(q) for q in y], str(a))}
            break
    rep.record("connection_law", bad is None, bad, samples)
    if bad is not None:
        return SplittingReading(None, rep, None)
    return SplittingReading(rho, rep, psi)


def splitting_round_trip(rho: Connection, seed: int = 0) -> bool:
    """connection -> splitting -> connection reproduces Gamma and psi exactly."""
    back = connection_from_splitting(splitting_from_connection(rho), rho.source, rho.r, seed=seed)
    c = back.connection
    return c is not None and c.gammas == rho.gammas and c.psi == rho.psi
