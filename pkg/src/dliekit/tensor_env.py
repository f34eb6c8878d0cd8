"""Tensor algebra of a D-Lie algebra and normal forms in its universal rings.

A term is ``(c, word)`` with ``c`` a polynomial and ``word`` a tuple of
letters ``(a, g)``; it stands for (c D) (x) (a u_g) (x) ... with g = 0 for D.
Every quotient kind contains D - 1, so (c D) acts as the left scalar c.

Normal forms are computed by terminating rewriting.  Each rule strictly
decreases a lexicographic measure (G, Inv, W):

* G   number of generator letters (g != 0),
* Inv inversions among generator indices,
* W   for J_1 kinds: sum of (position + 1) over D letters and over
      generator letters with non-unit coefficient;
      for J_2 kinds: sum over D letters of (1 + generators to the left)
      plus sum over non-unit generator letters of 2 (1 + generators to the left).
"""

from __future__ import annotations

import enum
import os
import random
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .connection import Connection, DiffOperator
from .dlie import DLieAlgebra
from .lie_rinehart import ScalarCochain
from .poly_core import ParseError, Poly, parse_poly, random_poly
from .report import Verdict

DEFAULT_BUDGET = 10**6
_DEBUG = os.environ.get("DLIEKIT_DEBUG", "") not in ("", "0")


class QuotientKind(enum.Enum):
    UTensor = "utensor"
    URho = "urho"
    UTensorTilde = "utensor-tilde"
    URhoTilde = "urho-tilde"

    @property
    def tilde(self) -> bool:
        return self in (QuotientKind.UTensorTilde, QuotientKind.URhoTilde)

    @property
    def rho_rules(self) -> bool:
        return self in (QuotientKind.URho, QuotientKind.URhoTilde)

    @classmethod
    def parse(cls, text: str) -> "QuotientKind":
        key = text.strip().lower().replace("_", "-")
        for k in cls:
            if k.value == key or k.name.lower() == key.replace("-", ""):
                return k
        raise ValueError(f"unknown quotient kind {text!r}")


class StepBudgetExceeded(RuntimeError):
    def __init__(self, steps: int, budget: int):
        super().__init__(f"rewriting exceeded the step budget ({steps} > {budget})")
        self.steps = steps
        self.budget = budget


class AlgebraMismatch(ValueError):
    pass


Letter = tuple  # (Poly, int)
Word = tuple  # tuple[Letter, ...]


class TensorElement:
    """Finite k-linear combination of terms (c D) (x) word over a D-Lie algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: DLieAlgebra, terms: dict | None = None):
        self.algebra = algebra
        self.terms: dict = {}
        for w, c in (terms or {}).items():
            _add_into(self.terms, tuple(w), c)

    @classmethod
    def zero(cls, T: DLieAlgebra) -> "TensorElement":
        return cls(T)

    @classmethod
    def scalar(cls, T: DLieAlgebra, c=1) -> "TensorElement":
        return cls(T, {(): _poly(T, c)})

    @classmethod
    def letter(cls, T: DLieAlgebra, g: int, a=1) -> "TensorElement":
        return cls.word(T, [(a, g)])

    @classmethod
    def word(cls, T: DLieAlgebra, letters: Iterable, c=1) -> "TensorElement":
        w = []
        for a, g in letters:
            if not 0 <= g < T.rank:
                raise ValueError(f"generator index {g} out of range 0..{T.n}")
            w.append((_poly(T, a), g))
        return cls(T, {tuple(w): _poly(T, c)})

    @classmethod
    def from_lie(cls, T: DLieAlgebra, u) -> "TensorElement":
        """A D-Lie element sum a_g u_g as a sum of one-letter words."""
        return cls(T, {((a, g),): Poly.one(T.nvars) for g, a in enumerate(u) if a})

    def _same(self, other: "TensorElement"):
        if other.algebra is not self.algebra:
            raise AlgebraMismatch("tensor elements over different D-Lie algebras")

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self._same(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            _add_into(out, w, c)
        return TensorElement._raw(self.algebra, out)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, k) -> "TensorElement":
        return TensorElement._raw(self.algebra, {w: c * k for w, c in self.terms.items() if k})

    def __mul__(self, other: "TensorElement") -> "TensorElement":
        return multiply(self, other)

    @classmethod
    def _raw(cls, T, terms):
        el = cls.__new__(cls)
        el.algebra = T
        el.terms = {w: c for w, c in terms.items() if c}
        return el

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Maximal letter count; -1 for the zero element."""
        return max((len(w) for w in self.terms), default=-1)

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.algebra.names()
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), _word_key(w))):
            c = self.terms[w]
            letters = [(names[g] if a.is_one() else f"({a})*{names[g]}") for a, g in w]
            body = " ⊗ ".join(letters)
            if not body:
                parts.append(f"({c})")
            elif c.is_one():
                parts.append(body)
            else:
                parts.append(f"({c})*{body}")
        return " + ".join(parts)

    __repr__ = __str__


def _poly(T: DLieAlgebra, c) -> Poly:
    if isinstance(c, Poly):
        if c.nvars != T.nvars:
            raise ValueError("coefficient ring mismatch")
        return c
    return Poly.const(T.nvars, c)


def _add_into(d: dict, w, c):
    if not c:
        return
    old = d.get(w)
    if old is None:
        d[w] = c
    else:
        s = old + c
        if s:
            d[w] = s
        else:
            del d[w]


def _word_key(w):
    return tuple((g, str(a)) for a, g in w)


def multiply(a: TensorElement, b: TensorElement) -> TensorElement:
    """Concatenation product; a non-constant right scalar becomes a D letter."""
    a._same(b)
    T = a.algebra
    out: dict = {}
    for w1, c1 in a.terms.items():
        for w2, c2 in b.terms.items():
            if c2.is_constant():
                _add_into(out, w1 + w2, c1 * c2.constant_term())
            else:
                _add_into(out, w1 + ((c2, 0),) + w2, c1)
    return TensorElement._raw(T, out)


# rewriting -----------------------------------------------------------------


def measure(word: Word, kind: QuotientKind) -> tuple:
    gens = [g for _, g in word if g]
    G = len(gens)
    inv = sum(1 for i in range(G) for j in range(i + 1, G) if gens[i] > gens[j])
    W = 0
    left = 0
    for p, (a, g) in enumerate(word):
        heavy = g == 0 or not a.is_one()
        if kind.rho_rules:
            if g == 0:
                W += 1 + left
            elif not a.is_one():
                W += 2 * (1 + left)
        elif heavy:
            W += p + 1
        if g:
            left += 1
    return G, inv, W


class _Rewriter:
    def __init__(self, T: DLieAlgebra, kind: QuotientKind):
        self.T = T
        self.kind = kind
        self.one = Poly.one(T.nvars)

    def _redex_at(self, w: Word, p: int) -> bool:
        a, g = w[p]
        if p == 0:
            return g == 0 or not a.is_one()
        b, h = w[p - 1]
        if self.kind.rho_rules:
            if g != 0 and not a.is_one():
                return True
            if g == 0:
                return True
        else:
            if g == 0 or not a.is_one():
                return True
        if self.kind.tilde and g and h and g < h and a.is_one() and b.is_one():
            return True
        return False

    def find(self, w: Word, rightmost: bool) -> int | None:
        rng = range(len(w) - 1, -1, -1) if rightmost else range(len(w))
        for p in rng:
            if self._redex_at(w, p):
                return p
        return None

    def rewrite(self, w: Word, c: Poly, p: int) -> list:
        """Replacement terms for the redex at position p."""
        T, one = self.T, self.one
        a, g = w[p]
        if p == 0:
            if g == 0:
                return [(w[1:], c * a)]
            return [(((one, g),) + w[1:], c * a)]
        b, h = w[p - 1]
        pre, post = w[: p - 1], w[p + 1:]
        if self.kind.rho_rules:
            if g != 0 and not a.is_one():
                return [(pre + ((b, h), (a, 0), (one, g)) + post, c)]
            if g == 0:
                if h == 0:
                    return [(pre + ((a * b, 0),) + post, c)]
                out = [(pre + ((a, 0), (b, h)) + post, c)]
                t = b * T.pi[h](a)
                if t:
                    out.append((pre + ((t, 0),) + post, c))
                return out
        else:
            if g == 0:
                out = [(pre + ((a * b, h),) + post, c)]
                t = b * T.pi[h](a)
                if t:
                    out.append((pre + ((t, 0),) + post, c))
                return out
            if not a.is_one():
                out = [(pre + ((a * b, h), (one, g)) + post, c)]
                t = b * T.pi[h](a)
                if t:
                    out.append((pre + ((t, 0), (one, g)) + post, c))
                return out
        # tilde swap: u_h u_g -> u_g u_h + [u_h, u_g]
        out = [(pre + ((one, g), (one, h)) + post, c)]
        for k, s in enumerate(T.struct(h, g)):
            if s:
                out.append((pre + ((s, k),) + post, c))
        return out


@dataclass
class NormalFormResult:
    element: TensorElement
    steps: int


def _too_long(w, max_degree) -> bool:
    return max_degree is not None and sum(1 for _, g in w if g) > max_degree


def normal_form_ex(
    el: TensorElement,
    kind: QuotientKind,
    strategy: str = "leftmost",
    budget: int = DEFAULT_BUDGET,
    max_degree: int | None = None,
    check_measure: bool | None = None,
) -> NormalFormResult:
    """Normal form together with the number of rule applications."""
    if strategy not in ("leftmost", "rightmost"):
        raise ValueError(f"unknown strategy {strategy!r}")
    check = _DEBUG if check_measure is None else check_measure
    rw = _Rewriter(el.algebra, kind)
    rightmost = strategy == "rightmost"
    pending: dict = {w: c for w, c in el.terms.items() if not _too_long(w, max_degree)}
    done: dict = {}
    steps = 0
    while pending:
        w = next(iter(pending))
        c = pending.pop(w)
        p = rw.find(w, rightmost)
        if p is None:
            _add_into(done, w, c)
            continue
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded(steps, budget)
        new = rw.rewrite(w, c, p)
        if check:
            m0 = measure(w, kind)
            for w2, _ in new:
                if not measure(w2, kind) < m0:
                    raise AssertionError(f"measure did not drop: {m0} -> {measure(w2, kind)}")
        for w2, c2 in new:
            if _too_long(w2, max_degree):
                continue
            _add_into(pending, w2, c2)
    return NormalFormResult(TensorElement._raw(el.algebra, done), steps)


def normal_form(el: TensorElement, kind: QuotientKind, strategy: str = "leftmost", **kw) -> TensorElement:
    return normal_form_ex(el, kind, strategy, **kw).element


def filtration_degree(el: TensorElement, kind: QuotientKind, **kw) -> int:
    """Word degree of the normal form; -1 stands for the zero class."""
    return normal_form(el, kind, **kw).degree()


def commutator(x: TensorElement, y: TensorElement) -> TensorElement:
    return multiply(x, y) - multiply(y, x)


def almost_comm_witness(x: TensorElement, y: TensorElement, kind: QuotientKind, **kw) -> dict:
    """filtration_degree(xy - yx) <= deg x + deg y - 1 in a tilde quotient."""
    if not kind.tilde:
        raise ValueError("almost commutativity is checked in the tilde quotients only")
    i = filtration_degree(x, kind, **kw)
    j = filtration_degree(y, kind, **kw)
    nf = normal_form(commutator(x, y), kind, **kw)
    d = nf.degree()
    ok = nf.is_zero() or (i >= 0 and j >= 0 and d <= i + j - 1)
    return {"ok": ok, "deg_x": i, "deg_y": j, "degree": d, "normal_form": str(nf)}


def random_tensor(
    rng: random.Random,
    T: DLieAlgebra,
    max_len: int = 4,
    max_coeff_deg: int = 3,
    n_terms: int = 2,
) -> TensorElement:
    """Random sum of words; letters carry random coefficients of bounded degree."""
    terms: dict = {}
    for _ in range(n_terms):
        length = rng.randint(0, max_len)
        w = []
        for _ in range(length):
            g = rng.randrange(T.rank)
            a = Poly.one(T.nvars) if rng.random() < 0.4 else random_poly(rng, T.nvars, max_deg=max_coeff_deg, max_terms=2)
            if not a:
                a = Poly.one(T.nvars)
            w.append((a, g))
        c = random_poly(rng, T.nvars, max_deg=1, max_terms=2) if rng.random() < 0.3 else Poly.const(T.nvars, rng.choice([1, -1, 2, 3]))
        _add_into(terms, tuple(w), c or Poly.one(T.nvars))
    return TensorElement._raw(T, terms)


# evaluation ----------------------------------------------------------------


def evaluate(el: TensorElement, rho: Connection) -> DiffOperator:
    """Ring-homomorphism evaluation: (c D) (x) (a u) ... -> rho(c D) rho(a u) ..."""
    T = el.algebra
    if rho.source is not T:
        raise AlgebraMismatch("connection is defined on a different D-Lie algebra")
    cache: dict = {}

    def letter(a: Poly, g: int) -> DiffOperator:
        key = (a, g)
        op = cache.get(key)
        if op is None:
            op = rho.rho_gen(g).scale(a)
            cache[key] = op
        return op

    acc = DiffOperator.zero(rho.nvars, rho.r)
    for w, c in el.terms.items():
        op = letter(c, 0)
        for a, g in w:
            op = op.compose(letter(a, g))
        acc = acc + op
    return acc


def curvature_generators(T: DLieAlgebra, f: ScalarCochain | None = None) -> list[TensorElement]:
    """u_i u_j - u_j u_i - [u_i, u_j] - f(u_i, u_j) D for 1 <= i < j <= n.

    ``f`` is a 2-cochain on u_1..u_n; None means f = 0.
    """
    gens = []
    for i in range(1, T.rank):
        for j in range(i + 1, T.rank):
            el = TensorElement.word(T, [(1, i), (1, j)]) - TensorElement.word(T, [(1, j), (1, i)])
            el = el - TensorElement.from_lie(T, T.struct(i, j))
            if f is not None:
                v = f.on_gens((i - 1, j - 1))
                if v:
                    el = el - TensorElement.letter(T, 0, v)
            gens.append(el)
    return gens


def ideal_annihilation_check(rho: Connection, generators: Sequence[TensorElement]) -> Verdict:
    for k, el in enumerate(generators):
        op = evaluate(el, rho)
        if not op.is_zero():
            return Verdict(False, {"index": k, "generator": str(el), "value": str(op)})
    return Verdict(True)


# word expressions ----------------------------------------------------------

_FACTOR = re.compile(r"^(?:(\(.*\)|[0-9/]+)\s*\*\s*)?(D|u\d+)$")


def _split_top(text: str, seps: str) -> list[tuple[str, int]]:
    """Split at top-level separator characters; returns (chunk, start offset)."""
    out, depth, start = [], 0, 0
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in seps:
            out.append((text[start:k], start))
            start = k + 1
    out.append((text[start:], start))
    return out


def parse_tensor(text: str, T: DLieAlgebra) -> TensorElement:
    """Parse e.g. ``(x1)*u1 ⊗ u2 - 3*D + (x2)``; ``@`` may replace ``⊗``."""
    s = text.replace("⊗", "@")
    el = TensorElement.zero(T)
    depth, start, sign, terms = 0, 0, 1, 0
    for k, ch in enumerate(s + "+"):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ')'", k)
        elif depth == 0 and ch in "+-":
            chunk = s[start:k]
            if chunk.strip():
                el = el + _parse_term(chunk, start, T).scale(sign)
                terms += 1
            elif terms or sign != 1 or k == len(s):
                raise ParseError("missing term", k)
            sign = 1 if ch == "+" else -1
            start = k + 1
    if depth:
        raise ParseError("unbalanced '('", len(s))
    return el


def _parse_term(chunk: str, off: int, T: DLieAlgebra) -> TensorElement:
    factors = _split_top(chunk, "@")
    c = Poly.one(T.nvars)
    letters = []
    for idx, (fac, pos) in enumerate(factors):
        f = fac.strip()
        where = off + pos
        if not f:
            raise ParseError("empty factor", where)
        m = _FACTOR.match(f)
        if m:
            coef = _coef(m.group(1), T, where) if m.group(1) else Poly.one(T.nvars)
            name = m.group(2)
            g = 0 if name == "D" else int(name[1:])
            if not 0 <= g < T.rank:
                raise ParseError(f"unknown generator {name}", where)
            letters.append((coef, g))
        elif re.match(r"^(\(.*\)|[0-9/]+)$", f):
            coef = _coef(f, T, where)
            if idx == 0:
                c = coef
            else:
                letters.append((coef, 0))
        else:
            raise ParseError(f"cannot read factor {f!r}", where)
    return TensorElement.word(T, letters, c)


def _coef(text: str, T: DLieAlgebra, where: int) -> Poly:
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    try:
        return parse_poly(t, T.nvars)
    except ParseError as e:
        raise ParseError(str(e), where + e.pos) from None
