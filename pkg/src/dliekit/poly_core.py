"""Exact polynomials over Q, derivations, and polynomial matrices.

The heavy lifting (add, multiply, differentiate on sparse exponent maps) is
delegated to a kernel module.  The compiled ``_ckernel`` is used when it was
built; otherwise, or when ``DLIEKIT_PURE=1`` is set, the pure-Python
``_pykernel`` is loaded.  Both implement the same functions.
"""

from __future__ import annotations

import os
import re
from fractions import Fraction
from typing import Iterable, Sequence

if os.environ.get("DLIEKIT_PURE", "") not in ("", "0"):
    from . import _pykernel as _k
else:
    try:
        from . import _ckernel as _k
    except ImportError:  # extension not built
        from . import _pykernel as _k

BACKEND: str = _k.BACKEND

Rational = int | Fraction


class VariableMismatch(ValueError):
    """Operands live over polynomial rings with different variable counts."""


class ParseError(ValueError):
    """Malformed polynomial text; ``pos`` is the 0-based character offset."""

    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def _rat(c) -> Rational:
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _k.norm(c)
    raise TypeError(f"not a rational coefficient: {c!r}")


class Poly:
    """Sparse multivariate polynomial in x1..x_nvars with rational coefficients.

    Instances are immutable: ``terms`` maps exponent tuples to nonzero
    coefficients and must never be mutated after construction.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {} if terms is None else terms
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, nvars: int, c: Rational = 1) -> "Poly":
        c = _rat(c)
        return cls(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars, {})

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls.const(nvars, 1)

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        """The variable x_{i+1} (0-based index ``i``)."""
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} outside 0..{nvars - 1}")
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c: Rational = 1) -> "Poly":
        c = _rat(c)
        return cls(len(exps), {tuple(exps): c} if c else {})

    @classmethod
    def from_dict(cls, nvars: int, mapping: dict) -> "Poly":
        terms = {}
        for e, c in mapping.items():
            e = tuple(e)
            if len(e) != nvars:
                raise VariableMismatch(f"exponent {e} has length {len(e)}, expected {nvars}")
            c = _rat(c)
            if c:
                terms[e] = c
        return cls(nvars, terms)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise VariableMismatch(f"{self.nvars} vs {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(self.nvars, other)
        return NotImplemented

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly(self.nvars, _k.add(self.terms, o.terms))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly(self.nvars, _k.sub(self.terms, o.terms))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly(self.nvars, _k.sub(o.terms, self.terms))

    def __neg__(self):
        return Poly(self.nvars, _k.scale(self.terms, -1))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly(self.nvars, _k.scale(self.terms, other))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Poly(self.nvars, _k.mul(self.terms, o.terms))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.one(self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def deriv(self, i: int) -> "Poly":
        """Partial derivative with respect to x_{i+1}."""
        return Poly(self.nvars, _k.deriv(self.terms, i))

    def partial(self, beta: Sequence[int]) -> "Poly":
        """Iterated partial derivative for the multi-index ``beta``."""
        p = self
        for i, b in enumerate(beta):
            for _ in range(b):
                if not p.terms:
                    return p
                p = p.deriv(i)
        return p

    # inspection ---------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_term(self) -> Rational:
        return self.terms.get((0,) * self.nvars, 0)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get((0,) * self.nvars) == 1

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def embed(self, nvars: int) -> "Poly":
        """Same polynomial viewed in a ring with extra trailing variables."""
        if nvars == self.nvars:
            return self
        if nvars < self.nvars:
            raise VariableMismatch("cannot drop variables")
        pad = (0,) * (nvars - self.nvars)
        return Poly(nvars, {e + pad: c for e, c in self.terms.items()})

    def evaluate(self, point: Sequence[Rational]) -> Rational:
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(point, e):
                if k:
                    t = t * v ** k
            total += t
        return _k.norm(Fraction(total)) if isinstance(total, Fraction) else total

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.terms == ({(0,) * self.nvars: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self) -> list:
        """Terms in descending graded-lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Poly({self.nvars}, {str(self)!r})"


# parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d+)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            while text[pos].isspace():
                pos += 1
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", int(m.group(1)), start))
        elif m.group(2):
            out.append(("var", int(m.group(2)[1:]), start))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str, nvars: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.nvars = nvars

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])

    def expr(self) -> Poly:
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        acc = self.term() * sign
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t[1] == "+" else acc - rhs
            else:
                return acc

    def term(self) -> Poly:
        acc = self.power()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                acc = acc * self.power()
            elif t[0] == "op" and t[1] == "/":
                self.take()
                d = self.power()
                if not d.is_constant() or d.is_zero():
                    raise ParseError("division only by a nonzero constant", t[2])
                acc = acc * _inv(d.constant_term())
            else:
                return acc

    def power(self) -> Poly:
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num":
                raise ParseError("exponent must be a nonnegative integer", e[2])
            return base ** e[1]
        return base

    def atom(self) -> Poly:
        t = self.take()
        if t[0] == "num":
            return Poly.const(self.nvars, t[1])
        if t[0] == "var":
            if not 1 <= t[1] <= self.nvars:
                raise ParseError(f"variable x{t[1]} outside x1..x{self.nvars}", t[2])
            return Poly.var(self.nvars, t[1] - 1)
        if t[0] == "op" and t[1] == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        if t[0] == "op" and t[1] == "-":
            return -self.power()
        raise ParseError("expected a number, variable or '('", t[2])


def _inv(c: Rational) -> Fraction:
    return Fraction(1) / Fraction(c)


def parse_poly(text: str, nvars: int) -> Poly:
    """Parse text such as ``"1/2*x1^2 - 3*x1*x2 + 5"``."""
    p = _Parser(str(text), nvars)
    out = p.expr()
    t = p.peek()
    if t[0] != "end":
        raise ParseError("trailing input", t[2])
    return out


def as_poly(value, nvars: int) -> Poly:
    """Coerce a Poly, rational, or polynomial text into a Poly."""
    if isinstance(value, Poly):
        if value.nvars != nvars:
            raise VariableMismatch(f"{value.nvars} vs {nvars} variables")
        return value
    if isinstance(value, str):
        return parse_poly(value, nvars)
    return Poly.const(nvars, value)


# derivations ---------------------------------------------------------------


class Derivation:
    """The derivation sum_i c_i d/dx_i of Q[x1..xm]."""

    __slots__ = ("nvars", "coeffs")

    def __init__(self, coeffs: Sequence[Poly]):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a derivation needs at least one coefficient")
        m = coeffs[0].nvars
        if len(coeffs) != m or any(c.nvars != m for c in coeffs):
            raise VariableMismatch("derivation needs one coefficient per variable")
        self.nvars = m
        self.coeffs = coeffs

    @classmethod
    def partial(cls, nvars: int, i: int) -> "Derivation":
        return cls([Poly.const(nvars, 1 if j == i else 0) for j in range(nvars)])

    @classmethod
    def zero(cls, nvars: int) -> "Derivation":
        return cls([Poly.zero(nvars)] * nvars)

    @classmethod
    def of(cls, nvars: int, coeffs: Iterable) -> "Derivation":
        return cls([as_poly(c, nvars) for c in coeffs])

    def __call__(self, p: Poly) -> Poly:
        return apply_derivation(self, p)

    def __add__(self, other: "Derivation") -> "Derivation":
        _same(self, other)
        return Derivation([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "Derivation") -> "Derivation":
        _same(self, other)
        return Derivation([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return Derivation([-a for a in self.coeffs])

    def scale(self, c) -> "Derivation":
        """Left multiplication by an element of A."""
        return Derivation([c * a for a in self.coeffs])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        parts = [f"({c})*d{i + 1}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def _same(a, b):
    if a.nvars != b.nvars:
        raise VariableMismatch(f"{a.nvars} vs {b.nvars} variables")


def apply_derivation(d: Derivation, p: Poly) -> Poly:
    """Return sum_i c_i * dp/dx_i.

    ``p`` may carry extra trailing variables (treated as constants).
    """
    if p.nvars < d.nvars:
        raise VariableMismatch(f"derivation on {d.nvars} variables, poly on {p.nvars}")
    acc = {}
    for i, c in enumerate(d.coeffs):
        if not c.terms:
            continue
        dp = _k.deriv(p.terms, i)
        if dp:
            acc = _k.add(acc, _k.mul(c.embed(p.nvars).terms, dp))
    return Poly(p.nvars, acc)


def bracket_derivations(d1: Derivation, d2: Derivation) -> Derivation:
    """[d1, d2] with coefficients d1(c2_i) - d2(c1_i)."""
    _same(d1, d2)
    return Derivation([d1(b) - d2(a) for a, b in zip(d1.coeffs, d2.coeffs)])


# matrices ------------------------------------------------------------------


class PolyMatrix:
    """Dense matrix with Poly entries (an element of Hom_A(A^cols, A^rows))."""

    __slots__ = ("nvars", "rows", "cols", "entries", "_hash")

    def __init__(self, entries: Sequence[Sequence[Poly]], nvars: int | None = None):
        ent = tuple(tuple(r) for r in entries)
        if not ent or not ent[0]:
            raise ValueError("matrices must be at least 1x1")
        cols = len(ent[0])
        if any(len(r) != cols for r in ent):
            raise ValueError("ragged matrix")
        m = ent[0][0].nvars
        if nvars is not None and nvars != m:
            raise VariableMismatch(f"{m} vs {nvars} variables")
        if any(e.nvars != m for r in ent for e in r):
            raise VariableMismatch("entries over different rings")
        self.nvars = m
        self.rows = len(ent)
        self.cols = cols
        self.entries = ent
        self._hash = None

    @classmethod
    def of(cls, nvars: int, rows: Iterable[Iterable]) -> "PolyMatrix":
        return cls([[as_poly(v, nvars) for v in r] for r in rows])

    @classmethod
    def zero(cls, nvars: int, rows: int, cols: int | None = None) -> "PolyMatrix":
        z = Poly.zero(nvars)
        return cls([[z] * (rows if cols is None else cols) for _ in range(rows)])

    @classmethod
    def identity(cls, nvars: int, r: int) -> "PolyMatrix":
        return cls.scalar(nvars, r, Poly.one(nvars))

    @classmethod
    def scalar(cls, nvars: int, r: int, p) -> "PolyMatrix":
        p = as_poly(p, nvars)
        z = Poly.zero(nvars)
        return cls([[p if i == j else z for j in range(r)] for i in range(r)])

    @classmethod
    def unit(cls, nvars: int, r: int, i: int, j: int, p=1) -> "PolyMatrix":
        z = Poly.zero(nvars)
        p = as_poly(p, nvars)
        return cls([[p if (a, b) == (i, j) else z for b in range(r)] for a in range(r)])

    @classmethod
    def column(cls, vec: Sequence[Poly]) -> "PolyMatrix":
        return cls([[v] for v in vec])

    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def _check(self, other: "PolyMatrix"):
        if other.shape() != self.shape():
            raise ValueError(f"shape mismatch {self.shape()} vs {other.shape()}")
        _same(self, other)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check(other)
        return PolyMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check(other)
        return PolyMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return PolyMatrix([[-a for a in r] for r in self.entries])

    def scale(self, c) -> "PolyMatrix":
        return PolyMatrix([[c * a for a in r] for r in self.entries])

    def __mul__(self, other):
        if isinstance(other, PolyMatrix):
            if self.cols != other.rows:
                raise ValueError(f"cannot multiply {self.shape()} by {other.shape()}")
            _same(self, other)
            z = Poly.zero(self.nvars)
            cols = list(zip(*other.entries))
            out = []
            for r in self.entries:
                row = []
                for c in cols:
                    acc = {}
                    for a, b in zip(r, c):
                        if a.terms and b.terms:
                            acc = _k.add(acc, _k.mul(a.terms, b.terms))
                    row.append(Poly(self.nvars, acc) if acc else z)
                out.append(row)
            return PolyMatrix(out)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def apply(self, vec: Sequence[Poly]) -> tuple:
        """Matrix times a column vector (entries may carry extra variables)."""
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for {self.shape()} matrix")
        n = max((v.nvars for v in vec), default=self.nvars)
        out = []
        for r in self.entries:
            acc = {}
            for a, v in zip(r, vec):
                if a.terms and v.terms:
                    acc = _k.add(acc, _k.mul(a.embed(n).terms, v.terms))
            out.append(Poly(n, acc))
        return tuple(out)

    def commutator(self, other: "PolyMatrix") -> "PolyMatrix":
        return self * other - other * self

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(list(zip(*self.entries)))

    def trace(self) -> Poly:
        acc = Poly.zero(self.nvars)
        for i in range(min(self.rows, self.cols)):
            acc = acc + self.entries[i][i]
        return acc

    def is_zero(self) -> bool:
        return not any(e.terms for r in self.entries for e in r)

    def is_identity(self) -> bool:
        return all(
            (e.is_one() if i == j else not e.terms)
            for i, r in enumerate(self.entries)
            for j, e in enumerate(r)
        )

    def derive(self, d: Derivation) -> "PolyMatrix":
        return matrix_derivative(d, self)

    def partial(self, beta: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix([[a.partial(beta) for a in r] for r in self.entries])

    def embed(self, nvars: int) -> "PolyMatrix":
        return PolyMatrix([[a.embed(nvars) for a in r] for r in self.entries])

    def max_degree(self) -> int:
        return max(a.degree() for r in self.entries for a in r)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.entries)
        return self._hash

    def to_lists(self) -> list:
        return [[str(a) for a in r] for r in self.entries]

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(a) for a in r) + "]" for r in self.entries) + "]"

    __repr__ = __str__


def matrix_derivative(d: Derivation, M: PolyMatrix) -> PolyMatrix:
    """Entrywise application of ``d``."""
    return PolyMatrix([[d(a) for a in r] for r in M.entries])


# random generation ---------------------------------------------------------


def monomials_upto(nvars: int, deg: int) -> list[tuple]:
    """All exponent vectors of total degree <= deg, in graded-lex order."""
    out = [()]
    for _ in range(nvars):
        out = [e + (k,) for e in out for k in range(deg + 1)]
    out = [e for e in out if sum(e) <= deg]
    return sorted(out, key=lambda e: (sum(e), e))


def random_poly(rng, nvars: int, max_deg: int = 2, max_terms: int = 3, coeff: int = 3) -> Poly:
    """A small random polynomial drawn from ``rng`` (a ``random.Random``)."""
    monos = monomials_upto(nvars, max_deg)
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        c = rng.randint(-coeff, coeff)
        if c:
            terms[rng.choice(monos)] = c
    return Poly(nvars, terms)


def random_matrix(rng, nvars: int, rows: int, cols: int | None = None, **kw) -> PolyMatrix:
    cols = rows if cols is None else cols
    return PolyMatrix([[random_poly(rng, nvars, **kw) for _ in range(cols)] for _ in range(rows)])


def random_derivation(rng, nvars: int, **kw) -> Derivation:
    return Derivation([random_poly(rng, nvars, **kw) for _ in range(nvars)])
