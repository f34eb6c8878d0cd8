"""Declarative problem files: parsing and name resolution.

A file is a sequence of blocks ``kind [name] { ... }``.  Field blocks hold
``key = value`` entries separated by ``;`` or newlines; the ``tasks`` block
holds one task per line.  ``#`` starts a comment.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from typing import Any

from . import library as lib
from .connection import Connection, ProjectiveBasis
from .dlie import DLieAlgebra, build_extension, d1f_presentation
from .lie_rinehart import LieRinehartPresentation, ScalarCochain
from .poly_core import Derivation, ParseError, Poly, PolyMatrix, parse_poly


class ProblemError(ValueError):
    """Input error: malformed file or unresolved reference."""


class ResolutionError(ProblemError):
    pass


class FileParseError(ProblemError):
    def __init__(self, msg: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.col, self.pos = line, col, pos


@dataclass
class Atom:
    text: str
    pos: int


@dataclass
class Block:
    kind: str
    name: str | None
    fields: dict
    pos: int


@dataclass
class TaskSpec:
    name: str
    args: list
    opts: dict
    line: int
    text: str


@dataclass
class ProblemFile:
    text: str
    blocks: list = field(default_factory=list)
    tasks: list = field(default_factory=list)


FIELD_KINDS = ("ring", "lie_rinehart", "cocycle", "dlie", "connection", "projective_basis")


def _strip_comments(text: str) -> str:
    out = []
    for line in text.split("\n"):
        k = line.find("#")
        out.append(line if k < 0 else line[:k] + " " * (len(line) - k))
    return "\n".join(out)


class _Reader:
    def __init__(self, text: str, src: str):
        self.s = text
        self.src = src
        self.i = 0

    def error(self, msg, pos=None):
        raise FileParseError(msg, self.src, self.i if pos is None else pos)

    def ws(self, newlines=True):
        while self.i < len(self.s) and (self.s[self.i] in " \t\r" or (newlines and self.s[self.i] == "\n")):
            self.i += 1

    def peek(self):
        return self.s[self.i] if self.i < len(self.s) else ""

    def ident(self) -> str:
        self.ws()
        j = self.i
        while self.i < len(self.s) and (self.s[self.i].isalnum() or self.s[self.i] in "_-"):
            self.i += 1
        if j == self.i:
            self.error("identifier expected")
        return self.s[j:self.i]

    def expect(self, ch):
        self.ws()
        if self.peek() != ch:
            self.error(f"'{ch}' expected")
        self.i += 1

    # values ---------------------------------------------------------------
    def value(self):
        self.ws()
        ch = self.peek()
        if ch == "[":
            self.i += 1
            items = []
            self.ws()
            if self.peek() == "]":
                self.i += 1
                return items
            while True:
                items.append(self.value())
                self.ws()
                if self.peek() == ",":
                    self.i += 1
                    continue
                self.expect("]")
                return items
        if ch == "{":
            self.i += 1
            out = {}
            while True:
                self.ws()
                if self.peek() == "}":
                    self.i += 1
                    return out
                kpos = self.i
                key = self.key()
                self.ws()
                if self.s.startswith("->", self.i):
                    self.i += 2
                else:
                    self.error("'->' expected")
                if key in out:
                    self.error(f"duplicate key {key}", kpos)
                out[key] = self.value()
                self.ws()
                if self.peek() in ",;":
                    self.i += 1
        if ch == "(" and self._is_tuple():
            self.i += 1
            items = []
            while True:
                items.append(self.value())
                self.ws()
                if self.peek() == ",":
                    self.i += 1
                    continue
                self.expect(")")
                return tuple(items)
        return self.atom()

    def _is_tuple(self) -> bool:
        depth = 0
        for k in range(self.i, len(self.s)):
            c = self.s[k]
            if c in "([{":
                depth += 1
            elif c in ")]}":
                depth -= 1
                if depth == 0:
                    return False
            elif c == "," and depth == 1:
                return True
        return False

    def key(self) -> tuple:
        self.ws()
        pos = self.i
        if self.peek() == "(":
            self.i += 1
            j = self.s.find(")", self.i)
            if j < 0:
                self.error("')' expected")
            body = self.s[self.i:j]
            self.i = j + 1
        else:
            j = self.i
            while self.i < len(self.s) and self.s[self.i].isdigit():
                self.i += 1
            body = self.s[j:self.i]
        try:
            return tuple(int(p) for p in body.split(",") if p.strip())
        except ValueError:
            self.error("integer index tuple expected", pos)

    def atom(self) -> Atom:
        self.ws()
        j = self.i
        depth = 0
        while self.i < len(self.s):
            c = self.s[self.i]
            if c == "(":
                depth += 1
            elif c == ")":
                if depth == 0:
                    break
                depth -= 1
            elif depth == 0 and c in ",;]}\n":
                break
            self.i += 1
        text = self.s[j:self.i].strip()
        if not text:
            self.error("value expected", j)
        return Atom(text, j)


def parse_problem(text: str) -> ProblemFile:
    clean = _strip_comments(text)
    r = _Reader(clean, text)
    pf = ProblemFile(text)
    while True:
        r.ws()
        if r.i >= len(clean):
            return pf
        pos = r.i
        kind = r.ident()
        if kind == "tasks":
            r.expect("{")
            end = clean.find("}", r.i)
            if end < 0:
                r.error("unterminated tasks block", pos)
            body_start = r.i
            for k, line in enumerate(clean[body_start:end].split("\n")):
                t = line.strip()
                if not t:
                    continue
                lineno = clean.count("\n", 0, body_start) + k + 1
                pf.tasks.append(_parse_task(t, lineno))
            r.i = end + 1
            continue
        if kind not in FIELD_KINDS:
            r.error(f"unknown block kind {kind!r}", pos)
        r.ws()
        name = None
        if r.peek() != "{":
            name = r.ident()
        r.expect("{")
        fields = {}
        while True:
            r.ws()
            if r.peek() == "}":
                r.i += 1
                break
            if not r.peek():
                r.error("unterminated block", pos)
            fpos = r.i
            key = r.ident()
            r.ws(newlines=False)
            if r.peek() == "=":
                r.i += 1
                fields[key] = r.value()
            else:
                fields[key] = True
            r.ws(newlines=False)
            if r.peek() in ";\n":
                r.i += 1
            elif r.peek() != "}":
                r.error(f"';' or newline expected after field {key!r}", fpos)
        if kind != "ring" and name is None:
            r.error(f"{kind} block needs a name", pos)
        pf.blocks.append(Block(kind, name, fields, pos))


def _parse_task(line: str, lineno: int) -> TaskSpec:
    try:
        parts = shlex.split(line)
    except ValueError as e:
        raise ProblemError(f"line {lineno}: {e}") from None
    name, args, opts = parts[0], [], {}
    for p in parts[1:]:
        if "=" in p:
            k, v = p.split("=", 1)
            opts[k] = v
        else:
            args.append(p)
    return TaskSpec(name, args, opts, lineno, line)


# resolution ----------------------------------------------------------------


class Env:
    """Resolved objects of a problem file (or of the bundled library)."""

    def __init__(self, nvars: int = 2):
        self.nvars = nvars
        self.lies: dict = {}
        self.cocycles: dict = {}
        self.dlies: dict = {}
        self.connections: dict = {}
        self.bases: dict = {}

    def _get(self, table: dict, kind: str, name: str, fallback=None):
        if name in table:
            return table[name]
        if fallback is not None:
            obj = fallback(name)
            if obj is not None:
                return obj
        raise ResolutionError(f"undefined {kind} {name!r}")

    def lie(self, name):
        return self._get(self.lies, "lie_rinehart", name, _library_lie)

    def cocycle(self, name):
        return self._get(self.cocycles, "cocycle", name, _library_cocycle)

    def dlie(self, name):
        return self._get(self.dlies, "dlie", name, _library_dlie)

    def connection(self, name) -> Connection:
        return self._get(self.connections, "connection", name, _library_connection)

    def basis(self, name) -> ProjectiveBasis:
        return self._get(self.bases, "projective_basis", name, lambda n: lib.projective_bases().get(n))

    def any_dlie(self, name) -> DLieAlgebra:
        """A D-Lie algebra by name, or the source of a named connection."""
        if name in self.dlies or _library_dlie(name) is not None:
            return self.dlie(name)
        if name in self.connections:
            return self.connections[name].source
        return self.dlie(name)


def _library_lie(name):
    table = {"Der1": lib.der(1), "Der2": lib.der(2), "Split2": lib.split_plane(), "Aff1": lib.affine_line()}
    return table.get(name)


def _library_cocycle(name):
    if name in lib.pairs():
        return lib.pairs()[name].f
    if name.startswith("chern") and name[5:].isdigit():
        return lib.chern_example(int(name[5:]))[1]
    return lib.curvature_type_form(name)


def _library_dlie(name):
    return lib.extension(name) if name in lib.pairs() else None


def _library_connection(name):
    if name in lib.connections():
        return lib.connections()[name]
    if name in lib.psi_variants():
        return lib.psi_variants()[name]
    if name.startswith("chern"):
        tail = name[5:]
        split = tail.endswith("_split")
        digits = tail[: -len("_split")] if split else tail
        if digits.isdigit():
            return lib.chern_example(int(digits), curvature_type=not split)[0]
    return None


def _poly(v, nvars: int, src: str) -> Poly:
    if isinstance(v, Atom):
        try:
            return parse_poly(v.text, nvars)
        except ParseError as e:
            raise FileParseError(str(e), src, v.pos + e.pos) from None
    raise ProblemError(f"polynomial expected, got {v!r}")


def _name(v) -> str:
    if isinstance(v, Atom):
        return v.text
    raise ProblemError(f"name expected, got {v!r}")


def _int(v) -> int:
    try:
        return int(_name(v))
    except ValueError:
        raise ProblemError(f"integer expected, got {v!r}") from None


def _matrix(v, nvars, src) -> PolyMatrix:
    if not isinstance(v, list) or not v or not all(isinstance(row, list) for row in v):
        raise ProblemError("matrix expected as [[..], ..]")
    return PolyMatrix([[_poly(a, nvars, src) for a in row] for row in v])


def resolve(pf: ProblemFile) -> Env:
    src = pf.text
    rings = [b for b in pf.blocks if b.kind == "ring"]
    nvars = _int(rings[0].fields.get("vars", Atom("2", 0))) if rings else 2
    env = Env(nvars)
    m = nvars
    for b in pf.blocks:
        F = b.fields
        if b.kind == "ring":
            continue
        if b.name in env.lies or b.name in env.cocycles or b.name in env.dlies or b.name in env.connections or b.name in env.bases:
            raise ProblemError(f"duplicate name {b.name!r}")
        if b.kind == "lie_rinehart":
            if F.get("der") is True or "anchor" not in F:
                env.lies[b.name] = LieRinehartPresentation.der(m, name=b.name)
                continue
            anchor = [Derivation([_poly(a, m, src) for a in row]) for row in F["anchor"]]
            n = len(anchor)
            brackets = {}
            for key, vals in (F.get("brackets") or {}).items():
                if len(key) != 2 or not all(1 <= k <= n for k in key):
                    raise ProblemError(f"{b.name}: bracket key {key} outside 1..{n}")
                brackets[(key[0] - 1, key[1] - 1)] = tuple(_poly(a, m, src) for a in vals)
            env.lies[b.name] = LieRinehartPresentation(m, anchor, brackets, name=b.name)
        elif b.kind == "cocycle":
            if "library" in F:
                env.cocycles[b.name] = env.cocycle(_name(F["library"]))
                continue
            degree = _int(F["degree"]) if "degree" in F else 2
            rank = env.lie(_name(F["on"])).rank if "on" in F else m
            vals = {key: _poly(v, m, src) for key, v in (F.get("values") or {}).items()}
            try:
                env.cocycles[b.name] = ScalarCochain.from_one_based(m, rank, degree, vals)
            except (ValueError, IndexError) as e:
                raise ProblemError(f"cocycle {b.name}: {e}") from None
        elif b.kind == "dlie":
            if "library" in F:
                env.dlies[b.name] = env.dlie(_name(F["library"]))
            elif "d1f" in F:
                env.dlies[b.name] = d1f_presentation(m, env.cocycle(_name(F["d1f"])), name=b.name)
            elif "from" in F:
                src_pair = F["from"]
                if not isinstance(src_pair, tuple) or len(src_pair) != 2:
                    raise ProblemError(f"dlie {b.name}: from = (L, f) expected")
                L = env.lie(_name(src_pair[0]))
                f = env.cocycle(_name(src_pair[1]))
                env.dlies[b.name] = build_extension(L, f, name=b.name)
            else:
                raise ProblemError(f"dlie {b.name}: one of from, d1f, library is required")
        elif b.kind == "connection":
            if "library" in F:
                env.connections[b.name] = env.connection(_name(F["library"]))
                continue
            T = env.dlie(_name(F["dlie"]))
            gammas = [_matrix(g, m, src) for g in F.get("gamma", [])]
            psi = None
            if "psi" in F and not (isinstance(F["psi"], Atom) and F["psi"].text == "Id"):
                psi = _matrix(F["psi"], m, src)
            if "rank" in F and gammas and gammas[0].rows != _int(F["rank"]):
                raise ProblemError(f"connection {b.name}: rank does not match the gamma matrices")
            env.connections[b.name] = Connection(T, gammas, psi, name=b.name)
        elif b.kind == "projective_basis":
            if "phi" in F:
                env.bases[b.name] = ProjectiveBasis.from_idempotent(_matrix(F["phi"], m, src), name=b.name)
            elif "u" in F and "w" in F:
                u = [_poly(a, m, src) for a in F["u"]]
                w = [_poly(a, m, src) for a in F["w"]]
                env.bases[b.name] = ProjectiveBasis.from_uw(u, w, name=b.name)
            elif "functionals" in F and "vectors" in F:
                env.bases[b.name] = ProjectiveBasis(_matrix(F["functionals"], m, src), _matrix(F["vectors"], m, src), name=b.name)
            else:
                raise ProblemError(f"projective_basis {b.name}: give phi, u and w, or functionals and vectors")
    return env


def load(text: str) -> tuple[ProblemFile, Env]:
    pf = parse_problem(text)
    try:
        return pf, resolve(pf)
    except ProblemError:
        raise
    except (ValueError, KeyError, IndexError) as e:
        raise ProblemError(f"invalid declaration: {e}") from None


def option(opts: dict, key: str, default: Any, cast=str):
    if key not in opts:
        return default
    try:
        return cast(opts[key])
    except ValueError:
        raise ProblemError(f"option {key}={opts[key]!r} is not a valid {cast.__name__}") from None
