"""Expression trees for Kleene's partial recursive functions and their text form.

A program is a list of ``name = expr`` lines; later lines may refer to
earlier names and the last definition is the program.  Expressions are

    const k/n   succ   proj i/n   tuple(e, ...)   comp(g, f)
    primrec(f, g)   mu(f)

``primrec(f, g)`` is ``h(0, x) = f(x)``, ``h(y + 1, x) = g(y, h(y, x), x)``
and ``mu(f)(x)`` is the least ``y`` with ``f(y, x) = 0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ConstructionError, MalformedInput


class Expr:
    arity: int
    outputs: int = 1

    def children(self) -> tuple:
        return ()

    def walk(self):
        yield self
        for c in self.children():
            yield from c.walk()


@dataclass(frozen=True)
class Const(Expr):
    value: int
    arity: int = 0

    def __post_init__(self):
        if self.value < 0 or self.arity < 0:
            raise ConstructionError("const needs naturals")


@dataclass(frozen=True)
class Succ(Expr):
    arity = 1


@dataclass(frozen=True)
class Proj(Expr):
    i: int
    n: int

    def __post_init__(self):
        if not 1 <= self.i <= self.n:
            raise ConstructionError(f"proj {self.i}/{self.n} is out of range")

    @property
    def arity(self) -> int:
        return self.n


@dataclass(frozen=True)
class Tuple(Expr):
    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise ConstructionError("tuple needs at least one component")
        if len({p.arity for p in parts}) != 1:
            raise ConstructionError("tuple components must share one arity")
        if any(p.outputs != 1 for p in parts):
            raise ConstructionError("tuple components must be single-valued")

    @property
    def arity(self) -> int:
        return self.parts[0].arity

    @property
    def outputs(self) -> int:
        return len(self.parts)

    def children(self):
        return self.parts


@dataclass(frozen=True)
class Compose(Expr):
    g: Expr
    f: Expr

    def __post_init__(self):
        if self.g.arity != self.f.outputs:
            raise ConstructionError(
                f"comp: outer function takes {self.g.arity} arguments, inner yields {self.f.outputs}")

    @property
    def arity(self) -> int:
        return self.f.arity

    @property
    def outputs(self) -> int:
        return self.g.outputs

    def children(self):
        return (self.g, self.f)


@dataclass(frozen=True)
class PrimRec(Expr):
    f: Expr
    g: Expr

    def __post_init__(self):
        if self.f.outputs != 1 or self.g.outputs != 1:
            raise ConstructionError("primrec parts must be single-valued")
        if self.g.arity != self.f.arity + 2:
            raise ConstructionError(
                f"primrec: step takes {self.g.arity} arguments, expected {self.f.arity + 2}")

    @property
    def arity(self) -> int:
        return self.f.arity + 1

    def children(self):
        return (self.f, self.g)


@dataclass(frozen=True)
class Mu(Expr):
    f: Expr

    def __post_init__(self):
        if self.f.outputs != 1 or self.f.arity < 1:
            raise ConstructionError("mu needs a single-valued function of at least one argument")

    @property
    def arity(self) -> int:
        return self.f.arity - 1

    def children(self):
        return (self.f,)


def count_loops(e: Expr) -> int:
    """Number of ``primrec`` and ``mu`` nodes."""
    return sum(isinstance(x, (PrimRec, Mu)) for x in e.walk())


# --- text form ----------------------------------------------------------------

def format_expr(e: Expr) -> str:
    if isinstance(e, Const):
        return f"const {e.value}/{e.arity}"
    if isinstance(e, Succ):
        return "succ"
    if isinstance(e, Proj):
        return f"proj {e.i}/{e.n}"
    if isinstance(e, Tuple):
        return "tuple(" + ", ".join(map(format_expr, e.parts)) + ")"
    if isinstance(e, Compose):
        return f"comp({format_expr(e.g)}, {format_expr(e.f)})"
    if isinstance(e, PrimRec):
        return f"primrec({format_expr(e.f)}, {format_expr(e.g)})"
    if isinstance(e, Mu):
        return f"mu({format_expr(e.f)})"
    raise TypeError(f"not an expression: {e!r}")


_TOKEN = re.compile(r"\s*(?:(\d+)\s*/\s*(\d+)|([A-Za-z_][A-Za-z0-9_']*)|([(),]))")


class _Parser:
    def __init__(self, text: str, env: dict):
        self.text = text
        self.env = env
        self.tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise MalformedInput(f"unexpected character at {text[pos:pos + 10]!r}")
            if m.group(1) is not None:
                self.tokens.append(("frac", (int(m.group(1)), int(m.group(2)))))
            elif m.group(3) is not None:
                self.tokens.append(("name", m.group(3)))
            else:
                self.tokens.append(("punct", m.group(4)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind, value=None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            raise MalformedInput(f"expected {want!r}, found {tok[1]!r} in {self.text!r}")
        self.i += 1
        return tok[1]

    def args(self, n: int | None) -> list[Expr]:
        self.take("punct", "(")
        out = [self.expr()]
        while self.peek() == ("punct", ","):
            self.i += 1
            out.append(self.expr())
        self.take("punct", ")")
        if n is not None and len(out) != n:
            raise MalformedInput(f"expected {n} arguments, got {len(out)}")
        return out

    def expr(self) -> Expr:
        name = self.take("name")
        try:
            if name == "const":
                k, n = self.take("frac")
                return Const(k, n)
            if name == "proj":
                i, n = self.take("frac")
                return Proj(i, n)
            if name == "succ":
                return Succ()
            if name == "tuple":
                return Tuple(tuple(self.args(None)))
            if name == "comp":
                return Compose(*self.args(2))
            if name == "primrec":
                return PrimRec(*self.args(2))
            if name == "mu":
                return Mu(*self.args(1))
        except ConstructionError as exc:
            raise MalformedInput(str(exc)) from exc
        if name in self.env:
            return self.env[name]
        raise MalformedInput(f"unknown name {name!r}")

    def done(self):
        if self.i != len(self.tokens):
            raise MalformedInput(f"trailing input after expression in {self.text!r}")


def parse_expr(text: str, env: dict | None = None) -> Expr:
    p = _Parser(text, env or {})
    e = p.expr()
    p.done()
    return e


def parse_program(text: str) -> tuple[Expr, dict]:
    """Parse definitions; return the last one and the full environment."""
    env: dict[str, Expr] = {}
    last = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, eq, body = line.partition("=")
        if not eq:
            name, body = None, line
        elif not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name.strip()):
            raise MalformedInput(f"line {lineno}: bad name {name.strip()!r}")
        try:
            last = parse_expr(body, env)
        except MalformedInput as exc:
            raise MalformedInput(f"line {lineno}: {exc}") from exc
        if name is not None:
            env[name.strip()] = last
    if last is None:
        raise MalformedInput("empty program")
    return last, env
