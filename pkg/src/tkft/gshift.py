"""Generalized shifts on two-sided binary sequences and the Turing machine compiler.

Configuration embedding
-----------------------
A configuration ``(q, t)`` is written into a binary word with fixed-width
codes: ``code(t[-1])`` occupies positions ``[0, wA)``, ``code(q)`` occupies
``[wA, wA + wQ)``, then ``t[0], t[1], ...`` follow to the right and
``t[-2], t[-3], ...`` extend to the left of position 0.  Placing the left
neighbour inside the window lets a window of length ``r = 2 wA + wQ`` see
everything a left move needs.  The blank symbol has the all-zero code so
finite tapes give finite words; state codes are never all-zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import ConstructionError, DecodeError, MalformedInput, Refused
from .tm import Configuration, Tape, TuringMachine


def _trim(bits: Iterable[int]) -> tuple:
    bits = tuple(bits)
    end = len(bits)
    while end and not bits[end - 1]:
        end -= 1
    return bits[:end]


@dataclass(frozen=True)
class BiWord:
    """Two-sided binary sequence with finitely many ones.

    ``pos[k]`` is position ``k`` and ``neg[k]`` is position ``-(k + 1)``.
    """

    pos: tuple = ()
    neg: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pos", _trim(int(b) for b in self.pos))
        object.__setattr__(self, "neg", _trim(int(b) for b in self.neg))

    @classmethod
    def from_ones(cls, ones: Iterable[int]) -> "BiWord":
        ones = set(ones)
        if not ones:
            return cls()
        hi, lo = max(ones), min(ones)
        pos = [1 if n in ones else 0 for n in range(0, max(hi + 1, 0))]
        neg = [1 if n in ones else 0 for n in range(-1, min(lo, 0) - 1, -1)]
        return cls(tuple(pos), tuple(neg))

    @classmethod
    def parse(cls, text: str) -> "BiWord":
        """Parse ``"...01 | 1011..."``; the bar marks position 0, dots are optional."""
        body = text.replace(".", "").replace(" ", "")
        if body.count("|") > 1:
            raise MalformedInput(f"more than one '|' in {text!r}")
        left, _, right = body.rpartition("|") if "|" in body else ("", "", body)
        if set(left + right) - {"0", "1"}:
            raise MalformedInput(f"BiWord literal must be binary: {text!r}")
        return cls(tuple(int(c) for c in right), tuple(int(c) for c in reversed(left)))

    def __getitem__(self, n: int) -> int:
        if n >= 0:
            return self.pos[n] if n < len(self.pos) else 0
        k = -n - 1
        return self.neg[k] if k < len(self.neg) else 0

    def window(self, start: int, length: int) -> tuple:
        return tuple(self[n] for n in range(start, start + length))

    def ones(self) -> list[int]:
        return [-k - 1 for k in range(len(self.neg) - 1, -1, -1) if self.neg[k]] + [
            k for k, b in enumerate(self.pos) if b
        ]

    def span(self) -> tuple[int, int]:
        return -len(self.neg), len(self.pos)

    def relabel(self, s: int) -> "BiWord":
        """Return ``t'`` with ``t'[n] = t[n + s]``."""
        lo, hi = self.span()
        hi = max(hi, 0)
        return BiWord(
            tuple(self[p] for p in range(s, hi)),
            tuple(self[p] for p in range(s - 1, lo - 1, -1)),
        )

    def __str__(self) -> str:
        left = "".join(map(str, reversed(self.neg)))
        right = "".join(map(str, self.pos))
        return f"...{left} | {right}..."


def _word(text: str) -> tuple:
    return tuple(int(c) for c in text)


def _text(word: tuple) -> str:
    return "".join(map(str, word))


@dataclass(frozen=True, eq=False)
class GeneralizedShift:
    """Window rewrite ``G`` and shift ``F`` on windows of length ``r``."""

    r: int
    G: Mapping[tuple, tuple]
    F: Mapping[tuple, int]

    def __post_init__(self):
        if self.r < 1:
            raise ConstructionError("window length must be positive")
        G = {tuple(k): tuple(v) for k, v in self.G.items()}
        F = {tuple(k): int(v) for k, v in self.F.items()}
        for w in itertools.product((0, 1), repeat=self.r):
            if w not in G or w not in F:
                raise ConstructionError(f"G and F must be defined on window {_text(w)}")
            if len(G[w]) != self.r or set(G[w]) - {0, 1}:
                raise ConstructionError(f"G({_text(w)}) must be a binary word of length {self.r}")
        if len(G) != 2 ** self.r or len(F) != 2 ** self.r:
            raise ConstructionError("G and F have entries outside {0,1}^r")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "F", F)

    def __eq__(self, other):
        if not isinstance(other, GeneralizedShift):
            return NotImplemented
        return (self.r, self.G, self.F) == (other.r, other.G, other.F)

    __hash__ = None

    @classmethod
    def from_function(cls, r: int, fn: Callable[[tuple], tuple[tuple, int]]) -> "GeneralizedShift":
        G, F = {}, {}
        for w in itertools.product((0, 1), repeat=r):
            G[w], F[w] = fn(w)
        return cls(r, G, F)

    @classmethod
    def from_table(cls, r: int, table: Mapping[str, tuple[str, int]]) -> "GeneralizedShift":
        """Windows absent from ``table`` act as the identity with zero shift."""
        entries = {_word(w): (_word(b), s) for w, (b, s) in table.items()}
        return cls.from_function(r, lambda w: entries.get(w, (w, 0)))

    def windows(self) -> list[tuple]:
        return list(itertools.product((0, 1), repeat=self.r))

    def shifts(self) -> set[int]:
        return set(self.F.values())


def apply(S: GeneralizedShift, t: BiWord) -> BiWord:
    """Replace positions ``0..r-1`` by ``G(w)`` and relabel by ``s = F(w)``."""
    w = t.window(0, S.r)
    b, s = S.G[w], S.F[w]
    pos = list(t.pos) + [0] * max(0, S.r - len(t.pos))
    pos[: S.r] = b
    return BiWord(tuple(pos), t.neg).relabel(s)


def iterate(S: GeneralizedShift, t: BiWord, k: int) -> BiWord:
    for _ in range(k):
        t = apply(S, t)
    return t


# --- bijectivity -------------------------------------------------------------

@dataclass(frozen=True)
class BijectivityReport:
    bijective: bool
    collision: tuple[tuple, tuple] | None = None
    surjective: bool | None = None

    def __bool__(self):
        return self.bijective


def _image_key(S: GeneralizedShift, w: tuple) -> tuple[int, tuple]:
    return S.F[w], S.G[w]


def is_bijective(S: GeneralizedShift) -> BijectivityReport:
    """Check that the image cylinders of all windows are pairwise disjoint.

    The image of the window ``w`` is the cylinder fixing positions
    ``[-s, r - s)`` to ``G(w)``; the shift is injective exactly when no two
    of these intersect.  ``surjective`` additionally reports whether the
    images cover every word (only computed when all windows share a shift).
    """
    r = S.r
    groups: dict[int, dict[tuple, tuple]] = {}
    for w in S.windows():
        s, b = _image_key(S, w)
        group = groups.setdefault(s, {})
        if b in group:
            return BijectivityReport(False, (group[b], w))
        group[b] = w
    shifts = sorted(groups)
    for s1, s2 in itertools.combinations(shifts, 2):
        lo = max(-s1, -s2)
        hi = min(r - s1, r - s2)
        g1, g2 = groups[s1], groups[s2]
        if lo >= hi:
            # positions fixed by the two images do not overlap
            return BijectivityReport(False, (next(iter(g1.values())), next(iter(g2.values()))))
        proj: dict[tuple, tuple] = {}
        for b, w in g1.items():
            proj.setdefault(b[lo + s1: hi + s1], w)
        for b, w in g2.items():
            hit = proj.get(b[lo + s2: hi + s2])
            if hit is not None:
                return BijectivityReport(False, (hit, w))
    surjective = None
    if len(shifts) == 1:
        surjective = len(groups[shifts[0]]) == 2 ** r
    return BijectivityReport(True, None, surjective)


class InverseShift:
    """Exact inverse of an injective generalized shift on its image."""

    def __init__(self, S: GeneralizedShift):
        report = is_bijective(S)
        if not report:
            raise Refused("generalized shift is not injective", report.collision)
        self.S = S
        self._lookup = {_image_key(S, w): w for w in S.windows()}
        self._shifts = sorted(S.shifts())

    def __call__(self, t: BiWord) -> BiWord:
        r = self.S.r
        for s in self._shifts:
            b = t.window(-s, r)
            w = self._lookup.get((s, b))
            if w is not None:
                pre = t.relabel(-s)
                pos = list(pre.pos) + [0] * max(0, r - len(pre.pos))
                pos[:r] = w
                return BiWord(tuple(pos), pre.neg)
        raise DecodeError(f"{t} is not in the image of the shift")


# --- Turing machine embedding -------------------------------------------------

def _bits(i: int, width: int) -> tuple:
    return tuple(int(c) for c in format(i, f"0{width}b"))


@dataclass(frozen=True, eq=False)
class Encoding:
    """Fixed-width binary codes for states and symbols."""

    state_codes: Mapping[str, tuple]
    symbol_codes: Mapping[str, tuple]

    def __post_init__(self):
        sc = {q: tuple(c) for q, c in self.state_codes.items()}
        ac = {a: tuple(c) for a, c in self.symbol_codes.items()}
        object.__setattr__(self, "state_codes", sc)
        object.__setattr__(self, "symbol_codes", ac)
        for name, codes in (("state", sc), ("symbol", ac)):
            if not codes:
                raise ConstructionError(f"empty {name} encoding")
            widths = {len(c) for c in codes.values()}
            if len(widths) != 1 or 0 in widths:
                raise ConstructionError(f"{name} codes must share one positive width")
            if len(set(codes.values())) != len(codes):
                raise ConstructionError(f"{name} codes collide")
        if any(not any(c) for c in sc.values()):
            raise ConstructionError("the all-zero word is reserved and cannot code a state")
        object.__setattr__(self, "_state_of", {c: q for q, c in sc.items()})
        object.__setattr__(self, "_symbol_of", {c: a for a, c in ac.items()})

    @property
    def wQ(self) -> int:
        return len(next(iter(self.state_codes.values())))

    @property
    def wA(self) -> int:
        return len(next(iter(self.symbol_codes.values())))

    @classmethod
    def default(cls, m: TuringMachine) -> "Encoding":
        """States get ``1..|Q|`` and symbols ``0..|A|-1`` (blank first) in binary."""
        wQ = len(m.states).bit_length()
        symbols = [m.blank] + [a for a in m.alphabet if a != m.blank]
        wA = max(1, (len(symbols) - 1).bit_length())
        return cls(
            {q: _bits(i + 1, wQ) for i, q in enumerate(m.states)},
            {a: _bits(i, wA) for i, a in enumerate(symbols)},
        )

    def check_machine(self, m: TuringMachine):
        missing = set(m.states) - set(self.state_codes)
        if missing:
            raise ConstructionError(f"no code for states {sorted(missing)}")
        missing = set(m.alphabet) - set(self.symbol_codes)
        if missing:
            raise ConstructionError(f"no code for symbols {sorted(missing)}")
        if any(self.symbol_codes[m.blank]):
            raise ConstructionError("the blank symbol must have the all-zero code")

    def state(self, code: tuple) -> str | None:
        return self._state_of.get(code)

    def symbol(self, code: tuple) -> str | None:
        return self._symbol_of.get(code)

    def to_dict(self) -> dict:
        return {
            "states": {q: _text(c) for q, c in self.state_codes.items()},
            "symbols": {a: _text(c) for a, c in self.symbol_codes.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Encoding":
        return cls({q: _word(c) for q, c in d["states"].items()},
                   {a: _word(c) for a, c in d["symbols"].items()})


def cell_offset(enc: Encoding, n: int) -> int:
    """First bit position of tape cell ``n`` in the configuration embedding."""
    if n >= 0:
        return enc.wA + enc.wQ + n * enc.wA
    return (n + 1) * enc.wA


def encode_config(m: TuringMachine, enc: Encoding, c: Configuration) -> BiWord:
    enc.check_machine(m)
    ones = [enc.wA + j for j, b in enumerate(enc.state_codes[c.state]) if b]
    for n, a in c.tape.items():
        base = cell_offset(enc, n)
        ones.extend(base + j for j, b in enumerate(enc.symbol_codes[a]) if b)
    return BiWord.from_ones(ones)


def decode_config(m: TuringMachine, enc: Encoding, t: BiWord) -> Configuration:
    enc.check_machine(m)
    wA, wQ = enc.wA, enc.wQ
    q = enc.state(t.window(wA, wQ))
    if q is None:
        raise DecodeError(f"no valid state code at positions {wA}..{wA + wQ - 1} of {t}")
    lo, hi = t.span()
    cells = {}
    n = 0
    while cell_offset(enc, n) < hi:
        cells[n] = _decode_symbol(enc, t, n)
        n += 1
    n = -1
    while cell_offset(enc, n) + wA > lo:
        cells[n] = _decode_symbol(enc, t, n)
        n -= 1
    return Configuration(q, Tape.from_cells(cells, m.blank))


def _decode_symbol(enc: Encoding, t: BiWord, n: int) -> str:
    code = t.window(cell_offset(enc, n), enc.wA)
    a = enc.symbol(code)
    if a is None:
        raise DecodeError(f"bits {_text(code)} for tape cell {n} are not a symbol code")
    return a


def compile_tm(m: TuringMachine, enc: Encoding | None = None) -> GeneralizedShift:
    """Generalized shift conjugate to the machine's step map under the embedding.

    The window reads ``[code(t[-1]) | code(q) | code(t[0])]``.  A right move
    rewrites it to ``[code(t[-1]) | code(a') | code(q')]`` and shifts by
    ``wA``; a left move rewrites it to ``[code(q') | code(t[-1]) | code(a')]``
    and shifts by ``-wA``.  Every other window is fixed with zero shift.
    """
    enc = enc or Encoding.default(m)
    enc.check_machine(m)
    wA, wQ = enc.wA, enc.wQ
    r = 2 * wA + wQ
    codes = enc.symbol_codes
    states = enc.state_codes

    def rule(w):
        left, qc, head = w[:wA], w[wA:wA + wQ], w[wA + wQ:]
        q, a, b = enc.state(qc), enc.symbol(head), enc.symbol(left)
        if q is None or q in m.halting or a is None or b is None:
            return w, 0
        q2, a2, s = m.delta[(q, a)]
        if s == 1:
            return left + codes[a2] + states[q2], wA
        return states[q2] + left + codes[a2], -wA

    return GeneralizedShift.from_function(r, rule)


# --- table format --------------------------------------------------------------

def format_shift(S: GeneralizedShift) -> str:
    lines = [f"# generalized shift, window length {S.r}"]
    for w in S.windows():
        lines.append(f"{_text(w)} -> {_text(S.G[w])} {S.F[w]}")
    return "\n".join(lines) + "\n"


def parse_shift(text: str) -> GeneralizedShift:
    G, F = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            lhs, rhs = line.split("->")
            b, s = rhs.split()
            w = _word(lhs.strip())
            G[w], F[w] = _word(b), int(s)
        except ValueError as exc:
            raise MalformedInput(f"line {lineno}: expected 'w -> G(w) F(w)': {raw!r}") from exc
    if not G:
        raise MalformedInput("empty shift table")
    r = len(next(iter(G)))
    try:
        return GeneralizedShift(r, G, F)
    except ConstructionError as exc:
        raise MalformedInput(str(exc)) from exc


def shift_to_dict(S: GeneralizedShift) -> dict:
    return {"r": S.r, "table": [[_text(w), _text(S.G[w]), S.F[w]] for w in S.windows()]}


def shift_from_dict(d: dict) -> GeneralizedShift:
    try:
        G = {_word(w): _word(b) for w, b, _ in d["table"]}
        F = {_word(w): int(s) for w, _, s in d["table"]}
        return GeneralizedShift(int(d["r"]), G, F)
    except (KeyError, TypeError, ValueError, ConstructionError) as exc:
        raise MalformedInput(f"malformed shift document: {exc}") from exc


# --- reference shifts -------------------------------------------------------------

def identity_shift(r: int = 1) -> GeneralizedShift:
    return GeneralizedShift.from_function(r, lambda w: (w, 0))


def full_shift(s: int = 1, r: int = 1) -> GeneralizedShift:
    return GeneralizedShift.from_function(r, lambda w: (w, s))


def swap_shift() -> GeneralizedShift:
    """``r = 2``, ``G(0,1) = (1,0)``, ``F(0,1) = 3``; other windows fixed with no shift."""
    return GeneralizedShift.from_table(2, {"01": ("10", 3)})


def swap_completion() -> GeneralizedShift:
    """Bijective completion: swap ``01`` and ``10``, fix ``00`` and ``11``, shift all by 3."""
    return GeneralizedShift.from_table(
        2, {"00": ("00", 3), "01": ("10", 3), "10": ("01", 3), "11": ("11", 3)}
    )
