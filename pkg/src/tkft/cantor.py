"""Exact embedding of binary words into the square Cantor set, and block maps.

``kappa`` sends a word ``t`` to ``(x, y)`` with
``x = sum_{n>=0} 2 t[n] 3^-(n+1)`` and ``y = sum_{k>=1} 2 t[-k] 3^-k``, so
position ``-1`` is the leading ternary digit of ``y``.  All arithmetic uses
:class:`fractions.Fraction`; nothing here touches floating point.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainGapError, MalformedInput, NotInCantorImage, Refused
from .gshift import BiWord, GeneralizedShift, is_bijective



@functools.lru_cache(maxsize=None)
def _pow3(e: int) -> Fraction:
    return Fraction(3) ** e


def ternary_digits(x: Fraction) -> tuple:
    """Finite base-3 expansion of ``x`` in ``[0, 1)``, trailing zeros dropped."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise NotInCantorImage(f"{x} is outside [0, 1)")
    den = x.denominator
    depth = 0
    while den % 3 == 0:
        den //= 3
        depth += 1
    if den != 1:
        raise NotInCantorImage(f"{x} has no finite ternary expansion")
    n = x.numerator
    digits = []
    for _ in range(depth):
        n, d = divmod(n, 3)
        digits.append(d)
    return tuple(reversed(digits))


def _cantor_bits(x: Fraction) -> tuple:
    digits = ternary_digits(x)
    if 1 in digits:
        raise NotInCantorImage(f"{x} has a ternary digit 1")
    return tuple(d // 2 for d in digits)


def _value(bits: Sequence[int]) -> Fraction:
    num = 0
    for b in bits:
        num = 3 * num + 2 * b
    return Fraction(num, 3 ** len(bits))


@dataclass(frozen=True)
class CantorPoint:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        _cantor_bits(self.x)
        _cantor_bits(self.y)

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


def kappa(t: BiWord) -> CantorPoint:
    return CantorPoint(_value(t.pos), _value(t.neg))


def kappa_inv(p) -> BiWord:
    x, y = (p.x, p.y) if isinstance(p, CantorPoint) else p
    return BiWord(_cantor_bits(Fraction(x)), _cantor_bits(Fraction(y)))


# --- blocks and block maps --------------------------------------------------------

@dataclass(frozen=True)
class CantorBlock:
    """Words with positions ``0..p-1`` equal to ``u`` and ``-1..-q`` equal to ``v``."""

    u: tuple = ()
    v: tuple = ()

    @property
    def p(self) -> int:
        return len(self.u)

    @property
    def q(self) -> int:
        return len(self.v)

    @property
    def x_lo(self) -> Fraction:
        return _value(self.u)

    @property
    def y_lo(self) -> Fraction:
        return _value(self.v)

    @property
    def width(self) -> Fraction:
        return _pow3(-self.p)

    @property
    def height(self) -> Fraction:
        return _pow3(-self.q)

    @property
    def area(self) -> Fraction:
        return self.width * self.height

    def rectangle(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        x0, y0 = self.x_lo, self.y_lo
        return x0, x0 + self.width, y0, y0 + self.height

    def contains(self, x: Fraction, y: Fraction) -> bool:
        x0, x1, y0, y1 = self.rectangle()
        return x0 <= x <= x1 and y0 <= y <= y1

    def contains_word(self, t: BiWord) -> bool:
        return t.window(0, self.p) == self.u and tuple(t[-k] for k in range(1, self.q + 1)) == self.v

    def __str__(self) -> str:
        return f"({''.join(map(str, self.u))};{''.join(map(str, self.v))})"


def rectangles_overlap(a: CantorBlock, b: CantorBlock) -> bool:
    # Closed hulls of two cylinders meet exactly when the cylinders are nested,
    # i.e. when both prefixes agree on their common length.
    p, q = min(a.p, b.p), min(a.q, b.q)
    return a.u[:p] == b.u[:p] and a.v[:q] == b.v[:q]


@dataclass(frozen=True)
class Piece:
    """Affine correspondence ``(x, y) -> (alpha x + beta, gamma y + delta)``."""

    source: CantorBlock
    target: CantorBlock
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: Fraction

    def __call__(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        return self.alpha * x + self.beta, self.gamma * y + self.delta

    @classmethod
    def between(cls, source: CantorBlock, target: CantorBlock,
                alpha: Fraction, gamma: Fraction) -> "Piece":
        """Piece sending the lower-left corner of ``source`` to that of ``target``."""
        alpha, gamma = Fraction(alpha), Fraction(gamma)
        return cls(source, target, alpha, target.x_lo - alpha * source.x_lo,
                   gamma, target.y_lo - gamma * source.y_lo)

    def maps_onto_target(self) -> bool:
        x0, x1, y0, y1 = self.source.rectangle()
        tx0, tx1, ty0, ty1 = self.target.rectangle()
        if self.alpha <= 0 or self.gamma <= 0:
            return False
        return self(x0, y0) == (tx0, ty0) and self(x1, y1) == (tx1, ty1)


def window_pieces(w: tuple, b: tuple, s: int) -> list[Piece]:
    """Affine pieces realizing "write ``b`` over window ``w``, then shift by ``s``".

    A single affine map exists only when every digit that crosses between
    the two coordinates is fixed, so the source block is refined: positions
    ``r..s-1`` are enumerated when ``s > r`` and positions ``-1..s`` when
    ``s < 0``.
    """
    r = len(w)
    extra_right = max(0, s - r)
    extra_left = max(0, -s)
    pieces = []
    for tail in itertools.product((0, 1), repeat=extra_right):
        for v in itertools.product((0, 1), repeat=extra_left):
            u = tuple(w) + tail
            written = tuple(b) + tail
            # constrained cells of the rewritten word, keyed by position
            cells = {n: written[n] for n in range(len(written))}
            cells.update({-k - 1: v[k] for k in range(len(v))})
            p, q = len(u), len(v)
            tu = tuple(cells[n + s] for n in range(0, p - s))
            tv = tuple(cells[-k + s] for k in range(1, q + s + 1))
            pieces.append(Piece.between(CantorBlock(u, v), CantorBlock(tu, tv),
                                        _pow3(s), _pow3(-s)))
    return pieces


class BlockMap:
    """Finite family of affine pieces between Cantor blocks."""

    def __init__(self, pieces: Iterable[Piece]):
        self.pieces = tuple(pieces)
        index: dict[tuple[int, int], dict[tuple, Piece]] = {}
        for piece in self.pieces:
            key = (piece.source.p, piece.source.q)
            index.setdefault(key, {})[(piece.source.u, piece.source.v)] = piece
        self._index = sorted(index.items())

    def __len__(self):
        return len(self.pieces)

    def __eq__(self, other):
        if not isinstance(other, BlockMap):
            return NotImplemented
        return self.pieces == other.pieces

    __hash__ = None

    def find(self, x: Fraction, y: Fraction) -> Piece:
        for (p, q), table in self._index:
            u = _leading_bits(x, p)
            v = _leading_bits(y, q)
            if u is None or v is None:
                continue
            piece = table.get((u, v))
            if piece is not None:
                return piece
        # boundary points of a block have a ternary 1 digit; fall back to geometry
        for piece in self.pieces:
            if piece.source.contains(x, y):
                return piece
        raise DomainGapError(f"({x}, {y}) lies outside every source block")


def _leading_bits(x: Fraction, depth: int) -> tuple | None:
    if depth == 0:
        return ()
    scaled = x * 3 ** depth
    n = scaled.numerator // scaled.denominator
    if n >= 3 ** depth:
        return None
    bits = []
    for _ in range(depth):
        n, d = divmod(n, 3)
        if d == 1:
            return None
        bits.append(d // 2)
    return tuple(reversed(bits))


def apply_blockmap(f: BlockMap, p) -> CantorPoint | tuple[Fraction, Fraction]:
    """Image of ``p`` under the piece whose source block contains it.

    Returns a :class:`CantorPoint` when ``p`` is one, otherwise a pair of
    fractions.
    """
    if isinstance(p, CantorPoint):
        piece = f.find(p.x, p.y)
        return CantorPoint(*piece(p.x, p.y))
    x, y = Fraction(p[0]), Fraction(p[1])
    return f.find(x, y)(x, y)


def gshift_to_blockmap(S: GeneralizedShift) -> BlockMap:
    report = is_bijective(S)
    if not report:
        raise Refused("generalized shift is not injective", report.collision)
    pieces = []
    for w in S.windows():
        pieces.extend(window_pieces(w, S.G[w], S.F[w]))
    return BlockMap(pieces)


# --- reports ------------------------------------------------------------------------

@dataclass(frozen=True)
class VolumeReport:
    ok: bool
    violations: tuple
    source_area: Fraction
    target_area: Fraction
    pieces: int

    def __bool__(self):
        return self.ok


def check_volume(f: BlockMap) -> VolumeReport:
    violations = []
    for i, piece in enumerate(f.pieces):
        if piece.alpha * piece.gamma != 1:
            violations.append((i, piece, "scale product is not 1"))
        elif not piece.maps_onto_target():
            violations.append((i, piece, "affine map does not send source onto target"))
    src = sum((pc.source.area for pc in f.pieces), Fraction(0))
    tgt = sum((pc.target.area for pc in f.pieces), Fraction(0))
    ok = not violations and src == tgt
    return VolumeReport(ok, tuple(violations), src, tgt, len(f.pieces))


@dataclass(frozen=True)
class DisjointnessReport:
    ok: bool
    source_overlap: tuple | None
    target_overlap: tuple | None

    def __bool__(self):
        return self.ok


def _first_overlap(blocks: list[CantorBlock]) -> tuple | None:
    for i, j in itertools.combinations(range(len(blocks)), 2):
        if rectangles_overlap(blocks[i], blocks[j]):
            return i, j
    return None


def check_disjoint(f: BlockMap) -> DisjointnessReport:
    src = _first_overlap([pc.source for pc in f.pieces])
    tgt = _first_overlap([pc.target for pc in f.pieces])
    return DisjointnessReport(src is None and tgt is None, src, tgt)


# --- text format and SVG -------------------------------------------------------------

def _exp3(value: Fraction) -> str:
    e = 0
    v = Fraction(value)
    if v <= 0:
        return str(v)
    while v.denominator == 1 and v.numerator % 3 == 0:
        v /= 3
        e += 1
    while v.numerator == 1 and v.denominator % 3 == 0:
        v *= 3
        e -= 1
    return f"3^{e}" if v == 1 else str(value)


def format_blockmap(f: BlockMap) -> str:
    lines = []
    for pc in f.pieces:
        lines.append(f"source{pc.source} -> target{pc.target} "
                     f"scale({_exp3(pc.alpha)}, {_exp3(pc.gamma)})")
    return "\n".join(lines) + "\n"


def _parse_block(text: str) -> CantorBlock:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")) or ";" not in text:
        raise MalformedInput(f"bad block {text!r}")
    u, v = text[1:-1].split(";")
    if set(u + v) - {"0", "1"}:
        raise MalformedInput(f"bad block {text!r}")
    return CantorBlock(tuple(int(c) for c in u), tuple(int(c) for c in v))


def _parse_scale(text: str) -> Fraction:
    text = text.strip()
    if text.startswith("3^"):
        return _pow3(int(text[2:]))
    return Fraction(text)


def parse_blockmap(text: str) -> BlockMap:
    pieces = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            src, rest = line.split("->")
            tgt, scale = rest.split("scale")
            src = src.strip()
            tgt = tgt.strip()
            if not src.startswith("source") or not tgt.startswith("target"):
                raise ValueError("expected source(...) -> target(...)")
            a, g = scale.strip().strip("()").split(",")
            pieces.append(Piece.between(_parse_block(src[6:]), _parse_block(tgt[6:]),
                                        _parse_scale(a), _parse_scale(g)))
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInput(f"line {lineno}: {exc}: {raw!r}") from exc
    return BlockMap(pieces)


def blockmap_to_dict(f: BlockMap) -> dict:
    return {"pieces": [
        {"source": [_bits_text(pc.source.u), _bits_text(pc.source.v)],
         "target": [_bits_text(pc.target.u), _bits_text(pc.target.v)],
         "alpha": str(pc.alpha), "gamma": str(pc.gamma)}
        for pc in f.pieces
    ]}


def blockmap_from_dict(d: dict) -> BlockMap:
    try:
        return BlockMap(
            Piece.between(_parse_block(f"({s[0]};{s[1]})"), _parse_block(f"({t[0]};{t[1]})"),
                          Fraction(e["alpha"]), Fraction(e["gamma"]))
            for e in d["pieces"]
            for s, t in [(e["source"], e["target"])]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"malformed block map document: {exc}") from exc


def _bits_text(bits) -> str:
    return "".join(map(str, bits))


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def blockmap_svg(f: BlockMap, size: int = 540) -> str:
    """Source blocks filled, target blocks dashed, one colour per piece."""
    pad = 20
    scale = size - 2 * pad

    def rect(block: CantorBlock, style: str) -> str:
        x0, x1, y0, y1 = block.rectangle()
        # SVG y grows downward; put y = 0 at the bottom
        return (f'<rect x="{pad + float(x0) * scale:.4f}" y="{pad + (1 - float(y1)) * scale:.4f}" '
                f'width="{float(x1 - x0) * scale:.4f}" height="{float(y1 - y0) * scale:.4f}" {style}/>')

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect x="{pad}" y="{pad}" width="{scale}" height="{scale}" '
           f'fill="none" stroke="black" stroke-width="0.5"/>']
    for i, pc in enumerate(f.pieces):
        colour = _PALETTE[i % len(_PALETTE)]
        out.append(f'<g class="piece" id="piece{i}">')
        out.append(rect(pc.source, f'class="source" fill="{colour}" fill-opacity="0.35" stroke="{colour}"'))
        out.append(rect(pc.target, f'class="target" fill="none" stroke="{colour}" stroke-dasharray="4 2"'))
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
