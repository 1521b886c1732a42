"""Input/output conventions mapping naturals to tapes and back.

A machine's ``io`` header names one of these:

``binary``
    one natural, least significant bit at cell 0, digits to the right,
    ``1`` for a one digit and blank for zero (so 0 is the blank tape).
``unary``
    naturals as runs of ``1`` separated by single blanks starting at cell 0;
    the output is the number of ``1`` cells left on the tape.
``tracks:K:IN:OUT``
    multi-track cells, each symbol a ``K``-bit string; bit 0 marks cell 0
    and bit ``r + 1`` holds register ``r`` in unary from cell 0 rightward.
    ``IN`` and ``OUT`` are comma-separated register lists.
``recode:W:SYMS:BASE``
    a binary recoding of a machine using convention ``BASE``; each original
    cell becomes ``W`` bits and ``SYMS`` lists the original symbols in code
    order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedInput
from .tm import Tape, TuringMachine


def _as_tuple(args) -> tuple:
    if isinstance(args, int):
        return (args,)
    return tuple(args)


def _single(values: tuple):
    return values[0] if len(values) == 1 else values


@dataclass(frozen=True)
class BinaryCodec:
    one: str = "1"

    spec = "binary"

    def encode(self, args, blank: str) -> Tape:
        (n,) = _as_tuple(args)
        if n < 0:
            raise MalformedInput("naturals only")
        return Tape(tuple(self.one if n >> k & 1 else blank for k in range(n.bit_length())), (), blank)

    def decode(self, tape: Tape) -> int:
        return sum(1 << k for k, a in enumerate(tape.right) if a == self.one)


@dataclass(frozen=True)
class UnaryCodec:
    one: str = "1"

    spec = "unary"

    def encode(self, args, blank: str) -> Tape:
        cells: list[str] = []
        for i, n in enumerate(_as_tuple(args)):
            if n < 0:
                raise MalformedInput("naturals only")
            if i:
                cells.append(blank)
            cells.extend([self.one] * n)
        return Tape(tuple(cells), (), blank)

    def decode(self, tape: Tape) -> int:
        return sum(1 for _, a in tape.items() if a == self.one)


@dataclass(frozen=True)
class TrackCodec:
    width: int
    inputs: tuple
    outputs: tuple

    @property
    def spec(self) -> str:
        ins = ",".join(map(str, self.inputs))
        outs = ",".join(map(str, self.outputs))
        return f"tracks:{self.width}:{ins}:{outs}"

    def encode(self, args, blank: str) -> Tape:
        values = _as_tuple(args)
        if len(values) != len(self.inputs):
            raise MalformedInput(f"expected {len(self.inputs)} arguments, got {len(values)}")
        length = max([1, *values])
        cells = []
        for c in range(length):
            bits = ["0"] * self.width
            if c == 0:
                bits[0] = "1"
            for r, v in zip(self.inputs, values):
                if c < v:
                    bits[r + 1] = "1"
            cells.append("".join(bits))
        return Tape(tuple(cells), (), blank)

    def decode(self, tape: Tape):
        return _single(tuple(
            sum(1 for _, a in tape.items() if a[r + 1] == "1") for r in self.outputs
        ))


@dataclass(frozen=True)
class RecodedCodec:
    base: object
    symbols: tuple
    width: int

    @property
    def spec(self) -> str:
        return f"recode:{self.width}:{','.join(self.symbols)}:{self.base.spec}"

    def code(self, symbol: str) -> str:
        return format(self.symbols.index(symbol), f"0{self.width}b")[::-1]

    def encode(self, args, blank: str) -> Tape:
        inner = self.base.encode(args, self.symbols[0])
        bits = {}
        for n, a in inner.items():
            for j, b in enumerate(self.code(a)):
                bits[n * self.width + j] = b
        cells = {k: ("1" if b == "1" else blank) for k, b in bits.items()}
        return Tape.from_cells(cells, blank)

    def decode(self, tape: Tape):
        lo, hi = tape.span()
        first = lo - (lo % self.width)
        cells = {}
        for start in range(first, hi, self.width):
            word = "".join("1" if tape[start + j] == "1" else "0" for j in range(self.width))
            index = int(word[::-1], 2)
            if index >= len(self.symbols):
                raise MalformedInput(f"bit block {word} at {start} is not a symbol code")
            if index:
                cells[start // self.width] = self.symbols[index]
        return self.base.decode(Tape.from_cells(cells, self.symbols[0]))


def codec_from_spec(spec: str | None):
    spec = (spec or "binary").strip()
    if spec == "binary":
        return BinaryCodec()
    if spec == "unary":
        return UnaryCodec()
    kind, _, rest = spec.partition(":")
    try:
        if kind == "tracks":
            width, ins, outs = rest.split(":")
            return TrackCodec(int(width), _ints(ins), _ints(outs))
        if kind == "recode":
            width, syms, base = rest.split(":", 2)
            return RecodedCodec(codec_from_spec(base), tuple(syms.split(",")), int(width))
    except ValueError as exc:
        raise MalformedInput(f"bad io spec {spec!r}: {exc}") from exc
    raise MalformedInput(f"unknown io spec {spec!r}")


def _ints(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x)


def codec_for(m: TuringMachine):
    return codec_from_spec(m.io)
