"""Turing machines from flowcharts, and recoding onto a two-symbol alphabet.

The machine for a flowchart with ``R`` registers works on ``K = R + 1``
tracks, so each cell holds a ``K``-bit string.  Track 0 marks cell 0 and
track ``r + 1`` holds register ``r`` in unary from cell 0 rightward.  Every
instruction starts with the head on cell 0, finishes one cell to the right
of where it stopped working, and then walks back to the marker.
"""

from __future__ import annotations

import itertools

from ..errors import ConstructionError
from ..tapeio import RecodedCodec, TrackCodec, codec_for
from ..tm import TuringMachine
from .flowchart import Clear, Copy, Dec, Flowchart, Goto, Halt, Inc, Load, Move, back_edges

R, L = 1, -1
HALT = "halt"


def _set(sym: str, track: int, bit: str) -> str:
    return sym[:track] + bit + sym[track + 1:]


class _MachineBuilder:
    def __init__(self, width: int):
        self.width = width
        self.symbols = ["".join(bits) for bits in itertools.product("01", repeat=width)]
        self.delta: dict[tuple, tuple] = {}
        self.states: list[str] = []

    def state(self, name: str, rule):
        """Add state ``name`` whose move on symbol ``a`` is ``rule(a)``."""
        self.states.append(name)
        for a in self.symbols:
            self.delta[(name, a)] = rule(a)


def flowchart_to_tm(fc: Flowchart, name: str = "") -> TuringMachine:
    width = fc.registers + 1
    mb = _MachineBuilder(width)
    start: dict[tuple, str] = {}
    order = list(fc.blocks)

    def resolve(label: str, seen=()) -> tuple:
        """Instruction a jump to ``label`` really lands on, skipping empty gotos."""
        blk = fc.blocks[label]
        if not blk.ops and isinstance(blk.term, Goto):
            if label in seen:
                return ("spin",)
            return resolve(blk.term.target, seen + (label,))
        return (label, 0)

    def entry(ins: tuple) -> str:
        if ins == ("spin",):
            return "spin"
        label, k = ins
        blk = fc.blocks[label]
        if k == len(blk.ops):
            if isinstance(blk.term, Halt):
                return HALT
            if isinstance(blk.term, Goto):
                return entry(resolve(blk.term.target))
        return f"{label}.{k}"

    returns: dict[str, str] = {}

    def ret(target: str) -> str:
        """State that walks back to cell 0 and then enters ``target`` there."""
        if target not in returns:
            returns[target] = f"ret>{target}"
        return returns[target]

    for label in order:
        blk = fc.blocks[label]
        for k, op in enumerate(blk.ops):
            here = f"{label}.{k}"
            after = ret(entry((label, k + 1)))
            _emit_op(mb, here, op, after)
        term = blk.term
        if isinstance(term, Dec):
            here = f"{label}.{len(blk.ops)}"
            _emit_dec(mb, here, term.r + 1, ret(entry(resolve(term.nonzero))),
                      ret(entry(resolve(term.zero))))

    for target, name_ret in returns.items():
        fwd = f"fwd>{target}"
        mb.state(name_ret, lambda a, n=name_ret, f=fwd: (f, a, R) if a[0] == "1" else (n, a, L))
        mb.state(fwd, lambda a, t=target: (t, a, L))
    used = {q for q, _, _ in mb.delta.values()}
    if "spin" in used:
        mb.state("spin", lambda a: ("spin", a, R))

    initial = entry(resolve(fc.entry))
    if initial == HALT:
        initial = "init"
        mb.state("init", lambda a: (ret(HALT), a, R))
        # the return states for HALT were not built yet in this case
        mb.state(ret(HALT), lambda a: (f"fwd>{HALT}", a, R) if a[0] == "1" else (ret(HALT), a, L))
        mb.state(f"fwd>{HALT}", lambda a: (HALT, a, L))
    io = TrackCodec(width, fc.inputs, fc.outputs).spec
    states = [initial] + [q for q in dict.fromkeys(mb.states) if q != initial] + [HALT]
    return TuringMachine(states, initial, [HALT], mb.symbols, mb.symbols[0], mb.delta,
                         io=io, name=name)


def _emit_op(mb: _MachineBuilder, here: str, op, after: str):
    if isinstance(op, Inc):
        t = op.r + 1
        mb.state(here, lambda a: (here, a, R) if a[t] == "1" else (after, _set(a, t, "1"), R))
    elif isinstance(op, Clear):
        t = op.r + 1
        mb.state(here, lambda a: (here, _set(a, t, "0"), R) if a[t] == "1" else (after, a, R))
    elif isinstance(op, Load):
        t = op.r + 1
        names = [here] + [f"{here}:{j}" for j in range(1, op.k + 1)]
        for j in range(op.k):
            mb.state(names[j], lambda a, nxt=names[j + 1]: (nxt, _set(a, t, "1"), R))
        last = names[-1]
        mb.state(last, lambda a: (last, _set(a, t, "0"), R) if a[t] == "1" else (after, a, R))
    elif isinstance(op, (Copy, Move)):
        d, s = op.dst + 1, op.src + 1
        clear_src = isinstance(op, Move)
        if d == s:
            mb.state(here, lambda a: (after, a, R))
            return

        def rule(a):
            if a[d] == "0" and a[s] == "0":
                return after, a, R
            b = _set(a, d, a[s])
            if clear_src:
                b = _set(b, s, "0")
            return here, b, R

        mb.state(here, rule)
    else:
        raise ConstructionError(f"unknown operation {op!r}")


def _emit_dec(mb: _MachineBuilder, here: str, t: int, nonzero: str, zero: str):
    scan, back = f"{here}:scan", f"{here}:back"
    mb.state(here, lambda a: (scan, a, R) if a[t] == "1" else (zero, a, R))
    mb.state(scan, lambda a: (scan, a, R) if a[t] == "1" else (back, a, L))
    mb.state(back, lambda a: (nonzero, _set(a, t, "0"), R))


# --- binary recoding ---------------------------------------------------------------

def to_binary(m: TuringMachine) -> TuringMachine:
    """Simulate ``m`` over the alphabet ``{0, 1}`` with ``W``-bit cells.

    Symbol ``i`` in the order ``[blank, others...]`` is stored least
    significant bit first.  One step of ``m`` takes ``3W - 2`` steps: read
    ``W`` bits moving right, write them back moving left, then travel to the
    neighbouring cell.
    """
    symbols = [m.blank] + [a for a in m.alphabet if a != m.blank]
    for a in symbols:
        if "," in a or ":" in a:
            raise ConstructionError(f"symbol {a!r} cannot be listed in a recode header")
    width = max(1, (len(symbols) - 1).bit_length())
    codec = RecodedCodec(codec_for(m), tuple(symbols), width)
    code = {a: codec.code(a) for a in symbols}
    index = {code[a]: a for a in symbols}
    delta: dict[tuple, tuple] = {}
    states: list[str] = list(m.states)
    pending_write: set[tuple] = set()
    pending_move: set[tuple] = set()

    def read_name(q, prefix: str) -> str:
        return q if not prefix else f"{q}/r{prefix}"

    def write_name(q2, a2, s, j) -> str:
        return f"{q2}/w{symbols.index(a2)}{'R' if s == R else 'L'}{j}"

    def move_name(q2, s, k) -> str:
        return f"{q2}/m{'R' if s == R else 'L'}{k}"

    invalid = None
    for q in m.working_states:
        for n in range(width):
            for prefix in itertools.product("01", repeat=n):
                prefix = "".join(prefix)
                here = read_name(q, prefix)
                if prefix:
                    states.append(here)
                for b in "01":
                    bits = prefix + b
                    if len(bits) < width:
                        delta[(here, b)] = (read_name(q, bits), b, R)
                        continue
                    a = index.get(bits)
                    if a is None:
                        invalid = invalid or "invalid"
                        delta[(here, b)] = (invalid, b, R)
                        continue
                    q2, a2, s = m.delta[(q, a)]
                    c2 = code[a2]
                    if width == 1:
                        delta[(here, b)] = (q2, c2[0], s)
                    else:
                        pending_write.add((q2, a2, s, width - 2))
                        delta[(here, b)] = (write_name(q2, a2, s, width - 2), c2[width - 1], L)
    while pending_write:
        q2, a2, s, j = pending_write.pop()
        here = write_name(q2, a2, s, j)
        states.append(here)
        bit = code[a2][j]
        if j > 0:
            pending_write.add((q2, a2, s, j - 1))
            nxt, mv = write_name(q2, a2, s, j - 1), L
        else:
            pending_move.add((q2, s, width - 1))
            nxt, mv = move_name(q2, s, width - 1), s
        for b in "01":
            delta[(here, b)] = (nxt, bit, mv)
    while pending_move:
        q2, s, k = pending_move.pop()
        here = move_name(q2, s, k)
        states.append(here)
        if k > 1:
            pending_move.add((q2, s, k - 1))
            nxt = move_name(q2, s, k - 1)
        else:
            nxt = q2
        for b in "01":
            delta[(here, b)] = (nxt, b, s)
    halting = [q for q in m.states if q in m.halting]
    if invalid:
        states.append(invalid)
        halting.append(invalid)
    states = list(dict.fromkeys(states))
    return TuringMachine(states, m.initial, halting, ("0", "1"), "0", delta,
                         io=codec.spec, name=f"{m.name}-binary" if m.name else "")


def machine_loop_count(m: TuringMachine) -> int:
    """Back edges of the state graph under depth-first search from the start state.

    Successors are visited in alphabet order; this treats the machine's own
    control graph as a flowchart.
    """
    succ = {q: [m.delta[(q, a)][0] for a in m.alphabet] for q in m.working_states}
    return len(back_edges(succ, m.initial))
