"""Register flowcharts: compilation from expressions, interpretation, loop counting.

Registers hold naturals.  A block is a list of straight-line operations
followed by one terminator:

    inc r | clear r | const r k | copy d s (d := s) | move d s (d := s; s := 0)
    goto B | dec r B_nonzero B_zero | halt

``dec`` decrements ``r`` and jumps to ``B_nonzero`` when ``r > 0``,
otherwise it jumps to ``B_zero``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from ..errors import MalformedInput
from .ast import Compose, Const, Expr, Mu, PrimRec, Proj, Succ, Tuple
from .interp import OutOfFuel, Value


class Inc(NamedTuple):
    r: int


class Clear(NamedTuple):
    r: int


class Load(NamedTuple):
    r: int
    k: int


class Copy(NamedTuple):
    dst: int
    src: int


class Move(NamedTuple):
    dst: int
    src: int


class Goto(NamedTuple):
    target: str


class Dec(NamedTuple):
    r: int
    nonzero: str
    zero: str


class Halt(NamedTuple):
    pass


def successors(term) -> tuple:
    if isinstance(term, Goto):
        return (term.target,)
    if isinstance(term, Dec):
        return (term.nonzero, term.zero)
    return ()


@dataclass
class Block:
    ops: list = field(default_factory=list)
    term: object = None


@dataclass
class Flowchart:
    blocks: dict
    entry: str
    registers: int
    inputs: tuple
    outputs: tuple

    def registers_used(self) -> set[int]:
        used = set(self.inputs) | set(self.outputs)
        for b in self.blocks.values():
            for op in b.ops:
                used.update(op[:1] if isinstance(op, (Inc, Clear, Load)) else op)
            if isinstance(b.term, Dec):
                used.add(b.term.r)
        return used


# --- interpreter --------------------------------------------------------------

def run_flowchart(fc: Flowchart, args, fuel: int = 100_000) -> Value | OutOfFuel:
    """Execute ``fc``; each operation and each terminator costs one unit of fuel."""
    args = (args,) if isinstance(args, int) else tuple(args)
    if len(args) != len(fc.inputs):
        raise MalformedInput(f"expected {len(fc.inputs)} arguments, got {len(args)}")
    reg = [0] * fc.registers
    for r, v in zip(fc.inputs, args):
        reg[r] = v
    label = fc.entry
    left = fuel
    while True:
        block = fc.blocks[label]
        for op in block.ops:
            if left == 0:
                return OutOfFuel(fuel)
            left -= 1
            if isinstance(op, Inc):
                reg[op.r] += 1
            elif isinstance(op, Clear):
                reg[op.r] = 0
            elif isinstance(op, Load):
                reg[op.r] = op.k
            elif isinstance(op, Copy):
                reg[op.dst] = reg[op.src]
            else:
                v = reg[op.src]
                reg[op.src] = 0
                reg[op.dst] = v
        if left == 0:
            return OutOfFuel(fuel)
        left -= 1
        term = block.term
        if isinstance(term, Halt):
            return Value(tuple(reg[r] for r in fc.outputs))
        if isinstance(term, Goto):
            label = term.target
        elif reg[term.r]:
            reg[term.r] -= 1
            label = term.nonzero
        else:
            label = term.zero


# --- loop counting ------------------------------------------------------------

def back_edges(succ: dict, entry) -> list[tuple]:
    """Back edges of a depth-first search from ``entry`` visiting successors in order."""
    state = {entry: 1}  # 1 on stack, 2 finished
    stack = [(entry, iter(succ.get(entry, ())))]
    found = []
    while stack:
        node, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            state[node] = 2
            stack.pop()
        elif state.get(nxt) == 1:
            found.append((node, nxt))
        elif nxt not in state:
            state[nxt] = 1
            stack.append((nxt, iter(succ.get(nxt, ()))))
    return found


def loop_count(fc: Flowchart) -> int:
    return len(back_edges({k: successors(b.term) for k, b in fc.blocks.items()}, fc.entry))


# --- compiler -----------------------------------------------------------------

class _Builder:
    def __init__(self):
        self.blocks: dict[str, Block] = {}
        self.free: list[int] = []
        self.registers = 0
        self.current = self.new_block()

    def new_block(self) -> str:
        label = f"b{len(self.blocks)}"
        self.blocks[label] = Block()
        return label

    def emit(self, op):
        self.blocks[self.current].ops.append(op)

    def end(self, term, then: str | None = None):
        self.blocks[self.current].term = term
        if then is not None:
            self.current = then

    def alloc(self) -> int:
        if self.free:
            return self.free.pop()
        self.registers += 1
        return self.registers - 1

    def release(self, r: int):
        self.free.append(r)


class _Slot(NamedTuple):
    r: int
    owned: bool  # False when the register belongs to someone else and is only read


def _uses_first(g: Expr) -> bool:
    """Whether ``g`` can depend on its first argument (conservative)."""
    if isinstance(g, Proj):
        return g.i == 1
    if isinstance(g, (Const,)):
        return False
    if isinstance(g, Tuple):
        return any(_uses_first(p) for p in g.parts)
    if isinstance(g, Compose):
        return _uses_first(g.f)
    return True


def _compile(e: Expr, args: list[_Slot], b: _Builder) -> list[_Slot]:
    if isinstance(e, Const):
        r = b.alloc()
        b.emit(Load(r, e.value))
        return [_Slot(r, True)]
    if isinstance(e, Succ):
        src = args[0]
        if src.owned:
            b.emit(Inc(src.r))
            return [src]
        r = b.alloc()
        b.emit(Copy(r, src.r))
        b.emit(Inc(r))
        return [_Slot(r, True)]
    if isinstance(e, Proj):
        a = args[e.i - 1]
        return [_Slot(a.r, False)]
    if isinstance(e, Tuple):
        if len(e.parts) > 1:
            # components share their arguments, so none may consume one in place
            args = [_Slot(a.r, False) for a in args]
        return [s for p in e.parts for s in _compile(p, args, b)]
    if isinstance(e, Compose):
        mid = _compile(e.f, args, b)
        regs = [s.r for s in mid]
        mid = [s if regs.count(s.r) == 1 else _Slot(s.r, False) for s in mid]
        owned = {s.r for s in mid if s.owned}
        out = _compile(e.g, mid, b)
        out_regs = [s.r for s in out]
        # a projection of an intermediate we own hands that ownership on
        out = [_Slot(s.r, True) if s.r in owned and out_regs.count(s.r) == 1 else s for s in out]
        for r in owned - set(out_regs):
            b.release(r)
        return out
    if isinstance(e, PrimRec):
        y = args[0]
        rest = [_Slot(s.r, False) for s in args[1:]]
        acc = _own(_compile(e.f, rest, b)[0], b)
        c = b.alloc()
        b.emit(Copy(c, y.r))
        track_i = _uses_first(e.g)
        i = None
        if track_i:
            i = b.alloc()
            b.emit(Load(i, 0))
        head = b.new_block()
        b.end(Goto(head), head)
        body, done = b.new_block(), b.new_block()
        b.end(Dec(c, body, done), body)
        i_slot = _Slot(i, False) if track_i else _Slot(c, False)  # unused placeholder
        t = _compile(e.g, [i_slot, _Slot(acc.r, False)] + rest, b)[0]
        if t.r != acc.r:
            b.emit(Move(acc.r, t.r) if t.owned else Copy(acc.r, t.r))
            if t.owned:
                b.release(t.r)
            ops = b.blocks[b.current].ops
            if ops[-3:] == [Copy(t.r, acc.r), Inc(t.r), Move(acc.r, t.r)]:
                ops[-3:] = [Inc(acc.r)]
        if track_i:
            b.emit(Inc(i))
        b.end(Goto(head), done)
        b.release(c)
        if track_i:
            b.release(i)
        return [acc]
    if isinstance(e, Mu):
        y = b.alloc()
        b.emit(Load(y, 0))
        head = b.new_block()
        b.end(Goto(head), head)
        v = _own(_compile(e.f, [_Slot(y, False)] + [_Slot(s.r, False) for s in args], b)[0], b)
        step, done = b.new_block(), b.new_block()
        b.end(Dec(v.r, step, done), step)
        b.emit(Inc(y))
        b.end(Goto(head), done)
        b.release(v.r)
        return [_Slot(y, True)]
    raise TypeError(f"not an expression: {e!r}")


def _own(s: _Slot, b: _Builder) -> _Slot:
    if s.owned:
        return s
    r = b.alloc()
    b.emit(Copy(r, s.r))
    return _Slot(r, True)


def compile_to_flowchart(e: Expr) -> Flowchart:
    """One loop per ``primrec`` and per ``mu`` node; everything else is straight-line."""
    b = _Builder()
    inputs = [b.alloc() for _ in range(e.arity)]
    out = _compile(e, [_Slot(r, False) for r in inputs], b)
    b.end(Halt())
    fc = Flowchart(b.blocks, "b0", max(b.registers, 1), tuple(inputs), tuple(s.r for s in out))
    return compact_registers(fc)


def compact_registers(fc: Flowchart) -> Flowchart:
    """Renumber registers so that only the ones actually used remain, in order."""
    used = sorted(fc.registers_used())
    ren = {r: k for k, r in enumerate(used)}

    def op(o):
        return type(o)(*(ren[x] if i < (1 if isinstance(o, Load) else len(o)) else x
                         for i, x in enumerate(o)))

    blocks = {}
    for label, blk in fc.blocks.items():
        term = blk.term._replace(r=ren[blk.term.r]) if isinstance(blk.term, Dec) else blk.term
        blocks[label] = Block([op(o) for o in blk.ops], term)
    return Flowchart(blocks, fc.entry, max(len(used), 1),
                     tuple(ren[r] for r in fc.inputs), tuple(ren[r] for r in fc.outputs))


# --- text and DOT -------------------------------------------------------------

def _op_text(op) -> str:
    if isinstance(op, Inc):
        return f"inc r{op.r}"
    if isinstance(op, Clear):
        return f"clear r{op.r}"
    if isinstance(op, Load):
        return f"const r{op.r} {op.k}"
    if isinstance(op, Copy):
        return f"copy r{op.dst} r{op.src}"
    return f"move r{op.dst} r{op.src}"


def _term_text(t) -> str:
    if isinstance(t, Goto):
        return f"goto {t.target}"
    if isinstance(t, Dec):
        return f"dec r{t.r} {t.nonzero} {t.zero}"
    return "halt"


def format_flowchart(fc: Flowchart) -> str:
    lines = [
        f"registers: {fc.registers}",
        f"inputs: {' '.join(f'r{r}' for r in fc.inputs)}",
        f"outputs: {' '.join(f'r{r}' for r in fc.outputs)}",
        f"entry: {fc.entry}",
    ]
    for label, blk in fc.blocks.items():
        body = "; ".join(_op_text(op) for op in blk.ops)
        lines.append(f"{label}: {body} | {_term_text(blk.term)}")
    return "\n".join(lines) + "\n"


def _reg(tok: str) -> int:
    if not tok.startswith("r") or not tok[1:].isdigit():
        raise MalformedInput(f"bad register {tok!r}")
    return int(tok[1:])


def _parse_op(text: str):
    parts = text.split()
    kind, rest = parts[0], parts[1:]
    try:
        if kind == "inc" and len(rest) == 1:
            return Inc(_reg(rest[0]))
        if kind == "clear" and len(rest) == 1:
            return Clear(_reg(rest[0]))
        if kind == "const" and len(rest) == 2:
            return Load(_reg(rest[0]), int(rest[1]))
        if kind in ("copy", "move") and len(rest) == 2:
            return (Copy if kind == "copy" else Move)(_reg(rest[0]), _reg(rest[1]))
    except ValueError as exc:
        raise MalformedInput(f"bad operation {text!r}") from exc
    raise MalformedInput(f"bad operation {text!r}")


def _parse_term(text: str):
    parts = text.split()
    if parts == ["halt"]:
        return Halt()
    if len(parts) == 2 and parts[0] == "goto":
        return Goto(parts[1])
    if len(parts) == 4 and parts[0] == "dec":
        return Dec(_reg(parts[1]), parts[2], parts[3])
    raise MalformedInput(f"bad terminator {text!r}")


def parse_flowchart(text: str) -> Flowchart:
    header = {}
    blocks: dict[str, Block] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise MalformedInput(f"cannot parse {raw!r}")
        key = key.strip()
        if key in ("registers", "inputs", "outputs", "entry"):
            header[key] = value.strip()
            continue
        ops_text, bar, term_text = value.partition("|")
        if not bar:
            raise MalformedInput(f"block {key} lacks a terminator")
        ops = [_parse_op(t) for t in ops_text.split(";") if t.strip()]
        blocks[key] = Block(ops, _parse_term(term_text))
    try:
        fc = Flowchart(blocks, header["entry"], int(header["registers"]),
                       tuple(_reg(t) for t in header["inputs"].split()),
                       tuple(_reg(t) for t in header["outputs"].split()))
    except (KeyError, ValueError) as exc:
        raise MalformedInput(f"flowchart header incomplete: {exc}") from exc
    check_flowchart(fc)
    return fc


def check_flowchart(fc: Flowchart):
    if fc.entry not in fc.blocks:
        raise MalformedInput(f"entry block {fc.entry!r} is missing")
    for label, blk in fc.blocks.items():
        for t in successors(blk.term):
            if t not in fc.blocks:
                raise MalformedInput(f"block {label} jumps to unknown block {t!r}")
    bad = [r for r in fc.registers_used() if not 0 <= r < fc.registers]
    if bad:
        raise MalformedInput(f"registers {sorted(bad)} exceed the register file of {fc.registers}")


def flowchart_dot(fc: Flowchart) -> str:
    out = ["digraph flowchart {", "  node [shape=box, fontname=monospace];"]
    for label, blk in fc.blocks.items():
        body = "\\l".join([*(_op_text(op) for op in blk.ops), _term_text(blk.term)]) + "\\l"
        style = ", style=bold" if label == fc.entry else ""
        out.append(f'  {label} [label="{label}:\\l{body}"{style}];')
    for label, blk in fc.blocks.items():
        t = blk.term
        if isinstance(t, Goto):
            out.append(f"  {label} -> {t.target};")
        elif isinstance(t, Dec):
            out.append(f'  {label} -> {t.nonzero} [label=">0"];')
            out.append(f'  {label} -> {t.zero} [label="=0"];')
    out.append("}")
    return "\n".join(out) + "\n"


def flowchart_to_dict(fc: Flowchart) -> dict:
    return {
        "registers": fc.registers,
        "inputs": list(fc.inputs),
        "outputs": list(fc.outputs),
        "entry": fc.entry,
        "blocks": {label: {"ops": [_op_text(op) for op in blk.ops], "term": _term_text(blk.term)}
                   for label, blk in fc.blocks.items()},
    }


def flowchart_from_dict(d: dict) -> Flowchart:
    try:
        blocks = {label: Block([_parse_op(t) for t in b["ops"]], _parse_term(b["term"]))
                  for label, b in d["blocks"].items()}
        fc = Flowchart(blocks, d["entry"], int(d["registers"]),
                       tuple(int(r) for r in d["inputs"]), tuple(int(r) for r in d["outputs"]))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedInput(f"malformed flowchart document: {exc}") from exc
    check_flowchart(fc)
    return fc
