"""Machine graphs, their thickened skeletons, and the reaching function.

Each state of a machine becomes a disc carrying tapes as points of the
square Cantor set; each transition becomes a tube whose block map rewrites
the scanned cell and recentres the tape.  Following a point through the
tubes until it lands on a halting disc reproduces the machine's run.
"""

from __future__ import annotations

import csv
import functools
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .cantor import (BlockMap, CantorPoint, _leading_bits, check_volume, kappa,
                     kappa_inv, rectangles_overlap, window_pieces)
from .errors import ConstructionError, Refused, SkeletonIntegrityError
from .gshift import BiWord, Encoding
from .tapeio import codec_for
from .tm import Tape, TuringMachine, is_reversible

INFINITY = math.inf


class Edge(NamedTuple):
    source: str
    target: str
    read: str
    write: str
    shift: int

    @property
    def label(self) -> str:
        return f"{self.read}/{self.write},{self.shift:+d}"


@dataclass(frozen=True, eq=False)
class MachineGraph:
    machine: TuringMachine
    vertices: tuple
    start: str
    stops: frozenset
    edges: tuple


def build_graph(m: TuringMachine) -> MachineGraph:
    if m.initial in m.halting:
        raise ConstructionError(f"start state {m.initial!r} is halting; the graph has no incoming disc")
    edges = tuple(Edge(t.state, t.target, t.read, t.write, t.shift) for t in m.transitions())
    return MachineGraph(m, tuple(m.states), m.initial, frozenset(m.halting), edges)


# --- cycle rank -------------------------------------------------------------------

def cycle_rank(vertices: Iterable, edges: Iterable[tuple]) -> int:
    """``|E| - |V| + components`` of an undirected multigraph (loops allowed)."""
    parent = {v: v for v in vertices}

    def root(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    n_edges = 0
    components = len(parent)
    for e in edges:
        a, b = root(e[0]), root(e[1])
        n_edges += 1
        if a != b:
            parent[a] = b
            components -= 1
    return n_edges - len(parent) + components


def betti1(g: MachineGraph) -> int:
    return cycle_rank(g.vertices, ((e.source, e.target) for e in g.edges))


# --- skeleton -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Tube:
    edge: Edge
    blockmap: BlockMap
    length: Fraction


@dataclass(frozen=True, eq=False)
class BordismSkeleton:
    graph: MachineGraph
    encoding: Encoding
    tubes: tuple
    reversible: bool
    _by_read: dict = field(repr=False)

    @property
    def discs(self) -> tuple:
        return self.graph.vertices

    @property
    def incoming(self) -> str:
        return self.graph.start

    @property
    def outgoing(self) -> frozenset:
        return self.graph.stops

    def tubes_from(self, q: str) -> list[Tube]:
        return [t for t in self.tubes if t.edge.source == q]

    def rescaled(self, factor) -> "BordismSkeleton":
        factor = Fraction(factor)
        if factor <= 0:
            raise ValueError("tube lengths must stay positive")
        tubes = tuple(Tube(t.edge, t.blockmap, t.length * factor) for t in self.tubes)
        return _assemble(self.graph, self.encoding, tubes, self.reversible)


@functools.lru_cache(maxsize=4096)
def _rewrite_blockmap(read: tuple, write: tuple, shift: int) -> BlockMap:
    bm = BlockMap(window_pieces(read, write, shift))
    if not check_volume(bm):
        raise ConstructionError(f"rewrite {read}->{write} shift {shift} is not area preserving")
    return bm


def _tube_blockmap(enc: Encoding, e: Edge) -> BlockMap:
    # tubes sharing a read code, write code and shift share one block map
    return _rewrite_blockmap(enc.symbol_codes[e.read], enc.symbol_codes[e.write], e.shift * enc.wA)


def _assemble(g, enc, tubes, reversible) -> BordismSkeleton:
    by_read = {(t.edge.source, enc.symbol_codes[t.edge.read]): t for t in tubes}
    return BordismSkeleton(g, enc, tubes, reversible, by_read)


def thicken(g: MachineGraph, enc: Encoding | None = None, lengths=1,
            allow_irreversible: bool = False) -> BordismSkeleton:
    """Build one tube per edge.

    ``lengths`` is either one positive rational for every tube or a mapping
    from :class:`Edge` to a length.  Irreversible machines are refused
    unless ``allow_irreversible`` is set.
    """
    m = g.machine
    report = is_reversible(m)
    if not report and not allow_irreversible:
        raise Refused("machine is not reversible; pass allow_irreversible to thicken anyway",
                      report.collision)
    enc = enc or Encoding.default(m)
    enc.check_machine(m)
    tubes = []
    for e in g.edges:
        length = Fraction(lengths.get(e, 1) if isinstance(lengths, dict) else lengths)
        if length <= 0:
            raise ConstructionError(f"tube {e.label} needs a positive length")
        tubes.append(Tube(e, _tube_blockmap(enc, e), length))
    sk = _assemble(g, enc, tuple(tubes), bool(report))
    overlap = disjointness_violation(sk)
    if overlap is not None:
        raise ConstructionError(f"tubes {overlap[0].edge.label} and {overlap[1].edge.label} overlap")
    return sk


def disjointness_violation(sk: BordismSkeleton) -> tuple[Tube, Tube] | None:
    """A pair of tubes at one disc whose source blocks intersect, if any."""
    for q in sk.discs:
        blocks = [(t, pc.source) for t in sk.tubes_from(q) for pc in t.blockmap.pieces]
        if not blocks:
            continue
        # blocks with different prefixes of the shortest length cannot meet
        k = min(b.p for _, b in blocks)
        buckets = defaultdict(list)
        for tb in blocks:
            buckets[tb[1].u[:k]].append(tb)
        for group in buckets.values():
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    if group[i][0] is not group[j][0] and rectangles_overlap(group[i][1], group[j][1]):
                        return group[i][0], group[j][0]
    return None


# --- tapes as Cantor points -------------------------------------------------------

def tape_word(enc: Encoding, tape: Tape) -> BiWord:
    """Cell ``n`` occupies bit positions ``n*wA .. n*wA + wA - 1``."""
    wA = enc.wA
    ones = []
    for n, a in tape.items():
        ones.extend(n * wA + j for j, b in enumerate(enc.symbol_codes[a]) if b)
    return BiWord.from_ones(ones)


def word_tape(enc: Encoding, blank: str, t: BiWord) -> Tape:
    wA = enc.wA
    lo, hi = t.span()
    cells = {}
    for n in range(lo // wA, -(-hi // wA)):
        a = enc.symbol(t.window(n * wA, wA))
        if a is None:
            raise SkeletonIntegrityError(f"bits at cell {n} are not a symbol code")
        cells[n] = a
    return Tape.from_cells(cells, blank)


# --- reaching function ----------------------------------------------------------

class Reached(NamedTuple):
    output: object


class Diverged(NamedTuple):
    fuel: int


@dataclass(frozen=True)
class ReachTrace:
    input: object
    path: tuple
    outcome: Reached | Diverged
    steps: int
    length: Fraction
    final_state: str
    final_tape: Tape

    @property
    def reached(self) -> bool:
        return isinstance(self.outcome, Reached)

    def states(self) -> list[str]:
        if not self.path:
            return [self.final_state]
        return [e.source for e, _ in self.path] + [self.final_state]

    def log(self) -> str:
        lines = [f"input {self.input}"]
        for k, (e, p) in enumerate(self.path):
            lines.append(f"{k} {e.source} -> {e.target} [{e.label}] at {p}")
        lines.append(f"outcome {outcome_text(self.outcome)} steps {self.steps} length {self.length}")
        return "\n".join(lines) + "\n"


def outcome_text(o) -> str:
    if isinstance(o, Reached):
        return f"Reached({o.output})"
    return f"Diverged({o.fuel})"


def reach(sk: BordismSkeleton, n, fuel: int, record: bool = True) -> ReachTrace:
    """Push the encoded input through tubes until a halting disc or ``fuel`` runs out."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    m = sk.graph.machine
    enc = sk.encoding
    codec = codec_for(m)
    tape = codec.encode(n, m.blank)
    p = kappa(tape_word(enc, tape))
    x, y = p.x, p.y
    q = sk.incoming
    wA = enc.wA
    path = []
    steps = 0
    length = Fraction(0)
    stops = sk.outgoing
    by_read = sk._by_read
    while q not in stops:
        if steps == fuel:
            break
        code = _leading_bits(x, wA)
        tube = by_read.get((q, code))
        if tube is None:
            raise SkeletonIntegrityError(f"no tube leaves disc {q!r} at ({x}, {y})")
        if record:
            path.append((tube.edge, CantorPoint(x, y)))
        piece = tube.blockmap.find(x, y)
        x, y = piece(x, y)
        q = tube.edge.target
        length += tube.length
        steps += 1
    final = word_tape(enc, m.blank, kappa_inv((x, y)))
    outcome = Reached(codec.decode(final)) if q in stops else Diverged(fuel)
    return ReachTrace(n, tuple(path), outcome, steps, length, q, final)


def length_complexity(sk: BordismSkeleton, n, fuel: int):
    """Total tube length travelled, or :data:`INFINITY` if the halting disc is not reached."""
    trace = reach(sk, n, fuel, record=False)
    return trace.length if trace.reached else INFINITY


class ConjectureRow(NamedTuple):
    n: object
    lenc: object
    steps: object
    ratio: object


def conjecture_report(sk: BordismSkeleton, inputs: Iterable, fuel: int) -> list[ConjectureRow]:
    rows = []
    for n in inputs:
        trace = reach(sk, n, fuel, record=False)
        if not trace.reached:
            rows.append(ConjectureRow(n, "inf", "diverged", "diverged"))
            continue
        ratio = trace.length / trace.steps if trace.steps else Fraction(1)
        rows.append(ConjectureRow(n, trace.length, trace.steps, ratio))
    return rows


# --- emitters ------------------------------------------------------------------

def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_dot(g: MachineGraph) -> str:
    name = g.machine.name or "machine"
    out = [f"digraph {_dot_id(name)} {{", "  rankdir=LR;"]
    for v in g.vertices:
        attrs = []
        if v == g.start:
            attrs.append("style=bold")
        attrs.append("shape=doublecircle" if v in g.stops else "shape=circle")
        out.append(f"  {_dot_id(v)} [{', '.join(attrs)}];")
    for e in g.edges:
        out.append(f"  {_dot_id(e.source)} -> {_dot_id(e.target)} [label={_dot_id(e.label)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def _fmt_input(n) -> str:
    return ",".join(map(str, n)) if isinstance(n, (tuple, list)) else str(n)


def traces_csv(traces: Sequence[ReachTrace]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "outcome", "steps", "length"])
    for t in traces:
        w.writerow([_fmt_input(t.input), outcome_text(t.outcome), t.steps, t.length])
    return buf.getvalue()


def conjecture_csv(rows: Sequence[ConjectureRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "lenc", "steps", "ratio"])
    for r in rows:
        w.writerow([_fmt_input(r.n), r.lenc, r.steps, r.ratio])
    return buf.getvalue()
