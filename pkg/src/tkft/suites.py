"""Seeded verification suites behind ``tkft verify``.

Each suite returns a :class:`SuiteResult` whose report is a pure function of
the seed and inputs (no timings, no addresses), so two runs give identical
bytes.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import corpus
from .bordism import INFINITY, betti1, build_graph, conjecture_report, cycle_rank, length_complexity, reach, thicken
from .cantor import BlockMap, apply_blockmap, check_disjoint, check_volume, format_blockmap, gshift_to_blockmap, kappa
from .gshift import BiWord, Encoding, GeneralizedShift, apply, compile_tm, encode_config
from .murec.backend import flowchart_to_tm, machine_loop_count
from .murec.flowchart import compile_to_flowchart, loop_count
from .murec.interp import OutOfFuel as EvalOutOfFuel, evaluate
from .tapeio import codec_for
from .tm import Halted, OutOfFuel, format_machine, random_configuration, random_machine, run, step

DEFAULT_FUEL = 100_000
DEFAULT_SEED = 0


@dataclass
class SuiteResult:
    name: str
    seed: int | None
    lines: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def report(self) -> str:
        head = f"suite {self.name}" + (f" seed {self.seed}" if self.seed is not None else "")
        body = list(self.lines)
        for f in self.failures[:5]:
            body.append("counterexample:")
            body.extend("  " + ln for ln in f.rstrip("\n").splitlines())
        if len(self.failures) > 5:
            body.append(f"... {len(self.failures) - 5} more failures")
        verdict = "PASS" if self.passed else f"FAIL ({len(self.failures)} failures)"
        return "\n".join([head, *body, f"result {verdict}"]) + "\n"


def random_biword(rng: random.Random, radius: int = 12, max_ones: int = 10) -> BiWord:
    return BiWord.from_ones(rng.randrange(-radius, radius) for _ in range(rng.randrange(max_ones + 1)))


# --- conjugacy ----------------------------------------------------------------

def conjugacy_tm_gshift(seed: int = DEFAULT_SEED, machines: int = 20, configs: int = 100,
                        steps: int = 50) -> SuiteResult:
    res = SuiteResult("conjugacy-tm-gshift", seed)
    rng = random.Random(seed)
    checked = 0
    for i in range(machines):
        m = random_machine(rng, rng.randint(2, 4))
        enc = Encoding.default(m)
        S = compile_tm(m, enc)
        for _ in range(configs):
            c = random_configuration(m, rng)
            t = encode_config(m, enc, c)
            for k in range(1, steps + 1):
                nxt = step(m, c)
                c = nxt.config if isinstance(nxt, Halted) else nxt
                t = apply(S, t)
                checked += 1
                if encode_config(m, enc, c) != t:
                    res.failures.append(f"machine {i} step {k}\n{format_machine(m)}config {c}\n"
                                        f"encode {encode_config(m, enc, c)}\nshift  {t}")
                    break
    res.lines.append(f"{machines} machines x {configs} configurations x {steps} steps, "
                     f"{checked} comparisons")
    return res


def conjugacy_gshift_blockmap(seed: int = DEFAULT_SEED, words: int = 1000,
                              shifts: dict | None = None) -> SuiteResult:
    res = SuiteResult("conjugacy-gshift-blockmap", seed)
    rng = random.Random(seed)
    shifts = shifts or {name: corpus.shift(name) for name in corpus.SHIFTS}
    for name, S in shifts.items():
        f = gshift_to_blockmap(S)
        bad = 0
        for _ in range(words):
            t = random_biword(rng)
            lhs, rhs = kappa(apply(S, t)), apply_blockmap(f, kappa(t))
            if lhs != rhs:
                bad += 1
                res.failures.append(f"shift {name} word {t}\nkappa(apply) {lhs}\nblockmap {rhs}")
        res.lines.append(f"{name}: r={S.r} pieces={len(f)} words={words} mismatches={bad}")
    return res


# --- volume -------------------------------------------------------------------

def _corpus_blockmaps() -> dict[str, BlockMap]:
    maps = {f"shift {n}": gshift_to_blockmap(corpus.shift(n)) for n in corpus.SHIFTS}
    for name in corpus.MACHINES:
        sk = thicken(build_graph(corpus.machine(name)), allow_irreversible=True)
        for t in sk.tubes:
            maps[f"tube {name} {t.edge.source}->{t.edge.target} {t.edge.label}"] = t.blockmap
    return maps


def volume(blockmaps: dict[str, BlockMap] | None = None) -> SuiteResult:
    res = SuiteResult("volume", None)
    blockmaps = blockmaps if blockmaps is not None else _corpus_blockmaps()
    for name, f in blockmaps.items():
        rep = check_volume(f)
        disj = check_disjoint(f)
        res.lines.append(f"{name}: pieces={rep.pieces} source_area={rep.source_area} "
                         f"target_area={rep.target_area} {'ok' if rep and disj else 'violated'}")
        for i, piece, why in rep.violations:
            res.failures.append(f"{name} piece {i}: {why}\n"
                                + format_blockmap(BlockMap([piece])).rstrip("\n"))
        if rep.source_area != rep.target_area:
            res.failures.append(f"{name}: source area {rep.source_area} != target area {rep.target_area}")
        if not disj:
            res.failures.append(f"{name}: overlapping blocks source={disj.source_overlap} "
                                f"target={disj.target_overlap}")
    return res


# --- betti numbers -------------------------------------------------------------

def random_graph(rng: random.Random, max_vertices: int = 8, max_edges: int = 14):
    n = rng.randint(1, max_vertices)
    vertices = list(range(n))
    edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, max_edges))]
    return vertices, edges


def cycle_space_dimension(vertices, edges) -> int:
    """``|E|`` minus the rank of the oriented incidence matrix."""
    if not edges:
        return 0
    index = {v: i for i, v in enumerate(vertices)}
    inc = np.zeros((len(vertices), len(edges)))
    for j, (a, b) in enumerate(edges):
        if a != b:
            inc[index[a], j] += 1
            inc[index[b], j] -= 1
    return len(edges) - int(np.linalg.matrix_rank(inc))


def betti(seed: int = DEFAULT_SEED, graphs: int = 50) -> SuiteResult:
    res = SuiteResult("betti", seed)
    rng = random.Random(seed)
    for g in range(graphs):
        v, e = random_graph(rng)
        a, b = cycle_rank(v, e), cycle_space_dimension(v, e)
        if a != b:
            res.failures.append(f"graph {g}: V={v} E={e} cycle rank {a} vs cycle space {b}")
    res.lines.append(f"{graphs} random graphs: cycle rank vs incidence rank")
    for name in ("succ", "add"):
        m = corpus.machine(name)
        b1, loops = betti1(build_graph(m)), machine_loop_count(m)
        res.lines.append(f"hand-built {name}: b1={b1} loop_count={loops}")
        if b1 > loops:
            res.failures.append(f"hand-built {name}: b1 {b1} exceeds loop count {loops}")
    for name in corpus.PROGRAMS:
        fc = compile_to_flowchart(corpus.program(name))
        m = flowchart_to_tm(fc, name)
        res.lines.append(f"compiled {name}: b1={betti1(build_graph(m))} loop_count={loop_count(fc)}")
    return res


# --- oracle equivalence ----------------------------------------------------------

def _inputs(arity: int, hi: int = 10):
    return list(itertools.product(range(hi + 1), repeat=arity))


def oracle_murec(fuel: int = DEFAULT_FUEL, hi: int = 10) -> SuiteResult:
    res = SuiteResult("oracle-murec", None)
    for name in corpus.ORACLE_SUITE + ("nozero",):
        e = corpus.program(name)
        fc = compile_to_flowchart(e)
        m = flowchart_to_tm(fc, name)
        codec = codec_for(m)
        agree = both_diverge = 0
        for args in _inputs(e.arity, hi):
            want = evaluate(e, args, fuel)
            got = run(m, m.start(codec.encode(args, m.blank)), fuel)
            if isinstance(want, EvalOutOfFuel) and isinstance(got, OutOfFuel):
                both_diverge += 1
            elif isinstance(got, Halted) and not isinstance(want, EvalOutOfFuel) \
                    and codec.decode(got.config.tape) == want.value:
                agree += 1
            else:
                out = codec.decode(got.config.tape) if isinstance(got, Halted) else f"OutOfFuel({fuel})"
                res.failures.append(f"{name}{args}: eval {want} machine {out}")
        res.lines.append(f"{name}: inputs={len(_inputs(e.arity, hi))} agree={agree} "
                         f"both_out_of_fuel={both_diverge} states={len(m.states)} "
                         f"symbols={len(m.alphabet)} loop_count={loop_count(fc)}")
        if name == "nozero" and both_diverge != len(_inputs(e.arity, hi)):
            res.failures.append("nozero: expected fuel exhaustion on every input")
    return res


# --- reaching function and length ---------------------------------------------

REACH_CASES = {
    "succ": [(n,) for n in range(21)],
    "add": _inputs(2),
    "mul": _inputs(2),
}


def reach_suite(fuel: int = DEFAULT_FUEL) -> SuiteResult:
    res = SuiteResult("reach", None)
    for name, cases in REACH_CASES.items():
        m = corpus.machine(name)
        sk = thicken(build_graph(m), allow_irreversible=True)
        codec = codec_for(m)
        total = 0
        for args in cases:
            arg = args[0] if len(args) == 1 else args
            r = run(m, m.start(codec.encode(arg, m.blank)), fuel)
            tr = reach(sk, arg, fuel, record=False)
            expected = codec.decode(r.config.tape) if isinstance(r, Halted) else None
            ok = tr.steps == r.steps and (
                (tr.reached and tr.outcome.output == expected) if expected is not None else not tr.reached)
            total += r.steps
            if not ok:
                res.failures.append(f"{name}{args}: run {expected} in {r.steps} steps, reach {tr.outcome} "
                                    f"in {tr.steps} steps")
        res.lines.append(f"{name}: inputs={len(cases)} total_steps={total}")
    return res


def lenc(fuel: int = DEFAULT_FUEL, scale: int = 3) -> SuiteResult:
    res = SuiteResult("lenc", None)
    sk = thicken(build_graph(corpus.machine("succ")))
    scaled = sk.rescaled(scale)
    rows = conjecture_report(sk, range(1, 101), fuel)
    for r in rows:
        n = r.n
        if r.lenc != n + 1 or r.steps != n + 1:
            res.failures.append(f"succ n={n}: LenC {r.lenc} steps {r.steps}, expected {n + 1}")
        big = length_complexity(scaled, n, fuel)
        if big != scale * r.lenc:
            res.failures.append(f"succ n={n}: rescaled LenC {big} != {scale} x {r.lenc}")
    res.lines.append("n,lenc,steps,ratio")
    res.lines.extend(f"{r.n},{r.lenc},{r.steps},{r.ratio}" for r in rows)
    ratios = {r.ratio for r in rows}
    res.lines.append(f"ratios {sorted(map(str, ratios))}; rescaled by {scale}: all lengths x{scale}")
    return res


SUITES = {
    "conjugacy-tm-gshift": lambda seed, fuel: conjugacy_tm_gshift(seed),
    "conjugacy-gshift-blockmap": lambda seed, fuel: conjugacy_gshift_blockmap(seed),
    "volume": lambda seed, fuel: volume(),
    "betti": lambda seed, fuel: betti(seed),
    "oracle-murec": lambda seed, fuel: oracle_murec(fuel),
    "reach": lambda seed, fuel: reach_suite(fuel),
    "lenc": lambda seed, fuel: lenc(fuel),
}
