import random
from fractions import Fraction

import pytest

from oracles import gf2_cycle_dimension
from tkft import corpus
from tkft.bordism import (
    INFINITY,
    Diverged,
    Reached,
    betti1,
    build_graph,
    conjecture_csv,
    conjecture_report,
    cycle_rank,
    disjointness_violation,
    graph_dot,
    length_complexity,
    reach,
    tape_word,
    thicken,
    traces_csv,
    word_tape,
)
from tkft.cantor import check_volume, kappa
from tkft.errors import ConstructionError, Refused
from tkft.gshift import Encoding
from tkft.suites import cycle_space_dimension, random_graph
from tkft.tapeio import codec_for
from tkft.tm import Halted, TuringMachine, parse_machine, random_configuration, random_machine, run


def test_succ_graph(succ):
    g = build_graph(succ)
    assert set(g.vertices) == {"q0", "qh"}
    assert sorted((e.source, e.target, e.read, e.write, e.shift) for e in g.edges) == [
        ("q0", "q0", "1", "1", 1), ("q0", "qh", "_", "1", 1)]
    assert betti1(g) == 1


def test_start_in_halting_state_is_refused():
    with pytest.raises(ConstructionError):
        build_graph(TuringMachine(["h", "q"], "h", ["h"], ["0"], "0", {("q", "0"): ("h", "0", 1)}))


def test_edge_count_matches_table():
    m = random_machine(random.Random(2), 3)
    g = build_graph(m)
    assert len(g.edges) == 4
    assert {(e.source, e.read) for e in g.edges} == set(m.delta)


def test_cycle_rank_examples():
    assert cycle_rank([0, 1, 2], [(0, 1), (1, 2)]) == 0
    assert cycle_rank([0, 1], [(0, 1), (1, 0), (0, 0), (1, 1)]) == 3
    assert cycle_rank([0, 1, 2, 3], [(0, 1), (2, 3)]) == 0


@pytest.mark.parametrize("seed", range(30))
def test_cycle_rank_matches_cycle_space(seed):
    v, e = random_graph(random.Random(seed))
    assert cycle_rank(v, e) == cycle_space_dimension(v, e) == gf2_cycle_dimension(len(v), e)


def test_succ_skeleton(succ):
    sk = thicken(build_graph(succ))
    assert len(sk.discs) == 2 and len(sk.tubes) == 2
    tube = next(t for t in sk.tubes if t.edge.read == "1")
    enc = sk.encoding
    assert tube.blockmap.pieces[0].alpha == 3 ** enc.wA
    assert tube.blockmap.pieces[0].source.u == enc.symbol_codes["1"]
    assert disjointness_violation(sk) is None
    assert all(check_volume(t.blockmap) for t in sk.tubes)


def test_degenerate_self_loop_machine():
    m = TuringMachine(["q", "h"], "q", ["h"], ["0"], "0", {("q", "0"): ("q", "0", 1)})
    sk = thicken(build_graph(m))
    assert [t.edge.target for t in sk.tubes] == ["q"]
    assert isinstance(reach(sk, 0, 10).outcome, Diverged)


def test_irreversible_machine_needs_override():
    m = corpus.machine("mul")
    with pytest.raises(Refused) as exc:
        thicken(build_graph(m))
    assert len(exc.value.certificate) == 2
    sk = thicken(build_graph(m), allow_irreversible=True)
    assert not sk.reversible


@pytest.mark.parametrize("name", corpus.MACHINES)
def test_outgoing_tubes_are_disjoint(name):
    sk = thicken(build_graph(corpus.machine(name)), allow_irreversible=True)
    assert disjointness_violation(sk) is None


def test_reach_succ_two(succ):
    tr = reach(thicken(build_graph(succ)), 2, 100)
    assert tr.outcome == Reached(3)
    assert tr.steps == 3 and tr.length == 3
    assert tr.states() == ["q0", "q0", "q0", "qh"]


def test_reach_with_no_fuel(succ):
    tr = reach(thicken(build_graph(succ)), 2, 0)
    assert tr.outcome == Diverged(0) and tr.steps == 0


def test_reach_diverging_machine():
    sk = thicken(build_graph(corpus.machine("diverge")), allow_irreversible=True)
    tr = reach(sk, 5, 300)
    assert tr.outcome == Diverged(300)
    assert length_complexity(sk, 5, 300) == INFINITY


@pytest.mark.parametrize("name", ["succ", "add", "mul"])
def test_reach_agrees_with_run(name):
    m = corpus.machine(name)
    sk = thicken(build_graph(m), allow_irreversible=True)
    codec = codec_for(m)
    cases = [(n,) for n in range(12)] if name == "succ" else [(a, b) for a in range(5) for b in range(5)]
    for args in cases:
        arg = args[0] if len(args) == 1 else args
        r = run(m, m.start(codec.encode(arg, m.blank)), 10 ** 5)
        tr = reach(sk, arg, 10 ** 5)
        assert isinstance(r, Halted)
        assert tr.outcome == Reached(codec.decode(r.config.tape))
        assert tr.steps == r.steps
        assert word_tape(sk.encoding, m.blank, tape_word(sk.encoding, r.config.tape)) == r.config.tape


def test_reach_path_points_lie_in_their_tubes(succ):
    sk = thicken(build_graph(succ))
    tr = reach(sk, 3, 100)
    for (e, p), nxt in zip(tr.path, tr.path[1:] + ((None, None),)):
        tube = next(t for t in sk.tubes if t.edge == e)
        assert any(pc.source.contains(p.x, p.y) for pc in tube.blockmap.pieces)
        if nxt[0] is not None:
            assert nxt[0].source == e.target


@pytest.mark.parametrize("seed", range(5))
def test_tube_maps_are_tape_rewrites(seed):
    rng = random.Random(seed)
    m = random_machine(rng, 3, alphabet=("_", "a", "b"))
    enc = Encoding.default(m)
    sk = thicken(build_graph(m), enc, allow_irreversible=True)
    for _ in range(30):
        c = random_configuration(m, rng)
        if c.state in m.halting:
            continue
        tube = sk._by_read[(c.state, enc.symbol_codes[c.tape.read()])]
        p = kappa(tape_word(enc, c.tape))
        x, y = tube.blockmap.find(p.x, p.y)(p.x, p.y)
        q2, a2, s = m.delta[(c.state, c.tape.read())]
        want = kappa(tape_word(enc, c.tape.write(a2).shift(s)))
        assert (want.x, want.y) == (x, y)
        assert tube.edge.target == q2


def test_length_complexity_and_rescaling(succ):
    sk = thicken(build_graph(succ))
    assert length_complexity(sk, 2, 100) == 3
    assert length_complexity(sk.rescaled(3), 2, 100) == 9
    assert length_complexity(sk.rescaled(Fraction(1, 2)), 7, 100) == 4


def test_per_edge_lengths(succ):
    g = build_graph(succ)
    loop = next(e for e in g.edges if e.source == e.target)
    sk = thicken(g, lengths={loop: Fraction(5, 2)})
    assert length_complexity(sk, 2, 100) == 2 * Fraction(5, 2) + 1


def test_conjecture_report_ratios(succ):
    sk = thicken(build_graph(succ))
    assert {r.ratio for r in conjecture_report(sk, range(1, 101), 10 ** 5)} == {1}
    assert {r.ratio for r in conjecture_report(sk.rescaled(2), range(1, 101), 10 ** 5)} == {2}
    add = thicken(build_graph(corpus.machine("add")))
    assert {r.ratio for r in conjecture_report(add, [(n, 1) for n in range(1, 51)], 10 ** 5)} == {1}


def test_conjecture_report_marks_divergence():
    sk = thicken(build_graph(corpus.machine("diverge")), allow_irreversible=True)
    (row,) = conjecture_report(sk, [3], 100)
    assert row.lenc == "inf" and row.ratio == "diverged"


def test_emitters(succ):
    dot = graph_dot(build_graph(succ))
    assert dot.count("->") == 2 and '"q0" -> "q0"' in dot
    assert "1/1,+1" in dot
    sk = thicken(build_graph(succ))
    csv = traces_csv([reach(sk, n, 100) for n in range(3)])
    assert csv.splitlines()[0] == "n,outcome,steps,length"
    assert csv.splitlines()[3] == "2,Reached(3),3,3"
    rows = conjecture_report(sk, range(1, 4), 100)
    assert conjecture_csv(rows).splitlines()[1] == "1,2,2,1"


def test_parsed_unary_machine_reaches(succ):
    m = parse_machine(corpus.text("succ.tm"))
    assert reach(thicken(build_graph(m)), 4, 100).outcome == Reached(5)
