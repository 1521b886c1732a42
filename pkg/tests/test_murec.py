import random

import pytest
from hypothesis import given, strategies as st

from oracles import REFERENCE_FUNCTIONS
from tkft import corpus
from tkft.errors import ConstructionError, MalformedInput
from tkft.murec import (
    Compose,
    Const,
    Mu,
    OutOfFuel,
    PrimRec,
    Proj,
    Succ,
    Tuple,
    Value,
    compile_to_flowchart,
    count_loops,
    evaluate,
    format_expr,
    format_flowchart,
    loop_count,
    pair_decode,
    pair_encode,
    parse_expr,
    parse_flowchart,
    run_flowchart,
)
from tkft.murec.flowchart import Block, Dec, Flowchart, Goto, flowchart_from_dict, flowchart_to_dict

ADD = PrimRec(Proj(1, 1), Compose(Succ(), Proj(2, 3)))


def random_expr(rng, arity, depth):
    """Well-typed single-output expression without a search node."""
    kinds = ["const", "proj"] + (["succ"] if arity == 1 else [])
    if depth > 0:
        kinds += ["comp", "comp", "primrec"] if arity >= 1 else ["comp"]
    kind = rng.choice(kinds)
    if kind == "const":
        return Const(rng.randrange(3), arity)
    if kind == "succ":
        return Succ()
    if kind == "proj" and arity >= 1:
        return Proj(rng.randint(1, arity), arity)
    if kind == "primrec":
        return PrimRec(random_expr(rng, arity - 1, depth - 1), random_expr(rng, arity + 1, depth - 1))
    if kind == "comp" or kind == "proj":
        k = rng.randint(1, 2)
        inner = [random_expr(rng, arity, depth - 1) for _ in range(k)]
        f = inner[0] if k == 1 else Tuple(tuple(inner))
        return Compose(random_expr(rng, k, depth - 1), f)
    raise AssertionError(kind)


def test_eval_examples():
    assert evaluate(Succ(), (3,)) == Value((4,))
    assert evaluate(ADD, (2, 3)).value == 5
    assert evaluate(Mu(Const(1, 2)), (7,), fuel=1000) == OutOfFuel(1000)


def test_mu_program_from_corpus():
    g = corpus.program("mu")
    assert evaluate(g, (3,)).value == 3
    assert count_loops(g) == 3
    assert loop_count(compile_to_flowchart(g)) == 3


@given(st.integers(0, 20), st.integers(0, 20))
def test_primrec_unrolling(y, x):
    step = Compose(Succ(), Compose(Succ(), Proj(2, 3)))
    h = PrimRec(Proj(1, 1), step)
    acc = x
    for _ in range(y):
        acc += 2
    assert evaluate(h, (y, x)).value == acc


@pytest.mark.parametrize("name", corpus.ORACLE_SUITE)
def test_corpus_programs_match_reference(name):
    e = corpus.program(name)
    ref = REFERENCE_FUNCTIONS[name]
    for args in [(a,) for a in range(8)] if e.arity == 1 else [(a, b) for a in range(6) for b in range(6)]:
        assert evaluate(e, args).value == ref(*args)


def test_strictness_inside_composition():
    # the constant ignores its argument but the argument still has to finish
    e = Compose(Const(0, 1), Mu(Const(1, 2)))
    assert isinstance(evaluate(e, (0,), fuel=500), OutOfFuel)


def test_arity_errors():
    with pytest.raises(ConstructionError):
        PrimRec(Proj(1, 1), Succ())
    with pytest.raises(ConstructionError):
        Proj(3, 2)
    with pytest.raises(ConstructionError):
        Compose(ADD, Succ())
    with pytest.raises(MalformedInput):
        evaluate(ADD, (1,))


def test_pairing_examples():
    assert pair_encode((2, 1)) == 12
    assert pair_encode(()) == 1
    assert pair_decode(12, 2) == (2, 1)
    with pytest.raises(MalformedInput):
        pair_decode(5 * 12, 2)


@given(st.lists(st.integers(0, 50), max_size=4))
def test_pairing_round_trip(xs):
    n = pair_encode(xs)
    assert pair_decode(n, len(xs)) == tuple(xs)


@given(st.lists(st.integers(0, 8), min_size=2, max_size=2), st.lists(st.integers(0, 8), min_size=2, max_size=2))
def test_pairing_injective(a, b):
    assert (pair_encode(a) == pair_encode(b)) == (a == b)


def test_parse_and_format_round_trip():
    for name in corpus.PROGRAMS:
        e = corpus.program(name)
        assert parse_expr(format_expr(e)) == e
    with pytest.raises(MalformedInput):
        parse_expr("comp(succ)")
    with pytest.raises(MalformedInput):
        parse_expr("primrec(proj 1/1, succ)")


def test_straight_line_flowchart():
    fc = compile_to_flowchart(Succ())
    assert loop_count(fc) == 0
    assert run_flowchart(fc, (4,)).value == 5


def test_add_flowchart():
    fc = compile_to_flowchart(ADD)
    assert loop_count(fc) == 1
    assert run_flowchart(fc, (2, 3)).value == 5


def test_nested_primrec_inside_mu():
    e = Mu(PrimRec(Proj(1, 1), Compose(Proj(1, 1), Proj(2, 3))))
    assert count_loops(e) == 2
    assert loop_count(compile_to_flowchart(e)) == 2


@pytest.mark.parametrize("seed", range(40))
def test_random_programs_compile_faithfully(seed):
    rng = random.Random(seed)
    e = random_expr(rng, rng.randint(1, 2), 3)
    fc = compile_to_flowchart(e)
    assert loop_count(fc) == count_loops(e)
    for _ in range(6):
        args = tuple(rng.randrange(4) for _ in range(e.arity))
        want = evaluate(e, args, fuel=20_000)
        got = run_flowchart(fc, args, fuel=200_000)
        if isinstance(want, Value):
            assert got == want


@pytest.mark.parametrize("name", corpus.PROGRAMS)
def test_corpus_flowcharts(name):
    e = corpus.program(name)
    fc = compile_to_flowchart(e)
    assert loop_count(fc) == count_loops(e)
    assert parse_flowchart(format_flowchart(fc)) == fc
    assert flowchart_from_dict(flowchart_to_dict(fc)) == fc


def test_loop_count_invariant_under_renumbering():
    fc = compile_to_flowchart(corpus.program("mul"))
    labels = list(fc.blocks)
    rng = random.Random(0)
    perm = labels[:]
    rng.shuffle(perm)
    ren = {old: f"L{i}" for i, old in enumerate(perm)}
    blocks = {}
    for old, blk in fc.blocks.items():
        term = blk.term
        if isinstance(term, Goto):
            term = Goto(ren[term.target])
        elif isinstance(term, Dec):
            term = Dec(term.r, ren[term.nonzero], ren[term.zero])
        blocks[ren[old]] = Block(list(blk.ops), term)
    shuffled = Flowchart(dict(sorted(blocks.items())), ren[fc.entry], fc.registers, fc.inputs, fc.outputs)
    assert loop_count(shuffled) == loop_count(fc)
    assert run_flowchart(shuffled, (3, 4)) == run_flowchart(fc, (3, 4))


def test_nozero_flowchart_runs_out_of_fuel():
    fc = compile_to_flowchart(corpus.program("nozero"))
    assert isinstance(run_flowchart(fc, (0,), fuel=10_000), OutOfFuel)
