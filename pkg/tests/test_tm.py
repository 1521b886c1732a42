import itertools
import json
import random

import pytest
from hypothesis import given, strategies as st

from oracles import naive_run
from tkft import corpus
from tkft.errors import MalformedInput
from tkft.tm import (
    Configuration,
    Halted,
    OutOfFuel,
    Tape,
    TuringMachine,
    format_machine,
    is_reversible,
    loads_machine,
    machine_from_dict,
    machine_to_dict,
    orbit,
    parse_machine,
    random_configuration,
    random_machine,
    run,
    step,
)


def test_succ_step_over_a_one(succ):
    c = succ.start("11")
    nxt = step(succ, c)
    assert nxt == Configuration("q0", Tape.parse("1|1"))
    assert nxt.tape.read() == "1"


def test_step_in_halting_state_is_absorbed(succ):
    c = Configuration("qh", Tape.parse("1|1"))
    out = step(succ, c)
    assert isinstance(out, Halted)
    assert out.config == c


def test_succ_on_blank_tape(succ):
    out = step(succ, succ.start())
    assert out.state == "qh"
    assert out.tape == Tape.parse("1|")
    assert dict(out.tape.items()) == {-1: "1"}


def test_run_succ_two(succ):
    r = run(succ, succ.start("11"), 100)
    assert isinstance(r, Halted)
    assert r.steps == 3
    assert [a for _, a in r.config.tape.items()] == ["1", "1", "1"]


def test_run_zero_fuel(succ):
    r = run(succ, succ.start("1"), 0)
    assert isinstance(r, OutOfFuel)
    assert r.config == succ.start("1")


def test_designed_diverger():
    m = parse_machine("states: q0 qh\ninitial: q0\nhalting: qh\nalphabet: _ 1\nblank: _\n"
                      "q0 _ -> q0 _ R\nq0 1 -> qh 1 R\n")
    r = run(m, m.start(), 50)
    assert isinstance(r, OutOfFuel) and r.steps == 50


def test_unknown_state_and_symbol_rejected(succ):
    with pytest.raises(MalformedInput):
        step(succ, Configuration("nope", succ.tape()))
    with pytest.raises(MalformedInput):
        step(succ, Configuration("q0", Tape.parse("x")))


def test_missing_transition_is_construction_error():
    with pytest.raises(MalformedInput):
        parse_machine("states: q0 qh\ninitial: q0\nhalting: qh\nalphabet: _ 1\nblank: _\n"
                      "q0 _ -> qh 1 R\n")


def test_halting_must_be_proper_subset():
    with pytest.raises(MalformedInput):
        TuringMachine(["q"], "q", ["q"], ["_"], "_", {})


def test_tape_canonical_form():
    assert Tape.parse("__1_|_1__") == Tape.from_cells({-2: "1", 1: "1"})
    t = Tape.parse("1|1")
    assert t.shift(1).shift(-1) == t
    assert Tape(t.right, t.left) == t


@pytest.mark.parametrize("seed", range(5))
def test_run_matches_head_moving_simulator(seed):
    rng = random.Random(seed)
    m = random_machine(rng, 4, alphabet=("_", "1", "x"))
    for _ in range(20):
        c = random_configuration(m, rng)
        r = run(m, c, 40)
        delta = {k: v for k, v in m.delta.items()}
        q, cells, steps, halted = naive_run(delta, m.halting, c.state, dict(c.tape.items()), m.blank, 40)
        assert r.config.state == q
        assert dict(r.config.tape.items()) == cells
        assert r.steps == steps
        assert isinstance(r, Halted) == halted


@given(st.integers(0, 10_000), st.integers(0, 30))
def test_run_equals_repeated_step(seed, k):
    rng = random.Random(seed)
    m = random_machine(rng, 3)
    c = random_configuration(m, rng)
    assert run(m, c, k).config == orbit(m, c, k)[-1]


def test_halting_absorption_over_orbit(succ):
    path = orbit(succ, succ.start("1"), 10)
    assert path[2] == path[10]


def test_is_reversible_examples(succ):
    assert is_reversible(succ)
    m = parse_machine("states: q0 q1\ninitial: q0\nhalting: q1\nalphabet: 0 1\nblank: 0\n"
                      "q0 0 -> q1 1 R\nq0 1 -> q1 1 R\n")
    rep = is_reversible(m)
    assert not rep
    assert {t.read for t in rep.collision} == {"0", "1"}
    single = TuringMachine(["q0", "h"], "q0", ["h"], ["0"], "0", {("q0", "0"): ("h", "0", 1)})
    assert is_reversible(single)


def _bounded_configs(m, width):
    for q in m.working_states:
        for cells in itertools.product(m.alphabet, repeat=width):
            yield Configuration(q, Tape.from_cells({n - width // 2: a for n, a in enumerate(cells)}, m.blank))


def reversible_machines(count, n_states=3):
    rng = random.Random(1)
    found = []
    while len(found) < count:
        m = random_machine(rng, n_states)
        if is_reversible(m):
            found.append(m)
    return found


@pytest.mark.parametrize("m", reversible_machines(10))
def test_reversible_machines_are_injective(m):
    images = {}
    for c in _bounded_configs(m, 5):
        img = step(m, c)
        assert images.setdefault(img, c) == c


def test_text_and_json_round_trip():
    for name in corpus.MACHINES:
        m = corpus.machine(name)
        assert parse_machine(format_machine(m)) == m
        assert machine_from_dict(machine_to_dict(m)) == m
        assert loads_machine(json.dumps(machine_to_dict(m))) == m


def test_format_is_deterministic(succ):
    assert format_machine(succ) == format_machine(corpus.machine("succ"))
