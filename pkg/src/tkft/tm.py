"""Turing machines as discrete dynamical systems on ``Q x A*``.

The head always reads cell 0. Applying a transition ``(q', a', s)`` writes
``a'`` at cell 0 and relabels the tape so that the new cell ``n`` holds the
old cell ``n + s``; ``s = +1`` (``R``) therefore brings the right neighbour
under the head.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import MalformedInput

SHIFT_NAMES = {1: "R", -1: "L"}
SHIFT_VALUES = {"R": 1, "L": -1, "+1": 1, "-1": -1, "1": 1}


def _trim(cells: Iterable[str], blank: str) -> tuple:
    cells = tuple(cells)
    end = len(cells)
    while end and cells[end - 1] == blank:
        end -= 1
    return cells[:end]


@dataclass(frozen=True)
class Tape:
    """Compactly supported two-sided tape in canonical form.

    ``right[k]`` is cell ``k`` and ``left[k]`` is cell ``-(k + 1)``; trailing
    blanks are trimmed on both sides so equal tapes compare equal.
    """

    right: tuple = ()
    left: tuple = ()
    blank: str = "_"

    def __post_init__(self):
        object.__setattr__(self, "right", _trim(self.right, self.blank))
        object.__setattr__(self, "left", _trim(self.left, self.blank))

    @classmethod
    def from_cells(cls, cells: Mapping[int, str], blank: str = "_") -> "Tape":
        if not cells:
            return cls((), (), blank)
        hi = max(max(cells), -1)
        lo = min(min(cells), 0)
        right = [cells.get(n, blank) for n in range(0, hi + 1)]
        left = [cells.get(n, blank) for n in range(-1, lo - 1, -1)]
        return cls(tuple(right), tuple(left), blank)

    @classmethod
    def parse(cls, text: str, blank: str = "_") -> "Tape":
        """Parse ``"ab|cd"`` (cell 0 is ``c``); without ``|`` the text starts at 0.

        Symbols are single characters unless the text contains whitespace,
        in which case whitespace-separated tokens are used.
        """
        text = text.strip()
        if any(ch.isspace() for ch in text):
            tokens = text.replace("|", " | ").split()
        else:
            tokens = list(text)
        if tokens.count("|") > 1:
            raise MalformedInput(f"tape literal has more than one head marker: {text!r}")
        if "|" in tokens:
            k = tokens.index("|")
            left, right = tokens[:k], tokens[k + 1:]
        else:
            left, right = [], tokens
        return cls(tuple(right), tuple(reversed(left)), blank)

    def __getitem__(self, n: int) -> str:
        if n >= 0:
            return self.right[n] if n < len(self.right) else self.blank
        k = -n - 1
        return self.left[k] if k < len(self.left) else self.blank

    def read(self) -> str:
        return self.right[0] if self.right else self.blank

    def write(self, symbol: str) -> "Tape":
        rest = self.right[1:] if self.right else ()
        return Tape((symbol,) + rest, self.left, self.blank)

    def shift(self, s: int) -> "Tape":
        """Relabel cells: the result holds ``self[n + s]`` at cell ``n``."""
        right, left = self.right, self.left
        blank = self.blank
        if s > 0:
            for _ in range(s):
                head = right[0] if right else blank
                right = right[1:]
                left = (head,) + left
        else:
            for _ in range(-s):
                head = left[0] if left else blank
                left = left[1:]
                right = (head,) + right
        return Tape(right, left, blank)

    def items(self) -> Iterator[tuple[int, str]]:
        """Yield ``(cell, symbol)`` for every non-blank cell, left to right."""
        for k in range(len(self.left) - 1, -1, -1):
            if self.left[k] != self.blank:
                yield -k - 1, self.left[k]
        for k, a in enumerate(self.right):
            if a != self.blank:
                yield k, a

    def span(self) -> tuple[int, int]:
        """Half-open range of cells covering the stored window."""
        return -len(self.left), len(self.right)

    def __str__(self) -> str:
        sep = " " if any(len(a) != 1 for a in self.left + self.right) else ""
        left = sep.join(reversed(self.left))
        right = sep.join(self.right)
        if sep:
            return f"{left} | {right}".strip()
        return f"{left}|{right}"


@dataclass(frozen=True)
class Configuration:
    state: str
    tape: Tape

    def __str__(self) -> str:
        return f"({self.state}, {self.tape})"


class Transition(NamedTuple):
    state: str
    read: str
    target: str
    write: str
    shift: int

    def __str__(self) -> str:
        return f"{self.state} {self.read} -> {self.target} {self.write} {SHIFT_NAMES[self.shift]}"


@dataclass(frozen=True, eq=False)
class TuringMachine:
    """Deterministic single-tape machine with a total transition table.

    ``delta`` maps every ``(non-halting state, symbol)`` to
    ``(state, symbol, shift)`` and has no entries for halting states.
    ``io`` optionally names the input/output convention (see
    :mod:`tkft.tapeio`).
    """

    states: tuple
    initial: str
    halting: frozenset
    alphabet: tuple
    blank: str
    delta: Mapping[tuple, tuple]
    io: str | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "halting", frozenset(self.halting))
        object.__setattr__(self, "delta", dict(self.delta))
        self._validate()

    def _validate(self):
        states = set(self.states)
        if len(states) != len(self.states):
            raise MalformedInput("duplicate state identifiers")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise MalformedInput("duplicate alphabet symbols")
        if self.initial not in states:
            raise MalformedInput(f"initial state {self.initial!r} is not a state")
        if not self.halting:
            raise MalformedInput("at least one halting state is required")
        if not self.halting < states:
            raise MalformedInput("halting states must be a proper subset of the states")
        if self.blank not in self.alphabet:
            raise MalformedInput(f"blank {self.blank!r} is not in the alphabet")
        alphabet = set(self.alphabet)
        for (q, a), (q2, a2, s) in self.delta.items():
            if q not in states or a not in alphabet:
                raise MalformedInput(f"transition from unknown state/symbol ({q!r}, {a!r})")
            if q in self.halting:
                raise MalformedInput(f"halting state {q!r} has an outgoing transition")
            if q2 not in states or a2 not in alphabet:
                raise MalformedInput(f"transition ({q!r}, {a!r}) targets unknown state/symbol")
            if s not in (1, -1):
                raise MalformedInput(f"transition ({q!r}, {a!r}) has shift {s!r}")
        for q in self.states:
            if q in self.halting:
                continue
            for a in self.alphabet:
                if (q, a) not in self.delta:
                    raise MalformedInput(f"missing transition for ({q!r}, {a!r})")

    def __eq__(self, other):
        if not isinstance(other, TuringMachine):
            return NotImplemented
        return (
            self.states == other.states
            and self.initial == other.initial
            and self.halting == other.halting
            and self.alphabet == other.alphabet
            and self.blank == other.blank
            and self.delta == other.delta
            and self.io == other.io
        )

    __hash__ = None

    @property
    def working_states(self) -> tuple:
        return tuple(q for q in self.states if q not in self.halting)

    def transitions(self) -> list[Transition]:
        return [
            Transition(q, a, *self.delta[(q, a)])
            for q in self.working_states
            for a in self.alphabet
        ]

    def tape(self, text: str = "") -> Tape:
        return Tape.parse(text, self.blank) if text else Tape((), (), self.blank)

    def start(self, tape: Tape | str = "") -> Configuration:
        if isinstance(tape, str):
            tape = self.tape(tape)
        return Configuration(self.initial, tape)


class Halted(NamedTuple):
    config: Configuration
    steps: int


class OutOfFuel(NamedTuple):
    config: Configuration
    steps: int


def _check_config(m: TuringMachine, c: Configuration):
    if c.state not in m.states:
        raise MalformedInput(f"unknown state {c.state!r}")
    if c.tape.blank != m.blank:
        raise MalformedInput(f"tape blank {c.tape.blank!r} differs from machine blank {m.blank!r}")
    alphabet = set(m.alphabet)
    for a in c.tape.left + c.tape.right:
        if a not in alphabet:
            raise MalformedInput(f"symbol {a!r} is not in the alphabet")


def step(m: TuringMachine, c: Configuration) -> Configuration | Halted:
    """Apply one transition; configurations in a halting state are returned as ``Halted``."""
    _check_config(m, c)
    if c.state in m.halting:
        return Halted(c, 0)
    q2, a2, s = m.delta[(c.state, c.tape.read())]
    return Configuration(q2, c.tape.write(a2).shift(s))


def run(m: TuringMachine, c: Configuration, fuel: int) -> Halted | OutOfFuel:
    """Iterate :func:`step` at most ``fuel`` times.

    Uses two stacks internally so each step is O(1); the result is the same
    canonical configuration repeated stepping would give.
    """
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    _check_config(m, c)
    blank = m.blank
    delta = m.delta
    halting = m.halting
    q = c.state
    right = list(reversed(c.tape.right))
    left = list(reversed(c.tape.left))
    steps = 0
    while q not in halting:
        if steps == fuel:
            return OutOfFuel(_rebuild(q, right, left, blank), steps)
        a = right.pop() if right else blank
        q, w, s = delta[(q, a)]
        if s == 1:
            left.append(w)
        else:
            right.append(w)
            right.append(left.pop() if left else blank)
        steps += 1
    return Halted(_rebuild(q, right, left, blank), steps)


def _rebuild(q, right, left, blank) -> Configuration:
    return Configuration(q, Tape(tuple(reversed(right)), tuple(reversed(left)), blank))


def orbit(m: TuringMachine, c: Configuration, n: int) -> list[Configuration]:
    """``[c, step(c), ...]`` with ``n + 1`` entries; halting configurations repeat."""
    out = [c]
    for _ in range(n):
        nxt = step(m, out[-1])
        out.append(nxt.config if isinstance(nxt, Halted) else nxt)
    return out


@dataclass(frozen=True)
class ReversibilityReport:
    reversible: bool
    collision: tuple[Transition, Transition] | None = None

    def __bool__(self):
        return self.reversible


def is_reversible(m: TuringMachine) -> ReversibilityReport:
    """Decide injectivity of the step map on non-halting configurations.

    Two transitions entering the same state can share an image unless they
    use the same shift and write different symbols; any other pair is
    returned as the collision certificate.
    """
    incoming: dict[str, list[Transition]] = {}
    for t in m.transitions():
        incoming.setdefault(t.target, []).append(t)
    for q in m.states:
        ts = incoming.get(q, [])
        for i in range(len(ts)):
            for j in range(i + 1, len(ts)):
                a, b = ts[i], ts[j]
                if a.shift != b.shift or a.write == b.write:
                    return ReversibilityReport(False, (a, b))
    return ReversibilityReport(True, None)


# --- text and JSON formats -------------------------------------------------

_HEADERS = ("states", "initial", "halting", "alphabet", "blank", "io", "name")


def parse_machine(text: str) -> TuringMachine:
    """Parse the line-oriented format (``states:`` headers plus ``q a -> q' a' s`` lines)."""
    header: dict[str, str] = {}
    delta: dict[tuple, tuple] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            lhs, rhs = line.split("->", 1)
            lhs, rhs = lhs.split(), rhs.split()
            if len(lhs) != 2 or len(rhs) != 3:
                raise MalformedInput(f"line {lineno}: expected 'q a -> q' a' s'")
            if rhs[2] not in SHIFT_VALUES:
                raise MalformedInput(f"line {lineno}: shift must be L or R, got {rhs[2]!r}")
            key = (lhs[0], lhs[1])
            if key in delta:
                raise MalformedInput(f"line {lineno}: duplicate transition for {key}")
            delta[key] = (rhs[0], rhs[1], SHIFT_VALUES[rhs[2]])
            continue
        if ":" not in line:
            raise MalformedInput(f"line {lineno}: cannot parse {raw!r}")
        key, value = line.split(":", 1)
        key = key.strip()
        if key not in _HEADERS:
            raise MalformedInput(f"line {lineno}: unknown header {key!r}")
        header[key] = value.strip()
    for key in ("states", "initial", "halting", "alphabet", "blank"):
        if key not in header:
            raise MalformedInput(f"missing header {key!r}")
    return TuringMachine(
        states=header["states"].split(),
        initial=header["initial"],
        halting=header["halting"].split(),
        alphabet=header["alphabet"].split(),
        blank=header["blank"],
        delta=delta,
        io=header.get("io") or None,
        name=header.get("name", ""),
    )


def format_machine(m: TuringMachine) -> str:
    lines = []
    if m.name:
        lines.append(f"name: {m.name}")
    lines += [
        f"states: {' '.join(m.states)}",
        f"initial: {m.initial}",
        f"halting: {' '.join(q for q in m.states if q in m.halting)}",
        f"alphabet: {' '.join(m.alphabet)}",
        f"blank: {m.blank}",
    ]
    if m.io:
        lines.append(f"io: {m.io}")
    lines += [str(t) for t in m.transitions()]
    return "\n".join(lines) + "\n"


def machine_to_dict(m: TuringMachine) -> dict:
    return {
        "name": m.name,
        "states": list(m.states),
        "initial": m.initial,
        "halting": [q for q in m.states if q in m.halting],
        "alphabet": list(m.alphabet),
        "blank": m.blank,
        "io": m.io,
        "transitions": [[t.state, t.read, t.target, t.write, SHIFT_NAMES[t.shift]]
                        for t in m.transitions()],
    }


def machine_from_dict(d: dict) -> TuringMachine:
    try:
        delta = {}
        for q, a, q2, a2, s in d["transitions"]:
            if s not in SHIFT_VALUES and s not in (1, -1):
                raise MalformedInput(f"bad shift {s!r}")
            delta[(q, a)] = (q2, a2, s if isinstance(s, int) else SHIFT_VALUES[s])
        return TuringMachine(
            states=d["states"], initial=d["initial"], halting=d["halting"],
            alphabet=d["alphabet"], blank=d["blank"], delta=delta,
            io=d.get("io"), name=d.get("name", ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"malformed machine document: {exc}") from exc


def loads_machine(text: str) -> TuringMachine:
    if text.lstrip().startswith("{"):
        try:
            return machine_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"invalid JSON: {exc}") from exc
    return parse_machine(text)


# --- random machines for property suites ------------------------------------

def random_machine(rng: random.Random, n_states: int, alphabet=("0", "1"),
                   n_halting: int = 1) -> TuringMachine:
    """Uniformly random total machine; the last ``n_halting`` states halt."""
    states = [f"q{i}" for i in range(n_states)]
    halting = states[n_states - n_halting:]
    working = states[: n_states - n_halting]
    delta = {
        (q, a): (rng.choice(states), rng.choice(alphabet), rng.choice((1, -1)))
        for q in working
        for a in alphabet
    }
    return TuringMachine(states, states[0], halting, alphabet, alphabet[0], delta)


def random_configuration(m: TuringMachine, rng: random.Random, width: int = 6) -> Configuration:
    cells = {n: rng.choice(m.alphabet) for n in range(-width, width)}
    return Configuration(rng.choice(m.states), Tape.from_cells(cells, m.blank))
