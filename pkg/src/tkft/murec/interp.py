"""Fuel-bounded evaluation of recursive-function expressions, and prime pairing."""

from __future__ import annotations

from itertools import count
from typing import NamedTuple

from ..errors import MalformedInput
from .ast import Compose, Const, Expr, Mu, PrimRec, Proj, Succ, Tuple


class Value(NamedTuple):
    values: tuple

    @property
    def value(self):
        return self.values[0] if len(self.values) == 1 else self.values


class OutOfFuel(NamedTuple):
    fuel: int


class _Exhausted(Exception):
    pass


class _Meter:
    def __init__(self, fuel: int):
        self.left = fuel

    def tick(self):
        if self.left <= 0:
            raise _Exhausted
        self.left -= 1


def evaluate(e: Expr, args, fuel: int = 100_000) -> Value | OutOfFuel:
    """Evaluate ``e`` on ``args``; every node visit costs one unit of fuel.

    A search that never finds a zero simply burns fuel, so divergence is
    always reported as :class:`OutOfFuel`.
    """
    args = (args,) if isinstance(args, int) else tuple(args)
    if len(args) != e.arity:
        raise MalformedInput(f"expected {e.arity} arguments, got {len(args)}")
    if any(a < 0 for a in args):
        raise MalformedInput("arguments must be naturals")
    meter = _Meter(fuel)
    try:
        return Value(_eval(e, args, meter))
    except _Exhausted:
        return OutOfFuel(fuel)


def _eval(e: Expr, x: tuple, meter: _Meter) -> tuple:
    meter.tick()
    if isinstance(e, Const):
        return (e.value,)
    if isinstance(e, Succ):
        return (x[0] + 1,)
    if isinstance(e, Proj):
        return (x[e.i - 1],)
    if isinstance(e, Tuple):
        return tuple(v for p in e.parts for v in _eval(p, x, meter))
    if isinstance(e, Compose):
        return _eval(e.g, _eval(e.f, x, meter), meter)
    if isinstance(e, PrimRec):
        y, rest = x[0], x[1:]
        (acc,) = _eval(e.f, rest, meter)
        for i in range(y):
            meter.tick()
            (acc,) = _eval(e.g, (i, acc) + rest, meter)
        return (acc,)
    if isinstance(e, Mu):
        for y in count():
            meter.tick()
            (v,) = _eval(e.f, (y,) + x, meter)
            if v == 0:
                return (y,)
    raise TypeError(f"not an expression: {e!r}")


# --- prime pairing -------------------------------------------------------------

def primes(n: int) -> list[int]:
    out: list[int] = []
    k = 2
    while len(out) < n:
        if all(k % p for p in out if p * p <= k):
            out.append(k)
        k += 1
    return out


def pair_encode(xs) -> int:
    xs = tuple(xs)
    if any(x < 0 for x in xs):
        raise MalformedInput("naturals only")
    n = 1
    for p, x in zip(primes(len(xs)), xs):
        n *= p ** x
    return n


def pair_decode(n: int, arity: int) -> tuple:
    if n < 1:
        raise MalformedInput("only positive integers encode tuples")
    out = []
    for p in primes(arity):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append(e)
    if n != 1:
        raise MalformedInput(f"prime factor beyond the first {arity} primes remains ({n})")
    return tuple(out)
