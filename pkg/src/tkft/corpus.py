"""Bundled example machines, programs and shift tables."""

from __future__ import annotations

from importlib import resources

from .gshift import GeneralizedShift, parse_shift
from .murec.ast import Expr, parse_program
from .tm import TuringMachine, parse_machine

MACHINES = ("succ", "add", "mul", "diverge", "swing")
PROGRAMS = ("succ", "add", "mul", "sub", "mu", "nozero")
SHIFTS = ("identity", "fullshift", "swap", "swing")  # all bijective
ORACLE_SUITE = ("succ", "add", "mul", "sub", "mu")


def text(filename: str) -> str:
    return resources.files("tkft").joinpath("data", filename).read_text()


def path(filename: str):
    return resources.files("tkft").joinpath("data", filename)


def machine(name: str) -> TuringMachine:
    return parse_machine(text(f"{name}.tm"))


def program(name: str) -> Expr:
    return parse_program(text(f"{name}.mrec"))[0]


def shift(name: str) -> GeneralizedShift:
    return parse_shift(text(f"{name}.gs"))
