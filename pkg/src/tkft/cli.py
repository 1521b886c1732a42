"""Command-line entry point: ``tkft compile | run | verify | emit | hamdemo``.

Exit status is 0 on success, 1 when a verification fails or a construction
is refused, and 2 for usage and parse errors.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import click

from . import bordism, cantor, gshift, hamdemo, suites
from .errors import MalformedInput, Refused, TKFTError
from .murec import ast as mast
from .murec import backend, flowchart, interp
from .tapeio import codec_for
from .tm import Halted, loads_machine, machine_to_dict, format_machine, run as tm_run

STAGES = ("murec", "flowchart", "tm", "gshift", "blockmap")
FUEL = click.option("--fuel", type=click.IntRange(min=0), default=suites.DEFAULT_FUEL,
                    envvar="TKFT_FUEL", show_default=True, show_envvar=True,
                    help="Step budget for every run.")
SEED = click.option("--seed", type=int, default=suites.DEFAULT_SEED, envvar="TKFT_SEED",
                    show_default=True, show_envvar=True, help="Seed for randomized suites.")
OUT = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                   help="Write the artifact here instead of standard output.")
JSON = click.option("--json", "as_json", is_flag=True, help="Use the structured JSON form.")


class UsageFailure(click.ClickException):
    exit_code = 2


class CheckFailure(click.ClickException):
    exit_code = 1


def _write(text: str, out: Path | None):
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageFailure(f"cannot read {path}: {exc.strerror}") from exc


def _is_json(text: str) -> bool:
    return text.lstrip().startswith("{")


def _load_json(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc


def load_artifact(kind: str, text: str):
    if kind == "murec":
        return mast.parse_program(text)[0]
    if kind == "flowchart":
        if _is_json(text):
            return flowchart.flowchart_from_dict(_load_json(text))
        return flowchart.parse_flowchart(text)
    if kind == "tm":
        return loads_machine(text)
    if kind == "gshift":
        if _is_json(text):
            return gshift.shift_from_dict(_load_json(text))
        return gshift.parse_shift(text)
    if kind == "blockmap":
        if _is_json(text):
            return cantor.blockmap_from_dict(_load_json(text))
        return cantor.parse_blockmap(text)
    raise UsageFailure(f"unknown format {kind!r}")


def dump_artifact(kind: str, obj, as_json: bool) -> str:
    if as_json:
        doc = {
            "flowchart": flowchart.flowchart_to_dict,
            "tm": machine_to_dict,
            "gshift": gshift.shift_to_dict,
            "blockmap": cantor.blockmap_to_dict,
        }[kind](obj)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    return {
        "flowchart": flowchart.format_flowchart,
        "tm": format_machine,
        "gshift": gshift.format_shift,
        "blockmap": cantor.format_blockmap,
    }[kind](obj)


def _advance(kind: str, obj, name: str, binary: bool):
    """Push ``obj`` one stage down the pipeline; return the new object and a summary."""
    if kind == "murec":
        fc = flowchart.compile_to_flowchart(obj)
        return fc, (f"flowchart: {len(fc.blocks)} blocks, {fc.registers} registers, "
                    f"loop_count {flowchart.loop_count(fc)}")
    if kind == "flowchart":
        m = backend.flowchart_to_tm(obj, name)
        if binary:
            m = backend.to_binary(m)
        return m, f"tm: {len(m.states)} states, {len(m.alphabet)} symbols, io {m.io.split(':')[0]}"
    if kind == "tm":
        S = gshift.compile_tm(obj)
        return S, f"gshift: r={S.r}, {len(S.windows())} windows, shifts {sorted(S.shifts())}"
    if kind == "gshift":
        f = cantor.gshift_to_blockmap(obj)
        return f, f"blockmap: {len(f)} pieces"
    raise AssertionError(kind)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="tkft")
def cli():
    """Machines, generalized shifts, Cantor block maps and bordism skeletons.

    Defaults for --fuel and --seed can be set with TKFT_FUEL and TKFT_SEED.
    """


@cli.command("compile")
@click.option("--from", "src", type=click.Choice(STAGES), required=True)
@click.option("--to", "dst", type=click.Choice(STAGES), required=True)
@click.option("--binary", is_flag=True, help="Recode compiled machines onto a two-symbol alphabet.")
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@OUT
@JSON
def cmd_compile(src, dst, binary, input, out, as_json):
    """Translate INPUT along murec -> flowchart -> tm -> gshift -> blockmap."""
    i, j = STAGES.index(src), STAGES.index(dst)
    if j <= i:
        raise UsageFailure(f"unsupported edge {src} -> {dst}; stages run {' -> '.join(STAGES)}")
    obj = load_artifact(src, _read(input))
    summaries = []
    for kind in STAGES[i:j]:
        obj, summary = _advance(kind, obj, Path(input).stem, binary)
        summaries.append(summary)
    _write(dump_artifact(dst, obj, as_json), out)
    click.echo("\n".join(summaries), err=out is None)


def _parse_args(text: str | None) -> tuple:
    if text is None:
        return ()
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise UsageFailure(f"arguments must be comma-separated naturals, got {text!r}") from exc


@cli.command("run")
@click.option("--model", type=click.Choice(["tm", "bordism", "murec", "flowchart", "gshift"]),
              required=True)
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("--input", "--args", "args", help="Comma-separated naturals, e.g. 2,3.")
@click.option("--word", help="BiWord such as '1|011' for --model gshift.")
@click.option("--steps", type=click.IntRange(min=0), default=1, show_default=True,
              help="Iterations for --model gshift.")
@click.option("--allow-irreversible", is_flag=True, help="Thicken irreversible machines anyway.")
@FUEL
@OUT
@JSON
def cmd_run(model, input, args, word, steps, allow_irreversible, fuel, out, as_json):
    """Run INPUT under one of the models and print the outcome."""
    text = _read(input)
    values = _parse_args(args)
    arg = values[0] if len(values) == 1 else values
    result: dict = {"model": model}
    if model == "tm":
        m = loads_machine(text)
        codec = codec_for(m)
        r = tm_run(m, m.start(codec.encode(arg, m.blank)), fuel)
        if isinstance(r, Halted):
            result.update(outcome="Halted", output=codec.decode(r.config.tape), steps=r.steps)
            line = f"Halted output {result['output']} steps {r.steps}"
        else:
            result.update(outcome="OutOfFuel", fuel=fuel, steps=r.steps)
            line = f"OutOfFuel({fuel})"
    elif model == "bordism":
        m = loads_machine(text)
        sk = bordism.thicken(bordism.build_graph(m), allow_irreversible=allow_irreversible)
        tr = bordism.reach(sk, arg, fuel)
        result.update(outcome=bordism.outcome_text(tr.outcome), steps=tr.steps, length=str(tr.length))
        line = f"{result['outcome']} steps {tr.steps} length {tr.length}"
        if out is not None:
            out.write_text(bordism.traces_csv([tr]))
    elif model in ("murec", "flowchart"):
        obj = load_artifact(model, text)
        r = interp.evaluate(obj, values, fuel) if model == "murec" else \
            flowchart.run_flowchart(obj, values, fuel)
        if isinstance(r, interp.Value):
            result.update(outcome="Value", output=list(r.values))
            line = ", ".join(map(str, r.values))
        else:
            result.update(outcome="OutOfFuel", fuel=fuel)
            line = f"OutOfFuel({fuel})"
    else:
        S = load_artifact("gshift", text)
        t = gshift.BiWord.parse(word or "")
        orbit = [t]
        for _ in range(steps):
            orbit.append(gshift.apply(S, orbit[-1]))
        result.update(orbit=[str(w) for w in orbit])
        line = "\n".join(str(w) for w in orbit)
        if out is not None:
            out.write_text(line + "\n")
    click.echo(json.dumps(result, sort_keys=True) if as_json else line)


@cli.command("verify")
@click.argument("suite", type=click.Choice(sorted(suites.SUITES)))
@click.option("--input", "path", type=click.Path(exists=True, dir_okay=False),
              help="For the volume suite: a block map or shift file to check instead of the corpus.")
@SEED
@FUEL
@OUT
def cmd_verify(suite, path, seed, fuel, out):
    """Run a verification SUITE; exits 1 if any check fails."""
    if path is not None:
        if suite != "volume":
            raise UsageFailure("--input is only used by the volume suite")
        text = _read(path)
        kind = "blockmap" if "source(" in text or '"pieces"' in text else "gshift"
        obj = load_artifact(kind, text)
        f = obj if kind == "blockmap" else cantor.gshift_to_blockmap(obj)
        result = suites.volume({Path(path).name: f})
    else:
        result = suites.SUITES[suite](seed, fuel)
    _write(result.report(), out)
    if not result.passed:
        raise CheckFailure(f"suite {suite} failed")


def _parse_range(text: str) -> list:
    """``"1..5"`` or ``"1,2,3"``; pairs as ``"2:3,4:5"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [tuple(int(v) for v in x.split(":")) if ":" in x else int(x)
                for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageFailure(f"bad input list {text!r}") from exc


@cli.command("emit")
@click.argument("kind", type=click.Choice(["graph-dot", "blocks-svg", "trace-csv",
                                           "conjecture-csv", "flowchart-dot"]))
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("--inputs", default="1..10", show_default=True,
              help="Inputs for the CSV kinds: a range like 1..10 or a list like 2:3,4:5.")
@click.option("--allow-irreversible", is_flag=True, help="Thicken irreversible machines anyway.")
@click.option("--scale", default="1", show_default=True, help="Tube length for the CSV kinds.")
@FUEL
@OUT
def cmd_emit(kind, input, inputs, allow_irreversible, scale, fuel, out):
    """Write a DOT graph, an SVG of Cantor blocks, or a CSV table for INPUT."""
    text = _read(input)
    if kind == "graph-dot":
        _write(bordism.graph_dot(bordism.build_graph(loads_machine(text))), out)
    elif kind == "blocks-svg":
        if "source(" in text or '"pieces"' in text:
            f = load_artifact("blockmap", text)
        else:
            f = cantor.gshift_to_blockmap(load_artifact("gshift", text))
        _write(cantor.blockmap_svg(f), out)
    elif kind == "flowchart-dot":
        try:
            fc = load_artifact("flowchart", text)
        except MalformedInput:
            fc = flowchart.compile_to_flowchart(load_artifact("murec", text))
        _write(flowchart.flowchart_dot(fc), out)
    else:
        m = loads_machine(text)
        try:
            length = Fraction(scale)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageFailure(f"bad scale {scale!r}") from exc
        sk = bordism.thicken(bordism.build_graph(m), lengths=length,
                             allow_irreversible=allow_irreversible)
        ns = _parse_range(inputs)
        if kind == "trace-csv":
            _write(bordism.traces_csv([bordism.reach(sk, n, fuel, record=False) for n in ns]), out)
        else:
            _write(bordism.conjecture_csv(bordism.conjecture_report(sk, ns, fuel)), out)


@cli.command("hamdemo")
@click.option("--field", "field_", default="rotation", show_default=True,
              help="rotation, cubic, zero, or components like '-q2; q1'.")
@click.option("--q0", default=None, help="Start point, e.g. 1,0 (defaults per demo field).")
@click.option("--T", "T", type=float, default=1.0, show_default=True)
@click.option("--h", "h", type=float, default=1e-3, show_default=True)
@click.option("--order", is_flag=True, help="Also report the step-halving error ratio.")
@click.option("--csv", "csv_out", type=click.Path(dir_okay=False, path_type=Path),
              help="Write per-step drift norms as CSV.")
@OUT
def cmd_hamdemo(field_, q0, T, h, order, csv_out, out):
    """Integrate the cotangent lift of a polynomial field starting on p = 0."""
    if field_ in hamdemo.DEMO_FIELDS:
        X = hamdemo.DEMO_FIELDS[field_]
        start = hamdemo.DEMO_STARTS[field_]
    else:
        try:
            X = hamdemo.parse_field(field_)
        except ValueError as exc:
            raise UsageFailure(str(exc)) from exc
        start = (1.0,) + (0.0,) * (X.dim - 1)
    if q0 is not None:
        try:
            start = tuple(float(v) for v in q0.split(","))
        except ValueError as exc:
            raise UsageFailure(f"bad start point {q0!r}") from exc
    if h <= 0 or T <= 0:
        raise UsageFailure("--T and --h must be positive")
    try:
        rep = hamdemo.verify_universality(X, start, T, h)
    except ValueError as exc:
        raise UsageFailure(str(exc)) from exc
    text = f"field {field_}\nq0 {','.join(map(str, start))}\nT {T} h {h}\n" + rep.text()
    if order and not rep.aborted:
        exact = hamdemo.rotation_exact(start, T) if field_ == "rotation" else None
        text += f"error ratio on halving h {hamdemo.convergence_ratio(X, start, T, h, exact):.4f}\n"
    _write(text, out)
    if csv_out is not None:
        csv_out.write_text(rep.csv())
    if rep.aborted:
        raise CheckFailure(f"integration aborted: {rep.reason}")


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="tkft", standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except Refused as exc:
        click.echo(f"refused: {exc}", err=True)
        if exc.certificate is not None:
            click.echo(f"certificate: {_certificate_text(exc.certificate)}", err=True)
        return 1
    except MalformedInput as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except TKFTError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 1


def _certificate_text(cert) -> str:
    if isinstance(cert, tuple) and cert and all(isinstance(b, int) for b in cert):
        return "".join(map(str, cert))  # a window of bits
    if isinstance(cert, tuple) and not hasattr(cert, "_fields"):
        return "; ".join(_certificate_text(c) for c in cert)
    return str(cert)
