"""Command-line front end.

Exit status: 0 for YES (or success), 1 for a sound NO, 2 for errors and
resource limits.
"""
from __future__ import annotations

import json
import random
import sys
import time
from typing import Optional, Sequence

import click
import numpy as np

from . import obdd as ob
from .automata import parse_automaton, validity_automaton
from .circuit import format_circuit, parse_circuit
from .errors import DecompError, InvalidParameters, ParseError

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(path, 0, e.strerror or str(e)) from None


def load_obdd(path: str) -> ob.Obdd:
    return ob.parse_obdd(_read(path), path)


def load_circuit(path: str):
    return parse_circuit(_read(path), path)


def load_class(spec: str, n: int):
    """``builtin:validity:N``, ``builtin:hypercube`` or an automaton file."""
    from .reconfig import hypercube_class

    if spec.startswith("builtin:"):
        parts = spec.split(":")
        if parts[1] == "validity" and len(parts) == 3:
            try:
                return validity_automaton(int(parts[2]))
            except ValueError:
                raise InvalidParameters(f"bad width in class {spec!r}") from None
        if parts[1] == "hypercube" and len(parts) == 2:
            return hypercube_class(n)
        raise InvalidParameters(f"unknown builtin class {spec!r}")
    return parse_automaton(_read(spec), spec)


def _classes(specs: Sequence[str], n: int):
    if not specs:
        return None
    return tuple(load_class(s, n) for s in specs)


class Outcome(Exception):
    """Carries the exit status out of a command."""

    def __init__(self, code: int):
        self.code = code


def _finish(answer: bool, text: str, as_json: bool, payload: dict) -> None:
    if as_json:
        payload = {"answer": "YES" if answer else "NO", **payload}
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        click.echo(text, nl=not text.endswith("\n"))
    raise Outcome(EXIT_YES if answer else EXIT_NO)


def _stats_dict(res) -> dict:
    return {
        "states_explored": res.stats.states_explored,
        "levels": res.stats.levels,
        "wall_ms": round(res.wall_ms, 3),
    }


def _report_solve(res, verify: bool, as_json: bool, extra: Optional[dict] = None) -> None:
    wit = res.witness
    payload = {"stats": _stats_dict(res), **(extra or {})}
    if wit is None:
        dead = res.stats.dead_level
        payload["dead_level"] = dead
        _finish(False, f"NO (search died at level {dead})", as_json, payload)
    payload["witness"] = wit.format()
    payload["reconfig_width"] = wit.reconfig_width
    text = "YES\n" + wit.format()
    if verify:
        payload["verified"] = wit.verified
        checks = " ".join(f"{k}={v}" for k, v in wit.verified.items() if isinstance(v, bool))
        text += f"\nverified: {checks}\ngate widths: {' '.join(map(str, wit.verified['gate_widths']))}\n"
        if not wit.ok:
            click.echo(text, err=True)
            raise DecompError("witness failed re-verification")
    _finish(True, text, as_json, payload)


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for any randomness.")
@click.pass_context
def cli(ctx, seed):
    """Decomposition of functions given as bounded-width OBDDs."""
    random.seed(seed)
    np.random.seed(seed)
    ctx.obj = {"seed": seed}


@cli.command()
@click.argument("file")
@click.option("--dot", is_flag=True, help="Emit Graphviz instead of the text format.")
def canon(file, dot):
    """Print the canonical form of an OBDD."""
    c = ob.canonicalize(load_obdd(file))
    click.echo(ob.to_dot(c) if dot else ob.format_obdd(c), nl=False)


@cli.command("eval")
@click.argument("file")
@click.argument("bits")
def eval_cmd(file, bits):
    """Evaluate an OBDD on a bit string."""
    d = load_obdd(file)
    if any(ch not in "01" for ch in bits):
        raise InvalidParameters(f"input {bits!r} is not a bit string")
    click.echo(ob.evaluate(d, [int(ch) for ch in bits]))


@cli.command()
@click.argument("op", type=click.Choice(["and", "or", "not"]))
@click.argument("files", nargs=-1, required=True)
@click.option("--canon", "canon_", is_flag=True, help="Canonicalize the result.")
def apply(op, files, canon_):
    """Combine OBDDs with a Boolean operation."""
    want = 1 if op == "not" else 2
    if len(files) != want:
        raise InvalidParameters(f"{op} takes {want} OBDD file(s)")
    ds = [load_obdd(f) for f in files]
    r = ob.apply(op, *ds)
    click.echo(ob.format_obdd(ob.canonicalize(r) if canon_ else r), nl=False)


@cli.command()
@click.argument("file1")
@click.argument("file2")
def equiv(file1, file2):
    """Decide whether two OBDDs compute the same function."""
    same = ob.equivalent(load_obdd(file1), load_obdd(file2))
    _finish(same, "YES" if same else "NO", False, {})


@cli.command()
@click.option("--target", required=True)
@click.option("--k", type=int, required=True)
@click.option("--json", "as_json", is_flag=True)
def junta(target, k, as_json):
    """Decide whether the target depends on at most k variables."""
    vs = sorted(ob.junta_variables(load_obdd(target)))
    ok = len(vs) <= k
    text = f"YES\nvariables: {' '.join(map(str, vs))}" if ok else f"NO (depends on {len(vs)} variables)"
    _finish(ok, text, as_json, {"variables": vs})


def _solver_options(f):
    opts = [
        click.option("--target", required=True, help="Target OBDD file."),
        click.option("--circuit", "circuit_file", required=True, help="Circuit file."),
        click.option("--p", type=int, required=True, help="Factor width."),
        click.option("--class", "class_specs", multiple=True,
                      help="builtin:validity:N, builtin:hypercube or automaton file; once or per input."),
        click.option("--syntactic-class", is_flag=True, help="Require the factor OBDD itself to be accepted."),
        click.option("--route", type=click.Choice(["pairing", "direct"]), default="pairing", show_default=True),
        click.option("--verify", is_flag=True, help="Print the re-verification report."),
        click.option("--json", "as_json", is_flag=True),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


@cli.command()
@_solver_options
@click.option("--max-width", type=int, default=64, show_default=True)
def decompose(target, circuit_file, p, class_specs, syntactic_class, route, verify, as_json, max_width):
    """Decide whether the target decomposes through a circuit."""
    from .reconfig import ProblemInstance, solve_decomposition

    d = load_obdd(target)
    inst = ProblemInstance(d, load_circuit(circuit_file), p, None, _classes(class_specs, d.n), syntactic_class)
    _report_solve(solve_decomposition(inst, max_width=max_width, route=route), verify, as_json)


@cli.command()
@_solver_options
@click.option("--w", type=int, required=True, help="Bound on every gate's width.")
def reconfig(target, circuit_file, p, class_specs, syntactic_class, route, verify, as_json, w):
    """Decomposition with a bound on every intermediate gate width."""
    from .reconfig import ProblemInstance, solve_reconfiguration

    d = load_obdd(target)
    inst = ProblemInstance(d, load_circuit(circuit_file), p, w, _classes(class_specs, d.n), syntactic_class)
    _report_solve(solve_reconfiguration(inst, route=route), verify, as_json)


@cli.command()
@click.option("--target", required=True)
@click.option("--k", type=int, required=True)
@click.option("--p", type=int, required=True)
@click.option("--m-max", type=int, required=True)
@click.option("--class", "class_specs", multiple=True)
@click.option("--syntactic-class", is_flag=True)
@click.option("--max-width", type=int, default=64, show_default=True)
@click.option("--verify", is_flag=True)
@click.option("--json", "as_json", is_flag=True)
def genjunta(target, k, p, m_max, class_specs, syntactic_class, max_width, verify, as_json):
    """Search circuits of growing size for a decomposition of the target."""
    from .reconfig import decide_generalized_junta

    d = load_obdd(target)
    t0 = time.perf_counter()
    hit = decide_generalized_junta(
        d, k, p, m_max, _classes(class_specs, d.n),
        max_width=max_width, syntactic_class=syntactic_class,
    )
    ms = round((time.perf_counter() - t0) * 1000, 3)
    if hit is None:
        _finish(False, "NO", as_json, {"stats": {"wall_ms": ms}})
    c, wit = hit
    text = "YES\n" + format_circuit(c) + wit.format()
    if verify:
        text += f"\ngate widths: {' '.join(map(str, wit.verified['gate_widths']))}\n"
    _finish(True, text, as_json,
            {"circuit": format_circuit(c), "witness": wit.format(), "stats": {"wall_ms": ms}})


@cli.command()
@click.option("--target", required=True)
@click.option("--k", type=int, required=True)
@click.option("--max-width", type=int, default=64, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def factorize(target, k, max_width, as_json):
    """Write the target's language as an intersection of narrower OBDDs."""
    from .reconfig import factorize_obdd

    fs = factorize_obdd(load_obdd(target), k, max_width=max_width)
    if fs is None:
        _finish(False, "NO", as_json, {})
    body = "---\n".join(ob.format_obdd(f) for f in fs)
    _finish(True, "YES\n" + body, as_json, {"factors": [ob.format_obdd(f) for f in fs]})


@cli.group()
def oracle():
    """Brute-force cross-checks."""


@oracle.command("sweep")
@click.argument("config")
@click.pass_context
def oracle_sweep(ctx, config):
    """Compare solvers with brute force on a grid; one JSON line per instance."""
    from .oracle import SweepConfig, sweep

    try:
        with open(config) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ParseError(config, 0, e.strerror or str(e)) from None
    except json.JSONDecodeError as e:
        raise ParseError(config, e.lineno, e.msg) from None
    raw.setdefault("seed", ctx.obj["seed"])
    cfg = SweepConfig.from_dict(raw)
    ok = True
    for rec in sweep(cfg):
        ok &= rec["match"] and rec["verified"]
        click.echo(json.dumps(
            {k: rec[k] for k in ("instance", "oracle", "solver", "match")}, sort_keys=True
        ))
    raise Outcome(EXIT_YES if ok else EXIT_NO)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except Outcome as o:
        return o.code
    except click.exceptions.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.exceptions.Abort:
        return EXIT_ERROR
    except DecompError as e:
        click.echo(f"error: {type(e).__name__}: {e}", err=True)
        return EXIT_ERROR
    return rv if isinstance(rv, int) else EXIT_YES


if __name__ == "__main__":
    sys.exit(main())
