"""Command-line front end: ``boolprop <subcommand> ...``.

Function sources (``--f``/``--g``) are one of

* a builtin: ``const0``, ``const1``, ``parity``, ``and``, ``majority``, with
  an optional arity suffix (``and2``); without a suffix the arity comes from
  ``--n``, else from the other source, else 4;
* a generator spec: ``rand:n=<n>``, ``dist:g=<src>,d=<int>``,
  ``bias:n=<n>,c=<frac>,sign=<+|->``;
* a path to a truth-table text file.

Exit status is 0 when a test completes (whatever the verdict), 2 for usage,
file and format errors, 3 for promise and representability errors.  Errors
go to stderr as a single line ``boolprop: error: <kind>: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from boolprop import bench, ctesters, qtesters
from boolprop.boolfn import (
    BooleanFunction,
    builtin,
    gen_at_distance,
    gen_random,
    gen_with_bias,
    read_truth_table,
    walsh_spectrum_fast,
    walsh_spectrum_naive,
)
from boolprop.errors import ArityError, FormatError, PromiseError, RepresentabilityError
from boolprop.oracle import OracleHandle
from boolprop.verdict import PROMISE_VIOLATED, Verdict

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PROMISE = 3
DEFAULT_ARITY = 4

_BUILTIN = re.compile(r"^(const0|const1|parity|and|majority)(\d+)?$")


class CliError(Exception):
    def __init__(self, kind: str, message: str, status: int = EXIT_USAGE):
        super().__init__(message)
        self.kind = kind
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("usage", message)


# --- argument helpers ---------------------------------------------------------

def parse_epsilon(text: str) -> Fraction:
    """Decimal ("0.0625") or exact fraction ("1/16")."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise CliError("usage", f"invalid epsilon {text!r}") from None


def parse_epsilon_list(text: str) -> list[Fraction]:
    return [parse_epsilon(t) for t in text.split(",") if t.strip()]


def _kv(body: str, keys: set[str], spec: str) -> dict[str, str]:
    out = {}
    for part in body.split(","):
        k, sep, v = part.partition("=")
        if not sep or k not in keys:
            raise CliError("usage", f"bad generator spec {spec!r}")
        out[k] = v
    if set(out) != keys:
        raise CliError("usage", f"generator spec {spec!r} needs keys {sorted(keys)}")
    return out


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise CliError("usage", f"{what} must be an integer, got {text!r}") from None


def is_builtin(src: str) -> bool:
    return bool(_BUILTIN.match(src))


def source_arity(src: str) -> int | None:
    """Arity fixed by the source itself, or None for a bare builtin."""
    m = _BUILTIN.match(src)
    if m:
        return int(m.group(2)) if m.group(2) else None
    return load_source(src, None, np.random.default_rng(0)).n


def load_source(src: str, n: int | None, rng: np.random.Generator) -> BooleanFunction:
    m = _BUILTIN.match(src)
    if m:
        name, suffix = m.groups()
        arity = int(suffix) if suffix else (n if n is not None else DEFAULT_ARITY)
        return builtin(name, arity)
    kind, sep, body = src.partition(":")
    if sep and kind == "rand":
        args = _kv(body, {"n"}, src)
        return gen_random(_int(args["n"], "n"), rng)
    if sep and kind == "dist":
        head, sep2, d = body.rpartition(",d=")
        if not sep2 or not head.startswith("g="):
            raise CliError("usage", f"bad generator spec {src!r}; expected dist:g=<src>,d=<int>")
        g = load_source(head[2:], n, rng)
        return gen_at_distance(g, _int(d, "d"), rng)
    if sep and kind == "bias":
        args = _kv(body, {"n", "c", "sign"}, src)
        if args["sign"] not in ("+", "-", "+1", "-1", "1"):
            raise CliError("usage", f"sign must be + or -, got {args['sign']!r}")
        sign = -1 if args["sign"].startswith("-") else 1
        return gen_with_bias(_int(args["n"], "n"), parse_epsilon(args["c"]), sign, rng)
    path = Path(src)
    try:
        return read_truth_table(path)
    except FileNotFoundError:
        raise CliError("io", f"cannot read {src!r}: not a builtin, generator or existing file") from None
    except OSError as exc:
        raise CliError("io", f"cannot read {src!r}: {exc.strerror or exc}") from None


def _seed_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def load_sources(args, names: tuple[str, ...]) -> list[BooleanFunction]:
    """Load --f/--g, resolving bare builtins' arity from --n or the other source."""
    srcs = [getattr(args, name) for name in names]
    for name, src in zip(names, srcs):
        if src is None:
            raise CliError("usage", f"--{name} is required")
    n = args.n
    if n is None:
        fixed = [source_arity(s) for s in srcs if not is_builtin(s) or _BUILTIN.match(s).group(2)]
        n = fixed[0] if fixed else None
    fs = [load_source(s, n, _seed_rng(args.seed, slot)) for slot, s in enumerate(srcs)]
    if len({f.n for f in fs}) > 1:
        raise CliError("arity", "arity mismatch: " + ", ".join(
            f"--{name} has n={f.n}" for name, f in zip(names, fs)))
    return fs


# --- output -------------------------------------------------------------------

def _verdict_text(v: Verdict) -> str:
    lines = [
        f"algorithm: {v.algorithm}",
        f"decision: {v.decision}",
        f"quantum_queries: {v.quantum_queries}",
        f"classical_queries: {v.classical_queries}",
    ]
    if v.measured_z is not None:
        lines.append(f"measured_z: {v.measured_z}")
    if v.plan:
        lines.append("rounds: " + "+".join(str(m) for m in v.plan["rounds"]))
        if v.plan.get("warning"):
            lines.append(f"warning: {v.plan['warning']}")
    for key, p in sorted((v.outcome_probabilities or {}).items()):
        lines.append(f"P({key}): {p!r}")
    lines.append(f"seed: {v.seed}")
    return "\n".join(lines) + "\n"


def _verdict_csv(v: Verdict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    probs = v.outcome_probabilities or {}
    keys = sorted(probs)
    w.writerow(["algorithm", "decision", "quantum_queries", "classical_queries",
                "measured_z", "seed"] + [f"p_{k}" for k in keys])
    w.writerow([v.algorithm, v.decision, v.quantum_queries, v.classical_queries,
                "" if v.measured_z is None else v.measured_z, v.seed]
               + [repr(probs[k]) for k in keys])
    return buf.getvalue()


def format_verdict(v: Verdict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(v.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return _verdict_csv(v)
    return _verdict_text(v)


def _emit(args, text: str) -> None:
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise CliError("io", f"cannot write {args.out!r}: {exc.strerror or exc}") from None
    else:
        sys.stdout.write(text)


def _finish_verdict(args, v: Verdict) -> int:
    state = v.details.pop("final_state", None)
    _emit(args, format_verdict(v, args.format))
    if state is not None:
        sys.stderr.write(state.dump())
    if v.decision == PROMISE_VIOLATED:
        raise CliError("promise", "inputs satisfy neither promise branch", EXIT_PROMISE)
    return EXIT_OK


# --- subcommands --------------------------------------------------------------

def cmd_identity(args) -> int:
    f, g = load_sources(args, ("f", "g"))
    of, og = OracleHandle(f), OracleHandle(g)
    rng = _seed_rng(args.seed, 2)
    if args.classical:
        v = ctesters.classical_identity(of, og, args.eps, rng=rng)
        v.seed = args.seed
    else:
        v = qtesters.test_identity(of, og, args.eps, args.mode, seed=args.seed, rng=rng,
                                   keep_state=args.dump_amplitudes)
    return _finish_verdict(args, v)


def cmd_correlation(args) -> int:
    f, g = load_sources(args, ("f", "g"))
    of, og = OracleHandle(f), OracleHandle(g)
    if args.classical:
        v = ctesters.deterministic_correlation(of, og, args.eps)
        v.seed = args.seed
    else:
        v = qtesters.test_correlation_exact(of, og, args.eps, seed=args.seed,
                                            rng=_seed_rng(args.seed, 2),
                                            keep_state=args.dump_amplitudes)
    return _finish_verdict(args, v)


def cmd_balance(args) -> int:
    (f,) = load_sources(args, ("f",))
    of = OracleHandle(f)
    rng = _seed_rng(args.seed, 2)
    if args.classical:
        v = ctesters.classical_balance(of, args.eps, rng=rng)
        v.seed = args.seed
    else:
        v = qtesters.test_balance(of, args.eps, args.mode, seed=args.seed, rng=rng,
                                  keep_state=args.dump_amplitudes)
    return _finish_verdict(args, v)


def cmd_walsh(args) -> int:
    (f,) = load_sources(args, ("f",))
    spec = walsh_spectrum_naive(f) if args.method == "naive" else walsh_spectrum_fast(f)
    coeffs = [float(c) for c in spec.coeffs]
    if args.format == "json":
        text = json.dumps({"n": f.n, "coefficients": coeffs}, indent=2) + "\n"
    elif args.format == "csv":
        text = "omega,coefficient\n" + "".join(f"{w},{c!r}\n" for w, c in enumerate(coeffs))
    else:
        text = "".join(f"{w} {c!r}\n" for w, c in enumerate(coeffs))
    _emit(args, text)
    return EXIT_OK


def cmd_gen(args) -> int:
    (f,) = load_sources(args, ("f",))
    _emit(args, f.to_text())
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = bench.ExperimentConfig(
        problem=args.problem,
        n=args.n if args.n is not None else 12,
        epsilons=args.eps if args.eps is not None else bench.default_epsilons(),
        trials=args.trials,
        base_seed=args.seed,
        mode=args.mode,
        workers=args.workers,
    )
    report = bench.run_experiment(cfg)
    if args.format == "json":
        text = report.to_json(timing=args.timing)
    else:
        text = report.to_csv(timing=args.timing)
        if args.format == "text":
            text += "".join(
                f"# slope {alg}: {'n/a' if s is None else format(s, '.4f')}\n"
                for alg, s in report.slopes.items()
            )
    _emit(args, text)
    return EXIT_OK


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--n", type=int, help="arity for bare builtin names")

    parser = _Parser(prog="boolprop", description="Quantum and classical property "
                     "testers for Boolean functions on an exact statevector simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tester(name, help_text, two, modes=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--f", help="function source")
        if two:
            p.add_argument("--g", help="second function source")
        p.add_argument("--eps", type=parse_epsilon, required=True)
        if modes:
            p.add_argument("--mode", choices=qtesters.MODES, default="bound")
        p.add_argument("--classical", action="store_true",
                       help="run the classical tester instead of the quantum one")
        p.add_argument("--dump-amplitudes", action="store_true",
                       help="print the final state to stderr as 'index real imag' lines")
        return p

    tester("identity", "f == g versus Dist(f, g) >= eps", True).set_defaults(func=cmd_identity)
    tester("correlation", "|C(f, g)| = 1 versus |C(f, g)| = eps", True,
           modes=False).set_defaults(func=cmd_correlation)
    tester("balance", "C(f) = 0 versus |C(f)| >= eps", False).set_defaults(func=cmd_balance)

    p = sub.add_parser("walsh", parents=[common], help="Walsh spectrum of f")
    p.add_argument("--f", help="function source")
    p.add_argument("--method", choices=("fast", "naive"), default="fast")
    p.set_defaults(func=cmd_walsh)

    p = sub.add_parser("gen", parents=[common], help="write a function as a truth-table file")
    p.add_argument("--f", help="function source")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", parents=[common], help="epsilon sweep reproducing the "
                       "query-complexity table")
    p.add_argument("--problem", choices=bench.PROBLEMS, required=True)
    p.add_argument("--eps", type=parse_epsilon_list, help="comma-separated epsilons")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--mode", choices=qtesters.MODES, default="bound")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include elapsed seconds "
                   "(makes output non-reproducible)")
    p.set_defaults(func=cmd_bench)
    return parser


def _fail(kind: str, message: str, status: int) -> int:
    one_line = " ".join(str(message).split())
    sys.stderr.write(f"boolprop: error: {kind}: {one_line}\n")
    return status


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        return _fail(exc.kind, str(exc), exc.status)
    except RepresentabilityError as exc:
        return _fail("representability", str(exc), EXIT_PROMISE)
    except PromiseError as exc:
        return _fail("promise", str(exc), EXIT_PROMISE)
    except ArityError as exc:
        return _fail("arity", str(exc), EXIT_USAGE)
    except FormatError as exc:
        return _fail("format", str(exc), EXIT_USAGE)
    except ValueError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
