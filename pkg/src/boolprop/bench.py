"""Reproducible experiment harness reproducing the query-complexity table.

For every epsilon and promise branch an instance is generated, re-checked
against its promise, and handed to the quantum tester (exact success
probability, no sampling noise) and to the classical tester (Monte Carlo
frequency over ``trials`` runs).  Random streams are derived from
(base_seed, epsilon index, branch index, role, trial) with numpy's
SeedSequence, so reports are bit-identical for a given config regardless of
how cells are scheduled.

CSV schema, one row per (epsilon, branch, algorithm)::

    problem,n,mode,epsilon,branch,algorithm,exact,success,stderr,trials,
    mean_queries,m_or_T,rounds[,elapsed]

``success`` is an exact probability when ``exact`` is 1 (stderr and trials
empty), otherwise a frequency with its binomial standard error.  ``m_or_T``
is the total number of Q iterations (quantum), the identity loop bound r,
the sample size T, or the worst-case deterministic count (1+eps)N+2.
``rounds`` lists per-round iteration counts separated by ``+``.  ``elapsed``
(seconds) only appears when timing output is requested, since it is the one
field that is not reproducible.

The JSON document holds {"schema", "config", "rows", "slopes"} with the same
row fields.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from boolprop import ctesters, qtesters
from boolprop.boolfn import (
    bias,
    builtin,
    correlation,
    gen_at_distance,
    gen_random,
    gen_with_bias,
    hamming_distance,
    to_fraction,
    xor,
)
from boolprop.errors import PromiseError, RepresentabilityError
from boolprop.oracle import OracleHandle
from boolprop.verdict import (
    BALANCED,
    CORR_EPS,
    CORR_ONE,
    EPS_FAR,
    EPS_FAR_BALANCED,
    IDENTICAL,
)

SCHEMA = "boolprop.report/1"
PROBLEMS = ("identity", "correlation", "balance", "dj")
MAX_BENCH_ARITY = 16

BRANCHES = {
    "identity": (("identical", IDENTICAL), ("far", EPS_FAR)),
    "correlation": (("one", CORR_ONE), ("eps", CORR_EPS)),
    "balance": (("balanced", BALANCED), ("far", EPS_FAR_BALANCED)),
    "dj": (("constant", CORR_ONE), ("balanced", CORR_EPS)),
}

ROW_FIELDS = (
    "problem", "n", "mode", "epsilon", "branch", "algorithm", "exact", "success",
    "stderr", "trials", "mean_queries", "m_or_T", "rounds",
)


def default_epsilons(lo: int = 3, hi: int = 7) -> list[Fraction]:
    """2^-lo, ..., 2^-hi."""
    return [Fraction(1, 2 ** k) for k in range(lo, hi + 1)]


@dataclass
class ExperimentConfig:
    problem: str
    n: int
    epsilons: list = field(default_factory=default_epsilons)
    trials: int = 1000
    base_seed: int = 0
    mode: str = "bound"
    workers: int = 1

    def __post_init__(self):
        self.epsilons = [to_fraction(e) for e in self.epsilons]
        if self.problem == "dj":
            self.epsilons = [Fraction(0)]

    def validate(self) -> None:
        if self.problem not in PROBLEMS:
            raise ValueError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        if not 1 <= self.n <= MAX_BENCH_ARITY:
            raise ValueError(f"n={self.n} outside 1..{MAX_BENCH_ARITY}")
        if self.mode not in qtesters.MODES:
            raise ValueError(f"mode must be one of {qtesters.MODES}, got {self.mode!r}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not 0 <= self.base_seed < 2 ** 64:
            raise ValueError("base_seed must be a 64-bit unsigned integer")
        seen = set()
        for e in self.epsilons:
            if e in seen:
                raise ValueError(
                    f"epsilon {e} listed twice; its cells would reuse the same seeds"
                )
            seen.add(e)
        bad = []
        for e in self.epsilons:
            try:
                _check_epsilon(self.problem, self.n, e)
            except RepresentabilityError as exc:
                bad.append(str(exc))
        if bad:
            raise RepresentabilityError("; ".join(bad))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["epsilons"] = [str(e) for e in self.epsilons]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**{**d, "epsilons": [Fraction(e) for e in d["epsilons"]]})


def _nearest(value: Fraction, denom: int) -> tuple[Fraction, Fraction]:
    scaled = value * denom
    return Fraction(math.floor(scaled), denom), Fraction(math.ceil(scaled), denom)


def _check_epsilon(problem: str, n: int, eps: Fraction) -> None:
    size = 1 << n
    if problem == "identity":
        if not 0 < eps <= 1 or (eps * size).denominator != 1:
            lo, hi = _nearest(eps, size)
            raise RepresentabilityError(
                f"identity: eps={eps} needs eps*2^n integral at n={n}; try {lo} or {hi}",
                nearest=(lo, hi),
            )
    elif problem == "balance":
        if not 0 < eps <= qtesters.BALANCE_MAX_BIAS:
            raise RepresentabilityError(f"balance: eps={eps} outside (0, 1/2]")
        if (eps * size / 2).denominator != 1:
            lo, hi = _nearest(eps, size // 2)
            raise RepresentabilityError(
                f"balance: bias {eps} not representable at n={n}; try {lo} or {hi}",
                nearest=(lo, hi),
            )
    elif problem in ("correlation", "dj"):
        if not 0 <= eps <= qtesters.CORRELATION_MAX_EPS:
            raise RepresentabilityError(f"correlation: eps={eps} outside [0, sqrt(3)/2]")
        if ((1 - eps) * size / 2).denominator != 1:
            lo, hi = _nearest(eps, size // 2)
            raise RepresentabilityError(
                f"correlation: (1-eps)N/2 not integral for eps={eps} at n={n}; "
                f"try {lo} or {hi}",
                nearest=(lo, hi),
            )


@dataclass
class Row:
    problem: str
    n: int
    mode: str
    epsilon: str
    branch: str
    algorithm: str
    exact: bool
    success: float
    stderr: float | None
    trials: int | None
    mean_queries: float
    m_or_T: int
    rounds: str
    elapsed: float = field(default=0.0, compare=False)

    def record(self, timing: bool = False) -> dict:
        d = {k: getattr(self, k) for k in ROW_FIELDS}
        if timing:
            d["elapsed"] = self.elapsed
        return d


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list[Row]
    slopes: dict[str, float | None]

    def to_csv(self, timing: bool = False) -> str:
        buf = io.StringIO()
        fields = list(ROW_FIELDS) + (["elapsed"] if timing else [])
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            rec = row.record(timing)
            rec["exact"] = int(rec["exact"])
            writer.writerow({k: _cell(v) for k, v in rec.items()})
        return buf.getvalue()

    def to_dict(self, timing: bool = False) -> dict:
        return {
            "schema": SCHEMA,
            "config": self.config.to_dict(),
            "rows": [r.record(timing) for r in self.rows],
            "slopes": dict(self.slopes),
        }

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        rows = [Row(**r) for r in d["rows"]]
        return cls(ExperimentConfig.from_dict(d["config"]), rows, dict(d["slopes"]))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        return cls.from_dict(json.loads(text))

    def rows_for(self, algorithm: str) -> list[Row]:
        return [r for r in self.rows if r.algorithm == algorithm]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def fit_slope(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(queries) against log(eps)."""
    pts = [(float(e), float(q)) for e, q in points]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    if any(e <= 0 or q <= 0 for e, q in pts):
        raise ValueError("all epsilons and query counts must be positive")
    x = np.log([e for e, _ in pts])
    y = np.log([q for _, q in pts])
    dx = x - x.mean()
    var = float(dx @ dx)
    if var < 1e-24:
        raise ValueError("degenerate input: all epsilons are equal")
    return float(dx @ (y - y.mean()) / var)


# --- instance generation ------------------------------------------------------

def _seed(cfg: ExperimentConfig, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(cfg.base_seed, spawn_key=key)


def make_instance(problem: str, n: int, eps: Fraction, branch: str, rng):
    """Functions for one promise branch, validated exactly before use."""
    size = 1 << n
    if problem == "identity":
        g = gen_random(n, rng)
        d = 0 if branch == "identical" else int(eps * size)
        f = gen_at_distance(g, d, rng)
        if hamming_distance(f, g) != d:
            raise PromiseError(f"identity instance has distance {hamming_distance(f, g)} != {d}")
        return (f, g)
    if problem == "balance":
        c = Fraction(0) if branch == "balanced" else eps
        f = gen_with_bias(n, c, 1, rng)
        if Fraction(size - 2 * f.weight, size) != c:
            raise PromiseError(f"balance instance has bias {bias(f)} != {c}")
        return (f,)
    if problem in ("correlation", "dj"):
        if problem == "dj":
            g = builtin("const0", n)
            if branch == "constant":
                f = builtin("const1" if rng.integers(2) else "const0", n)
            else:
                f = gen_with_bias(n, 0, 1, rng)
            target = {"constant": 1, "balanced": 0}[branch]
        else:
            g = gen_random(n, rng)
            c = Fraction(1) if branch == "one" else eps
            f = xor(gen_with_bias(n, c, 1, rng), g)
            target = c
        if abs(Fraction(size - 2 * hamming_distance(f, g), size)) != target:
            raise PromiseError(f"correlation instance has |C| = {abs(correlation(f, g))}")
        return (f, g)
    raise ValueError(problem)


def _binomial(successes: int, trials: int) -> tuple[float, float]:
    p = successes / trials
    return p, math.sqrt(p * (1 - p) / trials)


def _run_cell(cfg: ExperimentConfig, i: int, eps: Fraction, j: int, branch: str,
              target: str) -> list[Row]:
    rng = np.random.default_rng(_seed(cfg, i, j, 0))
    funcs = make_instance(cfg.problem, cfg.n, eps, branch, rng)
    base = dict(problem=cfg.problem, n=cfg.n, mode=cfg.mode, epsilon=str(eps), branch=branch)
    rows = []

    # quantum: exact probability from a single simulated run
    t0 = time.perf_counter()
    qseed = _seed(cfg, i, j, 1)
    handles = [OracleHandle(f) for f in funcs]
    if cfg.problem == "identity":
        v = qtesters.test_identity(*handles, eps, cfg.mode, rng=np.random.default_rng(qseed))
        name = "quantum_identity"
    elif cfg.problem == "balance":
        v = qtesters.test_balance(*handles, eps, cfg.mode, rng=np.random.default_rng(qseed))
        name = "quantum_balance"
    else:
        v = qtesters.test_correlation_exact(*handles, eps, rng=np.random.default_rng(qseed))
        name = "quantum_correlation"
    rows.append(Row(**base, algorithm=name, exact=True, success=v.probability(target),
                    stderr=None, trials=None, mean_queries=float(v.quantum_queries),
                    m_or_T=sum(v.plan["rounds"]),
                    rounds="+".join(str(m) for m in v.plan["rounds"]),
                    elapsed=time.perf_counter() - t0))

    # classical
    t0 = time.perf_counter()
    if cfg.problem in ("identity", "balance"):
        hits = queries = 0
        for t in range(cfg.trials):
            trial_rng = np.random.default_rng(_seed(cfg, i, j, 2, t))
            handles = [OracleHandle(f) for f in funcs]
            if cfg.problem == "identity":
                cv = ctesters.classical_identity(*handles, eps, rng=trial_rng)
            else:
                cv = ctesters.classical_balance(*handles, eps, rng=trial_rng)
            hits += cv.decision == target
            queries += cv.classical_queries
        cc = ctesters.ClassicalConfig.from_epsilon(eps)
        p, se = _binomial(hits, cfg.trials)
        name = f"classical_{cfg.problem}"
        m_or_T = cc.r_identity if cfg.problem == "identity" else cc.T_balance
        rows.append(Row(**base, algorithm=name, exact=False, success=p, stderr=se,
                        trials=cfg.trials, mean_queries=queries / cfg.trials,
                        m_or_T=m_or_T, rounds="", elapsed=time.perf_counter() - t0))
    else:
        handles = [OracleHandle(f) for f in funcs]
        cv = ctesters.deterministic_correlation(*handles, eps)
        rows.append(Row(**base, algorithm="deterministic_correlation", exact=True,
                        success=float(cv.decision == target), stderr=None, trials=None,
                        mean_queries=float(cv.classical_queries),
                        m_or_T=ctesters.worst_case_queries(cfg.n, eps)[1], rounds="",
                        elapsed=time.perf_counter() - t0))
    return rows


def _slopes(rows: list[Row]) -> dict[str, float | None]:
    by_alg: dict[str, dict[str, float]] = {}
    for r in rows:
        worst = by_alg.setdefault(r.algorithm, {})
        worst[r.epsilon] = max(worst.get(r.epsilon, 0.0), r.mean_queries)
    out = {}
    for alg, pts in sorted(by_alg.items()):
        pairs = [(float(Fraction(e)), q) for e, q in pts.items()]
        try:
            out[alg] = fit_slope(pairs)
        except ValueError:
            out[alg] = None
    return out


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run every (epsilon, branch) cell and fit query-vs-epsilon slopes.

    Slopes use, per algorithm and epsilon, the largest mean query count over
    the promise branches.
    """
    config.validate()
    cells = [
        (i, eps, j, branch, target)
        for i, eps in enumerate(config.epsilons)
        for j, (branch, target) in enumerate(BRANCHES[config.problem])
    ]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(lambda c: _run_cell(config, *c), cells))
    else:
        parts = [_run_cell(config, *c) for c in cells]
    rows = [r for part in parts for r in part]
    return ExperimentReport(config, rows, _slopes(rows))
