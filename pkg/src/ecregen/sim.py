"""Monte Carlo Byzantine-failure experiments for the reconstruction algorithms.

Every trial draws its randomness from ``SeedSequence([seed, point, trial])``
so results do not depend on execution order or parallelism.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .container import make_checker, payload_capacity, payload_to_symbols, symbols_to_payload
from .errors import IntegrityFailure, InvalidParameter, ReconstructionFailure
from .codes import make_code

FULL_SHARE = "full"
PER_SYMBOL = "symbol"

CSV_FIELDS = ["p", "failure_rate", "avg_accesses", "avg_byzantine", "runs",
              "scheme", "n", "k", "d", "m", "seed"]


@dataclass(frozen=True)
class SimConfig:
    scheme: str = "msr"
    n: int = 20
    k: int = 10
    d: int | None = None
    m: int = 5
    gamma: int = 1
    p_grid: tuple = (0.0,)
    runs: int = 1000
    seed: int = 0
    mode: str = FULL_SHARE
    symbol_rate: float = 0.5
    payload_bytes: int | None = None

    def __post_init__(self):
        if self.scheme not in ("msr", "mbr"):
            raise InvalidParameter(f"unknown scheme {self.scheme!r}")
        if self.runs < 1:
            raise InvalidParameter("runs must be at least 1")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise InvalidParameter("failure probabilities must lie in [0, 1]")
        if self.mode not in (FULL_SHARE, PER_SYMBOL):
            raise InvalidParameter(f"unknown corruption mode {self.mode!r}")
        if not 0.0 <= self.symbol_rate <= 1.0:
            raise InvalidParameter("symbol_rate must lie in [0, 1]")
        if self.scheme == "mbr" and self.d is None:
            raise InvalidParameter("MBR needs an explicit d")
        build_code(self.scheme, self.n, self.k, self.d, self.m, self.gamma)

    @property
    def effective_d(self) -> int:
        return 2 * self.k - 2 if self.scheme == "msr" else self.d


@dataclass(frozen=True)
class TrialOutcome:
    success: bool
    nodes_accessed: int
    byzantine_count: int


@dataclass(frozen=True)
class SweepRow:
    p: float
    failure_rate: float
    avg_accesses: float
    avg_byzantine: float
    runs: int
    scheme: str
    n: int
    k: int
    d: int
    m: int
    seed: int


build_code = lru_cache(maxsize=16)(make_code)


def corrupt_share(symbols, rng, mode=FULL_SHARE, rate=0.5, field_size=32):
    """Byzantine version of a node's symbols.

    ``full`` replaces every symbol with a uniform draw (redrawn once if it
    equals the original vector); ``symbol`` replaces each symbol independently
    with probability ``rate``.
    """
    symbols = list(symbols)
    if mode == FULL_SHARE:
        out = rng.integers(0, field_size, size=len(symbols)).tolist()
        if out == symbols:
            out = rng.integers(0, field_size, size=len(symbols)).tolist()
        return out
    if mode == PER_SYMBOL:
        hit = rng.random(len(symbols)) < rate
        fresh = rng.integers(0, field_size, size=len(symbols))
        return [int(f) if h else s for s, h, f in zip(symbols, hit, fresh)]
    raise InvalidParameter(f"unknown corruption mode {mode!r}")


def trial_rng(seed, point, trial):
    return np.random.default_rng(np.random.SeedSequence([seed, point, trial]))


def run_trial(cfg: SimConfig, point: int, trial: int) -> TrialOutcome:
    p = cfg.p_grid[point]
    code = build_code(cfg.scheme, cfg.n, cfg.k, cfg.d, cfg.m, cfg.gamma)
    params = code.params
    rng = trial_rng(cfg.seed, point, trial)

    nbytes = cfg.payload_bytes
    if nbytes is None:
        nbytes = max(1, payload_capacity(cfg.m, params.B))
    payload = rng.integers(0, 256, size=nbytes, dtype=np.uint8).tobytes()
    shares = code.encode_blocks(payload_to_symbols(payload, cfg.m, params.B))

    byzantine = rng.random(cfg.n) < p
    stored = {}
    for sh in shares:
        if byzantine[sh.node_index]:
            stored[sh.node_index] = corrupt_share(sh.symbols, rng, cfg.mode, cfg.symbol_rate, 1 << cfg.m)
        else:
            stored[sh.node_index] = sh.symbols
    order = rng.permutation(cfg.n).tolist()
    try:
        result = code.reconstruct(stored.get, order, make_checker(cfg.m))
    except ReconstructionFailure as exc:
        return TrialOutcome(False, len(exc.accessed), int(byzantine.sum()))
    try:
        ok = symbols_to_payload(result.message, cfg.m) == payload
    except IntegrityFailure:
        ok = False
    return TrialOutcome(ok, result.nodes_accessed, int(byzantine.sum()))


def _run_point(args):
    cfg, point = args
    return [run_trial(cfg, point, t) for t in range(cfg.runs)]


def run_sweep(cfg: SimConfig, jobs: int = 1):
    """One SweepRow per grid point, in grid order."""
    tasks = [(cfg, i) for i in range(len(cfg.p_grid))]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_point = list(pool.map(_run_point, tasks))
    else:
        per_point = [_run_point(t) for t in tasks]
    rows = []
    for (_, i), outcomes in zip(tasks, per_point):
        runs = len(outcomes)
        rows.append(SweepRow(
            p=cfg.p_grid[i],
            failure_rate=sum(not o.success for o in outcomes) / runs,
            avg_accesses=sum(o.nodes_accessed for o in outcomes) / runs,
            avg_byzantine=sum(o.byzantine_count for o in outcomes) / runs,
            runs=runs, scheme=cfg.scheme, n=cfg.n, k=cfg.k, d=cfg.effective_d,
            m=cfg.m, seed=cfg.seed,
        ))
    return rows


def _fmt(v):
    return f"{v:.6f}" if isinstance(v, float) else str(v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        d = asdict(r)
        w.writerow([f"{r.p:g}"] + [_fmt(d[k]) for k in CSV_FIELDS[1:]])
    return buf.getvalue()


def rows_to_json(rows) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2, sort_keys=True) + "\n"


def binomial_tail(n: int, p: float, t: int) -> float:
    """P[Bin(n, p) > t]: failure rate of a decoder correcting exactly t bad nodes."""
    return sum(comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(t + 1, n + 1))


def parse_grid(text: str):
    """'0.1', '0,0.1,0.2' or 'start:stop:step' (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidParameter(f"bad grid {text!r}")
        start, stop, step = map(float, parts)
        if step <= 0 or stop < start:
            raise InvalidParameter(f"bad grid {text!r}")
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(float(x) for x in text.split(",") if x.strip())
