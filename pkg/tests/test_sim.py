import json
import math

import numpy as np
import pytest

from ecregen.errors import InvalidParameter
from ecregen.sim import (
    SimConfig,
    binomial_tail,
    corrupt_share,
    parse_grid,
    rows_to_csv,
    rows_to_json,
    run_sweep,
    run_trial,
)


def test_corruption_modes():
    sym = list(range(9))
    rng = np.random.default_rng(1)
    assert corrupt_share(sym, rng, "symbol", 0.0) == sym
    assert corrupt_share(sym, np.random.default_rng(1), "full") == corrupt_share(sym, np.random.default_rng(1), "full")
    out = corrupt_share([0] * 1000, np.random.default_rng(2), "symbol", 0.5, 32)
    assert 300 < sum(1 for x in out if x) < 600
    with pytest.raises(InvalidParameter):
        corrupt_share(sym, rng, "nope")


def test_full_share_redraws_identical_vector():
    class Scripted:
        def __init__(self):
            self.calls = 0

        def integers(self, lo, hi, size):
            self.calls += 1
            return np.array([7] * size if self.calls == 1 else [3] * size)

    assert corrupt_share([7, 7], Scripted(), "full") == [3, 3]


def test_trial_is_reproducible():
    cfg = SimConfig(p_grid=(0.2,), runs=5, seed=11)
    assert [run_trial(cfg, 0, t) for t in range(5)] == [run_trial(cfg, 0, t) for t in range(5)]


def test_no_failures_touch_k_nodes():
    cfg = SimConfig(p_grid=(0.0,), runs=20, seed=3)
    for t in range(20):
        out = run_trial(cfg, 0, t)
        assert out.success and out.nodes_accessed == 10 and out.byzantine_count == 0


def test_all_byzantine_always_fails():
    cfg = SimConfig(p_grid=(1.0,), runs=10, seed=3)
    (row,) = run_sweep(cfg)
    assert row.failure_rate == 1.0 and row.avg_byzantine == 20.0


def test_mbr_sweep_runs():
    cfg = SimConfig(scheme="mbr", d=18, p_grid=(0.0, 0.1), runs=20, seed=4)
    rows = run_sweep(cfg)
    assert rows[0].failure_rate == 0 and rows[0].avg_accesses == 10
    assert rows[1].d == 18


def test_sweep_csv_is_deterministic_and_parallel_safe():
    cfg = SimConfig(p_grid=(0.0, 0.15), runs=30, seed=99)
    a = rows_to_csv(run_sweep(cfg))
    b = rows_to_csv(run_sweep(cfg, jobs=2))
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "p,failure_rate,avg_accesses,avg_byzantine,runs,scheme,n,k,d,m,seed"
    assert lines[1].startswith("0,0.000000,10.000000,0.000000,30,msr,20,10,18,5,99")
    assert len(json.loads(rows_to_json(run_sweep(cfg)))) == 2


def test_different_seeds_differ():
    a = run_sweep(SimConfig(p_grid=(0.2,), runs=30, seed=1))
    b = run_sweep(SimConfig(p_grid=(0.2,), runs=30, seed=2))
    assert a != b


@pytest.mark.slow
@pytest.mark.parametrize("p", [0.15, 0.25])
def test_failure_rate_tracks_binomial_tail(p):
    runs = 300
    (row,) = run_sweep(SimConfig(p_grid=(p,), runs=runs, seed=2024))
    tail = binomial_tail(20, p, 5)
    sigma = math.sqrt(tail * (1 - tail) / runs)
    assert abs(row.failure_rate - tail) <= 3 * sigma + 1 / runs


def test_binomial_tail_values():
    assert binomial_tail(20, 0.0, 5) == 0
    assert binomial_tail(20, 1.0, 5) == pytest.approx(1.0)
    assert binomial_tail(20, 0.1, 5) == pytest.approx(0.011253, abs=1e-6)
    assert binomial_tail(3, 0.5, 0) == pytest.approx(7 / 8)


def test_grid_parsing():
    assert parse_grid("0:0.5:0.05") == tuple(round(0.05 * i, 10) for i in range(11))
    assert parse_grid("0.1") == (0.1,)
    assert parse_grid("0, 0.2,0.3") == (0.0, 0.2, 0.3)
    for bad in ("0:1", "0:1:0", "1:0:0.1"):
        with pytest.raises(InvalidParameter):
            parse_grid(bad)


@pytest.mark.parametrize("kw", [
    dict(scheme="rs"), dict(runs=0), dict(p_grid=(1.5,)), dict(mode="burst"),
    dict(symbol_rate=2.0), dict(scheme="mbr"), dict(k=11),
])
def test_config_validation(kw):
    with pytest.raises(InvalidParameter):
        SimConfig(**kw)
