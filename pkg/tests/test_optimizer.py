import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import rosen

from qudit_cd.optimizer import NonFiniteObjective, OptimizerConfig, Trace, minimize, multistart, run_seeds, summarize


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(max_iterations=0)
    with pytest.raises(ValueError):
        OptimizerConfig(initial_step=1e-7, tolerance=1e-6)
    with pytest.raises(ValueError):
        OptimizerConfig(tolerance=0)
    with pytest.raises(ValueError):
        OptimizerConfig(method="bfgs")


@pytest.mark.parametrize("method", ["cobyla", "nelder-mead"])
def test_convex_1d(method):
    x, trace = minimize(lambda v: (v[0] - 1) ** 2, [5.0], OptimizerConfig(method=method))
    assert abs(x[0] - 1) < 1e-4
    assert len(trace) <= 500


def test_rosenbrock_nelder_mead():
    _, trace = minimize(rosen, [-1.2, 1.0], OptimizerConfig(method="nelder-mead"))
    assert min(trace.values) < 1e-3
    assert len(trace) <= 500


@pytest.mark.xfail(strict=True, reason="linear-model trust region crawls along the curved valley; f stays near 2-3 after 500 evaluations")
def test_rosenbrock_cobyla():
    _, trace = minimize(rosen, [-1.2, 1.0], OptimizerConfig(method="cobyla"))
    assert min(trace.values) < 1e-3


@pytest.mark.parametrize("method", ["cobyla", "nelder-mead"])
def test_constant_objective(method):
    x0 = np.array([0.3, -1.2, 2.0])
    x, trace = minimize(lambda v: 4.0, x0, OptimizerConfig(method=method))
    assert np.array_equal(x, x0)
    assert set(trace.values) == {4.0}
    assert set(trace.best) == {4.0}


@pytest.mark.parametrize("method", ["cobyla", "nelder-mead"])
def test_budget_respected(method):
    calls = []

    def f(v):
        calls.append(1)
        return rosen(v)

    _, trace = minimize(f, [-1.2, 1.0], OptimizerConfig(max_iterations=37, method=method))
    assert len(trace) == len(calls) == 37


def test_non_finite_aborts():
    with pytest.raises(NonFiniteObjective, match="evaluation"):
        minimize(lambda v: math.nan if v[0] > 0.2 else v[0] ** 2, [0.0], OptimizerConfig())


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 4), method=st.sampled_from(["cobyla", "nelder-mead"]))
def test_trace_monotone_and_deterministic(seed, n, method):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    f = lambda v: float(np.sin(v).sum() + 0.1 * v @ (a @ a.T) @ v)
    cfg = OptimizerConfig(max_iterations=120, method=method)
    x0 = rng.normal(size=n)
    x1, t1 = minimize(f, x0, cfg)
    x2, t2 = minimize(f, x0, cfg)
    assert t1.values == t2.values and np.array_equal(x1, x2)
    assert all(b <= a for a, b in zip(t1.best, t1.best[1:]))
    assert t1.best[-1] == min(t1.values) == f(x1)


def test_trace_rows():
    t = Trace()
    for v in (3.0, 5.0, 1.0, 2.0):
        t.append(v)
    assert t.rows() == [(1, 3.0, 3.0), (2, 5.0, 3.0), (3, 1.0, 1.0), (4, 2.0, 1.0)]


def test_multistart_single_equals_minimize():
    f = lambda v: float((v[0] - 0.3) ** 2 + np.cos(v[1]))
    cfg = OptimizerConfig(seed=11)
    best, records, _ = multistart(f, 2, 1, cfg)
    x0 = np.random.default_rng(run_seeds(11, 1)[0]).uniform(-0.1, 0.1, size=2)
    assert np.array_equal(records[0].x0, x0)
    x, trace = minimize(f, x0, cfg)
    assert np.array_equal(best.x_best, x) and best.trace.values == trace.values


def test_multistart_reproducible():
    f = lambda v: float(np.cos(3 * v[0]) + 0.1 * v[0] ** 2 + v[1] ** 2)
    runs = [multistart(f, 2, 5, OptimizerConfig(seed=3), bounds=(-5, 5))[1] for _ in range(2)]
    for a, b in zip(*runs):
        assert a.seed == b.seed and a.trace.values == b.trace.values
        assert np.array_equal(a.x_best, b.x_best)
    other = multistart(f, 2, 5, OptimizerConfig(seed=4), bounds=(-5, 5))[1]
    assert [r.seed for r in other] != [r.seed for r in runs[0]]


def test_multistart_threads_match_serial():
    f = lambda v: float(np.cos(3 * v[0]) + 0.1 * v[0] ** 2)
    serial = multistart(f, 1, 6, OptimizerConfig(seed=8), bounds=(-5, 5))[1]
    threaded = multistart(f, 1, 6, OptimizerConfig(seed=8), bounds=(-5, 5), workers=3)[1]
    assert [r.trace.values for r in serial] == [r.trace.values for r in threaded]


def test_multistart_finds_global_basin():
    f = lambda v: float(np.cos(3 * v[0]) + 0.1 * v[0] ** 2)
    grid = np.linspace(-5, 5, 200001)
    vals = np.cos(3 * grid) + 0.1 * grid**2
    x_star, f_star = grid[vals.argmin()], vals.min()
    best, records, stats = multistart(f, 1, 10, OptimizerConfig(seed=0), bounds=(-5, 5))
    assert abs(best.f_best - f_star) < 1e-6
    assert abs(abs(best.x_best[0]) - abs(x_star)) < 1e-2
    assert stats["n"] == 10


def test_multistart_isolates_failures():
    def f(v):
        if v[0] > 0.6:
            return math.inf
        return float((v[0] + 0.5) ** 2)

    best, records, stats = multistart(f, 1, 8, OptimizerConfig(seed=1, initial_step=0.1), bounds=(-1, 1))
    failed = [r for r in records if not r.ok]
    assert failed and all("NonFiniteObjective" in r.error for r in failed)
    assert all(r.x_best is None for r in failed)
    assert len(records) == 8 and best is not None and best.ok
    assert stats["n"] == 8 - len(failed)
    with pytest.raises(ValueError):
        multistart(f, 1, 0)


def test_summarize():
    s = summarize([1.0, 2.0, 3.0, 4.0])
    assert s["mean"] == 2.5 and s["median"] == 2.5
    assert s["std"] == pytest.approx(np.std([1, 2, 3, 4]))
    assert s["iqr"] == pytest.approx(1.5)
    same = summarize([0.7] * 5)
    assert same["std"] == 0 and same["iqr"] == 0
    assert summarize([None, math.nan])["n"] == 0


def test_run_seeds_distinct():
    seeds = run_seeds(0, 50)
    assert len(set(seeds)) == 50 and all(0 <= s < 2**63 for s in seeds)
    assert run_seeds(0, 3) == seeds[:3]
