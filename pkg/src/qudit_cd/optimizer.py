"""Derivative-free minimization with seeded multistart."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

log = logging.getLogger(__name__)

METHODS = ("cobyla", "nelder-mead")


class NonFiniteObjective(FloatingPointError):
    pass


class _BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 500
    initial_step: float = 0.5
    tolerance: float = 1e-6
    seed: int = 0
    method: str = "cobyla"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.initial_step > self.tolerance > 0:
            raise ValueError("need initial_step > tolerance > 0")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")


@dataclass
class Trace:
    """One row per objective evaluation: value and incumbent best."""

    values: list[float] = field(default_factory=list)
    best: list[float] = field(default_factory=list)

    def append(self, value: float) -> None:
        self.values.append(value)
        self.best.append(value if not self.best else min(self.best[-1], value))

    def __len__(self) -> int:
        return len(self.values)

    def rows(self):
        """``(iteration, objective, best_objective)`` with 1-based iterations."""
        return [(i + 1, v, b) for i, (v, b) in enumerate(zip(self.values, self.best))]


def minimize(objective, x0, cfg: OptimizerConfig = OptimizerConfig()):
    """Minimize ``objective`` from ``x0``; returns ``(x_best, trace)``.

    ``cobyla`` is a linear-model trust-region method (radius shrinks from
    ``initial_step`` to ``tolerance``); ``nelder-mead`` is the simplex
    fallback.  Every objective call is one trace row and the run stops once
    ``max_iterations`` calls have been made.
    """
    x0 = np.array(x0, dtype=float).ravel()
    trace = Trace()
    best = [math.inf, x0.copy()]

    def wrapped(x):
        if len(trace) >= cfg.max_iterations:
            raise _BudgetExhausted
        val = float(objective(np.array(x, dtype=float)))
        if not math.isfinite(val):
            raise NonFiniteObjective(f"objective returned {val!r} at evaluation {len(trace) + 1}, x={list(x)}")
        trace.append(val)
        if val < best[0]:
            best[0] = val
            best[1] = np.array(x, dtype=float)
        return val

    try:
        if cfg.method == "cobyla":
            scipy.optimize.minimize(
                wrapped,
                x0,
                method="COBYLA",
                options={"rhobeg": cfg.initial_step, "tol": cfg.tolerance, "maxiter": cfg.max_iterations},
            )
        else:
            n = x0.size
            simplex = np.vstack([x0] + [x0 + cfg.initial_step * np.eye(n)[i] for i in range(n)])
            scipy.optimize.minimize(
                wrapped,
                x0,
                method="Nelder-Mead",
                options={
                    "initial_simplex": simplex,
                    "xatol": cfg.tolerance,
                    "fatol": cfg.tolerance,
                    "maxfev": cfg.max_iterations,
                },
            )
    except _BudgetExhausted:
        pass
    return best[1], trace


@dataclass
class RunRecord:
    """One optimization run plus metrics filled in by the caller."""

    run_id: int
    seed: int
    x0: np.ndarray
    x_best: np.ndarray | None = None
    f_best: float = math.nan
    trace: Trace = field(default_factory=Trace)
    metrics: dict = field(default_factory=dict)
    error: str | None = None
    wall_time: float = 0.0
    config: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.error is None


def summarize(values) -> dict:
    """Mean, standard deviation, median and interquartile range."""
    v = np.asarray([x for x in values if x is not None and math.isfinite(x)], dtype=float)
    if v.size == 0:
        return {"n": 0, "mean": None, "std": None, "median": None, "q1": None, "q3": None, "iqr": None}
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return {
        "n": int(v.size),
        "mean": float(v.mean()),
        "std": float(v.std()),
        "median": float(med),
        "q1": float(q1),
        "q3": float(q3),
        "iqr": float(q3 - q1),
    }


def run_seeds(seed: int, restarts: int) -> list[int]:
    """Independent 63-bit seeds for each restart, derived from ``seed``."""
    ss = np.random.SeedSequence(seed)
    return [int(child.generate_state(1, np.uint64)[0] >> np.uint64(1)) for child in ss.spawn(restarts)]


def multistart(objective, n_params: int, restarts: int, cfg: OptimizerConfig = OptimizerConfig(), bounds=None, workers: int = 1):
    """Run ``minimize`` from ``restarts`` seeded uniform-random starts.

    ``bounds`` is ``(low, high)`` (scalars or per-parameter arrays) for the
    initial draw; default ``[-0.1, 0.1]``.  A failing run is recorded with its
    error and does not stop the others.  Returns ``(best_record, records, stats)``
    where ``stats`` summarizes the final objective values.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    lo, hi = (-0.1, 0.1) if bounds is None else bounds
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (n_params,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (n_params,))

    def one(run_id: int, seed: int) -> RunRecord:
        rng = np.random.default_rng(seed)
        x0 = rng.uniform(lo, hi)
        rec = RunRecord(run_id, seed, x0)
        t0 = time.perf_counter()
        trace = Trace()
        try:
            x_best, trace = minimize(objective, x0, cfg)
            rec.x_best = x_best
            rec.f_best = min(trace.values) if len(trace) else math.nan
        except Exception as exc:  # one bad restart must not sink the batch
            log.warning("run %d failed: %s", run_id, exc)
            rec.error = f"{type(exc).__name__}: {exc}"
        rec.trace = trace
        rec.wall_time = time.perf_counter() - t0
        return rec

    seeds = run_seeds(cfg.seed, restarts)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(one, range(restarts), seeds))
    else:
        records = [one(i, s) for i, s in enumerate(seeds)]
    ok = [r for r in records if r.ok]
    best = min(ok, key=lambda r: r.f_best) if ok else None
    stats = summarize(r.f_best for r in ok)
    return best, records, stats
