"""End-to-end experiment runs: configuration, metrics and output files."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .algebra import StateVector, fidelity
from .ansatz import (
    action_alphas,
    bind_evolve,
    build_cd_ansatz,
    build_dcqaoa,
    build_qaoa,
    initial_state,
    trotter_evolve,
)
from .cd import cd_pool
from .graph import Graph, parse_graph
from .hamiltonians import Schedule, exact_ground, mixer, problem_hamiltonian, w_state
from .optimizer import OptimizerConfig, RunRecord, Trace, multistart, summarize
from .symmetry import group_parameters, orbit_partition

ANSATZE = ("qaoa", "dcqaoa", "dcqaoa-grouped", "cd", "cd-grouped", "trotter-anneal")
OBJECTIVES = ("energy", "fidelity")
# best known classical Max-3-Cut approximation guarantee, reported as a reference
CLASSICAL_REFERENCE_RATIO = 0.800217
TRACE_HEADER = ("run_id", "iteration", "objective", "best_objective")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str = "max3cut"
    k: int = 3
    d: int = 3
    n_sites: int | None = None
    graph: dict = field(default_factory=dict)
    ansatz: str = "cd-grouped"
    layers: int = 1
    objective: str = "energy"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    restarts: int = 10
    output_dir: str | None = None
    initial_state: str = "mixer"
    trotter: dict = field(default_factory=lambda: {"total_time": 5.0, "n_steps": 100, "schedule": "sin2"})

    def __post_init__(self):
        if self.problem not in ("ising", "max3cut", "maxkcut", "wstate"):
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.ansatz not in ANSATZE:
            raise ConfigError(f"unknown ansatz {self.ansatz!r}; expected one of {ANSATZE}")
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"unknown objective {self.objective!r}")
        if self.objective == "fidelity" and self.problem != "wstate":
            raise ConfigError("fidelity objective needs a target state (wstate problem only)")
        if self.layers < 1:
            raise ConfigError("layers must be >= 1")
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        if self.problem == "wstate" and not (self.n_sites or self.graph):
            raise ConfigError("wstate problem needs n_sites")
        if self.problem != "wstate" and not self.graph:
            raise ConfigError("problem graph missing")

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str | Path | None = None) -> "ExperimentConfig":
        raw = dict(raw)
        unknown = set(raw) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        opt = raw.pop("optimizer", {}) or {}
        try:
            opt = OptimizerConfig(**opt)
        except TypeError as exc:
            raise ConfigError(f"bad optimizer section: {exc}") from None
        graph = dict(raw.pop("graph", {}) or {})
        if "file" in graph and base_dir is not None and not Path(graph["file"]).is_absolute():
            graph["file"] = str(Path(base_dir) / graph["file"])
        return cls(optimizer=opt, graph=graph, **raw)

    def to_dict(self) -> dict:
        return asdict(self)

    def load_graph(self) -> Graph:
        g = self.graph
        if self.problem == "wstate" and not g:
            return Graph.complete(self.n_sites)
        if "edges" in g:
            edges = [(int(a) - 1, int(b) - 1) for a, b in g["edges"]]
            n = int(g.get("n", max((max(e) for e in edges), default=-1) + 1))
            return Graph(n, edges)
        if "graph6" in g:
            return parse_graph(g["graph6"], "graph6")
        if "file" in g:
            return parse_graph(Path(g["file"]).read_bytes(), g.get("format", "graph6"))
        raise ConfigError("graph needs one of 'edges', 'graph6' or 'file'")


@dataclass
class Problem:
    graph: Graph
    h0: object
    hp: object
    pool: object
    groups: object
    e0: float
    optimal: frozenset
    target: StateVector | None
    psi0: StateVector

    @property
    def baseline(self) -> float:
        """Success probability of a uniformly random basis-state guess."""
        return len(self.optimal) / self.hp.d**self.hp.n_sites


def build_problem(cfg: ExperimentConfig) -> Problem:
    g = cfg.load_graph()
    hp = problem_hamiltonian(cfg.problem, g, d=cfg.d, k=cfg.k)
    h0 = mixer(g.n, hp.d)
    pool = cd_pool(h0, hp)
    groups = group_parameters(pool, orbit_partition(g))
    e0, optimal = exact_ground(hp)
    target = w_state(g.n, hp.d) if cfg.problem == "wstate" else None
    return Problem(g, h0, hp, pool, groups, e0, optimal, target, initial_state(g.n, hp.d, cfg.initial_state))


def build_ansatz(prob: Problem, name: str, layers: int):
    if name == "qaoa":
        return build_qaoa(prob.h0, prob.hp, layers)
    if name == "dcqaoa":
        return build_dcqaoa(prob.h0, prob.hp, prob.pool, layers)
    if name == "dcqaoa-grouped":
        return build_dcqaoa(prob.h0, prob.hp, prob.pool, layers, prob.groups)
    if name == "cd":
        return build_cd_ansatz(prob.pool, layers)
    if name == "cd-grouped":
        return build_cd_ansatz(prob.pool, layers, prob.groups)
    raise ConfigError(f"{name!r} is not a variational ansatz")


def state_metrics(prob: Problem, psi: StateVector) -> dict:
    probs = psi.probabilities()
    diag = prob.hp.diagonal()
    energy = float(probs @ diag) if diag is not None else None
    out = {
        "energy": energy,
        "approximation_ratio": energy / prob.e0 if energy is not None and prob.e0 != 0 else None,
        "success_probability": float(sum(probs[i] for i in prob.optimal)) if prob.optimal else None,
        "random_guess_baseline": prob.baseline if prob.optimal else None,
        "ground_energy": prob.e0,
    }
    if prob.target is not None:
        out["fidelity"] = fidelity(psi, prob.target)
    return out


def make_objective(prob: Problem, ansatz, objective: str):
    diag = prob.hp.diagonal()
    psi0 = prob.psi0

    if objective == "fidelity":
        target = prob.target.amplitudes

        def f(theta):
            amps = bind_evolve(ansatz, theta, psi0).amplitudes
            return -float(abs(np.vdot(target, amps)) ** 2)

        return f

    def f(theta):
        amps = bind_evolve(ansatz, theta, psi0).amplitudes
        return float(np.abs(amps) ** 2 @ diag)

    return f


def _trotter_run(cfg: ExperimentConfig, prob: Problem) -> RunRecord:
    tr = dict(cfg.trotter)
    schedule = Schedule(tr.get("schedule", "sin2"), float(tr.get("total_time", 5.0)))
    t0 = time.perf_counter()
    alphas = action_alphas(prob.h0, prob.hp, prob.pool)
    psi = trotter_evolve(prob.h0, prob.hp, prob.pool, alphas, schedule, int(tr.get("n_steps", 100)), prob.psi0)
    metrics = state_metrics(prob, psi)
    trace = Trace()
    trace.append(metrics["energy"])
    rec = RunRecord(0, cfg.optimizer.seed, np.zeros(0), np.zeros(0), metrics["energy"], trace, metrics)
    rec.wall_time = time.perf_counter() - t0
    return rec


def run_experiment(cfg: ExperimentConfig) -> list[RunRecord]:
    """Build the problem and ansatz, run the multistart optimization, attach metrics."""
    prob = build_problem(cfg)
    snapshot = cfg.to_dict()
    if cfg.ansatz == "trotter-anneal":
        rec = _trotter_run(cfg, prob)
        rec.config = snapshot
        return [rec]
    ansatz = build_ansatz(prob, cfg.ansatz, cfg.layers)
    objective = make_objective(prob, ansatz, cfg.objective)
    _, records, _ = multistart(objective, ansatz.total_params, cfg.restarts, cfg.optimizer, bounds=ansatz.init_bounds())
    for rec in records:
        rec.config = snapshot
        rec.metrics["n_params"] = ansatz.total_params
        if rec.ok:
            rec.metrics.update(state_metrics(prob, bind_evolve(ansatz, rec.x_best, prob.psi0)))
    return records


def format_mean_std(stats: dict, digits: int = 2) -> str:
    """Table-style ``mean ± std``."""
    if not stats or stats.get("mean") is None:
        return "n/a"
    return f"{stats['mean']:.{digits}f} ± {stats['std']:.{digits}f}"


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


def summary_dict(records: list[RunRecord]) -> dict:
    if not records:
        raise ValueError("no records to summarize")
    ok = [r for r in records if r.ok]
    agg = {}
    for key in ("approximation_ratio", "fidelity", "success_probability", "energy"):
        vals = [r.metrics.get(key) for r in ok]
        if any(v is not None for v in vals):
            agg[key] = summarize(vals)
    headline = "fidelity" if "fidelity" in agg and records[0].config.get("objective") == "fidelity" else "approximation_ratio"
    baseline = next((r.metrics.get("random_guess_baseline") for r in ok if r.metrics.get("random_guess_baseline") is not None), None)
    return _clean(
        {
            "config": records[0].config,
            "runs": [
                {
                    "run_id": r.run_id,
                    "seed": r.seed,
                    "iterations": len(r.trace),
                    "final_objective": r.f_best,
                    "parameters": r.x_best if r.x_best is not None else None,
                    "metrics": r.metrics,
                    "error": r.error,
                }
                for r in records
            ],
            "aggregate": agg,
            "report": {headline: format_mean_std(agg.get(headline, {}))},
            "random_guess_baseline": baseline,
            "classical_reference_ratio": CLASSICAL_REFERENCE_RATIO,
        }
    )


def metrics_and_emit(records: list[RunRecord], outdir: str | Path) -> tuple[Path, Path]:
    """Write ``trace.csv`` and ``summary.json`` into ``outdir``."""
    if not records:
        raise ValueError("no records to emit")
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {outdir}: {exc}") from exc
    trace_path = outdir / "trace.csv"
    summary_path = outdir / "summary.json"
    with open(trace_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in records:
            for it, val, best in r.trace.rows():
                w.writerow((r.run_id, it, repr(float(val)), repr(float(best))))
    summary_path.write_text(json.dumps(summary_dict(records), indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    return trace_path, summary_path


def solve(cfg: ExperimentConfig, outdir: str | Path | None = None) -> tuple[list[RunRecord], dict]:
    records = run_experiment(cfg)
    outdir = outdir or cfg.output_dir
    if outdir:
        metrics_and_emit(records, outdir)
    return records, summary_dict(records)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    return ExperimentConfig.from_dict(json.loads(path.read_text()), base_dir=path.parent)


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **kw)
