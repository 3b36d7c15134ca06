"""Max-3-Cut on two 6-vertex nonplanar graphs: QAOA against CD ansatze.

Single layer, ten restarts each.  Prints the mean approximation ratio and
success probability next to the random-guess baseline.  Takes about a
minute.
"""

from pathlib import Path

from qudit_cd import ExperimentConfig, OptimizerConfig, run_experiment
from qudit_cd.experiment import CLASSICAL_REFERENCE_RATIO, format_mean_std
from qudit_cd.optimizer import summarize

fixtures = Path(__file__).resolve().parent.parent / "tests" / "data" / "max3cut_nonplanar6.g6"

for code in fixtures.read_text().split():
    print(f"graph {code}")
    for ansatz in ("qaoa", "dcqaoa-grouped", "cd", "cd-grouped"):
        cfg = ExperimentConfig(problem="max3cut", graph={"graph6": code}, ansatz=ansatz, restarts=10, optimizer=OptimizerConfig(seed=0))
        recs = run_experiment(cfg)
        ratio = summarize(r.metrics["approximation_ratio"] for r in recs)
        sp = summarize(r.metrics["success_probability"] for r in recs)
        base = recs[0].metrics["random_guess_baseline"]
        print(
            f"  {ansatz:<15} params {recs[0].metrics['n_params']:>3}  R {format_mean_std(ratio)}"
            f"  success {sp['mean']:.3f} ({sp['mean'] / base:.0f}x random)"
        )
print(f"classical reference ratio {CLASSICAL_REFERENCE_RATIO}")
