"""Monte Carlo runs and the JSON round trip.

Exact branch probabilities come from exhaustive execution; sampling draws
outcomes and should land inside the 3-sigma envelope. A plan written to
disk reloads bit for bit. The same workflow is available from the shell:

    tripartite-locc plan ghz.json target.json --route AB --plan-out plan.json
    tripartite-locc run plan.json --mode sample --trials 100000 --seed 7
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from tripartite_locc import execute_exhaustive, execute_sampled
from tripartite_locc.ghz import two_party_plan
from tripartite_locc.random_targets import random_two_party_target
from tripartite_locc.serialize import dumps, execution_report_to_json, plan_from_json, plan_to_json

plan = two_party_plan("AC", random_two_party_target(np.random.default_rng(4), "AC"))
exact = execute_exhaustive(plan).probabilities()
rep = execute_sampled(plan, 100_000, seed=7)
print("path   exact     sampled")
for k in sorted(exact):
    print(f"{k:>4}   {exact[k]:.5f}   {rep.frequencies[k]:.5f}")
print(f"chi-square {rep.chi_square:.3f} vs 3-sigma bound {rep.threshold:.3f} (dof {rep.dof})")

again = execute_sampled(plan, 100_000, seed=7, workers=4)
print("same seed with 4 workers identical:", again == rep)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "plan.json"
    path.write_text(dumps(plan_to_json(plan)))
    back = plan_from_json(json.loads(path.read_text()))
    same_plan = dumps(plan_to_json(back)) == path.read_text()
    a = dumps(execution_report_to_json(execute_exhaustive(plan)))
    b = dumps(execution_report_to_json(execute_exhaustive(back)))
    print("plan file round trip identical:", same_plan, "| execution reports identical:", a == b)
