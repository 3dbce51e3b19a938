"""The three-step W chain.

Starting from x0|000> + x1|100> + x2|010> + x3|001>, parties A, B and C
each lower one coefficient in turn. The |000> weight absorbs what is removed,
and every branch is brought back to the same state by sigma_z on all qubits.
A target that raises any of x1, x2, x3 is impossible.
"""

import math

from tripartite_locc import execute_exhaustive
from tripartite_locc.runner import ProtocolPlan, ProtocolStep
from tripartite_locc.wtype import PRINTED_BC_CORRECTION, WCoefficients, w_chain_records, w_chain_plan, w_feasible

w = WCoefficients.standard()
target = WCoefficients.normalized([0.55, 0.5, math.sqrt(0.005), 0.45])
print("source x =", [round(v, 4) for v in w.x])
print("target x =", [round(v, 4) for v in target.x])
print("feasible:", bool(w_feasible(w, target)))

for _, rec, _ in w_chain_records(w, target):
    print(f"  step {rec.party.value}: retained {rec.retained:.4f}, |100> weight {rec.previous_weight:.4f}"
          f" -> {rec.new_weight:.4f}, p = ({rec.p1:.4f}, {rec.p2:.4f})")

plan = w_chain_plan(w, target)
rep = execute_exhaustive(plan)
print(f"8 leaves, total probability {rep.total_probability:.12f}, worst fidelity defect {rep.max_fidelity_defect:.1e}")

# the sign printed for the B and C corrections would flip |101>, not |100>
print("\nwith -sz x sz x I after step B instead of sz x sz x sz:")
steps = list(plan.steps)
steps[1] = ProtocolStep(steps[1].pair, {2: PRINTED_BC_CORRECTION})
rep = execute_exhaustive(ProtocolPlan(plan.initial, steps, plan.target))
print("   deterministic:", rep.deterministic, " worst fidelity", round(1 - rep.max_fidelity_defect, 4))

rest = math.sqrt(1 - 0.81 - 0.01 - 0.01)
verdict = w_feasible(w, WCoefficients(rest, 0.9, 0.1, 0.1))
print("\nraise x1 to 0.9:", verdict.reason, "indices", verdict.violated_indices)
