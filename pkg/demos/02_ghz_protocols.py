"""Deterministic transformations out of the GHZ state.

One party measuring creates a single nonzero pairwise concurrence; two
parties measuring in sequence reach targets with one vanishing concurrence.
Each branch is fixed up with a local unitary so all outcomes end in the same
state.
"""

import numpy as np

from tripartite_locc import CanonicalCoefficients, execute_exhaustive, oracle_invariants
from tripartite_locc.ghz import single_party_plan, two_party_plan


def leaves(plan):
    rep = execute_exhaustive(plan)
    for lf in rep.leaves:
        print(f"   branch {lf.label}: p = {lf.probability:.6f}, fidelity = {lf.fidelity:.12f}"
              f" (before correction {lf.uncorrected_fidelity:.4f})")
    print(f"   total probability {rep.total_probability:.12f}, deterministic: {rep.deterministic}")
    return rep


print("Party A measures: GHZ -> l0|000> + l1|100> + l4|111>")
target = CanonicalCoefficients.normalized((0.6, 0.3, 0.0, 0.0, 0.8), phi=0.4)
plan = single_party_plan(target, "A")
print("   kappa =", np.round(plan.metadata["kappa"], 6))
rep = leaves(plan)
inv = oracle_invariants(rep.leaves[0].state)
print(f"   leaf concurrences AB={inv.c_ab:.2e} AC={inv.c_ac:.2e} BC={inv.c_bc:.4f}")

print("\nA then B: GHZ -> target with C_AB = 0")
target = CanonicalCoefficients.normalized((0.5, 0.3, 0.4, 0.0, 0.7), phi=2.0)
plan = two_party_plan("AB", target)
mid = plan.metadata["intermediate"]
print("   intermediate after A:", np.round(mid["lambda"], 4), "phi", round(mid["phi"], 4))
leaves(plan)

print("\nB then C: needs mu1 mu4 = mu2 mu3 and ends with C_BC = 0")
mu2, mu3, mu4 = 0.4, 0.5, 0.6
target = CanonicalCoefficients.normalized((0.45, mu2 * mu3 / mu4, mu2, mu3, mu4))
rep = leaves(two_party_plan("BC", target))
print(f"   leaf C_BC = {oracle_invariants(rep.leaves[0].state).c_bc:.1e}")
