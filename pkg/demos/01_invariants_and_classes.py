"""Entanglement fingerprints of a few three-qubit states.

Every state is summarized by five local-unitary invariants: the three
pairwise concurrences, the three-tangle and the entanglement phase. They are
computed twice, once from the canonical coefficients and once from reduced
density matrices only, and the two must agree.
"""

import numpy as np

from tripartite_locc import (
    CanonicalCoefficients,
    classify,
    invariants_from_canonical,
    oracle_invariants,
)
from tripartite_locc.qcore import ghz_state, product_state, random_local_unitaries, apply_product, w_state


def show(name, s):
    inv = oracle_invariants(s)
    phase = "indefinite" if inv.ep_phase is None else f"{inv.ep_phase:.4f}"
    print(f"{name:>28}: C_AB={inv.c_ab:.4f} C_AC={inv.c_ac:.4f} C_BC={inv.c_bc:.4f} "
          f"tau={inv.tau:.4f} phi5={phase}  [{classify(s).value}]")


print("standard states")
show("GHZ", ghz_state())
show("W", w_state())
show("|000>", product_state("000"))

# a generic canonical state: all five coefficients and the phase are free
c = CanonicalCoefficients.normalized((0.5, 0.3, 0.4, 0.6, 0.35), phi=1.1)
s = c.state()
print("\ngeneric canonical state", np.round(c.lambdas, 4), "phi = 1.1")
show("closed form vs oracle", s)
gap = invariants_from_canonical(c).max_difference(oracle_invariants(s))
print(f"{'largest component gap':>28}: {gap:.1e}")

# local unitaries move the amplitudes around but leave the fingerprint alone
rng = np.random.default_rng(3)
t = apply_product(*random_local_unitaries(rng), s)
print(f"\n{'amplitude change after LU':>28}: {np.max(np.abs(t - s)):.3f}")
print(f"{'fingerprint change':>28}: {oracle_invariants(t).max_difference(oracle_invariants(s)):.1e}")
