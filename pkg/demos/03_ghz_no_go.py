"""Why some GHZ-class targets are out of reach.

A deterministic chain from GHZ always leaves one pairwise concurrence at
zero. Targets with all three concurrences nonzero (EP-definite) are rejected,
and a random third measurement on the two-party output never produces one
deterministically.
"""

import numpy as np

from tripartite_locc import CanonicalCoefficients, invariants_from_canonical, oracle_invariants
from tripartite_locc.exceptions import InfeasibleTargetError
from tripartite_locc.ghz import ghz_feasible, ghz_plan, random_canonical_c_pair, three_party_third_step
from tripartite_locc.qcore import ghz_state

ghz = oracle_invariants(ghz_state())

for lam, phi in [((1, 1, 1, 0, 1), 0.0), ((1, 1, 1, 1, 1), 0.3)]:
    target = CanonicalCoefficients.normalized(lam, phi)
    verdict = ghz_feasible(ghz, invariants_from_canonical(target))
    print(f"target {lam}, phi={phi}: {'feasible' if verdict else 'infeasible'}")
    print("   ", verdict.reason)
    try:
        plan = ghz_plan(target)
        print("    route:", plan.family, "with", len(plan.steps), "steps")
    except InfeasibleTargetError as exc:
        print("    planner refuses; it needs", exc.constraint)

print("\nthird measurement by C on an AB-chain output, 2000 random pairs")
rng = np.random.default_rng(0)
# AB-chain outputs have mu0^2 + mu1^2 = mu2^2 + mu4^2 = 1/2 and mu3 = 0
init = CanonicalCoefficients((0.4, (0.5 - 0.16) ** 0.5, 0.6, 0.0, (0.5 - 0.36) ** 0.5))
det = ep = both = 0
for _ in range(2000):
    rep = three_party_third_step(init, random_canonical_c_pair(rng))
    det += rep.deterministic
    ep += rep.ep_definite
    both += rep.deterministic and rep.ep_definite
print(f"    deterministic: {det}, EP-definite outputs: {ep}, both at once: {both}")
