"""Numeric tolerances shared by every module.

Closed-form inputs make tight defaults achievable; callers that need looser
or stricter checks pass a modified :class:`Tolerances` (the CLI exposes the
main ones as flags).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

# algebraic identities (unitarity, normalized outputs)
ALGEBRA_TOL = 1e-12
# completeness of a measurement pair, probability sums
COMPLETE_TOL = 1e-10
PROB_TOL = 1e-10
# componentwise agreement of invariant fingerprints
LUE_TOL = 1e-8
# leaf fidelity defect accepted as "equal up to global phase"
FIDELITY_TOL = 1e-9
# eigenvalue above which a reduced state counts as rank-contributing
RANK_TOL = 1e-9
# three-tangle above which a state is GHZ class
TANGLE_TOL = 1e-9
# concurrence product at or below which the entanglement phase is indefinite
EP_PRODUCT_TOL = 1e-12
# arccos arguments within this distance of +-1 are clamped, beyond are errors
EP_CLAMP_TOL = 1e-6
# coefficient-set normalization accepted on input
NORM_TOL = 1e-9
# branches below this probability are not expanded further
DEAD_BRANCH_PROB = 1e-14
# a concurrence at or below this counts as vanishing (GHZ no-go check)
VANISHING_TOL = 1e-10


@dataclass(frozen=True)
class Tolerances:
    complete: float = COMPLETE_TOL
    prob: float = PROB_TOL
    lue: float = LUE_TOL
    fidelity: float = FIDELITY_TOL
    algebra: float = ALGEBRA_TOL
    rank: float = RANK_TOL
    tangle: float = TANGLE_TOL
    vanishing: float = VANISHING_TOL

    def with_overrides(self, **kw) -> "Tolerances":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
