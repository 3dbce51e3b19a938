"""Deterministic protocols that start from the standard GHZ state.

* one party measures: targets with a single nonzero concurrence;
* two parties measure in sequence (orders AB, AC, BC): targets with exactly
  one vanishing concurrence;
* the no-go: targets with all three concurrences nonzero are not reachable,
  with a diagnostic for the three-party route that fails.

Operators, scale factors and branch-2 corrections are closed forms; the
runner re-verifies all of them by executing the plan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .entangle import (
    CanonicalCoefficients,
    InvariantSet,
    invariants_from_canonical,
    oracle_invariants,
    state_from_canonical,
)
from .exceptions import InfeasibleTargetError, InvalidInputError, InvalidTargetError, WrongClassError
from .qcore import I2, SIGMA_X, SIGMA_Y, SIGMA_Z, MeasurementPair, Party, apply_local, ghz_state
from .runner import LuCorrection, ProtocolPlan, ProtocolStep
from .verdict import FeasibilityVerdict

SQRT2 = math.sqrt(2.0)
_CONCURRENCE_SLOTS = ("AB", "AC", "BC")
# the party whose measurement leaves only the complementary pair entangled
_SINGLE_PARTY_FOR_PAIR = {"BC": Party.A, "AC": Party.B, "AB": Party.C}


def _m(a00, a01, a10, a11) -> np.ndarray:
    return np.array([[a00, a01], [a10, a11]], dtype=np.complex128)


@dataclass(frozen=True)
class GhzTarget:
    """Final coefficients plus the set of concurrences required to be nonzero.

    ``pattern`` is a frozenset drawn from {"AB", "AC", "BC"}; when omitted it
    is read off the coefficients.
    """

    coefficients: CanonicalCoefficients
    pattern: frozenset[str] | None = None
    atol: float = 1e-10

    def __post_init__(self):
        found = self.nonzero_concurrences(self.coefficients, self.atol)
        if self.pattern is None:
            object.__setattr__(self, "pattern", found)
        else:
            pattern = frozenset(p.upper() for p in self.pattern)
            if not pattern <= set(_CONCURRENCE_SLOTS):
                raise InvalidTargetError(f"unknown concurrence labels in {sorted(pattern)}")
            if pattern != found:
                raise InvalidTargetError(
                    f"pattern {sorted(pattern)} disagrees with coefficients (nonzero: {sorted(found)})"
                )
            object.__setattr__(self, "pattern", pattern)

    @staticmethod
    def nonzero_concurrences(c: CanonicalCoefficients, atol: float = 1e-10) -> frozenset[str]:
        inv = invariants_from_canonical(c)
        vals = {"AB": inv.c_ab, "AC": inv.c_ac, "BC": inv.c_bc}
        return frozenset(k for k, v in vals.items() if v > atol)

    @property
    def invariants(self) -> InvariantSet:
        return invariants_from_canonical(self.coefficients)


def _require_ghz_class(c: CanonicalCoefficients, atol: float) -> None:
    if invariants_from_canonical(c).tau <= atol:
        raise WrongClassError("target has vanishing three-tangle; it is not GHZ class (use the W-type protocols)")


# -- one party ---------------------------------------------------------------


def single_party_pair(
    target: GhzTarget | CanonicalCoefficients, party: Party | str | None = None
) -> tuple[MeasurementPair, LuCorrection, float]:
    """Measurement pair taking the standard GHZ state to a one-concurrence target.

    Returns (pair, branch-2 correction, kappa). The measuring party is the one
    not involved in the target's nonzero concurrence; it must be given
    explicitly when the target has no nonzero concurrence.
    """
    if isinstance(target, CanonicalCoefficients):
        target = GhzTarget(target)
    c = target.coefficients
    _require_ghz_class(c, target.atol)
    if len(target.pattern) > 1:
        raise InfeasibleTargetError(
            "a single party only creates one nonzero concurrence", constraint="one nonzero concurrence"
        )
    if party is None:
        if not target.pattern:
            raise InvalidTargetError("target has no nonzero concurrence; choose the measuring party explicitly")
        party = _SINGLE_PARTY_FOR_PAIR[next(iter(target.pattern))]
    party = Party.coerce(party)
    if target.pattern and _SINGLE_PARTY_FOR_PAIR[next(iter(target.pattern))] is not party:
        raise InfeasibleTargetError(
            f"party {party.value} cannot create concurrence {next(iter(target.pattern))}",
            constraint="measuring party must be outside the entangled pair",
        )

    l0, l1, l2, l3, l4 = c.lambdas
    # the target family pins two of the five slots to zero; the |100> phase
    # is LU-irrelevant once C_AC = C_AB = 0
    if party is Party.A:
        if max(l2, l3) > target.atol:
            raise InfeasibleTargetError("party A targets need l2 = l3 = 0", constraint="l2 = l3 = 0")
        kappa = math.sqrt(l0 * l0 + l1 * l1) / l4
        m1 = _m(l0, 0, l1, l4)
        m2 = _m(l0 / kappa, 0, -l1 / kappa, kappa * l4)
        norm = math.sqrt(l0 * l0 + l1 * l1)
        corr = LuCorrection((-l1 * I2 - 1j * l0 * SIGMA_Y) / norm, 1j * SIGMA_Y, -SIGMA_X)
    elif party is Party.B:
        if max(l1, l3) > target.atol:
            raise InfeasibleTargetError("party B targets need l1 = l3 = 0", constraint="l1 = l3 = 0")
        d = math.sqrt(l2 * l2 + l4 * l4)
        kappa = l0 / d
        m1 = _m(l0, l2, 0, l4)
        m2 = _m(l0 / kappa, -kappa * l2, 0, kappa * l4)
        corr = LuCorrection(1j * SIGMA_Y, (l2 * I2 - 1j * l4 * SIGMA_Y) / d, -SIGMA_X)
    else:
        if max(l1, l2) > target.atol:
            raise InfeasibleTargetError("party C targets need l1 = l2 = 0", constraint="l1 = l2 = 0")
        d = math.sqrt(l3 * l3 + l4 * l4)
        kappa = l0 / d
        m1 = _m(l0, l3, 0, l4)
        m2 = _m(l0 / kappa, -kappa * l3, 0, kappa * l4)
        corr = LuCorrection(1j * SIGMA_Y, -SIGMA_X, (l3 * I2 - 1j * l4 * SIGMA_Y) / d)
    pair = MeasurementPair.from_matrices(m1, m2, party, label=f"ghz-single-{party.value}")
    return pair, corr, kappa


def single_party_output(c: CanonicalCoefficients, party: Party | str) -> np.ndarray:
    """Branch-1 output of the single-party protocol (the target with phi = 0)."""
    return state_from_canonical(CanonicalCoefficients(c.lambdas, 0.0))


def single_party_plan(
    target: GhzTarget | CanonicalCoefficients, party: Party | str | None = None
) -> ProtocolPlan:
    if isinstance(target, CanonicalCoefficients):
        target = GhzTarget(target)
    pair, corr, kappa = single_party_pair(target, party)
    out = single_party_output(target.coefficients, pair.party)
    return ProtocolPlan(
        initial=ghz_state(),
        steps=(ProtocolStep(pair, {2: corr}),),
        target=out,
        family=f"ghz-{pair.party.value}",
        metadata={
            "requested_target": _coeff_dict(target.coefficients),
            "kappa": [kappa],
        },
    )


# -- two parties -------------------------------------------------------------


def _coeff_dict(c: CanonicalCoefficients) -> dict:
    return {"lambda": list(c.lambdas), "phi": c.phi}


def _order(order) -> tuple[Party, Party]:
    if isinstance(order, str):
        order = tuple(order)
    q1, q2 = (Party.coerce(p) for p in order)
    if (q1, q2) not in ((Party.A, Party.B), (Party.A, Party.C), (Party.B, Party.C)):
        raise InvalidInputError("two-party orders are AB, AC or BC")
    return q1, q2


def two_party_plan(order, target: CanonicalCoefficients, atol: float = 1e-10) -> ProtocolPlan:
    """Two-step plan from the standard GHZ state to a one-vanishing-concurrence target.

    Order AB reaches mu0|000> + mu1|100> + mu2|101> + mu4|111> (C_AB = 0),
    AC reaches mu0|000> + mu1|100> + mu3|110> + mu4|111> (C_AC = 0), and BC
    reaches the C_BC = 0 family mu1 mu4 = mu2 mu3. The intermediate state is
    derived from the target through the coupling relations, with the
    completeness condition forcing one of its coefficients to 1/sqrt(2).
    """
    q1, q2 = _order(order)
    _require_ghz_class(target, atol)
    mu0, mu1, mu2, mu3, mu4 = target.lambdas
    key = q1.value + q2.value

    if key in ("AB", "AC"):
        other = mu3 if key == "AB" else mu2
        if other > atol:
            slot = "mu3" if key == "AB" else "mu2"
            raise InfeasibleTargetError(
                f"order {key} reaches targets with {slot} = 0 (C_{key} = 0), got {slot} = {other!r}",
                constraint=f"{slot} = 0",
                violated_quantity=other,
            )
        s01 = math.hypot(mu0, mu1)
        # completeness of the second step forces lambda4 = 1/sqrt(2)
        lam0 = mu0 / (SQRT2 * s01)
        lam1 = mu1 / (SQRT2 * s01)
        lam4 = 1.0 / SQRT2
        inter = CanonicalCoefficients((lam0, lam1, 0.0, 0.0, lam4))
        pair1, corr1, kappa1 = single_party_pair(GhzTarget(inter), Party.A)

        mu_b = mu2 if key == "AB" else mu3
        s2 = math.hypot(mu_b, mu4)
        kappa = s01 / s2
        m1 = _m(mu0 / (SQRT2 * lam0), mu_b, 0, mu4)
        m2 = _m(mu0 / kappa / (SQRT2 * lam0), -kappa * mu_b, 0, kappa * mu4)
        u_a = (mu0 * SIGMA_X - mu1 * SIGMA_Z) / s01
        u_q2 = (mu_b * I2 - 1j * mu4 * SIGMA_Y) / s2
        if key == "AB":
            corr2 = LuCorrection(u_a, u_q2, -1j * SIGMA_Y)
            final = CanonicalCoefficients((mu0, mu1, mu2, 0.0, mu4))
        else:
            corr2 = LuCorrection(u_a, -1j * SIGMA_Y, u_q2)
            final = CanonicalCoefficients((mu0, mu1, 0.0, mu3, mu4))
    else:
        residual = abs(mu1 * mu4 - mu2 * mu3)
        if residual > atol:
            raise InfeasibleTargetError(
                f"order BC reaches only the C_BC = 0 family mu1*mu4 = mu2*mu3 (residual {residual!r})",
                constraint="mu1*mu4 = mu2*mu3",
                violated_quantity=residual,
            )
        if mu1 * mu4 > atol and (target.phi % (2 * math.pi)) > atol and abs(target.phi - 2 * math.pi) > atol:
            raise InfeasibleTargetError(
                "C_BC = 0 with mu1*mu4 > 0 requires phi = 0", constraint="phi = 0", violated_quantity=target.phi
            )
        s24 = math.hypot(mu2, mu4)
        s34 = math.hypot(mu3, mu4)
        # completeness of the second step forces the |000> coefficient to 1/sqrt(2)
        lam0 = 1.0 / SQRT2
        lam2 = mu2 / (SQRT2 * s24)
        lam4 = mu4 / (SQRT2 * s24)
        inter = CanonicalCoefficients((lam0, 0.0, lam2, 0.0, lam4))
        pair1, corr1, kappa1 = single_party_pair(GhzTarget(inter), Party.B)

        kappa = mu0 * mu4 / (s24 * s34)
        # off-diagonal entry mu1/(sqrt2 lam2) rewritten as mu3/(sqrt2 lam4) via
        # lam4 mu1 = lam2 mu3, which stays defined when mu2 = 0
        b = mu3 / (SQRT2 * lam4)
        d = mu4 / (SQRT2 * lam4)
        m1 = _m(mu0, b, 0, d)
        m2 = _m(mu0 / kappa, -kappa * b, 0, kappa * d)
        corr2 = LuCorrection(
            -1j * SIGMA_Y,
            (mu2 * SIGMA_Z + mu4 * SIGMA_X) / s24,
            (mu3 * I2 - 1j * mu4 * SIGMA_Y) / s34,
        )
        # mu1 is recomputed from the constraint so the leaf is exactly in the family
        final = CanonicalCoefficients.normalized((mu0, mu2 * mu3 / mu4 if mu4 > 0 else mu1, mu2, mu3, mu4))

    pair2 = MeasurementPair.from_matrices(m1, m2, q2, label=f"ghz-{key}-step2")
    steps = (ProtocolStep(pair1, {2: corr1}), ProtocolStep(pair2, {2: corr2}))
    return ProtocolPlan(
        initial=ghz_state(),
        steps=steps,
        target=state_from_canonical(final),
        family=f"ghz-{key}",
        metadata={
            "requested_target": _coeff_dict(target),
            "intermediate": _coeff_dict(inter),
            "kappa": [kappa1, kappa],
        },
    )


# -- feasibility and the no-go ----------------------------------------------


def is_standard_ghz_fingerprint(inv: InvariantSet, atol: float = 1e-9) -> bool:
    return max(inv.c_ab, inv.c_ac, inv.c_bc, abs(inv.tau - 1.0)) <= atol


def ghz_feasible(
    source: InvariantSet, target: InvariantSet, tol: Tolerances = DEFAULT_TOLERANCES
) -> FeasibilityVerdict:
    """Deterministic reachability of a GHZ-class target from the standard GHZ state.

    Feasible exactly when some concurrence of the target vanishes. The test is
    on the smallest concurrence rather than the product, which can underflow.
    """
    if not is_standard_ghz_fingerprint(source, max(tol.fidelity, 1e-9)):
        raise InvalidInputError("source must be the standard GHZ fingerprint (all concurrences 0, tau = 1)")
    if target.tau <= tol.vanishing:
        raise WrongClassError("target has vanishing three-tangle; use the W-type protocols")
    smallest = min(target.c_ab, target.c_ac, target.c_bc)
    if smallest <= tol.vanishing:
        return FeasibilityVerdict(True, "target has a vanishing bipartite concurrence")
    return FeasibilityVerdict(
        False,
        "all three bipartite concurrences of the target are nonzero (EP-definite); "
        f"C_AB*C_AC*C_BC = {target.concurrence_product!r}",
        violated_quantity=target.concurrence_product,
    )


def route_for_target(target: CanonicalCoefficients, tol: Tolerances = DEFAULT_TOLERANCES) -> str:
    """Pick the GHZ protocol family for a target: "A", "B", "C", "AB", "AC" or "BC"."""
    pattern = GhzTarget.nonzero_concurrences(target, tol.vanishing)
    if len(pattern) == 0:
        return "A"
    if len(pattern) == 1:
        return _SINGLE_PARTY_FOR_PAIR[next(iter(pattern))].value
    if len(pattern) == 2:
        vanishing = next(iter(set(_CONCURRENCE_SLOTS) - pattern))
        return vanishing
    verdict = ghz_feasible(invariants_from_canonical(_ghz()), invariants_from_canonical(target), tol)
    raise InfeasibleTargetError(verdict.reason, constraint="C_AB*C_AC*C_BC = 0", violated_quantity=verdict.violated_quantity)


def _ghz() -> CanonicalCoefficients:
    r = 1.0 / SQRT2
    return CanonicalCoefficients((r, 0.0, 0.0, 0.0, r))


def ghz_plan(target: CanonicalCoefficients, route: str = "auto", tol: Tolerances = DEFAULT_TOLERANCES) -> ProtocolPlan:
    """Plan from the standard GHZ state along ``route`` (or the natural one)."""
    route = route.upper()
    if route == "AUTO":
        route = route_for_target(target, tol)
    if route in ("A", "B", "C"):
        return single_party_plan(GhzTarget(target, atol=tol.vanishing), route)
    if route in ("AB", "AC", "BC"):
        return two_party_plan(route, target, tol.vanishing)
    raise InvalidInputError(f"unknown GHZ route {route!r}")


@dataclass(frozen=True)
class ThirdStepReport:
    """Diagnostic for party C measuring the state reached by the AB chain.

    ``mu_residual`` is max(|mu0^2 + mu1^2 - 1/2|, |mu2^2 + mu4^2 - 1/2|);
    ``alpha_residuals`` evaluates a2 a3 |a2 a3 - a1 e^{i alpha} a4| for each
    normalized branch output, zero exactly when that output has C_AB C_AC C_BC = 0.
    """

    mu_residual: float
    completeness_defect: float
    probabilities: tuple[float, float]
    alpha_residuals: tuple[float, float]
    concurrence_products: tuple[float, float]
    lue_defect: float
    deterministic: bool
    ep_definite: bool


def alpha_residual(alphas, alpha_phase: float = 0.0) -> float:
    """a2 a3 (a2 a3 - a1 a4) with a1 carrying phase ``alpha_phase`` (0 or pi here)."""
    a0, a1, a2, a3, a4 = alphas
    return float(abs(a2 * a3 * (a2 * a3 - np.exp(1j * alpha_phase) * a1 * a4)))


def three_party_third_step(
    initial: CanonicalCoefficients | tuple, pair: MeasurementPair, tol: Tolerances = DEFAULT_TOLERANCES
) -> ThirdStepReport:
    """Evaluate a third (party C) measurement on mu0|000> + mu1|100> + mu2|101> + mu4|111>.

    Reports whether the two branch outputs can form a deterministic step
    (complete pair, probabilities summing to one, LU-equivalent outputs)
    and the residuals of the constraints that such a step would impose.
    """
    if pair.party is not Party.C:
        raise InvalidInputError("the third step is performed by party C")
    if isinstance(initial, CanonicalCoefficients):
        mu0, mu1, mu2, mu3, mu4 = initial.lambdas
        if mu3 > tol.vanishing:
            raise InvalidInputError("the AB-chain state has no |110> component")
        phi = initial.state()
    else:
        mu0, mu1, mu2, mu4 = initial
        phi = np.zeros(8, dtype=np.complex128)
        phi[[0b000, 0b100, 0b101, 0b111]] = (mu0, mu1, mu2, mu4)
    mu_res = max(abs(mu0 * mu0 + mu1 * mu1 - 0.5), abs(mu2 * mu2 + mu4 * mu4 - 0.5))

    outs, probs, residuals, products, invs = [], [], [], [], []
    for op in pair.operators:
        out = apply_local(op, phi)
        p = float(np.vdot(out, out).real)
        probs.append(p)
        if p <= 0.0:
            residuals.append(0.0)
            products.append(0.0)
            invs.append(None)
            continue
        out = out / math.sqrt(p)
        outs.append(out)
        a1 = out[0b100]
        alphas = (abs(out[0b000]), abs(a1), out[0b101].real, out[0b110].real, out[0b111].real)
        # outputs stay in canonical shape: only the |100> amplitude can pick up a sign/phase
        residuals.append(float(abs(alphas[2] * alphas[3] * (alphas[2] * alphas[3] - a1 * alphas[4]))))
        inv = oracle_invariants(out)
        invs.append(inv)
        products.append(inv.concurrence_product)
    if invs[0] is not None and invs[1] is not None:
        lue_defect = invs[0].max_difference(invs[1])
    else:
        lue_defect = 0.0
    defect = pair.completeness_defect()
    deterministic = (
        defect <= tol.complete and abs(sum(probs) - 1.0) <= tol.prob and lue_defect <= tol.lue
    )
    ep_definite = any(inv is not None and inv.concurrence_product > tol.vanishing for inv in invs)
    return ThirdStepReport(
        mu_res, defect, (probs[0], probs[1]), (residuals[0], residuals[1]),
        (products[0], products[1]), lue_defect, deterministic, ep_definite,
    )


def random_canonical_c_pair(rng: np.random.Generator, scale: float = 0.9) -> MeasurementPair:
    """A random complete pair on C in the canonical upper-triangular form.

    M1 = c00|0><0| + c01 e^{i theta}|0><1| + c11|1><1| is drawn at random and
    contracted so that I - M1^dag M1 is positive definite; M2 is the
    upper-triangular Cholesky factor of that remainder.
    """
    m1 = np.array(
        [[rng.random(), rng.random() * np.exp(1j * rng.choice([0.0, math.pi]))], [0.0, rng.random()]],
        dtype=np.complex128,
    )
    m1 *= scale / np.linalg.norm(m1, 2)
    rest = I2 - m1.conj().T @ m1
    m2 = np.linalg.cholesky(rest).conj().T
    return MeasurementPair.from_matrices(m1, m2, Party.C, label="random-canonical-C")
