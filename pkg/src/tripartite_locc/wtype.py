"""Deterministic W-type to W-type transformations in three single-party steps.

A W-type state x0|000> + x1|100> + x2|010> + x3|001> is brought to the
canonical shape x1|000> + x0|100> + x3|101> + x2|110> by sigma_x on A. Every
intermediate of the chain keeps that four-term shape; we track it as the
amplitudes (c000, c100, c101, c110).

Step A lowers c000 to alpha0, step B lowers c110 to beta3, step C lowers c101
to gamma2; each step raises c100 so the norm is conserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .entangle import CanonicalCoefficients
from .exceptions import DegenerateStepError, InvalidInputError, MonotonicityError, WrongClassError
from .qcore import I2, SIGMA_X, SIGMA_Z, MeasurementPair, Party, apply_matrix, as_state
from .runner import LuCorrection, ProtocolPlan, ProtocolStep
from .verdict import FeasibilityVerdict

MONOTONE_SLACK = 1e-10

# basis indices of the four canonical W amplitudes
IDX_000, IDX_100, IDX_101, IDX_110 = 0b000, 0b100, 0b101, 0b110

# which canonical amplitude each party lowers
_SOURCE_SLOT = {Party.A: IDX_000, Party.B: IDX_110, Party.C: IDX_101}
_RETAINED_NAME = {Party.A: "alpha0", Party.B: "beta3", Party.C: "gamma2"}
_NEW_NAME = {Party.A: "alpha1", Party.B: "beta1", Party.C: "gamma1"}

# the printed branch-2 correction for steps B and C; kept for comparison only
PRINTED_BC_CORRECTION = LuCorrection(-SIGMA_Z, SIGMA_Z, I2)


def w_correction() -> LuCorrection:
    """sigma_z on every qubit: flips only the sign of the |100> amplitude."""
    return LuCorrection(SIGMA_Z, SIGMA_Z, SIGMA_Z)


@dataclass(frozen=True)
class WCoefficients:
    """x0|000> + x1|100> + x2|010> + x3|001> with x1, x2, x3 > 0 and x0 >= 0."""

    x0: float
    x1: float
    x2: float
    x3: float
    atol: float = 1e-9

    def __post_init__(self):
        xs = (self.x0, self.x1, self.x2, self.x3)
        if not all(math.isfinite(v) for v in xs):
            raise InvalidInputError("W coefficients must be finite")
        if self.x0 < 0:
            raise InvalidInputError("x0 must be nonnegative")
        if min(self.x1, self.x2, self.x3) <= 0:
            raise WrongClassError("W class needs x1, x2, x3 > 0")
        norm = math.fsum(v * v for v in xs)
        if abs(norm - 1.0) > self.atol:
            raise InvalidInputError(f"W coefficients are not normalized (sum of squares {norm!r})")

    @classmethod
    def normalized(cls, xs) -> "WCoefficients":
        v = np.asarray(xs, dtype=float)
        if v.shape != (4,):
            raise InvalidInputError("W coefficients need exactly 4 entries")
        n = np.linalg.norm(v)
        if n == 0.0:
            raise InvalidInputError("zero W coefficient vector")
        return cls(*(float(t) for t in v / n))

    @classmethod
    def standard(cls) -> "WCoefficients":
        r = 1.0 / math.sqrt(3.0)
        return cls(0.0, r, r, r)

    @property
    def x(self) -> tuple[float, float, float, float]:
        return (self.x0, self.x1, self.x2, self.x3)

    def state(self) -> np.ndarray:
        s = np.zeros(8, dtype=np.complex128)
        s[[0b000, 0b100, 0b010, 0b001]] = self.x
        return s

    def canonical(self) -> CanonicalCoefficients:
        return canonical_from_w(self)

    def canonical_amplitudes(self) -> tuple[float, float, float, float]:
        """(c000, c100, c101, c110) of the flipped state."""
        return (self.x1, self.x0, self.x3, self.x2)


def canonical_from_w(w: WCoefficients) -> CanonicalCoefficients:
    return CanonicalCoefficients((w.x1, w.x0, w.x3, w.x2, 0.0), 0.0)


def w_canonical_flip(s) -> np.ndarray:
    """sigma_x on party A; an involution."""
    return apply_matrix(SIGMA_X, Party.A, as_state(s))


def canonical_vector(c000: float, c100: float, c101: float, c110: float) -> np.ndarray:
    s = np.zeros(8, dtype=np.complex128)
    s[[IDX_000, IDX_100, IDX_101, IDX_110]] = (c000, c100, c101, c110)
    return s


@dataclass(frozen=True)
class WStepRecord:
    party: Party
    retained: float
    source: float
    previous_weight: float
    new_weight: float
    p1: float
    p2: float
    trivial: bool
    before: tuple[float, float, float, float]
    after: tuple[float, float, float, float]

    @property
    def retained_name(self) -> str:
        return _RETAINED_NAME[self.party]

    @property
    def new_weight_name(self) -> str:
        return _NEW_NAME[self.party]

    def conservation_defect(self) -> float:
        lhs = self.previous_weight ** 2 + self.source ** 2
        rhs = self.new_weight ** 2 + self.retained ** 2
        return abs(lhs - rhs)

    def as_dict(self) -> dict:
        return {
            "party": self.party.value,
            self.retained_name: self.retained,
            self.new_weight_name: self.new_weight,
            "p1": self.p1,
            "p2": self.p2,
            "trivial": self.trivial,
        }


def closed_form_probabilities(previous_weight: float, new_weight: float) -> tuple[float, float]:
    """p_k = 1/2 + (-1)^{k-1} w / (2 w'), where w is the |100> weight before the step."""
    if new_weight <= 0.0:
        return (1.0, 0.0)
    return ((new_weight + previous_weight) / (2 * new_weight), (new_weight - previous_weight) / (2 * new_weight))


def w_step_pair(
    current, party: Party | str, retained_target: float, slack: float = MONOTONE_SLACK
) -> tuple[MeasurementPair, WStepRecord, LuCorrection]:
    """Measurement pair for one chain step.

    ``current`` is (c000, c100, c101, c110). Party A retains c000 -> alpha0,
    B retains c110 -> beta3, C retains c101 -> gamma2. A retained value at the
    source coefficient (within ``slack``) yields the trivial pair {I, 0}.
    """
    party = Party.coerce(party)
    cur = tuple(float(v) for v in current)
    if len(cur) != 4 or not all(math.isfinite(v) for v in cur):
        raise InvalidInputError("current step state needs 4 finite amplitudes (c000, c100, c101, c110)")
    if min(cur) < 0:
        raise InvalidInputError("canonical W amplitudes are nonnegative")
    r = float(retained_target)
    if not math.isfinite(r) or r < 0:
        raise InvalidInputError(f"{_RETAINED_NAME[party]} must be a nonnegative real")
    slot = {IDX_000: 0, IDX_100: 1, IDX_101: 2, IDX_110: 3}
    src = cur[slot[_SOURCE_SLOT[party]]]
    w = cur[1]
    if r - src > slack:
        raise MonotonicityError(
            f"{_RETAINED_NAME[party]} = {r!r} exceeds the source coefficient {src!r}",
            indices=(_party_index_w(party),),
        )
    if src <= 0.0:
        raise DegenerateStepError(f"party {party.value} has a vanishing source coefficient")

    trivial = r >= src
    if trivial:
        # retaining the coefficient is the identity protocol
        r = src
        new = w
        p1, p2 = 1.0, 0.0
        m1, m2 = I2.copy(), np.zeros((2, 2), dtype=np.complex128)
    else:
        new_sq = w * w + src * src - r * r
        if new_sq <= 0.0:
            raise DegenerateStepError(f"{_NEW_NAME[party]} vanishes")
        new = math.sqrt(new_sq)
        p1, p2 = closed_form_probabilities(w, new)
        ratio = r / src
        off = math.sqrt(max(0.0, 1.0 - ratio * ratio))
        ops = []
        for k, (pk, pother) in enumerate(((p1, p2), (p2, p1)), start=1):
            sign = (-1) ** (k - 1)
            a, b = math.sqrt(pk), sign * math.sqrt(pother) * off
            if party is Party.A:
                ops.append(np.array([[a * ratio, 0.0], [b, a]], dtype=np.complex128))
            else:
                ops.append(np.array([[a, b], [0.0, a * ratio]], dtype=np.complex128))
        m1, m2 = ops

    after = list(cur)
    after[1] = new
    after[slot[_SOURCE_SLOT[party]]] = r
    pair = MeasurementPair.from_matrices(m1, m2, party, label=f"w-step-{party.value}")
    record = WStepRecord(party, r, src, w, new, p1, p2, trivial, cur, tuple(after))
    return pair, record, w_correction()


def _party_index_w(party: Party) -> int:
    """Index i of the W coefficient x_i a party's step bounds."""
    return {Party.A: 1, Party.B: 2, Party.C: 3}[party]


def w_feasible(initial: WCoefficients, target: WCoefficients, slack: float = MONOTONE_SLACK) -> FeasibilityVerdict:
    """Feasible iff x_i >= x_i' for i = 1, 2, 3."""
    violated = tuple(
        i for i, (a, b) in enumerate(zip(initial.x, target.x)) if i > 0 and b - a > slack
    )
    if not violated:
        return FeasibilityVerdict(True, "x_i >= x_i' for i = 1, 2, 3")
    worst = max(target.x[i] - initial.x[i] for i in violated)
    detail = ", ".join(f"x{i}' = {target.x[i]!r} > x{i} = {initial.x[i]!r}" for i in violated)
    return FeasibilityVerdict(
        False, f"monotonicity violated at index {list(violated)}: {detail}", violated_quantity=worst,
        violated_indices=violated,
    )


def w_chain_records(initial: WCoefficients, target: WCoefficients, slack: float = MONOTONE_SLACK):
    """The three (pair, record, correction) triples of the chain A, B, C."""
    verdict = w_feasible(initial, target, slack)
    if not verdict:
        raise MonotonicityError(verdict.reason, indices=verdict.violated_indices)
    cur = initial.canonical_amplitudes()
    out = []
    for party, r in ((Party.A, target.x1), (Party.B, target.x2), (Party.C, target.x3)):
        pair, rec, corr = w_step_pair(cur, party, r, slack)
        out.append((pair, rec, corr))
        cur = rec.after
    # the final |100> weight is fixed by conservation; it cannot fall below x0
    final_weight = cur[1]
    assert final_weight >= initial.x0 - 1e-12, "chain produced gamma1 < x0"
    return out


def w_chain_plan(
    initial: WCoefficients, target: WCoefficients, tol: Tolerances = DEFAULT_TOLERANCES
) -> ProtocolPlan:
    """Three-step plan from the flipped initial state to the flipped target."""
    triples = w_chain_records(initial, target)
    steps = tuple(ProtocolStep(pair, {2: corr}) for pair, _, corr in triples)
    records = [rec for _, rec, _ in triples]
    final = records[-1].after
    return ProtocolPlan(
        initial=w_canonical_flip(initial.state()),
        steps=steps,
        target=canonical_vector(*final),
        family="w-chain",
        metadata={
            "initial_w": list(initial.x),
            "target_w": list(target.x),
            "records": [rec.as_dict() for rec in records],
        },
    )
