"""Protocol plans as branch trees: exhaustive and sampled execution.

A plan is a sequence of two-outcome measurements. After each outcome the
branch's local-unitary correction is applied, so every branch enters the next
step in the same state; a plan is deterministic when all 2**steps leaves
coincide with the target up to global phase and their probabilities sum to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Any

import numpy as np
from scipy import stats

from .config import DEAD_BRANCH_PROB, DEFAULT_TOLERANCES, Tolerances
from .exceptions import InvalidInputError
from .qcore import (
    I2,
    MeasurementPair,
    apply_local,
    apply_product,
    as_state,
    fidelity_up_to_phase,
    is_unitary,
)
from .verdict import FeasibilityVerdict

# two-sided 3 sigma coverage of a normal variate
THREE_SIGMA_COVERAGE = 0.9973002039367398
SAMPLING_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class LuCorrection:
    """Product unitary U_A x U_B x U_C applied to a branch output."""

    u_a: np.ndarray = field(default_factory=lambda: I2.copy())
    u_b: np.ndarray = field(default_factory=lambda: I2.copy())
    u_c: np.ndarray = field(default_factory=lambda: I2.copy())

    def __post_init__(self):
        for name in ("u_a", "u_b", "u_c"):
            m = np.array(getattr(self, name), dtype=np.complex128)
            if m.shape != (2, 2) or not np.all(np.isfinite(m)):
                raise InvalidInputError(f"{name} must be a finite 2x2 matrix")
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @classmethod
    def identity(cls) -> "LuCorrection":
        return cls()

    @property
    def unitaries(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.u_a, self.u_b, self.u_c)

    def is_unitary(self, atol: float = 1e-12) -> bool:
        return all(is_unitary(u, atol) for u in self.unitaries)

    def is_identity(self) -> bool:
        return all(np.array_equal(u, I2) for u in self.unitaries)

    def apply(self, s: np.ndarray) -> np.ndarray:
        return apply_product(self.u_a, self.u_b, self.u_c, s)


@dataclass(frozen=True, eq=False)
class ProtocolStep:
    pair: MeasurementPair
    corrections: dict[int, LuCorrection] = field(default_factory=dict)

    def __post_init__(self):
        corr = {1: LuCorrection.identity(), 2: LuCorrection.identity()}
        corr.update({int(k): v for k, v in self.corrections.items()})
        if set(corr) != {1, 2}:
            raise InvalidInputError("corrections are keyed by branch index 1 and 2")
        object.__setattr__(self, "corrections", corr)

    def correction(self, branch: int) -> LuCorrection:
        return self.corrections[branch]


@dataclass(frozen=True, eq=False)
class ProtocolPlan:
    initial: np.ndarray
    steps: tuple[ProtocolStep, ...]
    target: np.ndarray
    family: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "initial", as_state(self.initial))
        object.__setattr__(self, "target", as_state(self.target))
        object.__setattr__(self, "steps", tuple(self.steps))

    def validate(self, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
        for s, name in ((self.initial, "initial"), (self.target, "target")):
            if abs(np.linalg.norm(s) - 1.0) > tol.algebra:
                raise InvalidInputError(f"plan {name} state is not normalized")
        for i, step in enumerate(self.steps):
            if step.pair.completeness_defect() > tol.complete:
                raise InvalidInputError(f"step {i + 1}: measurement pair is not complete")
            for k, corr in step.corrections.items():
                if not corr.is_unitary(tol.algebra):
                    raise InvalidInputError(f"step {i + 1}: branch-{k} correction is not unitary")


@dataclass(frozen=True)
class BranchNode:
    """Branching record for one internal node of the tree."""

    prefix: tuple[int, ...]
    step: int
    p1: float
    p2: float


@dataclass(frozen=True, eq=False)
class Leaf:
    path: tuple[int, ...]
    probability: float
    state: np.ndarray | None
    fidelity: float | None
    uncorrected_fidelity: float | None
    flagged: bool = False

    @property
    def label(self) -> str:
        return path_label(self.path)


@dataclass(frozen=True, eq=False)
class ExecutionReport:
    leaves: tuple[Leaf, ...]
    nodes: tuple[BranchNode, ...]
    total_probability: float
    deterministic: bool
    max_fidelity_defect: float

    def leaf(self, path: str | tuple[int, ...]) -> Leaf:
        key = path if isinstance(path, str) else path_label(path)
        for lf in self.leaves:
            if lf.label == key:
                return lf
        raise KeyError(key)

    def probabilities(self) -> dict[str, float]:
        return {lf.label: lf.probability for lf in self.leaves}


@dataclass(frozen=True)
class SampledReport:
    trials: int
    seed: int
    counts: dict[str, int]
    frequencies: dict[str, float]
    exact: dict[str, float]
    chi_square: float
    dof: int
    threshold: float
    max_abs_z: float
    within_envelope: bool


def path_label(path: tuple[int, ...]) -> str:
    return "".join(str(k) for k in path) or "-"


def _walk(plan: ProtocolPlan, use_corrections: bool) -> tuple[list[tuple], list[BranchNode]]:
    """Expand every branch path; returns (path, probability, state) triples."""
    nodes: list[BranchNode] = []
    frontier = [((), 1.0, plan.initial.copy())]
    for i, step in enumerate(plan.steps):
        nxt = []
        for prefix, prob, state in frontier:
            if state is None:
                nxt += [(prefix + (k,), 0.0, None) for k in (1, 2)]
                continue
            outs = [apply_local(op, state) for op in step.pair.operators]
            ps = [float(np.vdot(o, o).real) for o in outs]
            nodes.append(BranchNode(prefix, i + 1, ps[0], ps[1]))
            for k, (out, p) in enumerate(zip(outs, ps), start=1):
                if p < DEAD_BRANCH_PROB:
                    nxt.append((prefix + (k,), prob * p, None))
                    continue
                out = out / math.sqrt(p)
                if use_corrections:
                    out = step.correction(k).apply(out)
                nxt.append((prefix + (k,), prob * p, out))
        frontier = nxt
    return frontier, nodes


def execute_exhaustive(plan: ProtocolPlan, tol: Tolerances = DEFAULT_TOLERANCES) -> ExecutionReport:
    """Enumerate all branch paths, apply corrections, compare leaves to the target."""
    target = plan.target / np.linalg.norm(plan.target)
    corrected, nodes = _walk(plan, use_corrections=True)
    bare, _ = _walk(plan, use_corrections=False)
    leaves = []
    for (path, prob, state), (_, _, raw) in zip(corrected, bare):
        flagged = state is None or prob < DEAD_BRANCH_PROB
        fid = None if flagged else fidelity_up_to_phase(state, target)
        raw_fid = None if flagged or raw is None else fidelity_up_to_phase(raw, target)
        leaves.append(Leaf(path, prob, None if flagged else state, fid, raw_fid, flagged))
    total = float(sum(lf.probability for lf in leaves))
    defects = [1.0 - lf.fidelity for lf in leaves if lf.fidelity is not None]
    max_defect = max(defects) if defects else 0.0
    deterministic = abs(total - 1.0) <= tol.prob and max_defect <= tol.fidelity
    return ExecutionReport(tuple(leaves), tuple(nodes), total, deterministic, max_defect)


def verify_deterministic(report: ExecutionReport, tol: Tolerances = DEFAULT_TOLERANCES) -> FeasibilityVerdict:
    deficit = 1.0 - report.total_probability
    if abs(deficit) > tol.prob:
        return FeasibilityVerdict(
            False, f"probability deficit: leaves sum to {report.total_probability!r}", violated_quantity=deficit
        )
    for lf in report.leaves:
        if lf.fidelity is not None and 1.0 - lf.fidelity > tol.fidelity:
            return FeasibilityVerdict(
                False,
                f"leaf {lf.label} misses the target: fidelity defect {1.0 - lf.fidelity!r}",
                violated_quantity=1.0 - lf.fidelity,
            )
    return FeasibilityVerdict(True, "all leaves equal the target up to global phase; probabilities sum to 1")


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(chunk,)))


def _sample_chunk(p1_table: np.ndarray, n_steps: int, seed: int, chunk: int, n: int) -> np.ndarray:
    u = _chunk_rng(seed, chunk).random((n, n_steps))
    # heap-style node index: root 0, children of j are 2j+1 (branch 1) and 2j+2
    node = np.zeros(n, dtype=np.int64)
    for i in range(n_steps):
        take2 = u[:, i] >= p1_table[node]
        node = 2 * node + 1 + take2
    leaf_index = node - (2**n_steps - 1)
    return np.bincount(leaf_index, minlength=2**n_steps)


def execute_sampled(
    plan: ProtocolPlan,
    trials: int,
    seed: int,
    chunk_size: int = SAMPLING_CHUNK,
    workers: int | None = None,
) -> SampledReport:
    """Monte Carlo over branch outcomes.

    Trials are grouped in fixed-size chunks; chunk j draws from a stream
    derived from (seed, j), and chunk counts are summed, so the report does
    not depend on evaluation order or on ``workers``.
    """
    if trials < 1:
        raise InvalidInputError("trials must be at least 1")
    n_steps = len(plan.steps)
    frontier, nodes = _walk(plan, use_corrections=True)
    exact = {path_label(path): prob for path, prob, _ in frontier}
    if n_steps == 0:
        counts = {"-": trials}
        return SampledReport(trials, seed, counts, {"-": 1.0}, exact, 0.0, 0, 0.0, 0.0, True)

    # conditional probability of branch 1 at each internal node, heap order;
    # nodes under a dead branch are never reached
    p1_table = np.ones(2**n_steps - 1)
    for nd in nodes:
        j = 0
        for k in nd.prefix:
            j = 2 * j + k
        total = nd.p1 + nd.p2
        p1_table[j] = nd.p1 / total if total > 0 else 1.0

    n_chunks = -(-trials // chunk_size)
    sizes = [min(chunk_size, trials - c * chunk_size) for c in range(n_chunks)]
    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda c: _sample_chunk(p1_table, n_steps, seed, c, sizes[c]), range(n_chunks)))
    else:
        parts = [_sample_chunk(p1_table, n_steps, seed, c, sizes[c]) for c in range(n_chunks)]
    raw = np.sum(parts, axis=0)

    labels = [path_label(p) for p in iproduct((1, 2), repeat=n_steps)]
    counts = {lab: int(raw[i]) for i, lab in enumerate(labels)}
    freqs = {lab: counts[lab] / trials for lab in labels}
    chi2, dof, threshold, max_z, ok = multinomial_envelope(counts, exact, trials)
    return SampledReport(trials, seed, counts, freqs, exact, chi2, dof, threshold, max_z, ok)


def multinomial_envelope(
    counts: dict[str, int], exact: dict[str, float], trials: int, coverage: float = THREE_SIGMA_COVERAGE
) -> tuple[float, int, float, float, bool]:
    """Pearson chi-square of observed counts against exact leaf probabilities.

    The envelope is the chi-square quantile at 3-sigma coverage with one
    degree of freedom fewer than the number of reachable leaves. Any count on
    a zero-probability leaf falls outside.
    """
    live = [k for k, p in exact.items() if p > DEAD_BRANCH_PROB]
    impossible = sum(c for k, c in counts.items() if k not in live)
    chi2 = 0.0
    max_z = 0.0
    for k in live:
        p = exact[k]
        expected = trials * p
        chi2 += (counts.get(k, 0) - expected) ** 2 / expected
        if p < 1.0:
            z = (counts.get(k, 0) - expected) / math.sqrt(trials * p * (1 - p))
            max_z = max(max_z, abs(z))
    dof = max(len(live) - 1, 0)
    threshold = float(stats.chi2.ppf(coverage, dof)) if dof else 0.0
    ok = impossible == 0 and (chi2 <= threshold if dof else True)
    return float(chi2), dof, threshold, float(max_z), ok
