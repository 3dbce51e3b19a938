import math

import numpy as np
import pytest

from tripartite_locc.entangle import (
    ClassLabel,
    ckw_tangle,
    classify,
    invariants_from_canonical,
    oracle_invariants,
)
from tripartite_locc.exceptions import (
    DegenerateStepError,
    InvalidInputError,
    MonotonicityError,
    WrongClassError,
)
from tripartite_locc.qcore import apply_local, ket, povm_complete, product_state, w_state
from tripartite_locc.random_targets import random_nonmonotone_w_target, random_w_target
from tripartite_locc.runner import execute_exhaustive
from tripartite_locc.wtype import (
    PRINTED_BC_CORRECTION,
    WCoefficients,
    canonical_from_w,
    canonical_vector,
    w_canonical_flip,
    w_chain_plan,
    w_chain_records,
    w_feasible,
    w_step_pair,
)

R3 = math.sqrt(3)
W = WCoefficients.standard()


def branch_states(pair, amplitudes):
    s = canonical_vector(*amplitudes)
    outs = [apply_local(op, s) for op in pair.operators]
    return [o / np.linalg.norm(o) for o in outs]


# -- coefficients and the flip -----------------------------------------------


def test_w_coefficients_validation():
    with pytest.raises(WrongClassError):
        WCoefficients(1.0, 0.0, 0.0, 0.0)
    with pytest.raises(InvalidInputError):
        WCoefficients(-0.1, 0.5, 0.5, 0.5)
    with pytest.raises(InvalidInputError):
        WCoefficients(0.5, 0.5, 0.5, 0.6)
    assert WCoefficients.normalized([0, 1, 1, 1]).x1 == pytest.approx(1 / R3)


def test_flip_standard_w():
    assert np.allclose(w_canonical_flip(w_state()), ket(b000=1, b101=1, b110=1) / R3)


def test_flip_is_involution():
    rng = np.random.default_rng(0)
    s = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    assert np.allclose(w_canonical_flip(w_canonical_flip(s)), s)
    assert np.allclose(w_canonical_flip(product_state("000")), product_state("100"))


def test_canonical_from_w_matches_flip():
    w = WCoefficients.normalized([0.3, 0.5, 0.6, 0.4])
    assert np.allclose(w_canonical_flip(w.state()), canonical_from_w(w).state())


# -- single steps ------------------------------------------------------------


def test_step_a_on_standard_w():
    pair, rec, _ = w_step_pair(W.canonical_amplitudes(), "A", 0.5)
    assert rec.new_weight == pytest.approx(math.sqrt(1 / 3 - 1 / 4))
    assert rec.new_weight == pytest.approx(0.2887, abs=1e-4)
    assert (rec.p1, rec.p2) == pytest.approx((0.5, 0.5))
    assert povm_complete(pair)


def test_step_b_trivial():
    cur = (0.5, math.sqrt(1 / 3 - 1 / 4), 1 / R3, 1 / R3)
    pair, rec, _ = w_step_pair(cur, "B", 1 / R3)
    assert rec.trivial
    assert (rec.p1, rec.p2) == (1.0, 0.0)
    assert rec.new_weight == cur[1]
    assert np.array_equal(pair.m1.matrix, np.eye(2))
    assert not np.any(pair.m2.matrix)


def test_step_c_probability():
    alpha0, beta1, x3, beta3 = 0.5, 0.4, 1 / R3, 0.3
    pair, rec, _ = w_step_pair((alpha0, beta1, x3, beta3), "C", 0.3)
    gamma1 = math.sqrt(x3 * x3 + beta1 * beta1 - 0.09)
    assert rec.new_weight == pytest.approx(gamma1)
    assert rec.p1 == pytest.approx((gamma1 + beta1) / (2 * gamma1), abs=1e-12)
    assert rec.p2 == pytest.approx((gamma1 - beta1) / (2 * gamma1), abs=1e-12)
    assert rec.after == pytest.approx((alpha0, gamma1, 0.3, beta3))


@pytest.mark.parametrize("party", ["A", "B", "C"])
def test_step_outputs_and_probabilities(party):
    cur = (0.5, 0.3, 0.5, math.sqrt(1 - 0.25 - 0.09 - 0.25))
    pair, rec, corr = w_step_pair(cur, party, 0.2)
    s = canonical_vector(*cur)
    probs = [np.vdot(o, o).real for o in (apply_local(op, s) for op in pair.operators)]
    assert probs == pytest.approx([rec.p1, rec.p2], abs=1e-12)
    assert rec.conservation_defect() <= 1e-12
    b1, b2 = branch_states(pair, cur)
    assert np.allclose(b1, canonical_vector(*rec.after), atol=1e-12)
    # branch 2 carries the sign flip on |100>
    expect2 = canonical_vector(*rec.after)
    expect2[0b100] *= -1
    assert np.allclose(b2, expect2, atol=1e-12)
    assert np.allclose(corr.apply(b2), b1, atol=1e-12)


@pytest.mark.parametrize("party", ["B", "C"])
def test_printed_bc_correction_flips_wrong_amplitude(party):
    cur = (0.5, 0.3, 0.5, math.sqrt(1 - 0.25 - 0.09 - 0.25))
    pair, _, _ = w_step_pair(cur, party, 0.2)
    b1, b2 = branch_states(pair, cur)
    assert abs(np.vdot(b1, PRINTED_BC_CORRECTION.apply(b2))) < 1 - 1e-3


def test_step_monotonicity_error():
    with pytest.raises(MonotonicityError) as err:
        w_step_pair(W.canonical_amplitudes(), "B", 0.7)
    assert err.value.indices == (2,)


def test_step_boundary_slack_accepted():
    pair, rec, _ = w_step_pair(W.canonical_amplitudes(), "C", 1 / R3 + 5e-11)
    assert rec.trivial


def test_step_degenerate_source():
    with pytest.raises(DegenerateStepError):
        w_step_pair((0.6, 0.8, 0.0, 0.0), "C", 0.0)


def test_step_rejects_negative_input():
    with pytest.raises(InvalidInputError):
        w_step_pair(W.canonical_amplitudes(), "A", -0.1)


# -- feasibility -------------------------------------------------------------


def test_feasible_half_pattern():
    target = WCoefficients(0.5, 0.5, 0.5, 0.5)
    assert w_feasible(W, target)


def test_infeasible_index_reported():
    rest = math.sqrt(1 - 0.81 - 0.01 - 0.01)
    verdict = w_feasible(W, WCoefficients(rest, 0.9, 0.1, 0.1))
    assert not verdict
    assert verdict.violated_indices == (1,)


def test_identity_target_feasible():
    assert w_feasible(W, W)


def test_random_nonmonotone_indices():
    rng = np.random.default_rng(6)
    for _ in range(100):
        target, raised = random_nonmonotone_w_target(rng, W)
        verdict = w_feasible(W, target)
        assert not verdict
        assert verdict.violated_indices == raised


# -- the chain ---------------------------------------------------------------


def test_chain_example():
    # (alpha0, gamma1, gamma2, beta3) = (0.5, 0.55, 0.45, sqrt(0.005)), normalized
    target = WCoefficients.normalized([0.55, 0.5, math.sqrt(1 - 0.995), 0.45])
    plan = w_chain_plan(W, target)
    rep = execute_exhaustive(plan)
    assert len(rep.leaves) == 8
    assert rep.deterministic
    want = invariants_from_canonical(canonical_from_w(target))
    for lf in rep.leaves:
        if lf.state is not None:
            assert oracle_invariants(lf.state).max_difference(want) <= 1e-9


def test_chain_identity():
    plan = w_chain_plan(W, W)
    records = [rec for _, rec, _ in w_chain_records(W, W)]
    assert all(rec.trivial for rec in records)
    assert all(rec.p1 == 1.0 for rec in records)
    rep = execute_exhaustive(plan)
    assert rep.leaf("111").probability == pytest.approx(1.0, abs=1e-12)
    assert abs(np.vdot(rep.leaf("111").state, plan.initial)) == pytest.approx(1.0)


def test_chain_trivial_last_step():
    target = WCoefficients(math.sqrt(1 - 0.32 - 1 / 3), 0.4, 0.4, 1 / R3)
    records = [rec for _, rec, _ in w_chain_records(W, target)]
    assert records[2].trivial and records[2].p1 == 1.0
    rep = execute_exhaustive(w_chain_plan(W, target))
    assert len(rep.leaves) == 8
    assert rep.deterministic


def test_chain_rejects_nonmonotone():
    rest = math.sqrt(1 - 0.81 - 0.01 - 0.01)
    with pytest.raises(MonotonicityError) as err:
        w_chain_plan(W, WCoefficients(rest, 0.9, 0.1, 0.1))
    assert err.value.indices == (1,)


def test_chain_properties_on_random_targets():
    rng = np.random.default_rng(12)
    for _ in range(60):
        target = random_w_target(rng, W)
        triples = w_chain_records(W, target)
        cur = canonical_vector(*W.canonical_amplitudes())
        before = oracle_invariants(cur)
        for pair, rec, corr in triples:
            assert povm_complete(pair)
            assert rec.conservation_defect() <= 1e-10
            nxt = canonical_vector(*rec.after)
            # closed-form probabilities agree with the state
            p1 = np.vdot(apply_local(pair.m1, cur), apply_local(pair.m1, cur)).real
            assert p1 == pytest.approx(rec.p1, abs=1e-10)
            assert ckw_tangle(nxt) <= 1e-9
            assert classify(nxt) is ClassLabel.W_CLASS
            after = oracle_invariants(nxt)
            q = rec.party.value
            conc = {"AB": (before.c_ab, after.c_ab), "AC": (before.c_ac, after.c_ac), "BC": (before.c_bc, after.c_bc)}
            for key, (b, a) in conc.items():
                if q in key:
                    assert a <= b + 1e-9
                else:
                    assert abs(a - b) <= 1e-9
            cur, before = nxt, after
        assert cur[0b100].real >= target.x0 - 1e-12
