import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tripartite_locc.exceptions import InvalidInputError
from tripartite_locc.ghz import two_party_plan
from tripartite_locc.random_targets import random_two_party_target, random_w_target
from tripartite_locc.runner import execute_exhaustive, execute_sampled
from tripartite_locc.serialize import (
    dumps,
    execution_report_to_json,
    load_json,
    parse_state_document,
    plan_from_json,
    plan_to_json,
    sampled_report_to_json,
)
from tripartite_locc.wtype import WCoefficients, w_chain_plan

R2 = math.sqrt(2)


def ghz_doc():
    return {"kind": "canonical", "lambda": [1 / R2, 0, 0, 0, 1 / R2], "phi": 0}


def some_plans():
    rng = np.random.default_rng(1)
    w = WCoefficients.standard()
    return [two_party_plan("AB", random_two_party_target(rng, "AB")), w_chain_plan(w, random_w_target(rng, w))]


# -- state documents ---------------------------------------------------------


def test_parse_each_kind():
    assert parse_state_document(ghz_doc()).kind == "canonical"
    w = parse_state_document({"kind": "w", "x": [0, 3**-0.5, 3**-0.5, 3**-0.5]})
    assert w.w.x1 == pytest.approx(3**-0.5)
    vec = parse_state_document({"kind": "vector", "re": [1] + [0] * 7, "im": [0] * 8, "label": "000"})
    assert vec.label == "000"
    assert vec.state()[0] == 1


@pytest.mark.parametrize(
    "doc",
    [
        {"lambda": [1, 0, 0, 0, 0], "phi": 0},
        {"kind": "canonical", "lambda": [1, 0, 0, 0], "phi": 0},
        {"kind": "canonical", "lambda": [1, 0, 0, 0, 0]},
        {"kind": "canonical", "lambda": [1, 0, 0, 0, 0], "phi": 0, "phase": 1},
        {"kind": "canonical", "lambda": [1, 0, 0, 0, "0"], "phi": 0},
        {"kind": "canonical", "lambda": [1, 0, 0, 0, True], "phi": 0},
        {"kind": "canonical", "lambda": [0.9, 0, 0, 0, 0], "phi": 0},
        {"kind": "w", "x": [0.5, 0.5, 0.5, 0.6]},
        {"kind": "w", "x": [1, 0, 0, 0]},
        {"kind": "vector", "re": [1] + [0] * 7, "im": [0] * 7},
        {"kind": "vector", "re": [2] + [0] * 7, "im": [0] * 8},
        {"kind": "tensor", "re": []},
        {"kind": "vector", "re": [1] + [0] * 7, "im": [0] * 8, "label": 3},
        [1, 2, 3],
    ],
)
def test_strict_state_parsing(doc):
    with pytest.raises(InvalidInputError):
        parse_state_document(doc)


def test_state_document_round_trip():
    for doc in (ghz_doc(), {"kind": "w", "x": [0.5, 0.5, 0.5, 0.5], "label": "w"}):
        back = parse_state_document(doc).to_json()
        assert parse_state_document(back).to_json() == back


def test_load_json_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(InvalidInputError, match="malformed JSON"):
        load_json(p)
    with pytest.raises(InvalidInputError):
        load_json(tmp_path / "missing.json")


# -- plans -------------------------------------------------------------------


@pytest.mark.parametrize("index", [0, 1])
def test_plan_round_trip_bit_identical(index):
    plan = some_plans()[index]
    text = dumps(plan_to_json(plan))
    again = plan_from_json(json.loads(text))
    assert dumps(plan_to_json(again)) == text
    for a, b in zip(plan.steps, again.steps):
        assert np.array_equal(a.pair.m1.matrix, b.pair.m1.matrix)
        assert np.array_equal(a.pair.m2.matrix, b.pair.m2.matrix)
    r1 = dumps(execution_report_to_json(execute_exhaustive(plan)))
    r2 = dumps(execution_report_to_json(execute_exhaustive(again)))
    assert r1 == r2


def test_negative_zero_survives():
    plan = some_plans()[0]
    text = dumps(plan_to_json(plan))
    assert dumps(plan_to_json(plan_from_json(json.loads(text)))) == text
    doc = parse_state_document({"kind": "vector", "re": [1] + [0] * 7, "im": [-0.0] + [0] * 7})
    assert math.copysign(1.0, doc.state()[0].imag) == -1.0


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(extra=1),
        lambda d: d.update(schema="other"),
        lambda d: d.update(version=2),
        lambda d: d["steps"][0].update(party="D"),
        lambda d: d["steps"][0].pop("m2"),
        lambda d: d["steps"][0]["corrections"].pop("2"),
        lambda d: d["steps"][0]["m1"].update(re=[[1, 0]]),
        lambda d: d["steps"][0]["m1"].update(re=[[2, 0], [0, 2]]),
        lambda d: d["steps"][0]["corrections"]["2"]["A"].update(re=[[2, 0], [0, 2]]),
        lambda d: d["initial"].update(re=[1] * 8),
    ],
)
def test_plan_parsing_rejects_corruption(mutate):
    doc = json.loads(dumps(plan_to_json(some_plans()[0])))
    mutate(doc)
    with pytest.raises(InvalidInputError):
        plan_from_json(doc)


def test_sampled_report_serializes():
    rep = execute_sampled(some_plans()[0], 1000, seed=5)
    doc = json.loads(dumps(sampled_report_to_json(rep)))
    assert doc["trials"] == 1000 and doc["seed"] == 5
    assert sum(doc["counts"].values()) == 1000


@settings(max_examples=100, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_round_trip_exactly(x):
    assert json.loads(dumps({"x": x}))["x"] == x
