"""JSON documents: input states, protocol plans and reports.

All parsing is strict: unknown keys, wrong array lengths and non-numeric
entries raise :class:`InvalidInputError`. Floats are written with ``repr``,
which is the shortest string that reads back to the same double, so a plan
survives a dump/load cycle bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .entangle import CanonicalCoefficients, InvariantSet
from .exceptions import InvalidInputError, LoccError
from .qcore import MeasurementPair, Party, as_state
from .runner import ExecutionReport, LuCorrection, ProtocolPlan, ProtocolStep, SampledReport
from .wtype import WCoefficients

PLAN_SCHEMA = "tripartite-locc/plan"
PLAN_VERSION = 1
NORM_ATOL = 1e-9


def _strict_keys(obj: Any, required: set[str], optional: set[str] = frozenset(), where: str = "document") -> dict:
    if not isinstance(obj, dict):
        raise InvalidInputError(f"{where}: expected a JSON object")
    keys = set(obj)
    missing = required - keys
    if missing:
        raise InvalidInputError(f"{where}: missing field(s) {sorted(missing)}")
    extra = keys - required - set(optional)
    if extra:
        raise InvalidInputError(f"{where}: unknown field(s) {sorted(extra)}")
    return obj


def _real(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidInputError(f"{where}: expected a number, got {type(v).__name__}")
    f = float(v)
    if not math.isfinite(f):
        raise InvalidInputError(f"{where}: number must be finite")
    return f


def _complex(re, im) -> np.ndarray:
    # assemble component-wise: re + 1j*im would turn -0.0 into 0.0
    out = np.empty(np.shape(re), dtype=np.complex128)
    out.real = re
    out.imag = im
    return out


def _reals(v: Any, n: int, where: str) -> list[float]:
    if not isinstance(v, list) or len(v) != n:
        raise InvalidInputError(f"{where}: expected an array of {n} numbers")
    return [_real(x, f"{where}[{i}]") for i, x in enumerate(v)]


# -- state documents ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateDocument:
    kind: str
    canonical: CanonicalCoefficients | None = None
    w: WCoefficients | None = None
    vector: np.ndarray | None = None
    label: str | None = None

    def state(self) -> np.ndarray:
        if self.kind == "canonical":
            return self.canonical.state()
        if self.kind == "w":
            return self.w.state()
        return self.vector.copy()

    def to_json(self) -> dict:
        if self.kind == "canonical":
            doc = {"kind": "canonical", "lambda": list(self.canonical.lambdas), "phi": self.canonical.phi}
        elif self.kind == "w":
            doc = {"kind": "w", "x": list(self.w.x)}
        else:
            doc = {"kind": "vector", "re": self.vector.real.tolist(), "im": self.vector.imag.tolist()}
        if self.label is not None:
            doc["label"] = self.label
        return doc


def parse_state_document(obj: Any) -> StateDocument:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidInputError("state document needs a 'kind' field")
    kind = obj["kind"]
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise InvalidInputError("'label' must be a string")
    try:
        if kind == "canonical":
            _strict_keys(obj, {"kind", "lambda", "phi"}, {"label"}, "canonical state")
            lam = _reals(obj["lambda"], 5, "lambda")
            phi = _real(obj["phi"], "phi")
            return StateDocument("canonical", canonical=CanonicalCoefficients(tuple(lam), phi), label=label)
        if kind == "w":
            _strict_keys(obj, {"kind", "x"}, {"label"}, "W state")
            xs = _reals(obj["x"], 4, "x")
            return StateDocument("w", w=WCoefficients(*xs, atol=NORM_ATOL), label=label)
        if kind == "vector":
            _strict_keys(obj, {"kind", "re", "im"}, {"label"}, "vector state")
            v = _complex(_reals(obj["re"], 8, "re"), _reals(obj["im"], 8, "im"))
            v = as_state(v)
            if abs(np.linalg.norm(v) - 1.0) > NORM_ATOL:
                raise InvalidInputError("vector state is not normalized")
            return StateDocument("vector", vector=v, label=label)
    except LoccError as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(str(exc)) from exc
    raise InvalidInputError(f"unknown state kind {kind!r} (expected canonical, w or vector)")


# -- plans -------------------------------------------------------------------


def _vec_json(v: np.ndarray) -> dict:
    v = np.asarray(v, dtype=np.complex128)
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def _mat_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _vec_parse(obj: Any, where: str) -> np.ndarray:
    _strict_keys(obj, {"re", "im"}, where=where)
    return _complex(_reals(obj["re"], 8, f"{where}.re"), _reals(obj["im"], 8, f"{where}.im"))


def _mat_parse(obj: Any, where: str) -> np.ndarray:
    _strict_keys(obj, {"re", "im"}, where=where)
    parts = []
    for key in ("re", "im"):
        rows = obj[key]
        if not isinstance(rows, list) or len(rows) != 2:
            raise InvalidInputError(f"{where}.{key}: expected a 2x2 array")
        parts.append(np.array([_reals(r, 2, f"{where}.{key}") for r in rows]))
    return _complex(parts[0], parts[1])


def plan_to_json(plan: ProtocolPlan) -> dict:
    steps = []
    for step in plan.steps:
        pair = step.pair
        steps.append(
            {
                "party": pair.party.value,
                "label": pair.label,
                "thetas": list(pair.thetas),
                "m1": _mat_json(pair.m1.matrix),
                "m2": _mat_json(pair.m2.matrix),
                "corrections": {
                    str(k): {p: _mat_json(u) for p, u in zip("ABC", step.correction(k).unitaries)}
                    for k in (1, 2)
                },
            }
        )
    return {
        "schema": PLAN_SCHEMA,
        "version": PLAN_VERSION,
        "family": plan.family,
        "initial": _vec_json(plan.initial),
        "target": _vec_json(plan.target),
        "steps": steps,
        "metadata": _jsonable(plan.metadata),
    }


def plan_from_json(obj: Any) -> ProtocolPlan:
    _strict_keys(obj, {"schema", "version", "family", "initial", "target", "steps"}, {"metadata"}, "plan")
    if obj["schema"] != PLAN_SCHEMA:
        raise InvalidInputError(f"plan: schema must be {PLAN_SCHEMA!r}")
    if obj["version"] != PLAN_VERSION:
        raise InvalidInputError(f"plan: unsupported version {obj['version']!r}")
    if not isinstance(obj["family"], str):
        raise InvalidInputError("plan.family must be a string")
    if not isinstance(obj["steps"], list):
        raise InvalidInputError("plan.steps must be an array")
    metadata = obj.get("metadata", {})
    if not isinstance(metadata, dict):
        raise InvalidInputError("plan.metadata must be an object")
    steps = []
    for i, st in enumerate(obj["steps"]):
        where = f"plan.steps[{i}]"
        _strict_keys(st, {"party", "label", "thetas", "m1", "m2", "corrections"}, where=where)
        if st["party"] not in ("A", "B", "C"):
            raise InvalidInputError(f"{where}.party must be A, B or C")
        if not isinstance(st["label"], str):
            raise InvalidInputError(f"{where}.label must be a string")
        thetas = _reals(st["thetas"], 2, f"{where}.thetas")
        pair = MeasurementPair.from_matrices(
            _mat_parse(st["m1"], f"{where}.m1"), _mat_parse(st["m2"], f"{where}.m2"),
            Party(st["party"]), st["label"], thetas,
        )
        corr_obj = _strict_keys(st["corrections"], {"1", "2"}, where=f"{where}.corrections")
        corrections = {}
        for k in ("1", "2"):
            c = _strict_keys(corr_obj[k], {"A", "B", "C"}, where=f"{where}.corrections.{k}")
            corrections[int(k)] = LuCorrection(
                *(_mat_parse(c[p], f"{where}.corrections.{k}.{p}") for p in "ABC")
            )
        steps.append(ProtocolStep(pair, corrections))
    plan = ProtocolPlan(
        initial=as_state(_vec_parse(obj["initial"], "plan.initial")),
        steps=tuple(steps),
        target=as_state(_vec_parse(obj["target"], "plan.target")),
        family=obj["family"],
        metadata=metadata,
    )
    plan.validate()
    return plan


# -- reports -----------------------------------------------------------------


def invariants_to_json(inv: InvariantSet) -> dict:
    return inv.as_dict()


def execution_report_to_json(report: ExecutionReport) -> dict:
    return {
        "mode": "exhaustive",
        "total_probability": report.total_probability,
        "deterministic": report.deterministic,
        "max_fidelity_defect": report.max_fidelity_defect,
        "branch_nodes": [
            {"prefix": "".join(map(str, nd.prefix)) or "-", "step": nd.step, "p1": nd.p1, "p2": nd.p2}
            for nd in report.nodes
        ],
        "leaves": [
            {
                "path": lf.label,
                "probability": lf.probability,
                "fidelity": lf.fidelity,
                "uncorrected_fidelity": lf.uncorrected_fidelity,
                "flagged": lf.flagged,
                "state": None if lf.state is None else _vec_json(lf.state),
            }
            for lf in report.leaves
        ],
    }


def sampled_report_to_json(report: SampledReport) -> dict:
    return {
        "mode": "sample",
        "trials": report.trials,
        "seed": report.seed,
        "counts": report.counts,
        "frequencies": report.frequencies,
        "exact": report.exact,
        "chi_square": report.chi_square,
        "dof": report.dof,
        "threshold": report.threshold,
        "max_abs_z": report.max_abs_z,
        "within_envelope": report.within_envelope,
    }


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def dumps(doc: Any) -> str:
    """Canonical serialization: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise InvalidInputError(f"{path}: cannot read ({exc.strerror})") from exc


def write_json(path: str | Path, doc: Any) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")
