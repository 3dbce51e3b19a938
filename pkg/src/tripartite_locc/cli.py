"""Command-line front end.

    tripartite-locc invariants STATE
    tripartite-locc classify STATE
    tripartite-locc plan SOURCE TARGET [--route R] [--plan-out FILE]
    tripartite-locc run PLAN [--mode exhaustive|sample] [--trials N] [--seed S]
    tripartite-locc verify SOURCE TARGET

Every command prints one JSON report (or writes it to --report). Exit codes:
0 ok, 1 infeasible, 2 invalid input, 3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any

import numpy as np

from . import __version__
from .config import DEFAULT_TOLERANCES, Tolerances
from .entangle import (
    CanonicalCoefficients,
    ClassLabel,
    classify,
    invariants_from_canonical,
    lue_equivalent,
    oracle_invariants,
)
from .exceptions import InfeasibleTargetError, InvalidInputError, LoccError, MonotonicityError
from .ghz import ghz_feasible, ghz_plan, is_standard_ghz_fingerprint
from .runner import ProtocolPlan, execute_exhaustive, execute_sampled, verify_deterministic
from .serialize import (
    StateDocument,
    dumps,
    execution_report_to_json,
    load_json,
    parse_state_document,
    plan_from_json,
    plan_to_json,
    sampled_report_to_json,
    write_json,
)
from .wtype import WCoefficients, canonical_from_w, w_chain_plan, w_feasible

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2, 3
GHZ_ROUTES = ("A", "B", "C", "AB", "AC", "BC")
ROUTES = GHZ_ROUTES + ("W-chain", "auto")


class _Outcome(Exception):
    """Carries a finished result payload with its status and exit code."""

    def __init__(self, status: str, code: int, result: dict):
        super().__init__(status)
        self.status, self.code, self.result = status, code, result


def _tolerances(args) -> Tolerances:
    return DEFAULT_TOLERANCES.with_overrides(complete=args.tol_complete, lue=args.tol_lue, prob=args.tol_prob)


def _read_state(path: str) -> StateDocument:
    return parse_state_document(load_json(path))


def _describe(doc: StateDocument) -> dict:
    out = {"kind": doc.kind}
    if doc.label is not None:
        out["label"] = doc.label
    return out


# -- invariants / classify ---------------------------------------------------


def cmd_invariants(args, tol: Tolerances) -> dict:
    doc = _read_state(args.state)
    oracle = oracle_invariants(doc.state())
    result: dict[str, Any] = {"state": _describe(doc), "oracle": oracle.as_dict()}
    if doc.kind in ("canonical", "w"):
        coeffs = doc.canonical if doc.kind == "canonical" else canonical_from_w(doc.w)
        closed = invariants_from_canonical(coeffs)
        result["invariants"] = closed.as_dict()
        result["canonical_vs_oracle_max_difference"] = closed.max_difference(oracle)
    else:
        result["invariants"] = oracle.as_dict()
    result["classification"] = classify(doc.state(), tol.tangle, tol.rank).value
    return result


def cmd_classify(args, tol: Tolerances) -> dict:
    doc = _read_state(args.state)
    return {"state": _describe(doc), "classification": classify(doc.state(), tol.tangle, tol.rank).value}


# -- planning ----------------------------------------------------------------


def _as_w(doc: StateDocument, tol: Tolerances) -> WCoefficients:
    """Read W coefficients from a w document, a W-shaped canonical form or vector."""
    if doc.kind == "w":
        return doc.w
    if doc.kind == "canonical":
        l0, l1, l2, l3, l4 = doc.canonical.lambdas
        if l4 > tol.vanishing:
            raise InvalidInputError("canonical state has l4 > 0; it is not in W-type canonical form")
        return WCoefficients(l1, l0, l3, l2)
    v = doc.vector
    support = [0b000, 0b100, 0b010, 0b001]
    rest = np.delete(v, support)
    xs = v[support]
    if np.max(np.abs(rest)) > tol.vanishing or np.max(np.abs(xs.imag)) > tol.vanishing or np.min(xs.real) < -tol.vanishing:
        raise InvalidInputError("vector source is not of the form x0|000> + x1|100> + x2|010> + x3|001> with x_i >= 0")
    return WCoefficients(*(max(0.0, float(x)) for x in xs.real))


def _ghz_target(doc: StateDocument) -> CanonicalCoefficients:
    if doc.kind != "canonical":
        raise InvalidInputError("GHZ-class targets must be given in canonical form (kind 'canonical')")
    return doc.canonical


def _family(source: StateDocument, target: StateDocument, route: str, tol: Tolerances) -> str:
    if route in GHZ_ROUTES:
        return "ghz"
    if route == "W-chain":
        return "w"
    src_class = classify(source.state(), tol.tangle, tol.rank)
    if src_class is ClassLabel.GHZ_CLASS:
        return "ghz"
    if src_class is ClassLabel.W_CLASS:
        return "w"
    raise InvalidInputError("source must be the standard GHZ state or a W-type state")


def build_plan(source: StateDocument, target: StateDocument, route: str, tol: Tolerances) -> tuple[ProtocolPlan, dict]:
    """Plan or raise; the second value is the feasibility verdict as a dict."""
    family = _family(source, target, route, tol)
    if family == "ghz":
        if not is_standard_ghz_fingerprint(oracle_invariants(source.state()), tol.fidelity):
            raise InvalidInputError("GHZ routes start from the standard GHZ state")
        coeffs = _ghz_target(target)
        verdict = ghz_feasible(oracle_invariants(source.state()), invariants_from_canonical(coeffs), tol)
        if not verdict:
            raise _Outcome("infeasible", EXIT_INFEASIBLE, {"verdict": verdict.as_dict()})
        plan = ghz_plan(coeffs, "auto" if route == "auto" else route, tol)
        if not np.allclose(source.state(), plan.initial, atol=tol.fidelity):
            # the source is LU-equivalent to the standard GHZ state but not equal to it
            raise InvalidInputError("GHZ routes start from (|000> + |111>)/sqrt(2) exactly")
        return plan, verdict.as_dict()
    w_src, w_tgt = _as_w(source, tol), _as_w(target, tol)
    verdict = w_feasible(w_src, w_tgt)
    if not verdict:
        raise _Outcome("infeasible", EXIT_INFEASIBLE, {"verdict": verdict.as_dict()})
    plan = w_chain_plan(w_src, w_tgt, tol)
    return plan, verdict.as_dict()


def cmd_plan(args, tol: Tolerances) -> dict:
    source, target = _read_state(args.source), _read_state(args.target)
    try:
        plan, verdict = build_plan(source, target, args.route, tol)
    except MonotonicityError as exc:
        raise _Outcome("infeasible", EXIT_INFEASIBLE, {"verdict": _verdict_from_exc(exc)})
    except InfeasibleTargetError as exc:
        raise _Outcome("infeasible", EXIT_INFEASIBLE, {"verdict": _verdict_from_exc(exc)})
    doc = plan_to_json(plan)
    if args.plan_out:
        write_json(args.plan_out, doc)
    return {
        "source": _describe(source),
        "target": _describe(target),
        "verdict": verdict,
        "family": plan.family,
        "steps": len(plan.steps),
        "plan_file": args.plan_out,
        "plan": doc,
    }


def _verdict_from_exc(exc: InfeasibleTargetError) -> dict:
    return {
        "feasible": False,
        "reason": str(exc),
        "violated_quantity": getattr(exc, "violated_quantity", None),
        "violated_indices": list(getattr(exc, "indices", ())),
        "constraint": getattr(exc, "constraint", ""),
    }


# -- running -----------------------------------------------------------------


def cmd_run(args, tol: Tolerances) -> dict:
    plan = plan_from_json(load_json(args.plan))
    plan.validate(tol)
    if args.mode == "exhaustive":
        report = execute_exhaustive(plan, tol)
        verdict = verify_deterministic(report, tol)
        result = {"family": plan.family, "report": execution_report_to_json(report), "verdict": verdict.as_dict()}
        if not verdict:
            raise _Outcome("error", EXIT_VERIFY, result)
        return result
    report = execute_sampled(plan, args.trials, args.seed, workers=args.workers)
    return {"family": plan.family, "report": sampled_report_to_json(report)}


def cmd_verify(args, tol: Tolerances) -> dict:
    source, target = _read_state(args.source), _read_state(args.target)
    if _same_orbit(source, target, tol):
        plan = ProtocolPlan(source.state(), (), source.state(), family="identity",
                            metadata={"note": "source and target are LU-equivalent; no measurement needed"})
        verdict = {"feasible": True, "reason": "source and target are LU-equivalent"}
    else:
        try:
            plan, verdict = build_plan(source, target, "auto", tol)
        except InfeasibleTargetError as exc:
            raise _Outcome("infeasible", EXIT_INFEASIBLE, {"verdict": _verdict_from_exc(exc)})
    report = execute_exhaustive(plan, tol)
    det = verify_deterministic(report, tol)
    # independent end-to-end check against the requested target
    leaf_ok = all(
        lf.state is None or lue_equivalent(lf.state, target.state(), tol.lue) for lf in report.leaves
    )
    result = {
        "source": _describe(source),
        "target": _describe(target),
        "feasibility": verdict,
        "family": plan.family,
        "plan": plan_to_json(plan),
        "report": execution_report_to_json(report),
        "verdict": det.as_dict(),
        "leaves_lue_to_target": leaf_ok,
    }
    if not (det and leaf_ok):
        raise _Outcome("error", EXIT_VERIFY, result)
    return result


def _same_orbit(a: StateDocument, b: StateDocument, tol: Tolerances) -> bool:
    try:
        return lue_equivalent(a.state(), b.state(), tol.lue)
    except LoccError:
        return False


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-complete", type=float, default=None, help="completeness tolerance (default 1e-10)")
    common.add_argument("--tol-lue", type=float, default=None, help="invariant agreement tolerance (default 1e-8)")
    common.add_argument("--tol-prob", type=float, default=None, help="probability-sum tolerance (default 1e-10)")
    common.add_argument("--report", default=None, help="write the JSON report here instead of stdout")

    p = argparse.ArgumentParser(prog="tripartite-locc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("invariants", parents=[common], help="entanglement invariants of a state")
    s.add_argument("state")
    s = sub.add_parser("classify", parents=[common], help="GHZ / W / biseparable classification")
    s.add_argument("state")
    s = sub.add_parser("plan", parents=[common], help="construct a deterministic protocol")
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("--route", choices=ROUTES, default="auto")
    s.add_argument("--plan-out", default=None, help="also write the plan document here")
    s = sub.add_parser("run", parents=[common], help="execute a plan file")
    s.add_argument("plan")
    s.add_argument("--mode", choices=("exhaustive", "sample"), default="exhaustive")
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=None)
    s = sub.add_parser("verify", parents=[common], help="plan, execute and verify in one go")
    s.add_argument("source")
    s.add_argument("target")
    return p


COMMANDS = {
    "invariants": cmd_invariants,
    "classify": cmd_classify,
    "plan": cmd_plan,
    "run": cmd_run,
    "verify": cmd_verify,
}


def _config_echo(args, tol: Tolerances) -> dict:
    cfg = {"tolerances": tol.as_dict()}
    for key in ("route", "mode", "trials", "seed", "workers", "plan_out"):
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    return cfg


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    tol = _tolerances(args)
    try:
        if args.command == "run" and args.trials < 1:
            raise InvalidInputError("--trials must be at least 1")
        result = COMMANDS[args.command](args, tol)
        status, code = "ok", EXIT_OK
    except _Outcome as out:
        status, code, result = out.status, out.code, out.result
    except (LoccError, ValueError) as exc:
        status, code = "error", EXIT_INVALID
        result = {"error": type(exc).__name__, "message": str(exc)}
    doc = {
        "command": {"name": args.command, "argv": argv},
        "config": _config_echo(args, tol),
        "status": status,
        "exit_code": code,
        "result": result,
    }
    text = dumps(doc)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
