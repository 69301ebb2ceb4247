"""Command-line front end: scenario runner, catalog demos, self-test.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on input
errors (unreadable or schema-invalid scenario, expression parse failure,
evaluation failure).  Reports are deterministic for a fixed scenario, seed
and build: byte-identical output, stable field order, no non-finite numbers.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__, degeneracy, exprlang, inversion, selftest, verify
from .degeneracy import Classification
from .errors import (DiracinvError, GuardViolated, MassInconsistent, NoSupportPoints,
                     NonRealPotential, NonRealTheta, NotDegenerate, ParseError,
                     ScenarioError)
from .exprlang import EvaluationError
from .report import CheckSet, render_report
from .scenario import Scenario, build_scenario, demo_scenario, load_scenario
from .verify import tensor_gap

_INVERT_TABLE_LIMIT = 200


def _point_list(p) -> list[float]:
    return [float(v) for v in p]


def _task_classify(sc: Scenario, state: dict) -> dict:
    checks = CheckSet("classify")
    cls = degeneracy.classify(sc.spinor, sc.domain, sc.tolerances["classify"],
                              kappa=sc.kappa, support_tol=sc.tolerances["support"])
    state["classification"] = cls
    expected = sc.instance.expected_verdict if sc.instance else None
    if expected is not None:
        checks.add("verdict matches catalog expectation", cls.verdict == expected,
                   detail=f"expected {expected}, got {cls.verdict}")
    out = {
        "verdict": cls.verdict,
        "support_points": len(cls.support_points),
        "s_points": len(cls.s_points),
        "degenerate_points": len(cls.degenerate_points),
        "tolerance": cls.tol,
        "relative_to_sample": True,
    }
    if cls.gamma2_cover_fraction is not None:
        out["gamma2_cover_fraction"] = cls.gamma2_cover_fraction
    if cls.gamma2_covers_support is not None:
        out["gamma2_covers_support"] = cls.gamma2_covers_support
        checks.add("transpose bilinear covers sampled support",
                   cls.gamma2_covers_support, value=cls.gamma2_cover_fraction)
    out["checks"] = checks.as_dict()
    return out


def _task_mass(sc: Scenario, state: dict) -> dict:
    checks = CheckSet("mass")
    a0 = sc.potential.components[0] if sc.potential is not None else None
    a0_params = sc.potential.params if sc.potential is not None else None
    out: dict = {}
    try:
        estimate = inversion.extract_mass(
            sc.spinor, a0, sc.domain, a0_params=a0_params,
            support_tol=sc.tolerances["support"],
            spread_tol=sc.tolerances["mass_spread"])
    except MassInconsistent as exc:
        checks.add("pointwise mass is consistent", False, detail=str(exc))
        out["error"] = "MassInconsistent"
    else:
        out.update({"kappa": estimate.kappa, "spread": estimate.spread,
                    "points": estimate.count, "max_imag": estimate.max_imag})
        if estimate.crosscheck_gap is not None:
            out["gauge_fixed_crosscheck_gap"] = estimate.crosscheck_gap
        checks.add("pointwise mass is consistent", True, value=estimate.spread)
        checks.add("recovered mass matches scenario kappa",
                   abs(estimate.kappa - sc.kappa) < sc.tolerances["mass"],
                   value=abs(estimate.kappa - sc.kappa))
    out["checks"] = checks.as_dict()
    return out


def _task_invert(sc: Scenario, state: dict) -> dict:
    checks = CheckSet("invert")
    cls: Classification | None = state.get("classification")
    if cls is None:
        cls = degeneracy.classify(sc.spinor, sc.domain, sc.tolerances["classify"],
                                  kappa=sc.kappa, support_tol=sc.tolerances["support"])
        state["classification"] = cls
    guard = sc.tolerances["guard"]
    rows = []
    recovered = []
    worst_vs_known = 0.0
    worst_agreement = 0.0
    worst_oracle = 0.0
    for p in cls.support_points[:_INVERT_TABLE_LIMIT]:
        row: dict = {"point": _point_list(p)}
        try:
            sample = inversion.invert_combined(sc.spinor, sc.kappa, p, guard=guard,
                                               real_tol=sc.tolerances["real"])
        except GuardViolated:
            row["status"] = "degenerate-locus"
            rows.append(row)
            continue
        row.update({"status": "ok", "a": list(sample.a),
                    "imag_residue": sample.imag_residue})
        rows.append(row)
        recovered.append(sample)
        worst_oracle = max(worst_oracle, verify.residual_norm_at(
            sc.spinor, sample.a, sc.kappa, p))
        if sc.potential is not None:
            known = sc.potential.values(p, real_tol=sc.tolerances["real"])
            worst_vs_known = max(worst_vs_known,
                                 float(np.abs(sample.as_array() - known).max()))
        for route in (inversion.invert_gamma4, inversion.invert_gamma5gamma4):
            try:
                other = route(sc.spinor, sc.kappa, p, guard=guard,
                              real_tol=sc.tolerances["real"])
            except GuardViolated:
                continue
            worst_agreement = max(worst_agreement,
                                  float(np.abs(sample.as_array() - other.as_array()).max()))
    out = {
        "rows": rows,
        "recovered_points": len(recovered),
        "degenerate_locus_points": len(rows) - len(recovered),
    }
    if recovered:
        checks.add("recovered potential passes the residual oracle",
                   worst_oracle < sc.tolerances["residual"], value=worst_oracle)
        checks.add("inversion routes agree where guards pass",
                   worst_agreement < sc.tolerances["agreement"], value=worst_agreement)
        if sc.potential is not None:
            checks.add("recovered potential matches the known one",
                       worst_vs_known < sc.tolerances["invert"], value=worst_vs_known)
    out["checks"] = checks.as_dict()
    return out


def _family_region(sc: Scenario, cls: Classification) -> np.ndarray:
    """Support points where the transpose g2 bilinear passes the guard.

    The family is defined exactly there; for nonzero mass that is the whole
    support of a degenerate solution, for zero mass possibly less.
    """
    from .clifford import gamma

    values = sc.spinor.values(cls.support_points)
    norm_sq = np.einsum("ni,ni->n", values.conj(), values).real
    tb = np.einsum("ni,ij,nj->n", values, gamma(2), values)
    mask = np.abs(tb) > sc.tolerances["guard"] * norm_sq
    return cls.support_points[mask]


def _task_family(sc: Scenario, state: dict) -> dict:
    checks = CheckSet("family")
    cls: Classification | None = state.get("classification")
    if cls is None:
        cls = degeneracy.classify(sc.spinor, sc.domain, sc.tolerances["classify"],
                                  kappa=sc.kappa, support_tol=sc.tolerances["support"])
        state["classification"] = cls
    out: dict = {"members": [], "region": "supp(transpose-g2-bilinear)"}
    base = sc.potential if sc.potential is not None else inversion.FourPotential.zero()
    directions: list[tuple[str, exprlang.Expr]] = [
        ("1", exprlang.ONE), ("x0", exprlang.Name("x0"))]
    if sc.f is not None:
        directions.append((exprlang.to_text(sc.f), sc.f))
    region = _family_region(sc, cls)
    out["region_points"] = len(region)
    checks.add("family region is nonempty on the sample", len(region) > 0,
               value=float(len(region)))
    if len(region) == 0:
        out["checks"] = checks.as_dict()
        return out
    pts = region[:50]
    members = {}
    try:
        for label, f in directions:
            member = degeneracy.potential_family(sc.spinor, base, f, cls,
                                                 f_params=sc.f_params)
            members[label] = member
            worst = max(verify.residual_norm_at(sc.spinor, member, sc.kappa, p)
                        for p in pts)
            gap = verify.lightlike_gap_max(member, base, pts)
            out["members"].append({
                "f": label,
                "residual_max": worst,
                "lightlike_gap_max": gap,
            })
            checks.add(f"family member f={label} passes the residual oracle",
                       worst < sc.tolerances["family_residual"], value=worst)
            checks.add(f"family member f={label} is light-like separated from base",
                       gap < sc.tolerances["lightlike"], value=gap)
    except NotDegenerate as exc:
        checks.add("spinor is degenerate", False, detail=str(exc))
        out["checks"] = checks.as_dict()
        return out

    gap_const = tensor_gap(members["1"], base, pts)
    gap_linear = tensor_gap(members["x0"], base, pts)
    out["gauge_criterion"] = "field-tensor equality on the sampled simply-connected box"
    out["tensor_gap_f_1"] = gap_const
    out["tensor_gap_f_x0"] = gap_linear
    checks.add("constant member shares the base field tensor",
               gap_const < sc.tolerances["tensor"], value=gap_const)
    checks.add("a gauge-inequivalent member exists (f=x0)",
               gap_linear >= 10 * sc.tolerances["tensor"], value=gap_linear)
    out["checks"] = checks.as_dict()
    return out


def _task_verify(sc: Scenario, state: dict) -> dict:
    checks = CheckSet("verify")
    report = verify.residual_norm(sc.spinor, sc.potential, sc.kappa, sc.domain,
                                  support_tol=sc.tolerances["support"])
    out: dict = {"no_support": report.no_support}
    if report.no_support:
        checks.add("sample contains support points", False,
                   detail="NoSupportPoints: spinor vanishes on the whole sample")
    else:
        out.update({
            "residual_max": report.max_norm,
            "residual_relative_max": report.relative_max,
            "argmax_point": _point_list(report.argmax_point),
            "points": report.count,
        })
        checks.add("forward residual within tolerance",
                   report.max_norm < sc.tolerances["residual"], value=report.max_norm)
    out["checks"] = checks.as_dict()
    return out


def _task_selftest(sc: Scenario, state: dict) -> dict:
    suites, _ = selftest.run_selftest(sc.domain.seed, sc.domain.count)
    return {
        "sections": [s.as_dict() for s in suites],
        "checks": {"name": "selftest",
                   "total": sum(len(s.checks) for s in suites),
                   "failed": sum(s.n_failed for s in suites),
                   "checks": []},
    }


_TASK_RUNNERS = {
    "classify": _task_classify,
    "mass": _task_mass,
    "invert": _task_invert,
    "family": _task_family,
    "verify": _task_verify,
    "selftest": _task_selftest,
}

# Execution order is fixed regardless of the order tasks are listed.
_TASK_ORDER = ("classify", "mass", "invert", "family", "verify", "selftest")


def execute_scenario(sc: Scenario, command: str) -> tuple[dict, int]:
    tasks = [t for t in _TASK_ORDER if t in sc.tasks]
    state: dict = {}
    task_reports = []
    total = failed = 0
    for name in tasks:
        try:
            result = _TASK_RUNNERS[name](sc, state)
        except (NoSupportPoints, NonRealPotential, NonRealTheta, MassInconsistent) as exc:
            result = {"error": type(exc).__name__,
                      "checks": {"name": name, "total": 1, "failed": 1,
                                 "checks": [{"name": f"{name} completed", "passed": False,
                                             "detail": str(exc)}]}}
        result_checks = result["checks"]
        total += result_checks["total"]
        failed += result_checks["failed"]
        task_reports.append({"task": name, **result})
    report = {
        "tool": {"name": "diracinv", "version": __version__},
        "command": command,
        "seed": sc.domain.seed,
        "samples": sc.domain.count,
        "scenario": sc.raw,
        "tasks": task_reports,
        "summary": {"checks": total, "failed": failed,
                    "status": "pass" if failed == 0 else "fail"},
    }
    return report, 0 if failed == 0 else 1


def run_scenario(path: str, seed: int | None = None, samples: int | None = None,
                 tol: float | None = None) -> tuple[dict, int]:
    """Load, validate and execute a scenario file; returns (report, exit code)."""
    sc = load_scenario(path, seed=seed, samples=samples, tol=tol)
    return execute_scenario(sc, command="run")


def _emit(report: dict, out_path: str | None) -> None:
    text = render_report(report)
    if out_path:
        with open(out_path, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _add_common_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # Registered on the main parser and again on every subcommand so the
    # flags are accepted on either side of the subcommand word.
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default,
                        help="override the sampling seed")
    parser.add_argument("--samples", type=int, default=default,
                        help="override the sample point count")
    parser.add_argument("--tol", type=float, default=default,
                        help="override the classification tolerance")
    parser.add_argument("--out", type=str, default=default,
                        help="write the report to a file instead of stdout")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="diracinv",
        description="Invert the coupled spinor system: classify degeneracy, recover "
                    "potentials and mass, verify against the forward residual.")
    _add_common_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    run_cmd = sub.add_parser("run", help="execute a scenario file")
    run_cmd.add_argument("scenario", type=str)
    _add_common_flags(run_cmd, suppress=True)

    demo_cmd = sub.add_parser("demo", help="run a canonical catalog scenario")
    demo_cmd.add_argument("name", type=str)
    _add_common_flags(demo_cmd, suppress=True)

    selftest_cmd = sub.add_parser("selftest", help="run every built-in invariant suite")
    _add_common_flags(selftest_cmd, suppress=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            report, code = run_scenario(args.scenario, seed=args.seed,
                                        samples=args.samples, tol=args.tol)
        elif args.command == "demo":
            data = demo_scenario(args.name)
            sc = build_scenario(data, seed=args.seed, samples=args.samples, tol=args.tol)
            report, code = execute_scenario(sc, command="demo")
        else:
            seed = 42 if args.seed is None else args.seed
            samples = 100 if args.samples is None else args.samples
            suites, passed = selftest.run_selftest(seed, samples)
            report = {
                "tool": {"name": "diracinv", "version": __version__},
                "command": "selftest",
                "seed": seed,
                "samples": samples,
                "sections": [s.as_dict() for s in suites],
                "summary": {
                    "checks": sum(len(s.checks) for s in suites),
                    "failed": sum(s.n_failed for s in suites),
                    "status": "pass" if passed else "fail",
                },
            }
            code = 0 if passed else 1
    except (ScenarioError, ParseError, EvaluationError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except DiracinvError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2
    try:
        _emit(report, args.out)
    except ValueError as exc:  # non-finite number reached the report
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
