"""Self-contained JSON reports and the level-set CSV for each command."""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import asdict

import numpy as np

from .analysis import CurveAnalysis, analyze_curve
from .cone.experiments import perturbation_experiment
from .cone.frame import BlowUpFrame, build_frame
from .cone.gate import GateReport, gate
from .cone.solve import (
    RemainderSolution,
    continue_in_epsilon,
    default_grid,
    linearization_residual,
    psi_c,
)
from .jordan import leading_filtration, verify_decomposition
from .polynomial import ord_of_map
from .problem import Problem
from .scalars import format_array, format_scalar, parse_scalar, to_float_array
from .topology import (
    classical_newton_check,
    degree_caveats,
    half_cone_degree,
    milnor_number,
    transversal_determinant,
)

SCHEMA_TAG = "jordancone.report/1"


def _json_safe(x):
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, np.ndarray):
        return format_array(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (int, str)) or x is None:
        return x
    return format_scalar(x)


def dumps(report: dict) -> str:
    """Deterministic JSON text (sorted keys, shortest round-trip floats)."""
    return json.dumps(_json_safe(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def echo_input(problem: Problem) -> dict:
    """The problem as given, with the effective options folded in."""
    data = json.loads(json.dumps(problem.raw))
    opts = asdict(problem.options)
    grid = opts.pop("grid")
    opts["eps_grid"] = grid
    data["options"] = {k: v for k, v in opts.items() if v is not None and v != {}}
    return data


def base_report(command: str, problem: Problem | None) -> dict:
    out = {"schema": SCHEMA_TAG, "command": command, "status": "ok"}
    if problem is not None:
        out["input"] = echo_input(problem)
        out["mode"] = "exact" if problem.exact else "float"
    return out


# --- sections -------------------------------------------------------------------

def analysis_section(problem: Problem) -> tuple[dict, CurveAnalysis]:
    o = problem.options
    a = analyze_curve(problem.G, problem.z, o.max_k, None, o.tau_rank)
    sec = {"T": a.T, "L": a.L.coeffs, "q": a.q, "k": a.k}
    if a.k is None:
        f = a.failure
        sec["not_k_surjective"] = {
            "reason": f.reason,
            "max_k": f.max_k,
            "generic_rank": f.generic_rank,
            "filtration_dims": f.filtration.dims,
        }
        return sec, a
    filt = leading_filtration(a.L, a.k, o.tau_rank)
    sec["filtration_dims"] = filt.dims
    if not problem.exact:
        sec["rank_gaps"] = [ri.gap for ri in filt.rank_info]
    d = a.d
    sec["decomposition"] = {
        "complement_dims": d.dims,
        "kernel_dim": int(d.N.shape[1]),
        "complements": list(d.Nc),
        "kernel": d.N,
        "ranges": list(d.R),
        "S": list(d.S),
        "phi": list(d.phi),
        "problems": verify_decomposition(a.L, d),
    }
    return sec, a


def gate_section(rep: GateReport, frame: BlowUpFrame) -> dict:
    verdicts = {}
    for name, v in rep.verdicts.items():
        verdicts[name] = {
            "passed": v.passed,
            "conditions": [{"label": lab, "ok": ok, "detail": det} for lab, ok, det in v.conditions],
        }
    return {
        "shift": rep.shift,
        "Q": frame.Q,
        "q": rep.q,
        "bbar0": None if rep.bbar is None else rep.bbar.coeffs[0],
        "eta": rep.eta,
        "route": rep.route,
        "no_zero_in_cone": rep.no_zero_in_cone,
        "smallness": rep.smallness,
        "verdicts": verdicts,
    }


def solution_section(sol: RemainderSolution, frame: BlowUpFrame) -> dict:
    seed = frame.z.padded(sol.refined.T).coeffs if sol.refined is not None else None
    agree = None
    if sol.refined is not None:
        lim = frame.k - frame.shift
        ref = sol.refined.coeffs
        sd = to_float_array(seed)
        agree = bool(all(np.array_equal(ref[j], sd[j]) for j in range(min(lim, len(ref)))))
    return {
        "route": sol.route,
        "shift": sol.shift,
        "Q": sol.Q,
        "newton_tol": sol.newton_tol,
        "residual_constant": sol.residual_constant,
        "c_at_zero": sol.c_at_zero,
        "samples": [
            {"eps": s.eps, "c": s.c, "s": s.s, "newton_residual": s.residual,
             "point": s.point, "g_norm": s.g_norm, "bound": s.bound}
            for s in sol.samples
        ],
        "max_bound_ratio": sol.max_bound_ratio(),
        "refined_curve": None if sol.refined is None else sol.refined.coeffs,
        "seed_agreement_below_order": frame.k - frame.shift,
        "seed_agreement": agree,
    }


def _kernel_point(problem: Problem, frame: BlowUpFrame) -> np.ndarray:
    kp = problem.options.kernel_point
    return np.zeros(frame.ns) if kp is None else np.asarray(kp, dtype=float)


def _frame(problem: Problem, a: CurveAnalysis) -> BlowUpFrame:
    return build_frame(problem.G, problem.z, a.d, problem.options.shift)


def _grid(problem: Problem) -> np.ndarray:
    g = problem.options.grid
    return default_grid(g.min, g.max, g.points)


# --- commands ---------------------------------------------------------------------

def analyze_report(problem: Problem) -> dict:
    out = base_report("analyze", problem)
    sec, a = analysis_section(problem)
    out["analysis"] = sec
    if a.k is None:
        out["status"] = "not_k_surjective"
    return out


def _gated(command: str, problem: Problem):
    out = base_report(command, problem)
    sec, a = analysis_section(problem)
    out["analysis"] = sec
    if a.k is None:
        out["status"] = "not_k_surjective"
        return out, None, None
    frame = _frame(problem, a)
    rep = gate(frame, problem.options.eta)
    out["gate"] = gate_section(rep, frame)
    return out, frame, rep


def gate_report(problem: Problem) -> dict:
    return _gated("gate", problem)[0]


def solve_report(problem: Problem) -> dict:
    out, frame, rep = _gated("solve", problem)
    if frame is None:
        return out
    if rep.route is None:
        out["status"] = "no_route"
        return out
    sol = continue_in_epsilon(frame, rep, _kernel_point(problem, frame), _grid(problem),
                              problem.options.newton_tol)
    out["solution"] = solution_section(sol, frame)
    return out


LEVELSET_LATTICE = (-0.1, 0.0, 0.1)


def levelset_rows(problem: Problem):
    """Level-set samples over the eps grid and a small kernel-coordinate lattice."""
    a = analyze_curve(problem.G, problem.z, problem.options.max_k, None, problem.options.tau_rank)
    if a.k is None:
        return a, None, []
    frame = _frame(problem, a)
    phi = np.zeros(frame.m) if problem.options.phi is None else np.asarray(problem.options.phi, dtype=float)
    rows = []
    Gf = frame.G.to_float()
    for eps in _grid(problem):
        for s in itertools.product(LEVELSET_LATTICE, repeat=frame.ns):
            s = np.array(s, dtype=float)
            c = psi_c(frame, eps, phi, s, problem.options.newton_tol)
            pt = to_float_array(frame.point(float(eps), c, s))
            gval = Gf.eval(pt)
            res = linearization_residual(frame, eps, phi, s, c)
            rows.append([float(eps), *phi, *s, *pt, *gval, res])
    return a, frame, rows


def levelset_header(problem: Problem, frame: BlowUpFrame) -> list[str]:
    return (["eps"] + [f"phi{i}" for i in range(frame.m)] + [f"nk1_{i}" for i in range(frame.ns)]
            + [f"z_{v}" for v in problem.variables] + [f"G{i}" for i in range(frame.m)] + ["residual"])


def levelset_csv(problem: Problem, frame: BlowUpFrame, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(levelset_header(problem, frame))
    for r in rows:
        w.writerow([repr(float(np.real(x))) for x in r])
    return buf.getvalue()


def levelset_report(problem: Problem, rows, a: CurveAnalysis, frame) -> dict:
    out = base_report("levelset", problem)
    if a.k is None:
        out["status"] = "not_k_surjective"
        return out
    res = [r[-1] for r in rows]
    bounds = [10 * abs(r[0]) ** frame.Q * problem.options.newton_tol for r in rows]
    out["levelset"] = {
        "rows": len(rows),
        "Q": frame.Q,
        "max_residual": max(res, default=0.0),
        "within_bound": bool(all(r <= b for r, b in zip(res, bounds))),
    }
    return out


def degree_report(problem: Problem) -> dict:
    out = base_report("degree", problem)
    td = transversal_determinant(problem.G, problem.z, problem.transversal())
    sec = {"chi": td.chi, "r0": td.r0, "r": td.r.coeffs, "transversal": td.basis}
    if problem.field == "real":
        pos, neg = half_cone_degree(td)
        sec["signs"] = {"positive": pos, "negative": neg}
    else:
        sec["signs"] = None
        sec["signs_note"] = "degree signs are defined over the reals only"
    chk = classical_newton_check(problem.G, problem.z, td)
    sec["classical_newton"] = {"verdict": chk.verdict, "q": chk.q, "bound": chk.bound, "notes": chk.notes}
    a = analyze_curve(problem.G, problem.z, problem.options.max_k, None, problem.options.tau_rank)
    if a.k is not None:
        sec["k"] = a.k
        sec["chi_at_least_k"] = td.chi >= a.k
        sec["caveats"] = degree_caveats(int(a.d.N.shape[1]), a.q, a.k)
    out["degree"] = sec
    return out


def milnor_report(problem: Problem | None, k_values, ord_G: int | None) -> dict:
    out = base_report("milnor", problem)
    if ord_G is None:
        if problem is None:
            raise ValueError("milnor needs --ord or a problem file")
        ord_G = ord_of_map(problem.G)
    if k_values is None:
        if problem is None or problem.options.milnor_k_values is None:
            raise ValueError("milnor needs k values (--ks or options.milnor_k_values)")
        k_values = problem.options.milnor_k_values
    out["milnor"] = {"k_values": list(k_values), "ord": ord_G, "mu": milnor_number(k_values, ord_G)}
    return out


def perturb_report(problem: Problem) -> dict:
    out = base_report("perturb", problem)
    settings = dict(problem.options.perturbation)
    kind = settings.get("kind", "map")
    alpha = settings.get("alpha", "1/1000")
    count = settings.get("count", 20)
    rng = np.random.default_rng(settings.get("seed", 0))
    alpha = parse_scalar(alpha, None)
    results = []
    for _ in range(count):
        r = perturbation_experiment(problem.G, problem.z, kind, alpha, settings.get("order"), rng,
                                    problem.options.eta)
        results.append({
            "order": r.order, "k_before": r.k_before, "k_after": r.k_after,
            "checks": [{"label": lab, "ok": ok} for lab, ok in r.checks],
            "gate_before": None if r.gate_before is None else r.gate_before.route,
            "gate_after": None if r.gate_after is None else r.gate_after.route,
        })
    out["perturbation"] = {"kind": kind, "alpha": alpha, "results": results,
                           "all_ok": all(c["ok"] for r in results for c in r["checks"])}
    if not out["perturbation"]["all_ok"]:
        out["status"] = "contract_violated"
    return out


def verify_report(stored: dict, load) -> dict:
    """Re-derive ``k``, ``q`` and the gate verdicts from a stored report's input echo."""
    problem = load(stored["input"])
    out = base_report("verify", problem)
    mism = []
    sec, a = analysis_section(problem)
    old = stored.get("analysis")
    if old is not None:
        for key in ("k", "q", "filtration_dims"):
            if key in old and old[key] != sec.get(key):
                mism.append({"field": f"analysis.{key}", "stored": old[key], "recomputed": sec.get(key)})
        od = old.get("decomposition")
        if od is not None and sec.get("decomposition") is not None:
            for key in ("complement_dims", "kernel_dim"):
                if od[key] != sec["decomposition"][key]:
                    mism.append({"field": f"decomposition.{key}", "stored": od[key],
                                 "recomputed": sec["decomposition"][key]})
        if sec.get("decomposition") and sec["decomposition"]["problems"]:
            mism.append({"field": "decomposition.problems", "stored": [],
                         "recomputed": sec["decomposition"]["problems"]})
    og = stored.get("gate")
    if og is not None and a.k is not None:
        frame = _frame(problem, a)
        rep = gate(frame, problem.options.eta)
        if og.get("route") != rep.route:
            mism.append({"field": "gate.route", "stored": og.get("route"), "recomputed": rep.route})
        for name, v in rep.verdicts.items():
            sv = og.get("verdicts", {}).get(name)
            if sv is None or sv["passed"] != v.passed:
                mism.append({"field": f"gate.{name}", "stored": None if sv is None else sv["passed"],
                             "recomputed": v.passed})
    ol = stored.get("solution")
    if ol is not None:
        bad = [s["eps"] for s in ol["samples"] if s["g_norm"] > s["bound"]]
        if bad:
            mism.append({"field": "solution.samples", "stored": "within bound", "recomputed": bad})
    out["verify"] = {"checked": stored.get("command"), "mismatches": mism, "ok": not mism}
    if mism:
        out["status"] = "mismatch"
    return out
