"""Bundled reproduction cases and the structural assertions each one carries.

Hard checks fail the command. Soft checks concern behavior that depends on
parameters never published for the dynamic cases; a soft miss is reported as
a deviation instead of failing.
"""

from dataclasses import dataclass

import numpy as np

from coordscope.config import bundled_config
from coordscope.runner import run, write_artifacts

SEPARATION_COST = 0.886
SEPARATION_COST_TOL = 1e-3
ORIGIN_COST_TOL = 1e-9


@dataclass
class Check:
    name: str
    passed: bool
    hard: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "hard": self.hard, "detail": self.detail}


def separation_root(tau=0.5, gamma=1.0, rho=1.5, tol=1e-14):
    """Positive root c of dl/dx along y = -x for the static problem, by bisection.

    Returns None when the origin is the only stationary point on that line.
    """

    def h(c):
        return 2.0 * tau * c - 4.0 * gamma * c / rho**2 * np.exp(-4.0 * c * c / rho**2)

    lo, hi = 1e-12, 1.0
    if h(lo) >= 0:
        return None
    while h(hi) <= 0:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _classes(report):
    return {tuple(s["coordinated"]) for s in report["atlas"]["solutions"]}


def _common_checks(report):
    atlas = report["atlas"]
    p = np.array(report["coordination"]["p"])
    return [
        Check("nesting_monotone", atlas["nesting_violations"] == 0, True,
              f"{atlas['nesting_violations']} violation(s)"),
        Check("p_on_simplex", abs(p.sum() - 1.0) <= 1e-10 and p.min() >= -1e-14, True,
              f"sum(p) - 1 = {p.sum() - 1.0:.3e}"),
        Check("kkt_certificate", report["coordination"]["kkt_residual"] <= 1e-8, True,
              f"residual {report['coordination']['kkt_residual']:.3e}"),
    ]


def checks_fig1(report, cfg):
    params = cfg.params
    c_star = separation_root(params.get("tau", 0.5), params.get("gamma", 1.0), params.get("rho", 1.5))
    sols = report["atlas"]["solutions"]
    found = len(sols) + len(report["atlas"]["discarded"])
    out = [Check("three_solutions", found == 3 and len(sols) == 3, True, f"{found} found, {len(sols)} classified")]
    pair = [s for s in sols if abs(s["cost"] - SEPARATION_COST) <= SEPARATION_COST_TOL]
    origin = [s for s in sols if np.max(np.abs(s["point"])) <= 1e-8]
    locs = sorted(tuple(np.sign(s["point"]).tolist()) for s in pair)
    at_root = c_star is not None and all(
        np.max(np.abs(np.abs(s["point"]) - c_star)) <= 1e-6 for s in pair
    )
    out.append(Check("coordinated_pair", len(pair) == 2 and locs == [(-1.0, 1.0), (1.0, -1.0)] and at_root, True,
                     f"costs {[s['cost'] for s in pair]}, c* = {c_star}"))
    out.append(Check("origin_cost", len(origin) == 1 and abs(origin[0]["cost"] - 1.0) <= ORIGIN_COST_TOL, True,
                     f"origin costs {[s['cost'] for s in origin]}"))
    out.append(Check("pair_coordinated_on_full_set", all(s["coordinated"] == ["[1,1]"] for s in pair) and len(pair) == 2, True))
    out.append(Check("origin_uncoordinated_only", len(origin) == 1 and origin[0]["coordinated"] == []
                     and origin[0]["pd_x"] and origin[0]["pd_y"], True))
    return out


def checks_remark_q(report, cfg):
    sols = report["atlas"]["solutions"]
    out = [Check("single_solution", len(sols) == 1, True, f"{len(sols)} classified")]
    if len(sols) != 1:
        return out
    s = sols[0]
    pairs = {"{1,2}", "{1,3}", "{2,3}"}
    small = {"{1}", "{2}", "{3}"} | pairs
    out.append(Check("coordinated_up_to_pairs", set(s["coordinated"]) == small, True, f"coordinated {s['coordinated']}"))
    out.append(Check("not_coordinated_on_all_three", "{1,2,3}" not in s["coordinated"], True))
    out.append(Check("maximal_are_pairs", set(s["maximal"]) == pairs and len(s["maximal"]) == 3, True,
                     f"maximal {s['maximal']}"))
    return out


def _interval_probs(report):
    fam = report["coordination"]["family"]
    probs = {}
    for label, p in zip(fam, report["coordination"]["p"]):
        a, b = label.strip("[]").split(",")
        probs[(int(a), int(b))] = p
    return probs


def checks_t6(report, cfg):
    classes = _classes(report)
    out = [Check("distinct_coordination_classes", len(classes) >= 2, True, f"{len(classes)} class(es)")]
    top = report["coordination"]["top_sets"]
    probs = _interval_probs(report)
    a, b = (int(x) for x in top[0].strip("[]").split(","))
    out.append(Check("top_interval_contains_4_5", a <= 4 and b >= 5, False, f"top interval(s) {top}"))
    worst = 0.0
    containing = [S for S in probs if S[0] <= 4 and S[1] >= 5]
    for S in containing:
        for S2 in containing:
            if S2 != S and S2[0] <= S[0] and S[1] <= S2[1]:
                worst = max(worst, probs[S2] - probs[S])
    out.append(Check("p_non_increasing_over_nested_intervals", worst <= 1e-12, False,
                     f"largest increase {worst:.3e}"))
    return out


def checks_t10(report, cfg):
    classes = _classes(report)
    top = report["coordination"]["top_sets"]
    return [
        Check("distinct_coordination_classes", len(classes) >= 2, True, f"{len(classes)} class(es)"),
        Check("top_interval_is_3_8", top == ["[3,8]"], False, f"top interval(s) {top}"),
    ]


CASE_CHECKS = {"fig1": checks_fig1, "remark_q": checks_remark_q, "t6": checks_t6, "t10": checks_t10}


def reproduce(case, out_dir=None, write=True):
    """Run a bundled case, evaluate its checks and embed them in the report."""
    cfg = bundled_config(case)
    if out_dir is not None:
        cfg = cfg.with_overrides(output_dir=out_dir)
    report, files = run(cfg, write=False)
    checks = CASE_CHECKS[case](report, cfg) + _common_checks(report)
    report["reproduction"] = {
        "case": case,
        "checks": [c.as_dict() for c in checks],
        "hard_failures": [c.name for c in checks if c.hard and not c.passed],
        "deviations": [f"{c.name}: {c.detail}" for c in checks if not c.hard and not c.passed],
    }
    if write:
        write_artifacts(cfg.output_dir, report, files)
    return report, files, cfg
