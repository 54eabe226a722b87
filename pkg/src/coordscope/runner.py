"""End-to-end pipeline: search, classify, plan, and write artifacts."""

import csv
import hashlib
import io
import json
import logging
import time
from pathlib import Path

import numpy as np

from coordscope import __version__
from coordscope.classifier import classify, enumerate_sets, nesting_violations
from coordscope.planner import build_instance, solve
from coordscope.problems import positions
from coordscope.search import search_with_stats

log = logging.getLogger(__name__)

# probabilities within this of the maximum count as tied for the top interval
ARGMAX_TIE = 1e-12


class StageError(Exception):
    """A module error annotated with the pipeline stage that raised it."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def config_digest(echo):
    canonical = json.dumps(echo, sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _floats(a):
    return [float(x) for x in np.asarray(a, dtype=float).ravel()]


def top_sets(instance, result):
    """Family members whose probability ties the maximum, in family order."""
    pmax = float(result.p.max())
    return [S for S, p in zip(instance.family, result.p) if p >= pmax - ARGMAX_TIE]


def run_pipeline(cfg):
    """Search, classify and plan; returns the in-memory pieces and timings."""
    timings = {}
    t0 = time.perf_counter()
    problem = cfg.build_problem()
    try:
        points, stats = search_with_stats(problem, cfg.search)
    except Exception as e:
        raise StageError("search", e) from e
    t1 = time.perf_counter()
    timings["search"] = t1 - t0
    try:
        family = enumerate_sets(cfg.horizon, cfg.family_mode, cfg.include_empty)
        atlas = classify(points, problem, family)
    except Exception as e:
        raise StageError("classify", e) from e
    t2 = time.perf_counter()
    timings["classify"] = t2 - t1
    try:
        instance = build_instance(atlas, cfg.c_rule, cfg.q_rule)
        result = solve(instance)
    except Exception as e:
        raise StageError("plan", e) from e
    timings["plan"] = time.perf_counter() - t2
    timings["total"] = time.perf_counter() - t0
    return problem, points, stats, atlas, instance, result, timings


def _solution_ids(points):
    return {id(p): i for i, p in enumerate(points)}


def build_report(cfg, problem, points, stats, atlas, instance, result, timings):
    ids = _solution_ids(points)
    echo = cfg.echo()
    solutions = []
    for rec in atlas.records:
        sp = rec.stationary
        solutions.append({
            "id": ids[id(sp)],
            "cost": float(sp.cost),
            "residual": float(sp.residual),
            "iterations": int(sp.iterations),
            "restart": int(sp.restart),
            "point": _floats(sp.point),
            "pd_x": rec.pd_x,
            "pd_y": rec.pd_y,
            "min_eig": rec.min_eig,
            "coordinated": [S.label() for S in rec.coordinated],
            "maximal": [S.label() for S in rec.maximal],
        })
    discarded = [
        {
            "id": ids[id(sp)],
            "cost": float(sp.cost),
            "residual": float(sp.residual),
            "point": _floats(sp.point),
            "pd_x": pd_x,
            "pd_y": pd_y,
        }
        for sp, pd_x, pd_y in atlas.discarded
    ]
    record_ids = [ids[id(r.stationary)] for r in atlas.records]
    sets = [
        {
            **S.as_dict(),
            "label": S.label(),
            "members": [record_ids[r] for r in members],
            "fbar": fbar,
        }
        for S, members, fbar in zip(atlas.family, atlas.members, atlas.fbar)
    ]
    top = top_sets(instance, result)
    return {
        "tool": {"name": "coordscope", "version": __version__},
        "config": echo,
        "config_digest": config_digest(echo),
        "problem": {
            "name": problem.name,
            "params": {k: float(v) for k, v in sorted(problem.params.items()) if k != "T"},
            "dims": {"T": problem.dims.T, "dx": problem.dims.dx, "dy": problem.dims.dy, "n": problem.dims.n},
        },
        "search": {"stats": stats.as_dict()},
        "atlas": {
            "solutions": solutions,
            "discarded": discarded,
            "sets": sets,
            "empty_sets": [S.label() for S in atlas.empty_sets],
            "nesting_violations": len(nesting_violations(atlas)),
        },
        "coordination": {
            "family": [S.label() for S in instance.family],
            "fbar": _floats(instance.fbar),
            "c": _floats(instance.c),
            "q": _floats(instance.q),
            "warnings": list(instance.warnings),
            "p": _floats(result.p),
            "objective": result.objective,
            "nu": result.nu,
            "kkt_residual": result.kkt_residual,
            "bisection_iterations": result.iterations,
            "top_sets": [S.label() for S in top],
        },
        "timings": {k: float(v) for k, v in timings.items()},
    }


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def solutions_csv(problem, points, atlas):
    by_id = {id(r.stationary): r for r in atlas.records}
    flags = {id(sp): (pd_x, pd_y) for sp, pd_x, pd_y in atlas.discarded}
    header = ["id", "status", "cost", "residual", "pd_x", "pd_y", "maximal_sets"]
    header += [f"z{i}" for i in range(problem.dims.n)]
    rows = []
    for i, sp in enumerate(points):
        rec = by_id.get(id(sp))
        if rec is not None:
            status, pd_x, pd_y = "classified", rec.pd_x, rec.pd_y
            maximal = ";".join(S.label() for S in rec.maximal)
        else:
            status, (pd_x, pd_y) = "discarded", flags[id(sp)]
            maximal = ""
        rows.append([i, status, sp.cost, sp.residual, pd_x, pd_y, maximal, *_floats(sp.point)])
    return _csv_text(header, rows)


def trajectories_csv(problem, points):
    T = problem.dims.T
    rows = []
    for i, sp in enumerate(points):
        for agent, controls in ((1, sp.point[:T]), (2, sp.point[T:])):
            for t, z in enumerate(positions(controls), start=1):
                rows.append([i, agent, t, float(z)])
    return _csv_text(["solution_id", "agent", "t", "position"], rows)


def heatmap_csv(atlas, instance, result):
    p_of = {S: float(p) for S, p in zip(instance.family, result.p)}
    rows = [[S.start, S.end, p_of.get(S, 0.0)] for S in atlas.family if S.kind == "interval"]
    return _csv_text(["start", "end", "p"], rows)


def write_artifacts(out_dir, report, files):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    (out / "report.json").write_text(text, encoding="utf-8", newline="\n")
    for name, body in files.items():
        (out / name).write_text(body, encoding="utf-8", newline="\n")


def run(cfg, write=True):
    """Run the full pipeline for ``cfg`` and (optionally) write its artifacts."""
    problem, points, stats, atlas, instance, result, timings = run_pipeline(cfg)
    report = build_report(cfg, problem, points, stats, atlas, instance, result, timings)
    files = {"solutions.csv": solutions_csv(problem, points, atlas)}
    if problem.name == "dynamic_separation":
        files["trajectories.csv"] = trajectories_csv(problem, points)
    if cfg.family_mode == "contiguous":
        files["heatmap.csv"] = heatmap_csv(atlas, instance, result)
    if write:
        write_artifacts(cfg.output_dir, report, files)
        log.info("wrote %s", cfg.output_dir)
    return report, files
