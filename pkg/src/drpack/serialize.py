"""JSON persistence for instances, penalties, traces, and reports.

Instance schema (dense row-major arrays; set-function tables keyed by subset
bitmask as decimal strings):

    {"n": 2, "m": 3,
     "C": [[...], [...]],
     "sets": [{"kind": "scaled_box", "bounds": [...], "radius": r} |
              {"kind": "scaled_simplex", "scale": s, "radius": r}, ...],
     "objectives": [{"kind": "quadratic", "H": [[...]], "h": [...], "c0": 0.0} |
                    {"kind": "linear", "d": [...]} |
                    {"kind": "multilinear", "v": 3, "values": {"0": 0.0, ...}}]}

Trace schema: allocations, loads, alg, p_gseq, dual {Y, z}, realized ratio
extremes, the engine config echo, and the penalty parameters used. Floats are
serialized with full round-trip precision, so load(save(x)) is lossless.
"""

import csv
import json

import numpy as np

from .engine import DualPoint, EngineConfig, OnlineInstance, RunTrace
from .feasible import Box, Simplex
from .objectives import LinearObjective, MultilinearObjective, QuadraticObjective, SetFunctionTable
from .penalties import PenaltyModel, ZeroPenalty


def set_to_json(s) -> dict:
    if isinstance(s, Box):
        return {"kind": s.kind, "bounds": s.bounds.tolist(), "radius": s.radius}
    return {"kind": s.kind, "n": s.n, "scale": s.scale, "radius": s.radius}


def set_from_json(d):
    if d["kind"] == "scaled_box":
        return Box(d["bounds"], d.get("radius"))
    if d["kind"] == "scaled_simplex":
        return Simplex(d["n"], d["scale"], d.get("radius"))
    raise ValueError(f"unknown feasible-set kind {d['kind']!r}")


def objective_to_json(obj) -> dict:
    if obj.kind == "quadratic":
        return {"kind": "quadratic", "H": obj.H.tolist(), "h": obj.h.tolist(),
                "c0": obj.c0}
    if obj.kind == "linear":
        return {"kind": "linear", "d": obj.d.tolist()}
    if obj.kind == "multilinear":
        values = {str(mask): float(v) for mask, v in enumerate(obj.table.values)}
        return {"kind": "multilinear", "v": obj.table.v, "values": values}
    raise ValueError(f"unknown objective kind {obj.kind!r}")


def objective_from_json(d):
    if d["kind"] == "quadratic":
        return QuadraticObjective(d["H"], d["h"], d.get("c0", 0.0))
    if d["kind"] == "linear":
        return LinearObjective(d["d"])
    if d["kind"] == "multilinear":
        values = np.zeros(2 ** d["v"])
        for mask, v in d["values"].items():
            values[int(mask)] = v
        return MultilinearObjective(SetFunctionTable(values))
    raise ValueError(f"unknown objective kind {d['kind']!r}")


def instance_to_json(instance: OnlineInstance) -> dict:
    return {
        "n": instance.n,
        "m": instance.m,
        "C": instance.C.tolist(),
        "sets": [set_to_json(s) for s in instance.sets],
        "objectives": [objective_to_json(o) for o in instance.objectives],
    }


def instance_from_json(d) -> OnlineInstance:
    return OnlineInstance(
        np.asarray(d["C"], dtype=float),
        [set_from_json(s) for s in d["sets"]],
        [objective_from_json(o) for o in d["objectives"]],
    )


def penalty_to_json(p) -> dict:
    if isinstance(p, ZeroPenalty):
        return {"regime": "zero"}
    return {"regime": p.regime, "U": p.U, "L": p.L, "epsilon": p.epsilon}


def penalty_from_json(d):
    if d["regime"] == "zero":
        return ZeroPenalty()
    return PenaltyModel(d["regime"], d["U"], d["L"], d.get("epsilon", 0.0))


def trace_to_json(trace: RunTrace) -> dict:
    return {
        "allocations": trace.allocations.tolist(),
        "loads": trace.loads.tolist(),
        "alg": trace.alg,
        "p_gseq": trace.p_gseq,
        "dual": {"Y": trace.dual.Y.tolist(), "z": trace.dual.z.tolist()},
        "ratio_min": trace.ratio_min.tolist(),
        "ratio_max": trace.ratio_max.tolist(),
        "config": {
            "K": trace.config.K,
            "overshoot_policy": trace.config.overshoot_policy,
            "budget_tol": trace.config.budget_tol,
        },
        "penalties": [penalty_to_json(p) for p in trace.penalties],
    }


def trace_from_json(d) -> RunTrace:
    cfg = EngineConfig(
        K=d["config"]["K"],
        overshoot_policy=d["config"]["overshoot_policy"],
        budget_tol=d["config"]["budget_tol"],
    )
    return RunTrace(
        allocations=np.asarray(d["allocations"], dtype=float),
        loads=np.asarray(d["loads"], dtype=float),
        alg=d["alg"],
        p_gseq=d["p_gseq"],
        dual=DualPoint(np.asarray(d["dual"]["Y"], dtype=float),
                       np.asarray(d["dual"]["z"], dtype=float)),
        config=cfg,
        penalties=[penalty_from_json(p) for p in d["penalties"]],
        ratio_min=np.asarray(d["ratio_min"], dtype=float),
        ratio_max=np.asarray(d["ratio_max"], dtype=float),
    )


def bound_report_to_json(report) -> dict:
    return {
        "regime": report.regime,
        "theoretical_cr": report.theoretical_cr,
        "per_row_terms": np.asarray(report.per_row_terms).tolist(),
        "alpha_used": np.asarray(report.alpha_used).tolist(),
        "U": np.asarray(report.U).tolist(),
        "L": np.asarray(report.L).tolist(),
        "epsilon": report.epsilon,
        "finite_k_slack": report.finite_k_slack,
        "empirical_cr": report.empirical_cr,
        "notes": list(report.notes),
    }


def save_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_csv(path, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
