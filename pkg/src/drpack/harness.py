"""Experiment harness: penalty construction, bound verification, and the
reproduction of the benchmark table for the random quadratic family.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import offline_fw
from .engine import EngineConfig, OnlineInstance, RunTrace, run_online
from .generators import GeneratorSpec, generate
from .objectives import estimate_alpha, estimate_smoothness
from .penalties import BoundReport, PenaltyModel, ZeroPenalty, compute_UL, theoretical_cr

DEFAULT_SLACK_MARGIN = 0.05

VERIFY_FAMILY_DIMS = {
    "adwords": (4, 20),
    "online_lp": (3, 15),
    "knapsack_single": (1, 25),
    "quadratic_sec5": (1, 24),
    "welfare_simplex": (3, 8),
    "gap": (3, 8),
}


def _regime_for(n: int) -> str:
    return "single_constraint" if n == 1 else "multi_constraint"


def auto_penalties(instance: OnlineInstance, epsilon: float = 0.0) -> list:
    """One penalty per row with U/L taken from the instance data.

    Rows whose cost row is identically zero carry no budget and get a no-op
    penalty (they are excluded from bound checks).
    """
    regime = _regime_for(instance.n)
    boxes = instance.row_boxes()
    pens = []
    for i in range(instance.n):
        chat = instance.C[i]
        if not np.any(chat > 0):
            pens.append(ZeroPenalty())
            continue
        U, L = compute_UL(instance.objectives[i], chat, boxes[i])
        pens.append(PenaltyModel(regime, U, L, epsilon))
    return pens


def data_driven_penalties(instance: OnlineInstance, epsilon: float = 0.0,
                          cfg: EngineConfig | None = None) -> list:
    """Tighten U/L to the value-to-weight ratios realized along a probe run.

    A first pass runs with the conservative bounds; the ratios actually seen
    on that trajectory then replace U and L (they can only shrink the gap).
    """
    pens = auto_penalties(instance, epsilon)
    cfg = cfg or EngineConfig()
    probe = run_online(instance, pens, cfg)
    tightened = []
    for i, p in enumerate(pens):
        if isinstance(p, ZeroPenalty):
            tightened.append(p)
            continue
        hi, lo = probe.ratio_max[i], probe.ratio_min[i]
        if not np.isfinite(hi) or not np.isfinite(lo) or lo <= 0:
            tightened.append(p)
            continue
        tightened.append(PenaltyModel(p.regime, float(hi), float(lo) * (1 - 1e-9), epsilon))
    return tightened


def finite_k_slack(instance: OnlineInstance, K: int) -> float:
    """Report-only slack L m lambda^2 / K by which bounds loosen at finite K."""
    boxes = instance.row_boxes()
    L_smooth = max(
        estimate_smoothness(obj, boxes[i]) for i, obj in enumerate(instance.objectives)
    )
    lam = instance.max_radius()
    return L_smooth * instance.m * lam**2 / K


def bound_report(instance: OnlineInstance, penalties, trace: RunTrace,
                 *, K_off: int | None = None, alpha_refinements: int = 12,
                 fw_value: float | None = None) -> BoundReport:
    """Assemble the full bound report for a finished run.

    Theoretical side uses the run's penalty parameters and estimated curvature
    per row; empirical side divides the online value by the offline
    Frank-Wolfe value at K_off (defaults to the run's K).
    """
    costed = [i for i, p in enumerate(penalties) if not isinstance(p, ZeroPenalty)]
    if not costed:
        raise ValueError("no budget rows; bound undefined")
    boxes = instance.row_boxes()
    alphas = np.array([
        estimate_alpha(
            instance.objectives[i], instance.C[i], boxes[i],
            refinements=alpha_refinements,
        ).alpha
        for i in costed
    ])
    Us = np.array([penalties[i].U for i in costed])
    Ls = np.array([penalties[i].L for i in costed])
    eps = max(p.epsilon for p in penalties)
    regime = _regime_for(instance.n)
    report = theoretical_cr(regime, alphas, Us, Ls, eps)
    if fw_value is None:
        _, fw_value = offline_fw(instance, K_off or trace.config.K)
    empirical = trace.alg / fw_value if fw_value > 1e-12 else None
    return replace(
        report,
        finite_k_slack=finite_k_slack(instance, trace.config.K),
        empirical_cr=empirical,
    )


def verify_bounds(family: str, trials: int = 10, K: int = 1000, seed: int = 0,
                  *, slack_margin: float = DEFAULT_SLACK_MARGIN, n: int | None = None,
                  m: int | None = None, params: dict | None = None) -> dict:
    """Check empirical CR >= theoretical CR * (1 - slack_margin) per instance.

    Families without budget rows are flagged and skipped rather than checked.
    Returns {"family", "checks": [...], "ok"} with one record per instance.
    """
    dn, dm = VERIFY_FAMILY_DIMS[family]
    n = n or dn
    m = m or dm
    checks = []
    for trial in range(trials):
        spec = GeneratorSpec(family, n, m, seed + trial, params or {})
        instance = generate(spec)
        if not np.any(instance.C > 0):
            checks.append({"seed": spec.seed, "skipped": "no budget rows"})
            continue
        penalties = auto_penalties(instance)
        trace = run_online(instance, penalties, EngineConfig(K=K))
        report = bound_report(instance, penalties, trace, K_off=K)
        passed = (
            report.empirical_cr is not None
            and report.empirical_cr >= report.theoretical_cr * (1.0 - slack_margin)
        )
        checks.append({
            "seed": spec.seed,
            "alg": trace.alg,
            "empirical_cr": report.empirical_cr,
            "theoretical_cr": report.theoretical_cr,
            "finite_k_slack": report.finite_k_slack,
            "max_load": float(np.max(trace.loads)),
            "passed": bool(passed),
        })
    ok = all(c.get("passed", True) for c in checks)
    return {"family": family, "n": n, "m": m, "K": K,
            "slack_margin": slack_margin, "checks": checks, "ok": ok}


@dataclass
class SeedRecord:
    seed: int
    alg: float
    opt_fw: float
    competitive_ratio: float
    budget_usage: np.ndarray
    bound: BoundReport
    wall_time: float


@dataclass
class ExperimentResult:
    n: int
    m: int
    K: int
    records: list = field(default_factory=list)

    @property
    def mean_cr(self) -> float:
        return float(np.mean([r.competitive_ratio for r in self.records]))

    @property
    def std_cr(self) -> float:
        return float(np.std([r.competitive_ratio for r in self.records]))

    @property
    def mean_usage(self) -> np.ndarray:
        return np.mean([r.budget_usage for r in self.records], axis=0)

    @property
    def std_usage(self) -> np.ndarray:
        return np.std([r.budget_usage for r in self.records], axis=0)

    def rows(self) -> list:
        """Per-seed rows plus mean/std summary rows, ready for CSV."""
        out = []
        for r in self.records:
            out.append([r.seed, r.alg, r.opt_fw, r.competitive_ratio,
                        *r.budget_usage.tolist(), r.bound.theoretical_cr, r.wall_time])
        out.append(["mean", "", "", self.mean_cr, *self.mean_usage.tolist(), "", ""])
        out.append(["std", "", "", self.std_cr, *self.std_usage.tolist(), "", ""])
        return out

    def header(self) -> list:
        usage = [f"budget_usage_{i + 1}" for i in range(self.n)]
        return ["seed", "alg", "opt_fw", "competitive_ratio", *usage,
                "theoretical_cr", "wall_time_s"]


def reproduce_table1(n: int, seeds: int = 10, K: int = 50, m: int = 100,
                     base_seed: int = 0, penalty_policy: str = "auto",
                     alpha_refinements: int = 2) -> ExperimentResult:
    """Run the random-quadratic benchmark and aggregate CR and budget usage.

    One seeded instance per repetition: generate, build penalties (auto =
    bounds from the instance data; data = tightened to a probe trajectory),
    run online with K inner steps, and divide by the offline Frank-Wolfe value
    at the same K.
    """
    result = ExperimentResult(n=n, m=m, K=K)
    for j in range(seeds):
        t0 = time.perf_counter()
        spec = GeneratorSpec("quadratic_sec5", n, m, base_seed + j)
        instance = generate(spec)
        if penalty_policy == "auto":
            penalties = auto_penalties(instance)
        elif penalty_policy == "data":
            penalties = data_driven_penalties(instance, cfg=EngineConfig(K=K))
        else:
            raise ValueError(f"unknown penalty policy {penalty_policy!r}")
        trace = run_online(instance, penalties, EngineConfig(K=K))
        X_off, fw_value = offline_fw(instance, K)
        report = bound_report(instance, penalties, trace, K_off=K,
                              alpha_refinements=alpha_refinements,
                              fw_value=fw_value)
        result.records.append(SeedRecord(
            seed=spec.seed,
            alg=trace.alg,
            opt_fw=fw_value,
            competitive_ratio=trace.alg / fw_value,
            budget_usage=trace.loads.copy(),
            bound=report,
            wall_time=time.perf_counter() - t0,
        ))
    return result
