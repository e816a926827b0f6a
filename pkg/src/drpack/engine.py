"""Online sequential Frank-Wolfe solver with penalty-shaped directions.

Arrivals are processed one column at a time. For each arriving cost column
c_t and feasible set F_t, the solver performs K inner Frank-Wolfe micro-steps:
it forms the direction d whose i-th entry is the current prefix gradient of
objective i plus c_{i,t} times the penalty derivative at row i's budget load,
takes the exact linear maximizer of d over F_t, and moves 1/K of the way
toward it. The committed column is emitted before the next arrival is read,
so the solver never peeks at future costs, sets, or gradient coordinates.

With the default overshoot policy the micro-step that would cross a budget
boundary is scaled back to land exactly on it, which keeps every row load at
or below its cap for any finite K.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .objectives import prefix_grad_coord

OVERSHOOT_POLICIES = ("cap_final_microstep", "allow_raw")


def row_loads(C, X) -> np.ndarray:
    """Budget loads c_i . x_i per row; the one canonical way loads are computed."""
    return (np.asarray(C, dtype=float) * np.asarray(X, dtype=float)).sum(axis=1)


@dataclass
class OnlineInstance:
    """Cost matrix, per-step feasible sets, and per-row objectives."""

    C: np.ndarray
    sets: list
    objectives: list

    def __post_init__(self):
        self.C = np.asarray(self.C, dtype=float)
        if self.C.ndim != 2:
            raise ValueError("C must be an n x m matrix")
        n, m = self.C.shape
        if len(self.sets) != m:
            raise ValueError("need one feasible set per step")
        if len(self.objectives) != n:
            raise ValueError("need one objective per row")
        if np.any(self.C < 0):
            raise ValueError("costs must be non-negative")
        for s in self.sets:
            if s.n != n:
                raise ValueError("feasible set dimension must equal the row count")
        for obj in self.objectives:
            if obj.m != m:
                raise ValueError("objective dimension must equal the step count")

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def m(self) -> int:
        return self.C.shape[1]

    def arrivals(self):
        """Yield (t, c_t, F_t) one step at a time."""
        for t in range(self.m):
            yield t, self.C[:, t], self.sets[t]

    def row_boxes(self) -> np.ndarray:
        """(n, m) per-coordinate caps implied by the feasible sets."""
        return np.stack([s.coordinate_caps() for s in self.sets], axis=1)

    def max_radius(self) -> float:
        return max(s.radius for s in self.sets)


@dataclass
class EngineConfig:
    K: int = 50
    overshoot_policy: str = "cap_final_microstep"
    budget_tol: float = 1e-9
    record_inner: bool = False

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.overshoot_policy not in OVERSHOOT_POLICIES:
            raise ValueError(f"overshoot_policy must be one of {OVERSHOOT_POLICIES}")


@dataclass
class DualPoint:
    """Feasible dual point (row gradient matrix Y, non-negative prices z)."""

    Y: np.ndarray
    z: np.ndarray


@dataclass
class RunTrace:
    allocations: np.ndarray            # n x m, column t committed at step t
    loads: np.ndarray                  # budget loads per row at termination
    alg: float                         # sum_i H_i(row i)
    p_gseq: float                      # alg + sum_i G_i(load_i)
    dual: DualPoint
    config: EngineConfig
    penalties: list
    ratio_min: np.ndarray              # realized value-to-weight extremes per row
    ratio_max: np.ndarray
    inner: list | None = None          # per step {"v": K x n, "d": K x n} if recorded


def direction(instance: OnlineInstance, penalties, omega, t: int,
              loads=None) -> np.ndarray:
    """Penalty-adjusted gradient direction d for step t at state omega.

    omega is the n x m state whose rows hold committed prefixes (columns < t),
    the in-progress column t, and zeros beyond; entry i of the result is
    grad_t H_i(omega_i) + c_{i,t} G'_i(load_i).
    """
    omega = np.asarray(omega, dtype=float)
    c_t = instance.C[:, t]
    if loads is None:
        loads = row_loads(instance.C[:, : t + 1], omega[:, : t + 1])
    d = np.empty(instance.n)
    for i in range(instance.n):
        g = prefix_grad_coord(instance.objectives[i], omega[i], t)
        d[i] = g + c_t[i] * penalties[i].derivative(loads[i])
    return d


def _cap_gamma(loads, caps, inc) -> float:
    gamma = 1.0
    for i in range(len(inc)):
        if inc[i] > 0.0 and math.isfinite(caps[i]):
            gamma = min(gamma, (caps[i] - loads[i]) / inc[i])
    return max(0.0, gamma)


def run_online(instance: OnlineInstance, penalties, cfg: EngineConfig,
               on_step=None) -> RunTrace:
    """Run the online solver over all arrivals and return the full trace.

    penalties is one penalty object per row. The optional on_step(t, x_t)
    callback fires right after column t is committed, before arrival t+1 is
    read. Runs are deterministic: identical inputs give bit-identical traces.
    """
    n, m = instance.n, instance.m
    if len(penalties) != n:
        raise ValueError("need one penalty per row")
    K = cfg.K
    omega = np.zeros((n, m))
    loads = np.zeros(n)
    caps = np.array([p.load_cap for p in penalties])
    ratio_min = np.full(n, np.inf)
    ratio_max = np.full(n, -np.inf)
    inner = [] if cfg.record_inner else None

    for t, c_t, F_t in instance.arrivals():
        rec_v = np.empty((K, n)) if cfg.record_inner else None
        rec_d = np.empty((K, n)) if cfg.record_inner else None
        for k in range(K):
            d = np.empty(n)
            for i in range(n):
                g = prefix_grad_coord(instance.objectives[i], omega[i], t)
                if c_t[i] > 0.0:
                    r = g / c_t[i]
                    if r < ratio_min[i]:
                        ratio_min[i] = r
                    if r > ratio_max[i]:
                        ratio_max[i] = r
                d[i] = g + c_t[i] * penalties[i].derivative(loads[i])
            v = F_t.linear_argmax(d)
            step = v / K
            if cfg.overshoot_policy == "cap_final_microstep":
                step = _cap_gamma(loads, caps, c_t * step) * step
            omega[:, t] += step
            loads += c_t * step
            if cfg.record_inner:
                rec_d[k] = d
                rec_v[k] = v
        if cfg.record_inner:
            inner.append({"v": rec_v, "d": rec_d})
        if on_step is not None:
            on_step(t, omega[:, t].copy())

    final_loads = row_loads(instance.C, omega)
    alg = float(sum(obj.value(omega[i]) for i, obj in enumerate(instance.objectives)))
    p_gseq = alg + float(
        sum(p.value(final_loads[i]) for i, p in enumerate(penalties))
    )
    Y = np.stack([obj.grad(omega[i]) for i, obj in enumerate(instance.objectives)])
    z = np.array([-p.derivative(final_loads[i]) for i, p in enumerate(penalties)])
    return RunTrace(
        allocations=omega,
        loads=final_loads,
        alg=alg,
        p_gseq=p_gseq,
        dual=DualPoint(Y, z),
        config=cfg,
        penalties=list(penalties),
        ratio_min=ratio_min,
        ratio_max=ratio_max,
        inner=inner,
    )


@dataclass
class TraceEvaluation:
    alg: float
    p_gseq: float
    loads: np.ndarray
    max_load: float
    budget_ok: bool
    sets_ok: bool
    violations: list = field(default_factory=list)


def evaluate_trace(instance: OnlineInstance, penalties,
                   trace: RunTrace) -> TraceEvaluation:
    """Recompute objective, penalized objective, and feasibility from scratch."""
    X = np.asarray(trace.allocations, dtype=float)
    if X.shape != (instance.n, instance.m):
        raise ValueError("allocation shape does not match the instance")
    loads = row_loads(instance.C, X)
    alg = float(sum(obj.value(X[i]) for i, obj in enumerate(instance.objectives)))
    p_gseq = alg + float(sum(p.value(loads[i]) for i, p in enumerate(penalties)))
    tol = trace.config.budget_tol
    violations = []
    for i, p in enumerate(penalties):
        if loads[i] > p.load_cap + tol:
            violations.append(f"row {i} load {loads[i]:.12g} exceeds cap {p.load_cap}")
    for t, s in enumerate(instance.sets):
        if not s.contains(X[:, t], tol):
            violations.append(f"column {t} outside its feasible set")
    budget_ok = not any(v.startswith("row") for v in violations)
    sets_ok = not any(v.startswith("column") for v in violations)
    return TraceEvaluation(
        alg=alg,
        p_gseq=p_gseq,
        loads=loads,
        max_load=float(np.max(loads)) if len(loads) else 0.0,
        budget_ok=budget_ok,
        sets_ok=sets_ok,
        violations=violations,
    )
