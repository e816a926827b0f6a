"""Seeded instance generators for the experiment families.

Every family is a pure function of (spec, seed); the PRNG is PCG64 via
numpy's default_rng, so instances are reproducible across platforms. Families:

- quadratic_sec5:   random monotone non-concave quadratics F(x) = (x/2 - 1)'Hx
                    with symmetric H, entries uniform in [-100, 0], h = -H 1;
                    costs uniform in [0, 1]; unit-box column sets.
- adwords:          the objective of each row equals its budget row, so every
                    value-to-weight ratio is exactly 1; simplex column sets.
- online_lp:        linear objectives with controlled ratio spread over random
                    positive costs; unit-box column sets.
- knapsack_single:  one budget row; linear (ratio spread in [ratio_low,
                    ratio_high]) or multilinear objective; scalar box sets.
- welfare_simplex:  n agents with multilinear valuations, simplex column sets,
                    and no budget rows (cost matrix is zero).
- gap:              simplex column sets plus per-bin budget rows with
                    multilinear bin valuations.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .engine import OnlineInstance
from .feasible import Box, Simplex
from .objectives import LinearObjective, MultilinearObjective, QuadraticObjective, SetFunctionTable

FAMILIES = (
    "quadratic_sec5",
    "adwords",
    "online_lp",
    "knapsack_single",
    "welfare_simplex",
    "gap",
)

MULTILINEAR_MAX_STEPS = 20


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int
    m: int
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and m >= 1")


def _symmetric_uniform(rng, m, low, high):
    A = rng.uniform(low, high, size=(m, m))
    return np.tril(A) + np.tril(A, -1).T


def _random_concave_of_modular(rng, v, pieces=3):
    W = rng.uniform(0.2, 1.0, size=(pieces, v))
    coef = rng.uniform(0.5, 1.5, size=pieces)
    return SetFunctionTable.concave_of_modular(W, coef)


def _random_coverage(rng, v):
    universe = 2 * v
    weights = rng.uniform(0.5, 1.5, size=universe)
    covers = []
    for _ in range(v):
        size = int(rng.integers(1, max(2, universe // 2)))
        covers.append(rng.choice(universe, size=size, replace=False))
    return SetFunctionTable.coverage(covers, weights)


def generate(spec: GeneratorSpec) -> OnlineInstance:
    """Build the instance for a generator spec (deterministic in the seed)."""
    rng = np.random.default_rng(spec.seed)
    n, m, p = spec.n, spec.m, spec.params

    if spec.family == "quadratic_sec5":
        low = p.get("entry_low", -100.0)
        objectives = []
        for _ in range(n):
            H = _symmetric_uniform(rng, m, low, 0.0)
            objectives.append(QuadraticObjective(H, -H.sum(axis=1)))
        C = rng.uniform(0.0, 1.0, size=(n, m))
        sets = [Box(np.ones(n)) for _ in range(m)]
        return OnlineInstance(C, sets, objectives)

    if spec.family == "adwords":
        C = rng.uniform(p.get("bid_low", 0.1), p.get("bid_high", 1.0), size=(n, m))
        objectives = [LinearObjective(C[i].copy()) for i in range(n)]
        sets = [Simplex(n, 1.0) for _ in range(m)]
        return OnlineInstance(C, sets, objectives)

    if spec.family == "online_lp":
        C = rng.uniform(p.get("cost_low", 0.1), p.get("cost_high", 1.0), size=(n, m))
        ratios = rng.uniform(p.get("ratio_low", 1.0), p.get("ratio_high", 3.0), size=(n, m))
        objectives = [LinearObjective(C[i] * ratios[i]) for i in range(n)]
        sets = [Box(np.ones(n)) for _ in range(m)]
        return OnlineInstance(C, sets, objectives)

    if spec.family == "knapsack_single":
        if n != 1:
            raise ValueError("knapsack_single takes a single budget row")
        c = rng.uniform(p.get("cost_low", 0.05), p.get("cost_high", 0.3), size=m)
        kind = p.get("objective", "linear")
        if kind == "linear":
            ratios = rng.uniform(p.get("ratio_low", 1.0), p.get("ratio_high", math.e), size=m)
            objectives = [LinearObjective(c * ratios)]
        elif kind == "multilinear":
            if m > MULTILINEAR_MAX_STEPS:
                raise ValueError("multilinear ground set too large for exact evaluation")
            objectives = [MultilinearObjective(_random_concave_of_modular(rng, m))]
        else:
            raise ValueError(f"unknown knapsack objective {kind!r}")
        sets = [Box(np.ones(1)) for _ in range(m)]
        return OnlineInstance(c[None, :], sets, objectives)

    if spec.family == "welfare_simplex":
        if m > MULTILINEAR_MAX_STEPS:
            raise ValueError("multilinear ground set too large for exact evaluation")
        flavor = p.get("valuations", "coverage")
        objectives = []
        for _ in range(n):
            if flavor == "coverage":
                objectives.append(MultilinearObjective(_random_coverage(rng, m)))
            else:
                objectives.append(MultilinearObjective(_random_concave_of_modular(rng, m)))
        C = np.zeros((n, m))
        sets = [Simplex(n, 1.0) for _ in range(m)]
        return OnlineInstance(C, sets, objectives)

    if spec.family == "gap":
        if m > MULTILINEAR_MAX_STEPS:
            raise ValueError("multilinear ground set too large for exact evaluation")
        C = rng.uniform(p.get("cost_low", 0.1), p.get("cost_high", 0.5), size=(n, m))
        objectives = [
            MultilinearObjective(_random_concave_of_modular(rng, m)) for _ in range(n)
        ]
        sets = [Simplex(n, 1.0) for _ in range(m)]
        return OnlineInstance(C, sets, objectives)

    raise AssertionError("unreachable")
