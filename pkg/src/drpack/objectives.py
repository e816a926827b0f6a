"""Monotone DR-submodular objectives with exact gradients.

Three families are provided: non-concave quadratics whose curvature matrix is
element-wise non-positive, exact multilinear extensions of small monotone
submodular set functions, and linear objectives. All objectives vanish at the
origin, have non-negative anti-tone gradients on their domain, and expose
exact values/gradients (the multilinear extension is evaluated by full subset
enumeration, so everything is deterministic to machine precision).
"""

import math
from dataclasses import dataclass

import numpy as np

MAX_GROUND_SET = 20
VALUE_FLOOR = 1e-9
_L_TOL = 1e-12


def _as_vector(x, m, name="x"):
    x = np.asarray(x, dtype=float)
    if x.shape != (m,):
        raise ValueError(f"{name} must have shape ({m},), got {x.shape}")
    return x


class SetFunctionTable:
    """Set function on a ground set of v elements, stored as a dense 2^v table.

    Subsets are keyed by bitmask: bit j set means element j is in the subset.
    The empty set must map to 0.
    """

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        v = int(round(math.log2(len(values))))
        if 2**v != len(values):
            raise ValueError("table length must be a power of two")
        if v > MAX_GROUND_SET:
            raise ValueError(f"ground set capped at {MAX_GROUND_SET} elements")
        if values[0] != 0.0:
            raise ValueError("set function must be normalized: f(empty)=0")
        self.v = v
        self.values = values
        self._masks = None

    def value(self, mask: int) -> float:
        return float(self.values[mask])

    def marginal(self, j: int, mask: int) -> float:
        """Gain of element j on top of mask \\ {j}."""
        base = mask & ~(1 << j)
        return float(self.values[base | (1 << j)] - self.values[base])

    def subset_masks(self) -> np.ndarray:
        """Boolean (2^v, v) membership matrix, cached."""
        if self._masks is None:
            idx = np.arange(2**self.v, dtype=np.int64)
            self._masks = ((idx[:, None] >> np.arange(self.v)[None, :]) & 1).astype(bool)
        return self._masks

    def is_monotone(self, tol: float = 0.0) -> bool:
        for mask in range(2**self.v):
            for j in range(self.v):
                if not mask & (1 << j) and self.values[mask | (1 << j)] < self.values[mask] - tol:
                    return False
        return True

    def is_submodular(self, tol: float = 1e-12) -> bool:
        # pairwise form: f(S+j) - f(S) >= f(S+j+k) - f(S+k) for j,k not in S
        f = self.values
        for mask in range(2**self.v):
            for j in range(self.v):
                if mask & (1 << j):
                    continue
                gain_j = f[mask | (1 << j)] - f[mask]
                for k in range(self.v):
                    if k == j or mask & (1 << k):
                        continue
                    with_k = mask | (1 << k)
                    if gain_j + tol < f[with_k | (1 << j)] - f[with_k]:
                        return False
        return True

    def total_curvature(self) -> float:
        """1 - min_j f(j | V\\j)/f(j), minimum over elements with f(j) > 0."""
        full = 2**self.v - 1
        ratios = []
        for j in range(self.v):
            single = self.values[1 << j]
            if single > 0.0:
                ratios.append((self.values[full] - self.values[full & ~(1 << j)]) / single)
        if not ratios:
            raise ValueError("all singletons are zero; total curvature undefined")
        return float(1.0 - min(ratios))

    @classmethod
    def cardinality(cls, v: int):
        idx = np.arange(2**v, dtype=np.int64)
        counts = np.array([bin(i).count("1") for i in idx], dtype=float)
        return cls(counts)

    @classmethod
    def modular(cls, weights):
        weights = np.asarray(weights, dtype=float)
        v = len(weights)
        masks = ((np.arange(2**v)[:, None] >> np.arange(v)[None, :]) & 1).astype(bool)
        return cls(masks @ weights)

    @classmethod
    def coverage(cls, covers, element_weights):
        """Weighted coverage: f(S) = total weight of the universe covered by S.

        covers[j] is an iterable of universe indices covered by ground element j.
        """
        element_weights = np.asarray(element_weights, dtype=float)
        v = len(covers)
        cover_masks = []
        for items in covers:
            bits = 0
            for u in items:
                bits |= 1 << int(u)
            cover_masks.append(bits)
        vals = np.zeros(2**v)
        for mask in range(2**v):
            covered = 0
            for j in range(v):
                if mask & (1 << j):
                    covered |= cover_masks[j]
            total = 0.0
            u = 0
            while covered >> u:
                if covered & (1 << u):
                    total += element_weights[u]
                u += 1
            vals[mask] = total
        return cls(vals)

    @classmethod
    def concave_of_modular(cls, weights, coefficients):
        """f(S) = sum_r coefficients[r] * sqrt(sum_{j in S} weights[r, j])."""
        weights = np.atleast_2d(np.asarray(weights, dtype=float))
        coefficients = np.asarray(coefficients, dtype=float)
        if np.any(weights < 0) or np.any(coefficients < 0):
            raise ValueError("weights and coefficients must be non-negative")
        v = weights.shape[1]
        masks = ((np.arange(2**v)[:, None] >> np.arange(v)[None, :]) & 1).astype(float)
        return cls(np.sqrt(masks @ weights.T) @ coefficients)


class QuadraticObjective:
    """0.5 x'Hx + h'x + c0 with symmetric H; DR-submodular when H <= 0 element-wise."""

    kind = "quadratic"

    def __init__(self, H, h, c0: float = 0.0, smoothness: float | None = None):
        H = np.asarray(H, dtype=float)
        h = np.asarray(h, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("H must be square")
        if not np.allclose(H, H.T, atol=1e-12, rtol=0.0):
            raise ValueError("H must be symmetric so that the gradient is Hx + h")
        if h.shape != (H.shape[0],):
            raise ValueError("h has wrong shape")
        self.H = H
        self.h = h
        self.c0 = float(c0)
        self.m = H.shape[0]
        self.smoothness = smoothness

    def _check(self, x):
        x = _as_vector(x, self.m)
        if np.min(x, initial=0.0) < -_L_TOL:
            raise ValueError("x must be non-negative")
        return x

    def value(self, x) -> float:
        x = self._check(x)
        return float(0.5 * x @ (self.H @ x) + self.h @ x + self.c0)

    def grad(self, x) -> np.ndarray:
        x = self._check(x)
        return self.H @ x + self.h

    def grad_coord(self, x, t: int) -> float:
        x = self._check(x)
        return float(self.H[t] @ x + self.h[t])

    def hessian(self, x=None) -> np.ndarray:
        return self.H.copy()

    def value_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return 0.5 * np.einsum("ij,ij->i", X @ self.H, X) + X @ self.h + self.c0

    def grad_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return X @ self.H + self.h[None, :]


class LinearObjective:
    """d'x with non-negative coefficients (gradient is constant, so trivially DR)."""

    kind = "linear"

    def __init__(self, d, smoothness: float | None = 0.0):
        d = np.asarray(d, dtype=float)
        if np.any(d < 0):
            raise ValueError("linear objective needs non-negative coefficients")
        self.d = d
        self.m = len(d)
        self.smoothness = smoothness

    def value(self, x) -> float:
        return float(self.d @ _as_vector(x, self.m))

    def grad(self, x) -> np.ndarray:
        _as_vector(x, self.m)
        return self.d.copy()

    def grad_coord(self, x, t: int) -> float:
        _as_vector(x, self.m)
        return float(self.d[t])

    def hessian(self, x=None) -> np.ndarray:
        return np.zeros((self.m, self.m))

    def value_many(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.d

    def grad_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.broadcast_to(self.d, X.shape).copy()


class MultilinearObjective:
    """Exact multilinear extension of a set function, by full subset enumeration.

    F(x) = sum_S f(S) prod_{i in S} x_i prod_{j not in S} (1 - x_j), i.e. the
    expectation of f under independent inclusion with probabilities x.
    Domain is the unit cube.
    """

    kind = "multilinear"

    def __init__(self, table: SetFunctionTable, smoothness: float | None = None):
        self.table = table
        self.m = table.v
        self.smoothness = smoothness

    def _check(self, x):
        x = _as_vector(x, self.m)
        if np.min(x) < -_L_TOL or np.max(x) > 1.0 + _L_TOL:
            raise ValueError("x must lie in the unit cube")
        return np.clip(x, 0.0, 1.0)

    def _value_raw(self, x) -> float:
        masks = self.table.subset_masks()
        probs = np.prod(np.where(masks, x, 1.0 - x), axis=1)
        return float(probs @ self.table.values)

    def value(self, x) -> float:
        return self._value_raw(self._check(x))

    def grad_coord(self, x, t: int) -> float:
        x = self._check(x)
        hi = x.copy()
        lo = x.copy()
        hi[t] = 1.0
        lo[t] = 0.0
        return self._value_raw(hi) - self._value_raw(lo)

    def grad(self, x) -> np.ndarray:
        x = self._check(x)
        g = np.empty(self.m)
        for t in range(self.m):
            hi = x.copy()
            lo = x.copy()
            hi[t] = 1.0
            lo[t] = 0.0
            g[t] = self._value_raw(hi) - self._value_raw(lo)
        return g

    def hessian(self, x) -> np.ndarray:
        x = self._check(x)
        Hm = np.zeros((self.m, self.m))
        for s in range(self.m):
            for t in range(s + 1, self.m):
                pts = []
                for bs, bt in ((1, 1), (1, 0), (0, 1), (0, 0)):
                    y = x.copy()
                    y[s] = bs
                    y[t] = bt
                    pts.append(self._value_raw(y))
                Hm[s, t] = Hm[t, s] = pts[0] - pts[1] - pts[2] + pts[3]
        return Hm

    def value_many(self, X) -> np.ndarray:
        X = np.clip(np.asarray(X, dtype=float), 0.0, 1.0)
        masks = self.table.subset_masks()
        f = self.table.values
        n_states, v = masks.shape
        out = np.empty(len(X))
        chunk = max(1, 4_000_000 // (n_states * v))
        for lo in range(0, len(X), chunk):
            block = X[lo:lo + chunk]
            w = np.where(masks[None, :, :], block[:, None, :], 1.0 - block[:, None, :])
            out[lo:lo + chunk] = w.prod(axis=2) @ f
        return out

    def grad_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        G = np.empty_like(X)
        for t in range(self.m):
            hi = X.copy()
            lo = X.copy()
            hi[:, t] = 1.0
            lo[:, t] = 0.0
            G[:, t] = self.value_many(hi) - self.value_many(lo)
        return G


def prefix_grad_coord(obj, omega, t: int) -> float:
    """Gradient coordinate t at a point supported on coordinates 0..t.

    Encodes the online information restriction: only prefixes of the variable
    vector may be queried. Raises if omega has mass beyond position t.
    """
    omega = _as_vector(omega, obj.m, "omega")
    if t < 0 or t >= obj.m:
        raise ValueError("coordinate out of range")
    if np.any(omega[t + 1:] != 0.0):
        raise ValueError("omega must be zero beyond the prefix coordinate")
    return obj.grad_coord(omega, t)


@dataclass
class DrCheckResult:
    ok: bool
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    coord: int | None = None


def check_dr(obj, trials: int = 1000, rng_seed: int = 0, domain_box=None,
             tol: float = 1e-9) -> DrCheckResult:
    """Sample ordered pairs x <= y and verify grad(x) >= grad(y) element-wise."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    box = np.ones(obj.m) if domain_box is None else np.asarray(domain_box, dtype=float)
    if obj.kind == "multilinear":
        box = np.minimum(box, 1.0)
    rng = np.random.default_rng(rng_seed)
    X = rng.uniform(0.0, box, size=(trials, obj.m))
    Y = rng.uniform(X, box)
    GX = obj.grad_many(X)
    GY = obj.grad_many(Y)
    gap = GY - GX
    worst = np.unravel_index(np.argmax(gap), gap.shape)
    if gap[worst] > tol:
        return DrCheckResult(False, X[worst[0]], Y[worst[0]], int(worst[1]))
    return DrCheckResult(True)


@dataclass
class CurvatureReport:
    """Curvature summary: alpha in [-1, 0], optional set-function curvature kappa."""
    alpha: float
    kappa: float | None
    witness: np.ndarray


def total_curvature(table: SetFunctionTable) -> float:
    return table.total_curvature()


def _ratio_and_jac(obj, u, floor):
    g = obj.grad(u)
    val = obj.value(u)
    if val <= floor:
        return np.inf, np.zeros_like(u)
    ratio = float(g @ u) / val
    jac = (obj.hessian(u) @ u + g) / val - (g @ u) * g / val**2
    return ratio, jac


def estimate_alpha(obj, chat, domain_box=None, *, grid_axis: int = 25,
                   samples: int = 2048, refinements: int = 20,
                   seed: int = 0) -> CurvatureReport:
    """Estimate inf <grad H(u), u>/H(u) - 1 over {u >= 0, chat'u <= 1, u in box}.

    Dense grid (dimension <= 4) plus random sampling, followed by multi-start
    local descent. Points where H is below a small value floor are excluded to
    avoid 0/0 at the origin. The sampled minimum upper-bounds the true infimum,
    so the returned alpha is an optimistic (>= exact) estimate; it is clamped
    to [-1, 0].
    """
    from scipy.optimize import minimize

    chat = _as_vector(chat, obj.m, "chat")
    if np.any(chat < 0) or not np.any(chat > 0):
        raise ValueError("chat must be non-negative with at least one positive entry")
    box = np.ones(obj.m) if domain_box is None else np.asarray(domain_box, dtype=float)
    if obj.kind == "multilinear":
        box = np.minimum(box, 1.0)

    if obj.kind == "linear":
        # <d, u>/<d, u> == 1 identically, so alpha = 0 exactly.
        witness = np.minimum(box, 0.5 / np.maximum(chat, 1e-30))
        return CurvatureReport(0.0, None, witness)

    corner_value = obj.value(box)
    if corner_value <= 0.0:
        raise ValueError("objective is degenerate on the domain box")
    floor = VALUE_FLOOR * corner_value

    cands = []
    if obj.m <= 4:
        axes = [np.linspace(0.0, b, grid_axis) for b in box]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, obj.m)
        cands.append(grid[grid @ chat <= 1.0 + 1e-12])
    rng = np.random.default_rng(seed)
    raw = rng.uniform(0.0, box, size=(samples, obj.m))
    budget = raw @ chat
    scale = np.minimum(1.0, 1.0 / np.maximum(budget, 1e-30))
    cands.append(raw * scale[:, None])
    on_face = raw / np.maximum(budget, 1e-30)[:, None]
    ok = np.all(on_face <= box[None, :] + 1e-12, axis=1) & (budget > 1e-30)
    cands.append(on_face[ok])
    pts = np.vstack([c for c in cands if len(c)])

    vals = obj.value_many(pts)
    keep = vals > floor
    if not np.any(keep):
        raise ValueError("objective is degenerate on the feasible region")
    pts, vals = pts[keep], vals[keep]
    ratios = np.einsum("ij,ij->i", obj.grad_many(pts), pts) / vals

    order = np.argsort(ratios, kind="stable")
    best_ratio = float(ratios[order[0]])
    best_point = pts[order[0]].copy()

    constraints = [
        {"type": "ineq", "fun": lambda u: 1.0 - chat @ u},
        {"type": "ineq", "fun": lambda u: obj.value(u) - floor},
    ]
    bounds = [(0.0, float(b)) for b in box]
    for idx in order[:refinements]:
        try:
            res = minimize(
                lambda u: _ratio_and_jac(obj, u, floor),
                pts[idx],
                jac=True,
                method="SLSQP",
                bounds=bounds,
                constraints=constraints,
                options={"maxiter": 200, "ftol": 1e-12},
            )
        except (ValueError, FloatingPointError):  # pragma: no cover - solver hiccup
            continue
        if not res.success:
            continue
        u = np.clip(res.x, 0.0, box)
        if chat @ u > 1.0 + 1e-9 or obj.value(u) <= floor:
            continue
        r = float(obj.grad(u) @ u / obj.value(u))
        if r < best_ratio:
            best_ratio, best_point = r, u

    alpha = float(np.clip(best_ratio - 1.0, -1.0, 0.0))
    kappa = obj.table.total_curvature() if obj.kind == "multilinear" else None
    return CurvatureReport(alpha, kappa, best_point)


def estimate_smoothness(obj, domain_box, *, samples: int = 256, seed: int = 0) -> float:
    """Upper bound on the gradient Lipschitz constant along signed directions.

    Quadratics use the exact max row sum of |H| (the Hessian is constant);
    linear objectives are 0; multilinear extensions use a sampled bound. The
    value only feeds the finite-iteration slack report, so a sampled bound is
    acceptable there.
    """
    box = np.asarray(domain_box, dtype=float)
    if obj.kind == "quadratic":
        return float(np.abs(obj.H).sum(axis=1).max())
    if obj.kind == "linear":
        return 0.0
    box = np.minimum(box, 1.0)
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, box, size=(samples, obj.m))
    Y = rng.uniform(X, box)
    num = np.linalg.norm(obj.grad_many(X) - obj.grad_many(Y), axis=1)
    den = np.linalg.norm(X - Y, axis=1)
    ok = den > 1e-12
    return float(np.max(num[ok] / den[ok], initial=0.0))
