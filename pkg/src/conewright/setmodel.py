"""Computable representations of subsets of R^n ("set oracles").

An oracle bundles a membership test, a deterministic local sampler, and
optional parametric charts.  Everything downstream (cone estimation, measure
estimation, classification) consumes only this interface, so implicit sets,
parametric sets, unions, and finite sets are interchangeable.

Thickness semantics: membership(p, tau) is true iff dist(p, X) <= tau, with
the distance approximated per oracle (exact for coordinate sets, first-order
vertical/normal bounds for graphs and implicit sets).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from ._rng import rng_for
from .errors import ContractViolation


# ---------------------------------------------------------------------------
# charts


@dataclass
class Chart:
    """Parametric piece of a set: a map from a k-dimensional box into R^n.

    ``map_fn`` is vectorized: (m, k) parameter rows -> (m, n) point rows.
    ``jacobian`` (optional, analytic) returns (m, n, k); when absent,
    derivatives are taken by central finite differences with step
    ``fd_step * box diameter``.  ``window_fn(center, r)`` returns a list of
    parameter sub-boxes that together cover the preimage of the closed ball
    B(center, r); it exists purely to keep rejection sampling and Monte
    Carlo integration efficient at small radii and must never exclude any
    preimage point.
    """

    param_dim: int
    param_box: np.ndarray
    map_fn: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    jac_vol_fn: Callable[[np.ndarray], np.ndarray] | None = None
    window_fn: Callable[[np.ndarray, float], list[np.ndarray]] | None = None
    fd_step: float = 1e-6

    def __post_init__(self):
        self.param_box = np.asarray(self.param_box, dtype=float).reshape(self.param_dim, 2)
        if np.any(self.param_box[:, 1] < self.param_box[:, 0]):
            raise ContractViolation("chart box intervals must be ordered")

    @property
    def box_diameter(self) -> float:
        return float(np.linalg.norm(self.param_box[:, 1] - self.param_box[:, 0]))

    def map(self, params: np.ndarray) -> np.ndarray:
        params = np.asarray(params, dtype=float).reshape(-1, self.param_dim)
        return self.map_fn(params)

    def fd_jacobian(self, params: np.ndarray, step: float | None = None) -> np.ndarray:
        """Central finite-difference Jacobian, (m, n, k)."""
        params = np.asarray(params, dtype=float).reshape(-1, self.param_dim)
        h = (self.fd_step * max(self.box_diameter, 1.0)) if step is None else step
        cols = []
        for j in range(self.param_dim):
            e = np.zeros(self.param_dim)
            e[j] = h
            cols.append((self.map(params + e) - self.map(params - e)) / (2 * h))
        return np.stack(cols, axis=-1)

    def jac(self, params: np.ndarray) -> np.ndarray:
        if self.jacobian is not None:
            params = np.asarray(params, dtype=float).reshape(-1, self.param_dim)
            return self.jacobian(params)
        return self.fd_jacobian(params)

    def jac_vol(self, params: np.ndarray) -> np.ndarray:
        """sqrt of the Gram determinant of the differential: the k-volume
        scaling factor of the chart at each parameter row."""
        if self.jac_vol_fn is not None:
            params = np.asarray(params, dtype=float).reshape(-1, self.param_dim)
            return self.jac_vol_fn(params)
        J = self.jac(params)
        gram = np.einsum("mij,mik->mjk", J, J)
        det = np.linalg.det(gram)
        return np.sqrt(np.maximum(det, 0.0))

    def windows(self, center: np.ndarray, r: float) -> list[np.ndarray]:
        """Parameter sub-boxes covering the preimage of B(center, r)."""
        boxes = None
        if self.window_fn is not None:
            boxes = self.window_fn(np.asarray(center, dtype=float), float(r))
        if boxes is None:
            boxes = [self.param_box]
        out = []
        for b in boxes:
            b = np.asarray(b, dtype=float).reshape(self.param_dim, 2)
            lo = np.maximum(b[:, 0], self.param_box[:, 0])
            hi = np.minimum(b[:, 1], self.param_box[:, 1])
            if np.all(hi > lo):
                out.append(np.stack([lo, hi], axis=1))
        return out


# ---------------------------------------------------------------------------
# oracles


@dataclass
class SetOracle:
    """Computable description of a subset X of R^n.

    ``membership_fn(points, tau)`` -> boolean mask; ``sampler_fn(center, r,
    m, seed)`` -> up to m points of X inside the closed ball (an empty array
    is a legitimate outcome, e.g. isolated points below the separation
    scale).  ``connected`` and ``locally_closed`` are caller-declared flags;
    they are recorded in reports, never verified.
    """

    name: str
    ambient_dim: int
    intrinsic_dim: int
    membership_fn: Callable[[np.ndarray, float], np.ndarray]
    sampler_fn: Callable[[np.ndarray, float, int, int], np.ndarray]
    charts: list[Chart] = field(default_factory=list)
    special_points: list[np.ndarray] = field(default_factory=list)
    connected: bool = True
    locally_closed: bool = True
    scale: float = 1.0
    anchor: np.ndarray | None = None
    finite_points: np.ndarray | None = None
    kind: str = "custom"
    definition: dict | None = None
    caveats: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.special_points = [np.asarray(p, dtype=float).reshape(self.ambient_dim)
                               for p in self.special_points]
        if self.anchor is None:
            self.anchor = np.zeros(self.ambient_dim)
        self.anchor = np.asarray(self.anchor, dtype=float).reshape(self.ambient_dim)

    def membership(self, points, tau: float) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = pts.reshape(-1, self.ambient_dim)
        out = np.asarray(self.membership_fn(pts, float(tau)), dtype=bool)
        return bool(out[0]) if single else out

    def sample(self, center, r: float, m: int, seed: int) -> np.ndarray:
        center = np.asarray(center, dtype=float).reshape(self.ambient_dim)
        pts = self.sampler_fn(center, float(r), int(m), int(seed))
        return np.asarray(pts, dtype=float).reshape(-1, self.ambient_dim)


def sample_in_ball(oracle: SetOracle, center, r: float, m: int, seed: int) -> np.ndarray:
    """Up to m points of X in B(center, r), deterministic per seed."""
    if r <= 0:
        raise ContractViolation("radius must be positive")
    if m < 1:
        raise ContractViolation("sample count must be >= 1")
    return oracle.sample(center, r, m, seed)


# ---------------------------------------------------------------------------
# generic samplers


def _uniform_in_box(rng: np.random.Generator, box: np.ndarray, count: int) -> np.ndarray:
    u = rng.random((count, box.shape[0]))
    return box[:, 0] + u * (box[:, 1] - box[:, 0])


def make_chart_sampler(charts: Sequence[Chart], ambient_dim: int,
                       budget_factor: int = 60) -> Callable:
    """Rejection sampler over chart parameter windows.

    Each chart gets an equal share of the target count with its own
    candidate budget (budget_factor x its share), so a branch whose window
    accepts rarely is not crowded out by an easy sibling; windows within a
    chart are weighted by parameter volume.  The pooled result is shuffled
    deterministically before truncation to m.
    """

    def sampler(center: np.ndarray, r: float, m: int, seed: int) -> np.ndarray:
        rng = rng_for(seed)
        per_chart: list[list[tuple[np.ndarray, float]]] = []
        for ch in charts:
            boxes = [(box, float(np.prod(box[:, 1] - box[:, 0])))
                     for box in ch.windows(center, r)]
            boxes = [(b, v) for b, v in boxes if v > 0]
            per_chart.append(boxes)
        live = [i for i, boxes in enumerate(per_chart) if boxes]
        if not live:
            return np.zeros((0, ambient_dim))
        quota = int(np.ceil(m / len(live)))
        found: list[np.ndarray] = []
        for i in live:
            ch = charts[i]
            boxes = per_chart[i]
            lo = np.stack([b[:, 0] for b, _ in boxes])
            span = np.stack([b[:, 1] - b[:, 0] for b, _ in boxes])
            vols = np.array([v for _, v in boxes])
            weights = vols / vols.sum()
            count = 0
            budget = budget_factor * quota
            batch = int(max(512, 4 * quota))
            got: list[np.ndarray] = []
            while count < quota and budget > 0:
                take = min(batch, budget)
                if len(boxes) > 1:
                    idx = rng.choice(len(boxes), size=take, p=weights)
                else:
                    idx = np.zeros(take, dtype=int)
                params = lo[idx] + rng.random((take, ch.param_dim)) * span[idx]
                pts = ch.map(params)
                dist = np.linalg.norm(pts - center, axis=1)
                acc = pts[dist <= r]
                if len(acc):
                    got.append(acc)
                    count += len(acc)
                budget -= take
            if got:
                found.append(np.concatenate(got, axis=0)[:quota])
        if not found:
            return np.zeros((0, ambient_dim))
        pool = np.concatenate(found, axis=0)
        pool = pool[rng.permutation(len(pool))]
        return pool[:m]

    return sampler


def _uniform_in_ball(rng: np.random.Generator, center: np.ndarray, r: float,
                     count: int) -> np.ndarray:
    n = center.shape[0]
    g = rng.normal(size=(count, n))
    g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
    radii = r * rng.random(count) ** (1.0 / n)
    return center + g * radii[:, None]


def make_implicit_sampler(f: Callable, grad: Callable, ambient_dim: int,
                          band: float = 0.25, newton_steps: int = 12,
                          budget_factor: int = 80) -> Callable:
    """Sampler for {f = 0}: rejection into a first-order distance band of
    width band*r, then damped Newton projection along the gradient until the
    residual distance estimate is below 1e-12."""

    def sampler(center: np.ndarray, r: float, m: int, seed: int) -> np.ndarray:
        rng = rng_for(seed)
        found: list[np.ndarray] = []
        count = 0
        budget = budget_factor * m
        batch = int(max(384, 4 * m))
        while count < m and budget > 0:
            take = min(batch, budget)
            X = _uniform_in_ball(rng, center, r, take)
            fv = f(X)
            g = grad(X)
            gn = np.linalg.norm(g, axis=1)
            near = np.abs(fv) <= band * r * np.maximum(gn, 1e-300)
            cand = X[near]
            if len(cand):
                for _ in range(newton_steps):
                    fv = f(cand)
                    g = grad(cand)
                    gsq = np.maximum(np.sum(g * g, axis=1), 1e-300)
                    step = (fv / gsq)[:, None] * g
                    # clip step length for stability far from the set
                    ln = np.linalg.norm(step, axis=1)
                    cap = 0.5 * r
                    big = ln > cap
                    if np.any(big):
                        step[big] *= (cap / ln[big])[:, None]
                    cand = cand - step
                fv = f(cand)
                g = grad(cand)
                gn = np.maximum(np.linalg.norm(g, axis=1), 1e-300)
                tol = 1e-12 * max(1.0, float(np.linalg.norm(center)) + r)
                ok = (np.abs(fv) / gn <= tol) & (np.linalg.norm(cand - center, axis=1) <= r)
                acc = cand[ok]
                if len(acc):
                    found.append(acc)
                    count += len(acc)
            budget -= take
        if not found:
            return np.zeros((0, ambient_dim))
        return np.concatenate(found, axis=0)[:m]

    return sampler


def make_finite_sampler(points: np.ndarray) -> Callable:
    """Sampler for a finite point set: returns the members inside the ball
    (a deterministic subsample when more than m qualify)."""
    points = np.asarray(points, dtype=float)

    def sampler(center: np.ndarray, r: float, m: int, seed: int) -> np.ndarray:
        dist = np.linalg.norm(points - center, axis=1)
        hits = points[dist <= r]
        if len(hits) <= m:
            return hits.copy()
        idx = rng_for(seed).choice(len(hits), size=m, replace=False)
        return hits[np.sort(idx)]

    return sampler


def mixture_sampler(samplers: Sequence[Callable], ambient_dim: int) -> Callable:
    """Draw from several samplers and interleave, so every branch of a union
    is represented whenever it intersects the ball."""

    def sampler(center: np.ndarray, r: float, m: int, seed: int) -> np.ndarray:
        per = int(np.ceil(m / len(samplers)))
        parts = [s(center, r, per, seed * 31 + i + 1) for i, s in enumerate(samplers)]
        parts = [p for p in parts if len(p)]
        if not parts:
            return np.zeros((0, ambient_dim))
        pool = np.concatenate(parts, axis=0)
        if len(pool) <= m:
            return pool
        # round-robin across branches keeps the mixture balanced
        order = []
        offsets = np.cumsum([0] + [len(p) for p in parts])
        for rank in range(max(len(p) for p in parts)):
            for bi, p in enumerate(parts):
                if rank < len(p):
                    order.append(offsets[bi] + rank)
                if len(order) >= m:
                    break
            if len(order) >= m:
                break
        return pool[np.array(order[:m], dtype=int)]

    return sampler


# ---------------------------------------------------------------------------
# rigid motions and scalings of oracles (used by the equivariance tests)


def scaled_oracle(oracle: SetOracle, c: float) -> SetOracle:
    """Oracle for c*X."""
    if c <= 0:
        raise ContractViolation("scale factor must be positive")
    base = oracle

    def membership(pts, tau):
        return base.membership_fn(pts / c, tau / c)

    def sampler(center, r, m, seed):
        return c * base.sampler_fn(center / c, r / c, m, seed)

    charts = []
    for ch in base.charts:
        def mk(ch=ch):
            def map_fn(u):
                return c * ch.map(u)

            def window_fn(center, r):
                return ch.windows(center / c, r / c)

            jac = (lambda u, ch=ch: c * ch.jac(u)) if ch.jacobian is not None else None
            return Chart(ch.param_dim, ch.param_box, map_fn, jacobian=jac,
                         jac_vol_fn=(lambda u, ch=ch: (c ** ch.param_dim) * ch.jac_vol(u)),
                         window_fn=window_fn, fd_step=ch.fd_step)
        charts.append(mk())

    return replace(
        base,
        name=f"{base.name}*{c:g}",
        membership_fn=membership,
        sampler_fn=sampler,
        charts=charts,
        special_points=[c * p for p in base.special_points],
        scale=base.scale * c,
        anchor=c * base.anchor,
        finite_points=None if base.finite_points is None else c * base.finite_points,
        definition=None,
    )


def rotated_oracle(oracle: SetOracle, R: np.ndarray, shift=None) -> SetOracle:
    """Oracle for R*X + shift (R orthogonal)."""
    R = np.asarray(R, dtype=float)
    n = oracle.ambient_dim
    if R.shape != (n, n) or np.max(np.abs(R @ R.T - np.eye(n))) > 1e-9:
        raise ContractViolation("R must be an orthogonal matrix of the ambient dimension")
    t = np.zeros(n) if shift is None else np.asarray(shift, dtype=float).reshape(n)
    base = oracle

    def fwd(pts):
        return pts @ R.T + t

    def back(pts):
        return (pts - t) @ R

    def membership(pts, tau):
        return base.membership_fn(back(pts), tau)

    def sampler(center, r, m, seed):
        raw = base.sampler_fn(back(center.reshape(1, -1))[0], r, m, seed)
        return fwd(raw) if len(raw) else raw

    charts = []
    for ch in base.charts:
        def mk(ch=ch):
            def map_fn(u):
                return fwd(ch.map(u))

            def window_fn(center, r):
                return ch.windows(back(center.reshape(1, -1))[0], r)

            jac = (lambda u, ch=ch: np.einsum("ij,mjk->mik", R, ch.jac(u))) \
                if ch.jacobian is not None else None
            return Chart(ch.param_dim, ch.param_box, map_fn, jacobian=jac,
                         jac_vol_fn=(lambda u, ch=ch: ch.jac_vol(u)),
                         window_fn=window_fn, fd_step=ch.fd_step)
        charts.append(mk())

    return replace(
        base,
        name=f"{base.name}@moved",
        membership_fn=membership,
        sampler_fn=sampler,
        charts=charts,
        special_points=[fwd(p.reshape(1, -1))[0] for p in base.special_points],
        anchor=fwd(base.anchor.reshape(1, -1))[0],
        finite_points=None if base.finite_points is None else fwd(base.finite_points),
        definition=None,
    )


# corpus() lives in corpus.py but belongs to this module's public surface;
# the import sits at the bottom to avoid a cycle.
from .corpus import CorpusEntry, GroundTruth, corpus  # noqa: E402,F401
