"""Multi-scale estimators of the tangent cone and the paratangent cone.

The tangent cone at x collects limits of unit secant directions
(p - x)/||p - x|| with p in X tending to x; the paratangent cone uses
secants between *pairs* of set points both tending to x and is therefore
closed under sign flips and always contains the tangent cone.

Both limits are discretized by a ladder of shrinking radii ("tiers"); the
accepted direction set is the final tier after deduplication on a spherical
bin lattice, and the convergence diagnostic is the Hausdorff distance
between consecutive tiers.  Estimates never claim convergence they did not
observe: callers receive the flag and must not turn unconverged estimates
into verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ._rng import derive_seed
from .errors import ContractViolation, UnconvergedEstimate
from .grassmann import Subspace, direction_set_distance, fit_subspace
from .setmodel import SetOracle

#: points closer to the base than this are discarded as coincident
COINCIDENT_TOL = 1e-12


@dataclass(frozen=True)
class ConeConfig:
    """Discretization of the limit: radii r0 * rho^j for j < tiers, with m
    sample points per tier and angular bins of size bin_resolution."""

    r0: float = 0.1
    rho: float = 0.5
    tiers: int = 8
    m: int = 400
    seed: int = 0
    bin_resolution: float = 0.02
    stability_tol: float = 0.05

    def __post_init__(self):
        if not (self.r0 > 0 and 0 < self.rho < 1):
            raise ContractViolation("need r0 > 0 and 0 < rho < 1")
        if self.tiers < 3:
            raise ContractViolation("need at least 3 tiers")
        if self.m < 10:
            raise ContractViolation("need at least 10 samples per tier")
        if not (self.bin_resolution > 0 and self.stability_tol > 0):
            raise ContractViolation("bin_resolution and stability_tol must be positive")

    @property
    def radii(self) -> np.ndarray:
        return self.r0 * self.rho ** np.arange(self.tiers)

    @classmethod
    def defaults_for(cls, oracle: SetOracle, seed: int = 0, **overrides) -> "ConeConfig":
        """Defaults scaled to the oracle: r0 = 0.1 * scale; the per-tier
        sample count grows with the expected direction-set dimension (a
        2-dimensional set needs full coverage of a circle of directions)."""
        kw = dict(r0=0.1 * oracle.scale, m=400 if oracle.intrinsic_dim <= 1 else 2500,
                  seed=seed)
        kw.update(overrides)
        return cls(**kw)


@dataclass
class ConeEstimate:
    """Estimated cone at a base point, as a set of unit directions."""

    kind: str  # "tangent" | "paratangent"
    base: np.ndarray
    per_tier_directions: list[np.ndarray]
    directions: np.ndarray
    fitted: tuple[Subspace, float] | None
    dim_estimate: int
    converged: bool
    diagnostics: list[float] = field(default_factory=list)
    symmetric: bool = False

    def __post_init__(self):
        self.base = np.asarray(self.base, dtype=float)


def _bin_directions(dirs: np.ndarray, bin_resolution: float) -> np.ndarray:
    """Deduplicate unit directions on a cubic lattice of cell side
    bin_resolution: one representative per occupied cell, the renormalized
    cell centroid, in lexicographic cell order (deterministic)."""
    if len(dirs) == 0:
        return dirs.reshape(0, dirs.shape[1] if dirs.ndim == 2 else 0)
    keys = np.floor(dirs / bin_resolution).astype(np.int64)
    order = np.lexsort(keys.T[::-1])
    keys_sorted = keys[order]
    dirs_sorted = dirs[order]
    boundaries = np.any(np.diff(keys_sorted, axis=0) != 0, axis=1)
    starts = np.concatenate([[0], np.nonzero(boundaries)[0] + 1])
    ends = np.concatenate([starts[1:], [len(dirs_sorted)]])
    reps = np.add.reduceat(dirs_sorted, starts, axis=0) / (ends - starts)[:, None]
    norms = np.linalg.norm(reps, axis=1)
    good = norms > 1e-9
    return reps[good] / norms[good, None]


def _is_antipodally_symmetric(dirs: np.ndarray, bin_resolution: float) -> bool:
    """True when every direction's antipode is occupied within a bin diameter."""
    if len(dirs) == 0:
        return True
    sq = (np.sum(dirs * dirs, axis=1)[:, None] + np.sum(dirs * dirs, axis=1)[None, :]
          + 2.0 * (dirs @ dirs.T))  # ||d_i - (-d_j)||^2
    nearest = np.sqrt(np.maximum(sq.min(axis=1), 0.0))
    return bool(np.max(nearest) <= 2.0 * bin_resolution)


def _secant_directions(points: np.ndarray, base: np.ndarray) -> np.ndarray:
    diff = points - base
    norms = np.linalg.norm(diff, axis=1)
    keep = norms >= COINCIDENT_TOL
    return diff[keep] / norms[keep, None]


def _sphere_cover_gap(sub: Subspace, dirs: np.ndarray) -> float:
    """How far the unit sphere of the candidate subspace strays from the
    accepted directions: sup over a reference covering of the sphere of the
    distance to the nearest accepted direction.  A direction cloud that
    lies *in* a subspace without filling its sphere (e.g. the four
    half-axes of a coordinate cross inside the plane) is not that subspace
    as a cone, and this gap exposes it."""
    if sub.dim == 1:
        ref = np.concatenate([sub.basis, -sub.basis], axis=0)
    else:
        rng = np.random.default_rng(12345)  # fixed: the reference is part of the method
        g = rng.normal(size=(256 * sub.dim, sub.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        ref = g @ sub.basis
    from .grassmann import _one_sided_min_sq
    return float(np.sqrt(_one_sided_min_sq(ref, dirs).max()))


def _finalize(kind: str, base: np.ndarray, tiers: list[np.ndarray],
              cfg: ConeConfig) -> ConeEstimate:
    diagnostics = [direction_set_distance(a, b) for a, b in zip(tiers, tiers[1:])]
    accepted = tiers[-1]
    converged = bool(diagnostics[-1] <= cfg.stability_tol) if diagnostics else True
    symmetric = _is_antipodally_symmetric(accepted, cfg.bin_resolution)
    fitted = None
    dim_estimate = -1
    cover_tol = max(3.0 * cfg.bin_resolution, cfg.stability_tol)
    if len(accepted) == 0:
        # no set points at the finest scale: the cone is the origin
        dim_estimate = 0
        fitted = None
    elif symmetric:
        sub, residual = fit_subspace(accepted, max_dim=base.shape[0],
                                     gap_threshold=0.05)
        if (residual <= 2.0 * cfg.bin_resolution and sub.dim > 0
                and _sphere_cover_gap(sub, accepted) <= cover_tol):
            fitted = (sub, residual)
            dim_estimate = sub.dim
    return ConeEstimate(kind=kind, base=base, per_tier_directions=tiers,
                        directions=accepted, fitted=fitted,
                        dim_estimate=dim_estimate, converged=converged,
                        diagnostics=diagnostics, symmetric=symmetric)


def estimate_tangent_cone(oracle: SetOracle, x, cfg: ConeConfig) -> ConeEstimate:
    """Estimate the tangent cone of X at x as a set of unit directions.

    Per tier j, samples X inside the ball of radius r0*rho^j and records the
    unit secants from x; points within 1e-12 of x are dropped.  An isolated
    base point (no samples at the finest tier) yields the empty direction
    set with dim_estimate 0.  A subspace is fitted only when the accepted
    set is antipodally symmetric (a half-line must not be flattened into a
    line) and the fit residual is below two bin diameters.
    """
    x = np.asarray(x, dtype=float).reshape(oracle.ambient_dim)
    tiers = []
    for j, r in enumerate(cfg.radii):
        pts = oracle.sample(x, float(r), cfg.m, derive_seed(cfg.seed, 101, j))
        dirs = _secant_directions(pts, x)
        tiers.append(_bin_directions(dirs, cfg.bin_resolution))
    return _finalize("tangent", x, tiers, cfg)


def estimate_paratangent_cone(oracle: SetOracle, x, cfg: ConeConfig,
                              resample_points: int = 32,
                              resample_ladder: int = 8,
                              resample_pairs: int = 16) -> ConeEstimate:
    """Estimate the paratangent cone of X at x.

    Per tier the estimator records, with both signs:
      * secants from the base to every tier sample (the constant pair
        sequence y_i = x, which embeds the tangent directions);
      * secants between independent sample pairs;
      * matched-scale secants: for a subset of samples p, X is resampled in
        balls B(p, s) over the geometric ladder s = 4 r_j^2 * 2^{-i}.  Pairs
        on distinct sheets or branches separated by O(r^2) live at those
        scales and are invisible to independent pairing; spacing the scales
        geometrically spreads the secant angles evenly instead of
        clustering them at one scale.

    The full ladder budget is spent on the last three tiers, which decide
    the accepted set and the convergence flag; earlier tiers, which only
    feed the diagnostics, use a quarter of it.  Tier samples reuse the
    tangent estimator's seeds, so on a fixed oracle and config the tangent
    direction set is a subset of the paratangent one by construction, as in
    the defining limit.
    """
    x = np.asarray(x, dtype=float).reshape(oracle.ambient_dim)
    tiers = []
    n_tiers = cfg.tiers
    for j, r in enumerate(cfg.radii):
        r = float(r)
        pts = oracle.sample(x, r, cfg.m, derive_seed(cfg.seed, 101, j))
        dirs = [_secant_directions(pts, x)]
        decisive = j >= n_tiers - 3
        if len(pts) >= 2:
            rng = np.random.default_rng(derive_seed(cfg.seed, 202, j))
            n_pairs = 3 * cfg.m if decisive else cfg.m
            ii = rng.integers(0, len(pts), size=n_pairs)
            jj = rng.integers(0, len(pts), size=n_pairs)
            keep = ii != jj
            diff = pts[ii[keep]] - pts[jj[keep]]
            norms = np.linalg.norm(diff, axis=1)
            ok = norms >= COINCIDENT_TOL
            dirs.append(diff[ok] / norms[ok, None])
        n_re = resample_points if decisive else max(resample_points // 4, 4)
        levels = resample_ladder if decisive else max(resample_ladder // 2, 2)
        if len(pts) >= 1:
            n_re = min(n_re, len(pts))
            stride = max(1, len(pts) // n_re)
            for t in range(0, n_re * stride, stride):
                p = pts[t]
                for lvl in range(levels):
                    s = 4.0 * r * r * 2.0 ** (-lvl)
                    if s < COINCIDENT_TOL:
                        break
                    near = oracle.sample(p, s, resample_pairs,
                                         derive_seed(cfg.seed, 303, j, t, lvl))
                    if len(near):
                        dirs.append(_secant_directions(near, p))
        all_dirs = np.concatenate([d for d in dirs if len(d)], axis=0) \
            if any(len(d) for d in dirs) else np.zeros((0, oracle.ambient_dim))
        both_signs = np.concatenate([all_dirs, -all_dirs], axis=0)
        tiers.append(_bin_directions(both_signs, cfg.bin_resolution))
    est = _finalize("paratangent", x, tiers, cfg)
    return est


def cones_coincide(tg: ConeEstimate, ptg: ConeEstimate,
                   tol: float) -> tuple[bool, np.ndarray]:
    """Whether the two estimated cones agree within tol (Hausdorff distance
    between direction sets), plus the excess paratangent directions farther
    than tol from every tangent direction (the numeric witnesses when the
    answer is no)."""
    if tg.kind != "tangent" or ptg.kind != "paratangent":
        raise ContractViolation("expected a (tangent, paratangent) pair")
    if not np.allclose(tg.base, ptg.base, atol=1e-12):
        raise ContractViolation("cone estimates have different base points")
    if not (tg.converged and ptg.converged):
        raise UnconvergedEstimate(
            "cone estimates did not converge; coincidence is inconclusive")
    dist = direction_set_distance(tg.directions, ptg.directions)
    if len(ptg.directions) == 0:
        return True, np.zeros((0, tg.base.shape[0]))
    if len(tg.directions) == 0:
        return False, ptg.directions.copy()
    sq = (np.sum(ptg.directions ** 2, axis=1)[:, None]
          + np.sum(tg.directions ** 2, axis=1)[None, :]
          - 2.0 * ptg.directions @ tg.directions.T)
    min_dist = np.sqrt(np.maximum(sq, 0.0)).min(axis=1)
    excess = ptg.directions[min_dist > tol]
    return bool(dist <= tol), excess


def with_seed(cfg: ConeConfig, seed: int) -> ConeConfig:
    return replace(cfg, seed=seed)
