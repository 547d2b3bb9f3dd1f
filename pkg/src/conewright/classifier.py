"""C1-manifold classification over probe grids, with numeric witnesses.

Three verdict procedures are implemented, one per characterization:

  * two-cones: the set is a C1 manifold iff the tangent and paratangent
    cones coincide at every point (for connected, locally closed, definable
    sets); a strict excess paratangent direction is the witness.
  * projection: iff the tangent bundle is a continuous trivial bundle and
    the orthogonal projection onto each tangent space is locally injective;
    a projection collision pair is the witness.
  * density: the trivial continuous bundle plus density < 3/2 everywhere is
    *sufficient*; a density at or above 3/2 only voids the hypothesis, so it
    is reported as a distinct witness on an inconclusive verdict rather
    than as a non-manifold verdict.

Connectedness and local closedness are caller-declared flags echoed into
reports; no finite procedure can verify them, and the verdicts are unsound
without them (the corpus carries two such counterexamples).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import derive_seed
from .cones import (
    ConeConfig,
    ConeEstimate,
    cones_coincide,
    estimate_paratangent_cone,
    estimate_tangent_cone,
)
from .density import estimate_density
from .errors import ContractViolation, ResourceLimit
from .grassmann import Subspace, grassmann_delta
from .setmodel import SetOracle


@dataclass
class ProbeGrid:
    """Finite stand-in for "for every x in X": sampled probes plus all of
    the oracle's special points (which come first)."""

    points: list[np.ndarray]
    adjacency: list[tuple[int, int]]
    eta: float


def build_probe_grid(oracle: SetOracle, count: int = 64, seed: int = 0,
                     grid_radius: float | None = None) -> ProbeGrid:
    """Probes = special points + a coarse-scale sample, deduplicated;
    adjacency links pairs within eta = 2x the median nearest-neighbor
    spacing."""
    radius = grid_radius if grid_radius is not None else 1.2 * oracle.scale
    raw = (oracle.sample(oracle.anchor, radius, count, derive_seed(seed, 401))
           if count > 0 else np.zeros((0, oracle.ambient_dim)))
    pts: list[np.ndarray] = [p.copy() for p in oracle.special_points]
    for p in raw:
        if all(np.linalg.norm(p - q) > 1e-9 for q in pts):
            pts.append(p)
    if not pts:
        raise ContractViolation("probe grid is empty: the sampler found no points")
    arr = np.array(pts)
    if len(arr) >= 2:
        d2 = np.linalg.norm(arr[:, None, :] - arr[None, :, :], axis=2)
        np.fill_diagonal(d2, np.inf)
        eta = 2.0 * float(np.median(d2.min(axis=1)))
    else:
        eta = oracle.scale
    adjacency = [(i, j) for i in range(len(arr)) for j in range(i + 1, len(arr))
                 if np.linalg.norm(arr[i] - arr[j]) <= eta]
    return ProbeGrid(points=list(arr), adjacency=adjacency, eta=eta)


# ---------------------------------------------------------------------------
# witnesses and verdicts


@dataclass
class Witness:
    kind: str  # paratangent_excess | projection_collision | non_subspace_cone
    #          # | dimension_jump | density_at_least
    point: np.ndarray
    data: dict = field(default_factory=dict)


@dataclass
class Verdict:
    outcome: str  # "c1_manifold" | "not_c1" | "inconclusive"
    k: int | None = None
    witness: Witness | None = None
    reason: str = ""
    evidence: dict = field(default_factory=dict)

    @property
    def is_c1(self) -> bool:
        return self.outcome == "c1_manifold"


# ---------------------------------------------------------------------------
# bundle diagnostics


@dataclass
class BundleReport:
    per_probe: list[tuple[np.ndarray, ConeEstimate]]
    trivial: bool
    k: int | None
    continuity_modulus: float
    dim_semicontinuity_violations: list[tuple[int, int]]
    converged_fraction: float
    inconclusive: bool
    reason: str = ""


def bundle_report(oracle: SetOracle, grid: ProbeGrid, cfg: ConeConfig,
                  kind: str = "tangent",
                  estimates: dict[int, ConeEstimate] | None = None) -> BundleReport:
    """Per-probe cone estimates with triviality, continuity-modulus, and
    dimension-semicontinuity diagnostics.

    The report is inconclusive when fewer than 90% of probes produced a
    converged cone estimate; unconverged probes are excluded from the
    triviality and continuity statistics.
    """
    if not grid.points:
        raise ContractViolation("probe grid is empty")
    estimator = estimate_tangent_cone if kind == "tangent" else estimate_paratangent_cone
    per_probe = []
    for i, p in enumerate(grid.points):
        if estimates is not None and i in estimates:
            est = estimates[i]
        else:
            est = estimator(oracle, p, _probe_cfg(cfg, i))
            if estimates is not None:
                estimates[i] = est
        per_probe.append((p, est))
    converged = [i for i, (_, e) in enumerate(per_probe) if e.converged]
    frac = len(converged) / len(per_probe)
    inconclusive = frac < 0.9
    fitted = {i: per_probe[i][1].fitted[0] for i in converged
              if per_probe[i][1].fitted is not None}
    dims = {i: per_probe[i][1].dim_estimate for i in converged}
    trivial = (not inconclusive and len(fitted) == len(converged) > 0
               and len({s.dim for s in fitted.values()}) == 1)
    k = fitted[next(iter(fitted))].dim if trivial else None
    modulus = 0.0
    finest = float(cfg.radii[-1])
    violations = []
    for (i, j) in grid.adjacency:
        if i in fitted and j in fitted:
            dist = float(np.linalg.norm(per_probe[i][0] - per_probe[j][0]))
            if dist > 1e-12 and fitted[i].dim == fitted[j].dim:
                modulus = max(modulus, grassmann_delta(fitted[i], fitted[j]) / dist)
        if i in dims and j in dims:
            dist = float(np.linalg.norm(per_probe[i][0] - per_probe[j][0]))
            if dist < finest:
                lo, hi = (i, j) if dims[i] < dims[j] else (j, i)
                if dims[hi] > dims[lo] >= 0:
                    violations.append((lo, hi))
    return BundleReport(per_probe=per_probe, trivial=trivial, k=k,
                        continuity_modulus=modulus,
                        dim_semicontinuity_violations=violations,
                        converged_fraction=frac, inconclusive=inconclusive,
                        reason=("" if not inconclusive else
                                f"only {frac:.0%} of probes converged"))


def _probe_cfg(cfg: ConeConfig, probe_idx: int) -> ConeConfig:
    from dataclasses import replace
    return replace(cfg, seed=derive_seed(cfg.seed, 500, probe_idx))


def _bundle_failure_witness(br: BundleReport) -> Witness | None:
    converged = [(i, e) for i, (_, e) in enumerate(br.per_probe) if e.converged]
    for i, e in converged:
        if e.fitted is None and e.dim_estimate != 0:
            return Witness("non_subspace_cone", br.per_probe[i][0],
                           {"residual_directions": len(e.directions)})
    dims = sorted({e.dim_estimate for _, e in converged})
    if len(dims) > 1:
        by_dim = {e.dim_estimate: i for i, e in converged}
        i, j = by_dim[dims[0]], by_dim[dims[-1]]
        return Witness("dimension_jump", br.per_probe[i][0],
                       {"other_point": br.per_probe[j][0],
                        "dims": (dims[0], dims[-1])})
    return None


# ---------------------------------------------------------------------------
# projection injectivity


def _refine_collision(oracle: SetOracle, p: np.ndarray, q0: np.ndarray,
                      x: np.ndarray, basis: np.ndarray, seed: int,
                      rel_target: float = 1e-4, max_rounds: int = 30
                      ) -> tuple[np.ndarray, float, float, float] | None:
    """Drive a candidate pair toward an exact fiber collision.

    Starting from q0, repeatedly resample the set in a shrinking ball around
    q and keep the point whose projection best matches p's.  On a genuine
    second sheet the projection gap contracts geometrically while the pair
    separation stays put; on a single sheet the minimizer slides into p and
    the separation guard (pair separation >= 10x the finest ball probed)
    fails.  Returns (q, gap, separation, s_final) or None.
    """
    pi_p = (p - x) @ basis.T
    q = q0
    gap = float(np.linalg.norm((q - x) @ basis.T - pi_p))
    sep = float(np.linalg.norm(p - q))
    s = max(4.0 * gap, 1e-12)
    stall = 0
    for it in range(max_rounds):
        near = oracle.sample(q, s, 48, derive_seed(seed, 601, it))
        if len(near):
            gaps = np.linalg.norm((near - x) @ basis.T - pi_p, axis=1)
            best = int(np.argmin(gaps))
            if gaps[best] < gap:
                q = near[best]
                new_gap = float(gaps[best])
                stall = stall + 1 if new_gap > 0.7 * gap else 0
                gap = new_gap
            else:
                stall += 1
        else:
            stall += 1
        sep = float(np.linalg.norm(p - q))
        # success requires the separation to dwarf the finest scale probed;
        # a same-sheet candidate sliding into p keeps gap/sep ~ 1 instead
        # and stalls out
        if gap <= rel_target * sep and sep >= 10.0 * s:
            return q, gap, sep, s
        if stall >= 3:
            return None
        s = max(4.0 * gap, 1e-13)
    return None


def check_projection_injectivity(oracle: SetOracle, x, tg: Subspace, r: float,
                                 m: int = 600, seed: int = 0
                                 ) -> tuple[bool, dict | None]:
    """Evidence that the projection of X onto x + tg is injective near x.

    Samples X in balls of radius r, r/2, r/4 around x, screens sample pairs
    whose projections are anomalously close relative to their separation,
    and refines survivors toward exact collisions.  A reported collision
    (p, q) satisfies ||proj(p) - proj(q)|| <= 1e-3 ||p - q|| with the pair
    separation at least 10x the finest sampling scale probed, separating
    genuine double sheets from discretization jitter.  True means no
    collision was found at any of the three radii.
    """
    x = np.asarray(x, dtype=float).reshape(oracle.ambient_dim)
    basis = tg.basis
    for level in range(3):
        radius = r / 2 ** level
        pts = oracle.sample(x, radius, m, derive_seed(seed, 600, level))
        if len(pts) < 2:
            continue
        proj = (pts - x) @ basis.T
        d_proj = np.linalg.norm(proj[:, None, :] - proj[None, :, :], axis=2)
        d_full = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        iu = np.triu_indices(len(pts), k=1)
        rel = d_proj[iu] / np.maximum(d_full[iu], 1e-300)
        sep_ok = d_full[iu] > 1e-9 * max(1.0, float(np.linalg.norm(x)))
        cand = np.nonzero((rel <= 0.3) & sep_ok)[0]
        if len(cand) == 0:
            continue
        order = cand[np.argsort(rel[cand], kind="stable")][:6]
        for ci in order:
            i, j = iu[0][ci], iu[1][ci]
            hit = _refine_collision(oracle, pts[i], pts[j], x, basis,
                                    derive_seed(seed, 602, level, int(ci)))
            if hit is not None:
                q, gap, sep, s_final = hit
                return False, {"p": pts[i], "q": q, "fiber_gap": gap,
                               "separation": sep, "resolution": s_final,
                               "radius": radius}
    return True, None


def check_openness(oracle: SetOracle, x, tg: Subspace, r: float,
                   grid_res: float, m: int = 8192, seed: int = 0) -> bool:
    """Coverage diagnostic: do projections of X from B(x, r) fill a grid of
    resolution grid_res on the ball of radius r/4 inside the tangent space?
    False means coverage was not demonstrated (not a disproof)."""
    x = np.asarray(x, dtype=float).reshape(oracle.ambient_dim)
    k = tg.dim
    if k == 0:
        return False
    n_cells_axis = int(np.ceil((r / 2) / grid_res))
    if n_cells_axis ** k > 1e6:
        raise ResourceLimit("openness grid would exceed 1e6 cells")
    pts = oracle.sample(x, r, m, derive_seed(seed, 700))
    if len(pts) == 0:
        return False
    proj = (pts - x) @ tg.basis.T
    occupied = {tuple(c) for c in np.floor(proj / grid_res).astype(np.int64)}
    # visit every cell whose center lies safely inside the r/4 ball
    ranges = [np.arange(-n_cells_axis, n_cells_axis + 1)] * k
    mesh = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, k)
    centers = (mesh + 0.5) * grid_res
    inside = np.linalg.norm(centers, axis=1) <= r / 4 - grid_res * math.sqrt(k) / 2
    for cell in mesh[inside]:
        if tuple(cell) not in occupied:
            return False
    return True


# ---------------------------------------------------------------------------
# verdict procedures


def classify_two_cones(oracle: SetOracle, grid: ProbeGrid, cfg: ConeConfig,
                       tol: float = 0.1) -> Verdict:
    """Tangent/paratangent coincidence at every probe.

    Any probe with an excess paratangent direction yields not-C1 with that
    direction as witness; full coincidence with full convergence yields
    C1(k) with k the modal fitted paratangent dimension.  Mixed convergence
    is inconclusive.  Soundness presumes the oracle's declared connectedness
    and local closedness and, as the corpus counterexamples document,
    definability.
    """
    unconverged = 0
    dims = []
    for i, p in enumerate(grid.points):
        pcfg = _probe_cfg(cfg, i)
        tg = estimate_tangent_cone(oracle, p, pcfg)
        ptg = estimate_paratangent_cone(oracle, p, pcfg)
        if not (tg.converged and ptg.converged):
            unconverged += 1
            continue
        same, excess = cones_coincide(tg, ptg, tol)
        if not same:
            worst = _farthest_excess(excess, tg.directions)
            return Verdict("not_c1",
                           witness=Witness("paratangent_excess", p,
                                           {"direction": worst,
                                            "n_excess": len(excess),
                                            "excess_sample": excess[:512]}),
                           reason="paratangent directions exceed the tangent cone",
                           evidence={"probe_index": i})
        if ptg.fitted is not None:
            dims.append(ptg.fitted[0].dim)
    if unconverged:
        return Verdict("inconclusive",
                       reason=f"{unconverged}/{len(grid.points)} probes unconverged")
    if not dims:
        return Verdict("inconclusive", reason="no probe produced a fitted cone")
    k = int(np.bincount(dims).argmax())
    return Verdict("c1_manifold", k=k,
                   reason="tangent and paratangent cones coincide at every probe")


def _farthest_excess(excess: np.ndarray, tg_dirs: np.ndarray) -> np.ndarray:
    if len(tg_dirs) == 0:
        return excess[0]
    sq = (np.sum(excess ** 2, axis=1)[:, None] + np.sum(tg_dirs ** 2, axis=1)[None, :]
          - 2.0 * excess @ tg_dirs.T)
    return excess[int(np.sqrt(np.maximum(sq, 0)).min(axis=1).argmax())]


def classify_projection(oracle: SetOracle, grid: ProbeGrid, cfg: ConeConfig,
                        inj_samples: int = 600,
                        estimates: dict[int, ConeEstimate] | None = None) -> Verdict:
    """Trivial continuous tangent bundle plus locally injective projections.

    A collision at any probe is a not-C1 witness; a non-trivial bundle is
    inconclusive evidence (the cone at some probe is not a subspace or the
    dimension jumps)."""
    br = bundle_report(oracle, grid, cfg, "tangent", estimates)
    if br.inconclusive:
        return Verdict("inconclusive", reason=br.reason)
    if not br.trivial:
        w = _bundle_failure_witness(br)
        return Verdict("inconclusive", witness=w,
                       reason="tangent bundle is not a trivial subspace bundle")
    r_inj = cfg.r0 * cfg.rho ** 2
    for i, (p, est) in enumerate(br.per_probe):
        if est.fitted is None:
            continue
        ok, collision = check_projection_injectivity(
            oracle, p, est.fitted[0], r_inj, m=inj_samples,
            seed=derive_seed(cfg.seed, 800, i))
        if not ok:
            return Verdict("not_c1",
                           witness=Witness("projection_collision", p, collision),
                           reason="projection onto the tangent space is 2-to-1",
                           evidence={"probe_index": i})
    return Verdict("c1_manifold", k=br.k,
                   reason="trivial continuous bundle with injective projections")


def classify_density(oracle: SetOracle, grid: ProbeGrid, cfg: ConeConfig,
                     n_mc: int = 4096, schedule=None,
                     estimates: dict[int, ConeEstimate] | None = None) -> Verdict:
    """Trivial continuous tangent bundle plus density < 3/2 at every probe.

    The criterion is sufficient only: a probe with density >= 3/2 - margin
    (margin = 2x Monte Carlo stderr + 0.05) voids the hypothesis and is
    reported as a density_at_least witness on an inconclusive outcome, never
    as a non-manifold verdict."""
    br = bundle_report(oracle, grid, cfg, "tangent", estimates)
    if br.inconclusive:
        return Verdict("inconclusive", reason=br.reason)
    if not br.trivial:
        w = _bundle_failure_witness(br)
        return Verdict("inconclusive", witness=w,
                       reason="tangent bundle is not a trivial subspace bundle")
    if not math.isfinite(br.continuity_modulus):
        return Verdict("inconclusive", reason="continuity modulus unbounded")
    k = br.k
    for i, (p, _) in enumerate(br.per_probe):
        est = estimate_density(oracle, p, k, schedule=schedule, n_mc=n_mc,
                               seed=derive_seed(cfg.seed, 900, i), kind="density")
        margin = 2.0 * est.stderr + 0.05
        if est.value >= 1.5 - margin:
            return Verdict("inconclusive",
                           witness=Witness("density_at_least", p,
                                           {"value": est.value,
                                            "stderr": est.stderr}),
                           reason="density >= 3/2 voids the sufficient criterion",
                           evidence={"probe_index": i})
    return Verdict("c1_manifold", k=k,
                   reason="trivial continuous bundle with all densities < 3/2")


MODES = {
    "two_cones": classify_two_cones,
    "projection": classify_projection,
    "density": classify_density,
}


def classify(oracle: SetOracle, grid: ProbeGrid, cfg: ConeConfig, mode: str,
             **kwargs) -> Verdict:
    if mode not in MODES:
        raise ContractViolation(f"unknown classifier mode {mode!r}")
    return MODES[mode](oracle, grid, cfg, **kwargs)
