"""Built-in corpus of example sets with ground-truth annotations.

Each entry packages an oracle together with the checks the corpus runner
verifies against it.  Every annotation carries a provenance tag:
[PAPER] for values taken from the source material's worked examples,
[TRIVIAL] for values forced analytically, [DERIVED] for values computed by
an independent oracle (the derivation is noted inline).

The sets here are desk-scale stand-ins for exact infinite objects; each
entry documents its truncation in ``oracle.caveats`` together with the
radius range on which the annotations are trusted.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .setmodel import (
    Chart,
    SetOracle,
    make_chart_sampler,
    make_finite_sampler,
    make_implicit_sampler,
    mixture_sampler,
)

TWO_PI = 2.0 * np.pi

#: truncation index for the convergent-sequence set
SEQ_Y_MAX_N = 10 ** 6

#: the sin(1/x) curve is represented for |x| >= this cutoff
SIN1X_XMIN = 1e-5


@dataclass(frozen=True)
class GroundTruth:
    """One runnable corpus check."""

    check: str
    params: dict
    tag: str
    note: str = ""


@dataclass
class CorpusEntry:
    name: str
    oracle: SetOracle
    ground_truth: list[GroundTruth]
    run_cfg: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# window helpers


def _wrap_interval(center: float, half: float, lo: float = -np.pi,
                   hi: float = np.pi) -> list[list[float]]:
    """Intervals covering [center-half, center+half] modulo the period."""
    period = hi - lo
    if half >= period / 2:
        return [[lo, hi]]
    c = (center - lo) % period + lo
    a, b = c - half, c + half
    out = []
    if a < lo:
        out.append([lo, b])
        out.append([a + period, hi])
    elif b > hi:
        out.append([a, hi])
        out.append([lo, b - period])
    else:
        out.append([a, b])
    return out


def _ring_halfwidth(r: float, rad_a: float, rad_b: float) -> float:
    """Angular halfwidth W such that two points on circles of radii rad_a,
    rad_b around the same axis must satisfy |angle difference| <= W to be
    within chord distance r (uses |a e^{is} - b e^{it}|^2 >= 4ab sin^2((s-t)/2))."""
    ab = rad_a * rad_b
    if ab <= 0:
        return np.pi
    x = 1.02 * r / (2.0 * np.sqrt(ab))
    if x >= 1.0:
        return np.pi
    return 2.0 * np.arcsin(x) + 1e-9


def _interval_boxes(int_lists: list[list[list[float]]]) -> list[np.ndarray]:
    """Cartesian product of per-axis interval lists into boxes."""
    boxes = [[]]
    for axis in int_lists:
        boxes = [b + [iv] for b in boxes for iv in axis]
    return [np.array(b, dtype=float) for b in boxes]


# ---------------------------------------------------------------------------
# smooth controls: k-plane, circle, sphere


def _axis_plane_entry(name: str, k: int, n: int, half: float = 1.5) -> CorpusEntry:
    """The coordinate k-plane {x_{k+1} = ... = x_n = 0}, clipped to a box."""

    def map_fn(u):
        pts = np.zeros((len(u), n))
        pts[:, :k] = u
        return pts

    def jacobian(u):
        J = np.zeros((len(u), n, k))
        for j in range(k):
            J[:, j, j] = 1.0
        return J

    def window_fn(center, r):
        ints = [[[center[j] - r, center[j] + r]] for j in range(k)]
        return _interval_boxes(ints)

    chart = Chart(k, [[-half, half]] * k, map_fn, jacobian=jacobian,
                  jac_vol_fn=lambda u: np.ones(len(u)), window_fn=window_fn)

    def membership(pts, tau):
        off = np.linalg.norm(pts[:, k:], axis=1) if k < n else np.zeros(len(pts))
        inside = np.max(np.abs(pts[:, :k]), axis=1) <= half + tau
        return (off <= tau) & inside

    oracle = SetOracle(
        name=name, ambient_dim=n, intrinsic_dim=k,
        membership_fn=membership,
        sampler_fn=make_chart_sampler([chart], n),
        charts=[chart],
        special_points=[np.zeros(n)],
        kind="chart",
        caveats=[f"the infinite {k}-plane is clipped to |x_i| <= {half}; "
                 "annotations are trusted for radii <= 0.5"],
    )
    gt = [
        GroundTruth("tangent_subspace", {"point": [0.0] * n,
                                         "basis": np.eye(n)[:k].tolist(), "tol": 0.02},
                    "[TRIVIAL]", "tangent cone of a plane is the plane"),
        GroundTruth("density", {"point": [0.0] * n, "k": k, "expected": 1.0, "tol": 0.05},
                    "[TRIVIAL]", "flat set has unit density"),
        GroundTruth("verdict", {"mode": "two_cones", "expected": "c1_manifold", "k": k},
                    "[TRIVIAL]"),
        GroundTruth("verdict", {"mode": "projection", "expected": "c1_manifold", "k": k},
                    "[TRIVIAL]"),
        GroundTruth("verdict", {"mode": "density", "expected": "c1_manifold", "k": k},
                    "[TRIVIAL]"),
    ]
    return CorpusEntry(name, oracle, gt, run_cfg={"probe_count": 64})


def _circle_entry() -> CorpusEntry:
    def map_fn(u):
        t = u[:, 0]
        return np.stack([np.cos(t), np.sin(t)], axis=1)

    def jacobian(u):
        t = u[:, 0]
        return np.stack([-np.sin(t), np.cos(t)], axis=1)[:, :, None]

    def window_fn(center, r):
        nc = float(np.linalg.norm(center))
        if nc < 0.3:
            return None
        x = 1.02 * r / (2.0 * np.sqrt(nc))
        if x >= 1.0:
            return None
        half = 2.0 * np.arcsin(x) + 1e-9
        theta = float(np.arctan2(center[1], center[0]))
        return [np.array([iv]) for iv in _wrap_interval(theta, half)]

    chart = Chart(1, [[-np.pi, np.pi]], map_fn, jacobian=jacobian,
                  jac_vol_fn=lambda u: np.ones(len(u)), window_fn=window_fn)

    def membership(pts, tau):
        return np.abs(np.linalg.norm(pts, axis=1) - 1.0) <= tau

    oracle = SetOracle(
        name="circle", ambient_dim=2, intrinsic_dim=1,
        membership_fn=membership,
        sampler_fn=make_chart_sampler([chart], 2),
        charts=[chart],
        special_points=[np.array([1.0, 0.0])],
        kind="chart",
    )
    r_ex = 0.1
    arc = 4.0 * np.arcsin(r_ex / 2.0)  # two arcs of 2*arcsin(r/2) each
    gt = [
        GroundTruth("measure", {"point": [1.0, 0.0], "r": r_ex, "k": 1,
                                "expected": arc, "tol": 0.01},
                    "[DERIVED]", "closed-form arc length 4*arcsin(r/2)"),
        GroundTruth("density", {"point": [1.0, 0.0], "k": 1, "expected": 1.0, "tol": 0.05},
                    "[TRIVIAL]", "smooth curve has unit density"),
        GroundTruth("verdict", {"mode": "two_cones", "expected": "c1_manifold", "k": 1},
                    "[TRIVIAL]"),
        GroundTruth("verdict", {"mode": "projection", "expected": "c1_manifold", "k": 1},
                    "[TRIVIAL]"),
        GroundTruth("verdict", {"mode": "density", "expected": "c1_manifold", "k": 1},
                    "[TRIVIAL]"),
    ]
    return CorpusEntry("circle", oracle, gt, run_cfg={"probe_count": 64})


def _sphere_entry() -> CorpusEntry:
    def map_fn(u):
        th, ph = u[:, 0], u[:, 1]
        st = np.sin(th)
        return np.stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)], axis=1)

    def jacobian(u):
        th, ph = u[:, 0], u[:, 1]
        st, ct = np.sin(th), np.cos(th)
        J = np.empty((len(u), 3, 2))
        J[:, 0, 0] = ct * np.cos(ph)
        J[:, 1, 0] = ct * np.sin(ph)
        J[:, 2, 0] = -st
        J[:, 0, 1] = -st * np.sin(ph)
        J[:, 1, 1] = st * np.cos(ph)
        J[:, 2, 1] = 0.0
        return J

    def window_fn(center, r):
        nc = float(np.linalg.norm(center))
        if nc < 0.3:
            return None
        x = 1.02 * r / (2.0 * np.sqrt(nc))
        if x >= 1.0:
            return None
        gamma = 2.0 * np.arcsin(x) + 1e-9
        theta_c = float(np.arccos(np.clip(center[2] / nc, -1, 1)))
        th_lo = max(0.0, theta_c - gamma)
        th_hi = min(np.pi, theta_c + gamma)
        rc = float(np.hypot(center[0], center[1]))
        # sin is concave on [0, pi], so its minimum over the window is at an end
        sin_min = min(np.sin(th_lo), np.sin(th_hi))
        half = _ring_halfwidth(r, sin_min, rc)
        phi_c = float(np.arctan2(center[1], center[0]))
        return _interval_boxes([[[th_lo, th_hi]], _wrap_interval(phi_c, half)])

    chart = Chart(2, [[0.0, np.pi], [-np.pi, np.pi]], map_fn, jacobian=jacobian,
                  jac_vol_fn=lambda u: np.abs(np.sin(u[:, 0])), window_fn=window_fn)

    def membership(pts, tau):
        return np.abs(np.linalg.norm(pts, axis=1) - 1.0) <= tau

    oracle = SetOracle(
        name="sphere", ambient_dim=3, intrinsic_dim=2,
        membership_fn=membership,
        sampler_fn=make_chart_sampler([chart], 3),
        charts=[chart],
        special_points=[np.array([1.0, 0.0, 0.0])],
        kind="chart",
    )
    gt = [
        GroundTruth("density", {"point": [1.0, 0.0, 0.0], "k": 2, "expected": 1.0,
                                "tol": 0.05},
                    "[TRIVIAL]", "smooth surface has unit density"),
        GroundTruth("verdict", {"mode": "two_cones", "expected": "c1_manifold", "k": 2},
                    "[TRIVIAL]"),
        GroundTruth("verdict", {"mode": "projection", "expected": "c1_manifold", "k": 2},
                    "[TRIVIAL]"),
        GroundTruth("verdict", {"mode": "density", "expected": "c1_manifold", "k": 2},
                    "[TRIVIAL]"),
    ]
    return CorpusEntry("sphere", oracle, gt, run_cfg={"probe_count": 64})


# ---------------------------------------------------------------------------
# half-line


def _half_line_entry() -> CorpusEntry:
    def map_fn(u):
        return u.copy()

    def jacobian(u):
        return np.ones((len(u), 1, 1))

    def window_fn(center, r):
        return [np.array([[center[0] - r, center[0] + r]])]

    chart = Chart(1, [[0.0, 1.5]], map_fn, jacobian=jacobian,
                  jac_vol_fn=lambda u: np.ones(len(u)), window_fn=window_fn)

    def membership(pts, tau):
        x = pts[:, 0]
        return np.maximum.reduce([np.zeros_like(x), -x, x - 1.5]) <= tau

    oracle = SetOracle(
        name="half_line", ambient_dim=1, intrinsic_dim=1,
        membership_fn=membership,
        sampler_fn=make_chart_sampler([chart], 1),
        charts=[chart],
        special_points=[np.array([0.0])],
        anchor=np.array([0.6]),
        kind="chart",
        caveats=["[0, oo) clipped to [0, 1.5]; annotations trusted for radii <= 0.4"],
    )
    gt = [
        GroundTruth("density", {"point": [0.0], "k": 1, "expected": 0.5, "tol": 0.05},
                    "[PAPER]", "a half k-plane contributes density 1/2"),
        GroundTruth("verdict", {"mode": "two_cones", "expected": "not_c1",
                                "witness": "paratangent_excess"},
                    "[TRIVIAL]",
                    "tangent cone at the endpoint is one-sided; the pair cone is two-sided"),
    ]
    return CorpusEntry("half_line", oracle, gt,
                       run_cfg={"probe_count": 12, "grid_radius": 0.55})


# ---------------------------------------------------------------------------
# parabola-plus-line (density exactly 3/2 at the origin)


def _parabola_line_entry() -> CorpusEntry:
    def line_map(u):
        return np.stack([u[:, 0], np.zeros(len(u))], axis=1)

    def line_jac(u):
        J = np.zeros((len(u), 2, 1))
        J[:, 0, 0] = 1.0
        return J

    def line_window(center, r):
        return [np.array([[center[0] - r, center[0] + r]])]

    line = Chart(1, [[-1.5, 1.5]], line_map, jacobian=line_jac,
                 jac_vol_fn=lambda u: np.ones(len(u)), window_fn=line_window)

    def par_map(u):
        t = u[:, 0]
        return np.stack([t, t * t], axis=1)

    def par_jac(u):
        t = u[:, 0]
        J = np.empty((len(u), 2, 1))
        J[:, 0, 0] = 1.0
        J[:, 1, 0] = 2.0 * t
        return J

    def par_window(center, r):
        return [np.array([[center[0] - r, center[0] + r]])]

    par = Chart(1, [[0.0, 1.1]], par_map, jacobian=par_jac,
                jac_vol_fn=lambda u: np.sqrt(1.0 + 4.0 * u[:, 0] ** 2),
                window_fn=par_window)

    def membership(pts, tau):
        x, y = pts[:, 0], pts[:, 1]
        on_line = (np.abs(y) <= tau) & (np.abs(x) <= 1.5 + tau)
        on_par = (x >= -tau) & (x <= 1.1 + tau) & \
            (np.abs(y - x * x) <= tau * np.sqrt(1.0 + 4.0 * x * x))
        return on_line | on_par

    oracle = SetOracle(
        name="parabola_line", ambient_dim=2, intrinsic_dim=1,
        membership_fn=membership,
        sampler_fn=make_chart_sampler([line, par], 2),
        charts=[line, par],
        special_points=[np.zeros(2)],
        kind="union",
        caveats=["clipped to |x| <= 1.5; annotations trusted for radii <= 0.4"],
    )
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    gt = [
        GroundTruth("density", {"point": [0.0, 0.0], "k": 1, "expected": 1.5, "tol": 0.1},
                    "[PAPER]", "line diameter (1) plus one half-parabola arm (1/2)"),
        GroundTruth("bundle_trivial", {"k": 1}, "[DERIVED]",
                    "all tangent cones fit 1-dimensional subspaces; "
                    "checked against analytic tangent lines"),
        GroundTruth("verdict", {"mode": "two_cones", "expected": "not_c1",
                                "witness": "paratangent_excess",
                                "excess_near": [inv_sqrt2, inv_sqrt2],
                                "excess_tol": 0.1},
                    "[DERIVED]",
                    "pairs p=(t,t^2), q=(t-t^2,0) give the direction (1,1)/sqrt(2) "
                    "as t->0; evaluated at t=1e-4 the secant is within 1e-4 of it"),
        GroundTruth("verdict", {"mode": "density", "expected": "inconclusive",
                                "witness": "density_at_least"},
                    "[PAPER]",
                    "density 3/2 at the origin breaks the sufficient condition; "
                    "the criterion reports the hypothesis failure, not a verdict"),
    ]
    return CorpusEntry("parabola_line", oracle, gt,
                       run_cfg={"probe_count": 24, "grid_seed": 5})


# ---------------------------------------------------------------------------
# the hairy graph: graph of h(z) = z^2 / |z|^{3/2} in R^4


def _hairy_map(u):
    rho, phi = u[:, 0], u[:, 1]
    srho = np.sqrt(rho)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi),
                     srho * np.cos(2 * phi), srho * np.sin(2 * phi)], axis=1)


def _hairy_jacobian(u):
    rho, phi = u[:, 0], u[:, 1]
    srho = np.sqrt(rho)
    inv = 0.5 / np.maximum(srho, 1e-300)
    J = np.empty((len(u), 4, 2))
    J[:, 0, 0] = np.cos(phi)
    J[:, 1, 0] = np.sin(phi)
    J[:, 2, 0] = inv * np.cos(2 * phi)
    J[:, 3, 0] = inv * np.sin(2 * phi)
    J[:, 0, 1] = -rho * np.sin(phi)
    J[:, 1, 1] = rho * np.cos(phi)
    J[:, 2, 1] = -2.0 * srho * np.sin(2 * phi)
    J[:, 3, 1] = 2.0 * srho * np.cos(2 * phi)
    return J


def _hairy_jac_vol(u):
    rho = u[:, 0]
    # Gram determinant of the polar parametrization: rho^2 + 17 rho/4 + 1
    return np.sqrt(rho * rho + 4.25 * rho + 1.0)


def _hairy_window(center, s):
    z_c = center[:2]
    w_c = center[2:]
    rho_c = float(np.linalg.norm(z_c))
    wc = float(np.linalg.norm(w_c))
    lo = max(0.0, rho_c - s, max(wc - s, 0.0) ** 2)
    hi = min(1.0, rho_c + s, (wc + s) ** 2)
    if hi <= lo:
        return []
    rho_iv = [[lo, hi]]
    if wc <= 2.0 * s or wc - s <= 0.0:
        return _interval_boxes([rho_iv, [[-np.pi, np.pi]]])
    # |sqrt(rho) e^{2 i phi} - w_c| <= s pins phi near arg(w_c)/2 modulo pi
    rho_lo4 = max(lo, (wc - s) ** 2)
    x = 1.05 * s / (2.0 * np.sqrt(np.sqrt(rho_lo4) * wc))
    if x >= 1.0:
        return _interval_boxes([rho_iv, [[-np.pi, np.pi]]])
    W = np.arcsin(x) + 1e-6
    alpha_half = 0.5 * float(np.arctan2(w_c[1], w_c[0]))
    phi_ivs = (_wrap_interval(alpha_half, W)
               + _wrap_interval(alpha_half + np.pi, W))
    return _interval_boxes([rho_iv, phi_ivs])


def _hairy_h(z_re, z_im):
    z = z_re + 1j * z_im
    rho = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(rho > 0, z * z / np.maximum(rho, 1e-300) ** 1.5, 0.0 + 0.0j)
    return h


def _hairy_entry() -> CorpusEntry:
    chart = Chart(2, [[0.0, 1.0], [-np.pi, np.pi]], _hairy_map,
                  jacobian=_hairy_jacobian, jac_vol_fn=_hairy_jac_vol,
                  window_fn=_hairy_window)

    def membership(pts, tau):
        z_re, z_im = pts[:, 0], pts[:, 1]
        w = pts[:, 2] + 1j * pts[:, 3]
        rho = np.hypot(z_re, z_im)
        h = _hairy_h(z_re, z_im)
        vert = np.abs(w - h)
        # the graph is steep: a vertical gap e means true distance >= e / sqrt(1+|Dh|^2)
        slope_sq = 4.0 / np.maximum(rho, 1e-300)
        vert_ok = vert <= tau * np.sqrt(1.0 + slope_sq)
        # horizontal bound: (z*(w), w) is on the graph with z*(w) = |w|^2 e^{i arg(w)/2}
        aw = np.abs(w)
        zs = np.where(aw > 0, (aw ** 2) * np.exp(0.5j * np.angle(w)), 0.0 + 0.0j)
        horiz = np.minimum(np.abs(z_re + 1j * z_im - zs), np.abs(z_re + 1j * z_im + zs))
        in_box = rho <= 1.0 + tau
        return in_box & (vert_ok | (horiz <= tau) | (vert <= tau))

    oracle = SetOracle(
        name="hairy_graph", ambient_dim=4, intrinsic_dim=2,
        membership_fn=membership,
        sampler_fn=make_chart_sampler([chart], 4),
        charts=[chart],
        special_points=[np.zeros(4)],
        kind="chart",
        caveats=["graph restricted to |z| <= 1; annotations trusted for radii <= 0.3"],
    )
    plane34 = np.eye(4)[2:].tolist()  # {z = 0}: span of the last two coordinates
    gt = [
        GroundTruth("tangent_subspace", {"point": [0.0] * 4, "basis": plane34,
                                         "tol": 0.05},
                    "[PAPER]", "the tangent cone at 0 is the plane {z=0}"),
        GroundTruth("bundle_trivial", {"k": 2}, "[PAPER]",
                    "the tangent bundle is a continuous trivial 2-bundle"),
        GroundTruth("verdict", {"mode": "projection", "expected": "not_c1",
                                "witness": "projection_collision"},
                    "[PAPER]", "h(z) = h(-z): projection onto {z=0} is 2-to-1"),
        GroundTruth("density", {"point": [0.0] * 4, "k": 2, "expected": 2.0, "tol": 0.2},
                    "[DERIVED]",
                    "area inside radius r is 2*pi*Int_0^{zmax} sqrt(1+17u/4+u^2) du with "
                    "zmax=(sqrt(1+4r^2)-1)/2, giving ratio -> 2 (the double sheet)"),
        GroundTruth("ptg_excess_directions",
                    {"point": [0.0] * 4, "tol": 0.2, "m": 1000,
                     "contains_direction_in_plane": [[1.0, 0, 0, 0], [0, 1.0, 0, 0]]},
                    "[DERIVED]",
                    "pairs ((z,h(z)), (-z,h(z))) give pair-cone directions in the "
                    "{h=0} plane at 0, so the two cones genuinely differ there "
                    "(consistent with the projection collision); the full "
                    "pair-direction family is 3-dimensional, so the two-cones "
                    "verdict stays inconclusive at desk sampling budgets while "
                    "the excess observation itself is sound"),
    ]
    return CorpusEntry("hairy_graph", oracle, gt,
                       run_cfg={"probe_count": 24, "grid_seed": 3})


# ---------------------------------------------------------------------------
# cusp surface z^4 = x^2 + y^2 (density 0 at 0, lower density infinite)


def _cusp_map(u):
    t, phi = u[:, 0], u[:, 1]
    t2 = t * t
    return np.stack([t2 * np.cos(phi), t2 * np.sin(phi), t], axis=1)


def _cusp_jacobian(u):
    t, phi = u[:, 0], u[:, 1]
    t2 = t * t
    J = np.empty((len(u), 3, 2))
    J[:, 0, 0] = 2 * t * np.cos(phi)
    J[:, 1, 0] = 2 * t * np.sin(phi)
    J[:, 2, 0] = 1.0
    J[:, 0, 1] = -t2 * np.sin(phi)
    J[:, 1, 1] = t2 * np.cos(phi)
    J[:, 2, 1] = 0.0
    return J


def _cusp_window(center, s):
    rho_c = float(np.hypot(center[0], center[1]))
    z_c = float(center[2])
    t_band = [z_c - s, z_c + s]
    lo_sq = max(0.0, rho_c - s)
    hi_sq = rho_c + s
    t_ivs = []
    for sign in (-1.0, 1.0):
        a = sign * np.sqrt(hi_sq)
        b = sign * np.sqrt(lo_sq)
        iv = [min(a, b), max(a, b)]
        lo = max(iv[0], t_band[0])
        hi = min(iv[1], t_band[1])
        if hi > lo:
            t_ivs.append([lo, hi])
    if not t_ivs:
        return []
    t_lo = np.sqrt(lo_sq)
    if t_lo * np.sqrt(rho_c) <= 0.55 * s:
        phi_ivs = [[-np.pi, np.pi]]
    else:
        half = _ring_halfwidth(s, t_lo * t_lo, rho_c)
        phi_c = float(np.arctan2(center[1], center[0]))
        phi_ivs = _wrap_interval(phi_c, half)
    return _interval_boxes([t_ivs, phi_ivs])


def _cusp_profile_distance(pts: np.ndarray) -> np.ndarray:
    """Distance to the surface of revolution with profile s = t^2, computed
    in the (cylindrical radius, height) half-plane by Newton iteration."""
    s0 = np.hypot(pts[:, 0], pts[:, 1])
    z0 = pts[:, 2]

    def phi_val(t):
        return (s0 - t * t) ** 2 + (z0 - t) ** 2

    best = None
    for t_start in (z0, np.sign(z0 + 1e-300) * np.sqrt(s0)):
        t = t_start.astype(float).copy()
        for _ in range(12):
            g = -4.0 * t * (s0 - t * t) - 2.0 * (z0 - t)
            h = -4.0 * s0 + 12.0 * t * t + 2.0
            t = t - g / np.maximum(np.abs(h), 1e-9) * np.sign(h)
        v = phi_val(t)
        best = v if best is None else np.minimum(best, v)
    return np.sqrt(np.maximum(best, 0.0))


def _cusp_entry() -> CorpusEntry:
    chart = Chart(2, [[-0.95, 0.95], [-np.pi, np.pi]], _cusp_map,
                  jacobian=_cusp_jacobian,
                  jac_vol_fn=lambda u: (u[:, 0] ** 2) * np.sqrt(1 + 4 * u[:, 0] ** 2),
                  window_fn=_cusp_window)

    def membership(pts, tau):
        return (_cusp_profile_distance(pts) <= tau) & \
            (np.abs(pts[:, 2]) <= 0.95 + tau)

    oracle = SetOracle(
        name="cusp", ambient_dim=3, intrinsic_dim=2,
        membership_fn=membership,
        sampler_fn=make_chart_sampler([chart], 3),
        charts=[chart],
        special_points=[np.zeros(3)],
        kind="implicit",
        definition={"implicit": "pow(x3,4) - pow(x1,2) - pow(x2,2)"},
        caveats=["surface clipped to |z| <= 0.95; annotations trusted for radii <= 0.3"],
    )
    gt = [
        GroundTruth("tangent_subspace", {"point": [0.0] * 3,
                                         "basis": [[0.0, 0.0, 1.0]], "tol": 0.05},
                    "[DERIVED]",
                    "secants (t^2 cos, t^2 sin, t)/|..| -> (0,0,±1) as t->0"),
        GroundTruth("density_below", {"point": [0.0] * 3, "k": 2, "bound": 0.2,
                                      "decreasing_tail": True},
                    "[PAPER]", "the 2-density at the cusp point vanishes"),
        GroundTruth("lower_density_infinite", {"point": [0.0] * 3, "k": 1},
                    "[PAPER]",
                    "the 1-measure of a genuinely 2-dimensional set diverges"),
    ]
    return CorpusEntry("cusp", oracle, gt, run_cfg={"probe_count": 16})


# ---------------------------------------------------------------------------
# coordinate cross xy = 0 (implicit; density 2 at the origin)


def _cross_entry() -> CorpusEntry:
    def f(pts):
        return pts[:, 0] * pts[:, 1]

    def grad(pts):
        return np.stack([pts[:, 1], pts[:, 0]], axis=1)

    def membership(pts, tau):
        near = np.minimum(np.abs(pts[:, 0]), np.abs(pts[:, 1])) <= tau
        return near & (np.max(np.abs(pts), axis=1) <= 1.5 + tau)

    oracle = SetOracle(
        name="cross", ambient_dim=2, intrinsic_dim=1,
        membership_fn=membership,
        sampler_fn=make_implicit_sampler(f, grad, 2),
        charts=[],
        special_points=[np.zeros(2)],
        kind="implicit",
        definition={"implicit": "x1*x2"},
        caveats=["clipped to |x|,|y| <= 1.5; annotations trusted for radii <= 0.4"],
    )
    gt = [
        GroundTruth("density", {"point": [0.0, 0.0], "k": 1, "expected": 2.0,
                                "tol": 0.1},
                    "[PAPER]", "additivity: two transverse diameters contribute 1 each"),
        GroundTruth("tangent_subspace", {"point": [0.5, 0.0],
                                         "basis": [[1.0, 0.0]], "tol": 0.02},
                    "[TRIVIAL]", "away from 0 the cross is locally one axis"),
        GroundTruth("verdict", {"mode": "two_cones", "expected": "not_c1",
                                "witness": "paratangent_excess"},
                    "[TRIVIAL]",
                    "pair directions at 0 fill the circle; tangent directions are "
                    "the four half-axes"),
        GroundTruth("verdict", {"mode": "projection", "expected": "inconclusive"},
                    "[TRIVIAL]", "the cone at 0 is not a subspace: bundle not trivial"),
    ]
    return CorpusEntry("cross", oracle, gt,
                       run_cfg={"probe_count": 16, "grid_seed": 2})


# ---------------------------------------------------------------------------
# closure of sin(1/x) minus the two segment endpoints (non-definable control)


def _sin1x_entry() -> CorpusEntry:
    def curve(sign):
        def map_fn(u):
            x = sign * u[:, 0]
            return np.stack([x, np.sin(1.0 / x)], axis=1)

        def jacobian(u):
            x = sign * u[:, 0]
            J = np.empty((len(u), 2, 1))
            J[:, 0, 0] = sign
            J[:, 1, 0] = sign * (-np.cos(1.0 / x) / (x * x))
            return J

        def window_fn(center, r):
            lo, hi = sorted((sign * (center[0] + r), sign * (center[0] - r)))
            lo, hi = max(lo, SIN1X_XMIN), min(hi, 1.0)
            if hi <= lo:
                return []
            plain = [np.array([[lo, hi]])]
            # away from the accumulation zone plain rejection is fine; near
            # x = 0 the height constraint |sin(1/u) - y0| <= r picks out thin
            # slivers around the crossings of sin, so those are enumerated,
            # strided within each u-octave (a representative subset of the
            # infinitely many branches: the oracle's documented truncation)
            if lo > 0.05 or r > 0.2:
                return plain
            y0 = sign * center[1]  # map y is sign * sin(1/u)
            if abs(y0) > 1.0 + 2.0 * r:
                return []
            pad = 1.3 * r
            cos0sq = max(0.0, 1.0 - y0 * y0)
            if cos0sq >= 2.5 * pad:
                dt = 1.3 * (np.sqrt(cos0sq) - np.sqrt(cos0sq - 2.5 * pad))
            else:
                dt = 1.8 * np.sqrt(pad)
            dt = min(np.pi / 2, dt)
            a = np.arcsin(np.clip(y0, -1, 1))
            ivs = []
            for octave in range(8):
                t_band_lo = (2.0 ** octave) / hi
                t_band_hi = (2.0 ** (octave + 1)) / hi
                if 1.0 / t_band_lo <= lo:
                    break
                k_lo = int(np.floor((t_band_lo - a) / (2 * np.pi)))
                k_hi = int(np.ceil((t_band_hi - a) / (2 * np.pi)))
                ks = np.unique(np.linspace(k_lo, k_hi, 48).astype(int))
                for k in ks:
                    for t0 in (a + 2 * np.pi * k, np.pi - a + 2 * np.pi * k):
                        if not (t_band_lo - np.pi <= t0 <= t_band_hi + np.pi):
                            continue
                        u_hi = 1.0 / max(t0 - dt, 1e-9)
                        u_lo = 1.0 / (t0 + dt)
                        bl, bh = max(u_lo, lo), min(u_hi, hi)
                        if bh > bl:
                            ivs.append((bl, bh))
            if not ivs:
                return plain
            # merge overlaps so the boxes partition their union
            ivs.sort()
            merged = [list(ivs[0])]
            for bl, bh in ivs[1:]:
                if bl <= merged[-1][1]:
                    merged[-1][1] = max(merged[-1][1], bh)
                else:
                    merged.append([bl, bh])
            return [np.array([iv]) for iv in merged]

        return Chart(1, [[SIN1X_XMIN, 1.0]], map_fn, jacobian=jacobian,
                     jac_vol_fn=lambda u: np.sqrt(
                         1.0 + np.cos(1.0 / (sign * u[:, 0])) ** 2 / (sign * u[:, 0]) ** 4),
                     window_fn=window_fn)

    def seg_map(u):
        return np.stack([np.zeros(len(u)), u[:, 0]], axis=1)

    def seg_jac(u):
        J = np.zeros((len(u), 2, 1))
        J[:, 1, 0] = 1.0
        return J

    def seg_window(center, r):
        return [np.array([[center[1] - r, center[1] + r]])]

    seg = Chart(1, [[-0.999, 0.999]], seg_map, jacobian=seg_jac,
                jac_vol_fn=lambda u: np.ones(len(u)), window_fn=seg_window)
    charts = [curve(+1.0), curve(-1.0), seg]

    def membership(pts, tau):
        x, y = pts[:, 0], pts[:, 1]
        on_seg = (np.abs(x) <= tau) & (np.abs(y) <= 0.999 + tau)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            sx = np.sin(1.0 / np.where(ax > 0, x, 1.0))
        on_curve = (ax >= SIN1X_XMIN) & (ax <= 1.0 + tau) & \
            (np.abs(y - sx) <= tau * (1.0 + 1.0 / np.maximum(ax, 1e-150) ** 2))
        # below the representable cutoff the oscillation is denser than any
        # desk-scale tau, so the whole band |y| <= 1 is accepted
        dense_band = (ax > 0) & (ax < SIN1X_XMIN) & (np.abs(y) <= 1.0 + tau)
        return on_seg | on_curve | dense_band

    def on_curve(x):
        return np.array([x, np.sin(1.0 / x)])

    oracle = SetOracle(
        name="sin_one_over_x", ambient_dim=2, intrinsic_dim=1,
        membership_fn=membership,
        sampler_fn=make_chart_sampler(charts, 2),
        charts=charts,
        # probes: segment points plus curve points coarse enough for the
        # cone tiers to resolve the local branch (the x -> 0 zone is the
        # documented truncation)
        special_points=[np.array([0.0, 0.0]), np.array([0.0, 0.5]),
                        np.array([0.0, -0.5]), on_curve(2.0 / np.pi),
                        on_curve(0.45), on_curve(0.7), on_curve(0.9),
                        on_curve(-0.5), on_curve(-0.8)],
        connected=True,
        locally_closed=True,
        kind="union",
        caveats=["not definable in any o-minimal structure (infinitely many "
                 "oscillations); curve represented for |x| >= 1e-5",
                 "two-cones coincidence holds numerically although the set is "
                 "not a C1 manifold: the definability hypothesis fails"],
    )
    gt = [
        GroundTruth("verdict", {"mode": "two_cones", "expected": "c1_manifold",
                                "caveat": "non_definable"},
                    "[PAPER]",
                    "the coincidence criterion passes numerically, yet the set is "
                    "not a C1 manifold; the runner checks the annotation, not "
                    "manifoldness"),
    ]
    return CorpusEntry("sin_one_over_x", oracle, gt,
                       run_cfg={"probe_count": 0, "grid_seed": 11,
                                "cone": {"m": 5000}})


# ---------------------------------------------------------------------------
# convergent sequences glued to a segment (non-definable control)


def _seq_y_entry() -> CorpusEntry:
    def seg_map(u):
        return u.copy()

    def seg_window(center, r):
        return [np.array([[center[0] - r, center[0] + r]])]

    seg = Chart(1, [[-1.0, 1.0]], seg_map,
                jacobian=lambda u: np.ones((len(u), 1, 1)),
                jac_vol_fn=lambda u: np.ones(len(u)), window_fn=seg_window)

    def point_dist(x):
        """Distance to the truncated sequences {±(1 + 1/n), n <= N}."""
        ax = np.abs(x)
        n_real = 1.0 / np.maximum(ax - 1.0, 1e-300)
        best = np.full_like(ax, np.inf)
        for n in (np.floor(n_real), np.ceil(n_real)):
            n = np.clip(n, 1, SEQ_Y_MAX_N)
            best = np.minimum(best, np.abs(ax - (1.0 + 1.0 / n)))
        return np.where(ax > 1.0, best, np.inf)

    def membership(pts, tau):
        x = pts[:, 0]
        return (np.abs(x) <= 1.0 + tau) | (point_dist(x) <= tau)

    seg_sampler = make_chart_sampler([seg], 1)

    def points_sampler(center, r, m, seed):
        from ._rng import rng_for
        c = float(center[0])
        out = []
        for si, sign in enumerate((1.0, -1.0)):
            # window for |x| on this side: x = sign * (1 + 1/n)
            lo, hi = (c - r, c + r) if sign > 0 else (-(c + r), -(c - r))
            lo = max(lo, 1.0 + 1.0 / SEQ_Y_MAX_N)
            hi = min(hi, 2.0)
            if hi < lo:
                continue
            n_hi = min(int(np.floor(1.0 / (lo - 1.0))), SEQ_Y_MAX_N)
            n_lo = max(int(np.ceil(1.0 / (hi - 1.0))), 1)
            if n_hi < n_lo:
                continue
            if n_hi - n_lo + 1 <= m:
                ns = np.arange(n_lo, n_hi + 1)
            else:
                ns = np.unique(rng_for(seed, si).integers(n_lo, n_hi + 1, size=2 * m))[:m]
            xs = sign * (1.0 + 1.0 / ns.astype(float))
            out.append(xs[np.abs(xs - c) <= r])
        if not out:
            return np.zeros((0, 1))
        return np.concatenate(out)[:m, None]

    sampler = mixture_sampler([seg_sampler, points_sampler], 1)

    oracle = SetOracle(
        name="seq_y", ambient_dim=1, intrinsic_dim=1,
        membership_fn=membership,
        sampler_fn=sampler,
        charts=[seg],
        special_points=[np.array([0.0]), np.array([1.0]),
                        np.array([1.0 + 1.0 / 3.0])],
        connected=False,
        locally_closed=True,
        kind="union",
        caveats=["not definable (infinitely many components); the sequences are "
                 f"truncated at n = {SEQ_Y_MAX_N}",
                 "two-cones coincidence holds numerically although the component "
                 "[-1,1] is not a C1 manifold: the definability hypothesis fails"],
    )
    gt = [
        GroundTruth("verdict", {"mode": "two_cones", "expected": "c1_manifold",
                                "caveat": "non_definable"},
                    "[PAPER]",
                    "tangent and pair cones coincide everywhere (at sequence points "
                    "both are trivial), yet [-1,1] is not a C1 manifold"),
    ]
    return CorpusEntry("seq_y", oracle, gt,
                       run_cfg={"probe_count": 14, "grid_radius": 1.45,
                                "grid_seed": 1})


# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=1)
def _corpus_cached() -> tuple:
    entries = [
        _hairy_entry(),
        _sin1x_entry(),
        _seq_y_entry(),
        _parabola_line_entry(),
        _cusp_entry(),
        _axis_plane_entry("line", 1, 2),
        _axis_plane_entry("plane", 2, 4),
        _circle_entry(),
        _sphere_entry(),
        _cross_entry(),
        _half_line_entry(),
    ]
    return tuple(entries)


def corpus() -> list[CorpusEntry]:
    """The built-in example sets, each with ground-truth annotations."""
    return list(_corpus_cached())


def corpus_entry(name: str) -> CorpusEntry:
    for e in _corpus_cached():
        if e.name == name:
            return e
    raise KeyError(f"no corpus entry named {name!r}")
