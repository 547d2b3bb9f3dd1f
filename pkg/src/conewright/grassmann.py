"""Linear-subspace toolkit: orthonormal representations, orthogonal
projection, the sup-based Grassmannian distance, and subspace fitting from
noisy direction clouds.

The distance used throughout is

    delta(P, Q) = sup { ||v - proj_Q(v)|| : v in P, ||v|| = 1 },

which takes values in [0, 1]; two subspaces are called *orthogonal* when
delta reaches 1 (note that this is weaker than every vector of P being
perpendicular to every vector of Q).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation

#: Orthonormality tolerance for basis validation.
EPS_ORTHO = 1e-10


def _as_matrix(vectors) -> np.ndarray:
    arr = np.atleast_2d(np.asarray(vectors, dtype=float))
    if arr.ndim != 2:
        raise ContractViolation("expected a vector or list of vectors")
    return arr


@dataclass(frozen=True)
class Subspace:
    """A k-dimensional linear subspace of R^n held as a row-orthonormal basis.

    ``basis`` has shape (k, n); rows are unit vectors, pairwise orthogonal
    within EPS_ORTHO.  k = 0 (empty basis) represents the zero subspace.
    """

    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = int(self.ambient_dim)
        if n < 1:
            raise ContractViolation("ambient_dim must be >= 1")
        B = np.asarray(self.basis, dtype=float).reshape(-1, n)
        B = np.ascontiguousarray(B)
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)
        object.__setattr__(self, "ambient_dim", n)
        k = B.shape[0]
        if k > n:
            raise ContractViolation(f"basis has {k} vectors in R^{n}")
        if k:
            norms = np.linalg.norm(B, axis=1)
            if np.any(np.abs(norms - 1.0) > EPS_ORTHO):
                raise ContractViolation("basis vectors must be unit within 1e-10")
            gram = B @ B.T
            off = gram - np.eye(k)
            if np.max(np.abs(off)) > EPS_ORTHO:
                raise ContractViolation("basis vectors must be orthogonal within 1e-10")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((0, ambient_dim)))

    @classmethod
    def from_spanning(cls, vectors, ambient_dim: int | None = None,
                      tol: float = 1e-9) -> "Subspace":
        """Orthonormalize a spanning set (modified Gram-Schmidt with one
        re-orthogonalization pass); vectors with residual norm <= tol of the
        span so far are dropped."""
        V = _as_matrix(vectors)
        n = V.shape[1] if ambient_dim is None else int(ambient_dim)
        if V.shape[1] != n:
            raise ContractViolation("vector length does not match ambient_dim")
        rows = []
        for v in V:
            w = v.astype(float).copy()
            for _ in range(2):  # second pass restores orthogonality lost to cancellation
                for b in rows:
                    w -= np.dot(w, b) * b
            nw = np.linalg.norm(w)
            if nw > tol * max(1.0, np.linalg.norm(v)):
                rows.append(w / nw)
        B = np.array(rows).reshape(-1, n)
        return cls(n, B)

    def contains(self, v, tol: float = 1e-9) -> bool:
        v = np.asarray(v, dtype=float)
        resid = v - project(v, self)
        return float(np.linalg.norm(resid)) <= tol * max(1.0, float(np.linalg.norm(v)))


def unit_direction(v) -> np.ndarray:
    """Normalize v to a unit direction; rejects near-zero input."""
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        raise ContractViolation("cannot normalize a (near-)zero vector")
    return v / nv


def project(v, Q: Subspace) -> np.ndarray:
    """Orthogonal projection of v onto Q: sum_i <v, b_i> b_i."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != Q.ambient_dim:
        raise ContractViolation(
            f"vector lives in R^{v.shape[-1]}, subspace in R^{Q.ambient_dim}")
    if Q.dim == 0:
        return np.zeros_like(v)
    return (v @ Q.basis.T) @ Q.basis


def grassmann_delta(P: Subspace, Q: Subspace) -> float:
    """sup over unit v in P of ||v - proj_Q(v)||, in [0, 1].

    Computed as the largest singular value of the residual matrix
    (I - proj_Q) applied to P's basis, which equals sqrt(1 - sigma_min^2)
    of the basis inner-product matrix but stays accurate when the value is
    near 0 (the naive form loses half the significant digits there).

    Conventions for degenerate dimensions: delta(P, {0}) = 1 for dim P >= 1
    (every unit vector loses its full norm) and delta({0}, Q) = 0 (sup over
    the empty set).
    """
    if P.ambient_dim != Q.ambient_dim:
        raise ContractViolation("subspaces live in different ambient spaces")
    if P.dim == 0:
        return 0.0
    if Q.dim == 0:
        return 1.0
    resid = P.basis.T - Q.basis.T @ (Q.basis @ P.basis.T)
    top = float(np.linalg.svd(resid, compute_uv=False)[0])
    return min(max(top, 0.0), 1.0)


def is_orthogonal(P: Subspace, Q: Subspace, tol: float = 1e-6) -> bool:
    """True iff delta(P, Q) >= 1 - tol."""
    return grassmann_delta(P, Q) >= 1.0 - tol


def fit_subspace(directions, max_dim: int | None = None,
                 gap_threshold: float = 0.05) -> tuple[Subspace, float]:
    """Fit a linear subspace to a cloud of unit directions.

    The cloud is treated as sign-symmetric (d and -d contribute the same
    second moment), so the fit is invariant under flipping any subset of
    inputs.  Eigenvectors of the second-moment matrix whose eigenvalues
    exceed gap_threshold x the largest eigenvalue span the fit, capped at
    max_dim.  Returns (subspace, residual) where residual is the largest
    distance from an input direction to the fitted subspace.
    """
    D = _as_matrix(directions)
    if D.shape[0] == 0:
        raise ContractViolation("fit_subspace requires at least one direction")
    n = D.shape[1]
    if max_dim is None:
        max_dim = n
    second = (D.T @ D) / D.shape[0]
    evals, evecs = np.linalg.eigh(second)
    order = np.argsort(-evals, kind="stable")
    evals, evecs = evals[order], evecs[:, order]
    # Deterministic output: fix each eigenvector's sign by its largest
    # component, and break eigenvalue ties lexicographically.
    cols = []
    for i in range(n):
        v = evecs[:, i]
        j = int(np.argmax(np.abs(v)))
        if v[j] < 0:
            v = -v
        cols.append(v)
    for i in range(1, n):
        if abs(evals[i] - evals[i - 1]) <= 1e-12 * max(evals[0], 1e-300):
            if tuple(cols[i]) < tuple(cols[i - 1]):
                cols[i - 1], cols[i] = cols[i], cols[i - 1]
    lam_max = max(float(evals[0]), 0.0)
    keep = 0
    for i in range(min(max_dim, n)):
        if evals[i] > gap_threshold * lam_max and evals[i] > 0:
            keep = i + 1
    if keep == 0:
        sub = Subspace.zero(n)
        residual = float(np.max(np.linalg.norm(D, axis=1)))
        return sub, residual
    B = np.array(cols[:keep])
    # eigh output is orthonormal to machine precision; renormalize defensively
    B = B / np.linalg.norm(B, axis=1, keepdims=True)
    sub = Subspace(n, B)
    resid = D - (D @ B.T) @ B
    residual = float(np.max(np.linalg.norm(resid, axis=1)))
    return sub, residual


def _one_sided_min_sq(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Per-row min of ||a - b||^2 over b in B, chunked to bound memory."""
    sqb = np.sum(B * B, axis=1)
    out = np.empty(len(A))
    step = max(1, int(4e6 // max(len(B), 1)))
    for lo in range(0, len(A), step):
        blk = A[lo:lo + step]
        sq = (np.sum(blk * blk, axis=1)[:, None] + sqb[None, :]
              - 2.0 * (blk @ B.T))
        out[lo:lo + step] = sq.min(axis=1)
    return np.maximum(out, 0.0)


def direction_set_distance(A, B) -> float:
    """Symmetric Hausdorff distance between two finite sets of unit
    directions under the Euclidean (chord) metric, in [0, 2].

    Empty vs empty is 0; empty vs nonempty is 2 (the sphere diameter).
    """
    A = np.asarray(A, dtype=float).reshape(-1, np.shape(A)[-1]) if np.size(A) else np.zeros((0, 0))
    B = np.asarray(B, dtype=float).reshape(-1, np.shape(B)[-1]) if np.size(B) else np.zeros((0, 0))
    na, nb = A.shape[0], B.shape[0]
    if na == 0 and nb == 0:
        return 0.0
    if na == 0 or nb == 0:
        return 2.0
    if A.shape[1] != B.shape[1]:
        raise ContractViolation("direction sets live in different ambient spaces")
    ab = float(np.sqrt(_one_sided_min_sq(A, B).max()))
    ba = float(np.sqrt(_one_sided_min_sq(B, A).max()))
    return max(ab, ba)


# retained alias matching the operation's role in the cone estimators
hausdorff_direction_distance = direction_set_distance
