"""PCA eigenspace ("eigenfaces") construction and projection.

Eigenpairs of the pixel covariance ``X X^T`` are recovered from the much
smaller Gram matrix ``X^T X`` of the centred training set, diagonalised by
a cyclic Jacobi solver.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTrainingSetError, InvalidInputError

log = logging.getLogger(__name__)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
ZERO_EIGEN_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class Eigenspace:
    mean: np.ndarray          # (H,)
    basis: np.ndarray         # (H, U), orthonormal columns
    eigenvalues: np.ndarray   # (U,), descending, positive

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def n_components(self) -> int:
        return self.basis.shape[1]

    def reconstruct(self, features) -> np.ndarray:
        """Inverse of :func:`project`: one U-vector or a ``(k, U)`` batch of rows."""
        return np.asarray(features, dtype=np.float64) @ self.basis.T + self.mean


def _stack(train) -> np.ndarray:
    if isinstance(train, np.ndarray) and train.ndim == 2:
        return np.asarray(train, dtype=np.float64)
    vectors = [np.asarray(v, dtype=np.float64) for v in train]
    if not vectors:
        raise InvalidInputError("training set is empty")
    length = vectors[0].shape
    if any(v.ndim != 1 or v.shape != length for v in vectors):
        raise InvalidInputError("training vectors must all be 1-D with the same length")
    return np.column_stack(vectors)


def mean_image(train) -> np.ndarray:
    """Elementwise mean of the training vectors (a sequence, or columns of an H x P array)."""
    data = _stack(train)
    if data.shape[1] < 2:
        raise InvalidInputError(f"need at least 2 training vectors, got {data.shape[1]}")
    return data.mean(axis=1)


def center(train, mean) -> np.ndarray:
    """Return the H x P matrix whose columns are the training vectors minus ``mean``."""
    data = _stack(train)
    mean = np.asarray(mean, dtype=np.float64)
    if mean.shape != (data.shape[0],):
        raise InvalidInputError(f"mean has shape {mean.shape}, expected ({data.shape[0]},)")
    return data - mean[:, None]


def _round_robin(n: int):
    """Yield ``n - 1`` (or ``n``) rounds of disjoint index pairs covering every pair once."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    k = len(players)
    for _ in range(k - 1):
        pairs = [(players[i], players[k - 1 - i]) for i in range(k // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0]
        yield np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])
        players = [players[0], players[-1]] + players[1:-1]


def symmetric_eigen(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations within a round act on disjoint planes and can be
    applied together. Iteration stops once the off-diagonal Frobenius norm
    falls below ``tol * ||A||_F`` or after ``max_sweeps`` sweeps.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues descending and
    eigenvectors as orthonormal columns.
    """
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if np.abs(a - a.T).max(initial=0.0) > 1e-10 * scale:
        raise InvalidInputError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    norm = np.linalg.norm(a)
    rounds = list(_round_robin(n)) if n > 1 else []

    def off_norm(m):
        return np.linalg.norm(m - np.diag(np.diag(m)))

    for _ in range(max_sweeps):
        off = off_norm(a)
        log.debug("jacobi sweep: off-diagonal norm %.3e", off)
        if off <= tol * norm:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            diff = a[q, q] - a[p, p]
            # t = tan of the rotation angle, the smaller root of t^2 + 2*theta*t - 1 = 0
            # with theta = diff / (2 apq), written to avoid overflowing theta^2
            t = 2.0 * apq * np.sign(diff) / (np.abs(diff) + np.hypot(diff, 2.0 * apq))
            t[diff == 0.0] = np.sign(apq[diff == 0.0])
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * ap - s * aq
            a[:, q] = s * ap + c * aq
            ap, aq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * ap - s[:, None] * aq
            a[q, :] = s[:, None] * ap + c[:, None] * aq
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], v[:, order]


def _fix_signs(basis: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[idx, np.arange(basis.shape[1])])
    signs[signs == 0] = 1.0
    return basis * signs


def build_eigenspace(data, mean, max_u: int | None = 40) -> Eigenspace:
    """Build the eigenspace from a centred H x P data matrix.

    Eigenvalues at or below ``1e-10 * max eigenvalue`` are treated as zero
    and dropped; at most ``max_u`` leading components are kept.
    """
    data = np.asarray(data, dtype=np.float64)
    mean = np.asarray(mean, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] < 2:
        raise InvalidInputError("data matrix must be H x P with P >= 2")
    if mean.shape != (data.shape[0],):
        raise InvalidInputError(f"mean has shape {mean.shape}, expected ({data.shape[0]},)")
    gram = data.T @ data
    gram = 0.5 * (gram + gram.T)
    values, vectors = symmetric_eigen(gram)
    top = values[0] if values.size else 0.0
    if not top > 0:
        raise DegenerateTrainingSetError("all eigenvalues are zero; training images are identical")
    keep = values > ZERO_EIGEN_RTOL * top
    values, vectors = values[keep], vectors[:, keep]
    if max_u is not None:
        values, vectors = values[:max_u], vectors[:, :max_u]
    basis = data @ vectors
    basis /= np.linalg.norm(basis, axis=0)
    return Eigenspace(mean=mean.copy(), basis=_fix_signs(basis), eigenvalues=values)


def project(space: Eigenspace, x) -> np.ndarray:
    """Project image vector(s) onto the eigenspace after subtracting the training mean.

    Accepts a single H-vector or a ``(k, H)`` batch of row vectors.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != space.dim or x.ndim > 2:
        raise InvalidInputError(f"expected vectors of length {space.dim}, got shape {x.shape}")
    return (x - space.mean) @ space.basis
