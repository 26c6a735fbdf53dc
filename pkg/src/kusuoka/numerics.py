"""Dense complex linear algebra: spectral decompositions, PSD square roots
and subspace arithmetic with explicit tolerances.

Subspaces are stored as a ``(d, r)`` array with orthonormal columns. The
trivial subspace has ``r == 0``; it is never represented by ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NotHermitian,
    NotPsd,
    NotUnitary,
    ValidationError,
)
from .tolerances import Tolerances, resolve


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite complex 2-D array (copy-free when possible)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    return m


def as_square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m


def hs_norm(a: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    return float(np.linalg.norm(a))


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermiticity_residual(a: np.ndarray) -> float:
    """Relative size of the anti-Hermitian part, ``|A - A*| / |A|``."""
    scale = hs_norm(a)
    if scale == 0.0:
        return 0.0
    return hs_norm(a - dagger(a)) / scale


def unitarity_residual(u: np.ndarray) -> float:
    return hs_norm(dagger(u) @ u - np.eye(u.shape[0]))


def check_hermitian(a, tol: Tolerances | None = None, name: str = "matrix") -> np.ndarray:
    tol = resolve(tol)
    m = as_square(a, name)
    res = hermiticity_residual(m)
    if res > tol.tol_herm:
        raise NotHermitian(f"{name} is not Hermitian (relative residual {res:.3e})")
    return m


def check_unitary(u, tol: Tolerances | None = None, name: str = "unitary") -> np.ndarray:
    tol = resolve(tol)
    m = as_square(u, name)
    res = unitarity_residual(m)
    if res > tol.tol_unit:
        raise NotUnitary(f"{name} is not unitary (|U*U - I| = {res:.3e})")
    return m


# ---------------------------------------------------------------------------
# spectral decompositions


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-decomposition ``A = V diag(eigenvalues) V*`` with grouped eigenvalues.

    ``clusters`` partitions the eigenvalue indices into numerically
    degenerate groups; ``representatives[c]`` is the common value of group ``c``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clusters: tuple[tuple[int, ...], ...]
    representatives: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    def cluster_basis(self, c: int) -> np.ndarray:
        """Orthonormal basis (as columns) of the eigenspace of cluster ``c``."""
        return self.eigenvectors[:, list(self.clusters[c])]

    def cluster_dims(self) -> list[int]:
        return [len(c) for c in self.clusters]

    def eigenspaces(self):
        """Yield ``(representative, basis)`` pairs, one per cluster."""
        for c in range(len(self.clusters)):
            yield self.representatives[c], self.cluster_basis(c)

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _linkage_clusters(keys: np.ndarray, tol_cluster: float, period: float | None = None):
    """Single-linkage clustering of sorted 1-D keys; optional periodic wrap."""
    n = len(keys)
    if n == 0:
        return []
    groups = [[0]]
    for i in range(1, n):
        if keys[i] - keys[i - 1] <= tol_cluster:
            groups[-1].append(i)
        else:
            groups.append([i])
    if period is not None and len(groups) > 1:
        if keys[0] + period - keys[-1] <= tol_cluster:
            groups[0] = groups.pop() + groups[0]
    return groups


def hermitian_eig(a, tol_cluster: float | None = None, tol: Tolerances | None = None) -> SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    tol = resolve(tol)
    tol_cluster = tol.tol_cluster if tol_cluster is None else tol_cluster
    m = check_hermitian(a, tol)
    m = 0.5 * (m + dagger(m))
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    scale = max(hs_norm(m), 1.0)
    if hs_norm(m @ v - v * w) > tol.tol_recon * scale:
        raise NoConvergence("Hermitian eigensolver residual above tolerance")
    groups = _linkage_clusters(w, tol_cluster)
    clusters = tuple(tuple(g) for g in groups)
    reps = np.array([w[list(g)].mean() for g in groups])
    return SpectralDecomposition(w.astype(complex), v, clusters, reps.astype(complex))


def unitary_eig(u, tol_cluster: float | None = None, tol: Tolerances | None = None) -> SpectralDecomposition:
    """Eigen-decomposition of a unitary matrix.

    Uses the complex Schur form, which for a normal matrix is diagonal and
    yields orthonormal eigenvectors even inside degenerate eigenspaces.
    Eigenvalues are ordered by argument in ``(-pi, pi]`` and clustered by
    angular distance, including across the branch cut.
    """
    tol = resolve(tol)
    tol_cluster = tol.tol_cluster if tol_cluster is None else tol_cluster
    m = check_unitary(u, tol)
    try:
        t, z = scipy.linalg.schur(m, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc
    lam = np.diag(t).copy()
    lam /= np.abs(lam)
    angles = np.angle(lam)
    order = np.argsort(angles, kind="stable")
    lam, z, angles = lam[order], z[:, order], angles[order]
    if hs_norm(m @ z - z * lam) > tol.tol_recon * max(hs_norm(m), 1.0):
        raise NoConvergence("unitary eigensolver residual above tolerance")
    groups = _linkage_clusters(angles, tol_cluster, period=2 * np.pi)
    reps = []
    for g in groups:
        mean = lam[list(g)].mean()
        reps.append(mean / abs(mean))
    return SpectralDecomposition(lam, z, tuple(tuple(g) for g in groups), np.array(reps))


def psd_sqrt(a, tol: Tolerances | None = None) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-tol_psd, tol_psd]`` are set to zero; otherwise the
    square root would turn 1e-17 noise in the kernel into 3e-9 leakage.
    """
    tol = resolve(tol)
    m = check_hermitian(a, tol)
    m = 0.5 * (m + dagger(m))
    w, v = np.linalg.eigh(m)
    if w.size and w.min() < -tol.tol_psd:
        raise NotPsd(f"matrix has eigenvalue {w.min():.3e} below -tol_psd")
    w = np.where(np.abs(w) <= tol.tol_psd, 0.0, w)
    s = (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)
    return 0.5 * (s + dagger(s))


def numerical_rank(a, tol: float) -> int:
    """Number of eigenvalues of a Hermitian matrix above ``tol``."""
    w = np.linalg.eigvalsh(0.5 * (a + dagger(a)))
    return int(np.sum(w > tol))


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of C^d given by an orthonormal column basis."""

    basis: np.ndarray
    tol_rank: float = field(default=1e-9)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2:
            raise ValidationError("subspace basis must be 2-D (ambient_dim, dim)")
        object.__setattr__(self, "basis", b)

    @classmethod
    def trivial(cls, ambient_dim: int, tol_rank: float = 1e-9) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0), dtype=complex), tol_rank)

    @classmethod
    def full(cls, ambient_dim: int, tol_rank: float = 1e-9) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=complex), tol_rank)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def is_trivial(self) -> bool:
        """True for ``{0}`` and for the whole space."""
        return self.dim in (0, self.ambient_dim)

    def projector(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)

    def project(self, v) -> np.ndarray:
        return self.basis @ (dagger(self.basis) @ np.asarray(v, dtype=complex))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def _columns(vectors) -> list[np.ndarray]:
    if isinstance(vectors, np.ndarray):
        if vectors.ndim == 1:
            return [vectors]
        return [vectors[:, j] for j in range(vectors.shape[1])]
    return [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]


def orthonormalize(vectors, tol_rank: float | None = None, ambient_dim: int | None = None) -> Subspace:
    """Orthonormal basis of the span of ``vectors``.

    ``vectors`` is a sequence of 1-D arrays or a 2-D array whose columns are
    the vectors. Gram-Schmidt is run twice per vector; a vector whose residual
    norm after projection is ``<= tol_rank`` is dropped.
    """
    tol_rank = resolve(None).tol_rank if tol_rank is None else tol_rank
    cols = _columns(vectors)
    if not cols:
        if ambient_dim is None:
            raise ValidationError("ambient_dim is required for an empty vector list")
        return Subspace.trivial(ambient_dim, tol_rank)
    d = cols[0].shape[0]
    if ambient_dim is not None and ambient_dim != d:
        raise DimensionMismatch(f"vectors have dimension {d}, expected {ambient_dim}")
    basis: list[np.ndarray] = []
    for v in cols:
        if v.shape != (d,):
            raise DimensionMismatch("vectors have inconsistent dimensions")
        r = v.astype(complex)
        for _ in range(2):
            for q in basis:
                r = r - np.vdot(q, r) * q
        nrm = np.linalg.norm(r)
        if nrm > tol_rank:
            basis.append(r / nrm)
            if len(basis) == d:
                break
    if not basis:
        return Subspace.trivial(d, tol_rank)
    return Subspace(np.column_stack(basis), tol_rank)


def _check_ambient(*spaces_or_dims):
    dims = {s if isinstance(s, int) else s.ambient_dim for s in spaces_or_dims}
    if len(dims) != 1:
        raise DimensionMismatch(f"incompatible ambient dimensions {sorted(dims)}")


def image(a, w: Subspace) -> Subspace:
    """``A(W)``, the orthonormalized span of ``A`` applied to the basis of ``W``."""
    m = as_square(a)
    _check_ambient(m.shape[0], w)
    return orthonormalize(m @ w.basis, w.tol_rank, ambient_dim=w.ambient_dim)


def orth_complement(w: Subspace) -> Subspace:
    d = w.ambient_dim
    full = orthonormalize(np.hstack([w.basis, np.eye(d, dtype=complex)]), w.tol_rank)
    return Subspace(full.basis[:, w.dim:], w.tol_rank)


def contains_vector(w: Subspace, v, tol: float | None = None) -> bool:
    """Whether ``|v - P_W v| <= tol * |v|``."""
    tol = w.tol_rank if tol is None else tol
    v = np.asarray(v, dtype=complex).reshape(-1)
    _check_ambient(v.shape[0], w)
    return bool(np.linalg.norm(v - w.project(v)) <= tol * np.linalg.norm(v))


def contains(w: Subspace, v: Subspace, tol: float | None = None) -> bool:
    """Whether ``V`` is a subspace of ``W``."""
    _check_ambient(w, v)
    return all(contains_vector(w, v.basis[:, j], tol) for j in range(v.dim))


def same_span(w1: Subspace, w2: Subspace, tol: float | None = None) -> bool:
    return w1.dim == w2.dim and contains(w1, w2, tol) and contains(w2, w1, tol)


def span_union(*spaces: Subspace) -> Subspace:
    _check_ambient(*spaces)
    return orthonormalize(np.hstack([s.basis for s in spaces]), spaces[0].tol_rank,
                          ambient_dim=spaces[0].ambient_dim)


def intersect_dim(w1: Subspace, w2: Subspace) -> int:
    return max(0, w1.dim + w2.dim - span_union(w1, w2).dim)


def is_invariant(a, w: Subspace, tol: float | None = None) -> bool:
    """Whether ``A(W)`` is contained in ``W``."""
    return contains(w, image(a, w), tol)
