"""Validated quantum primitives: states, unitaries and POVMs."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BadDimension,
    DimensionMismatch,
    NotDensityMatrix,
    NotPsd,
    SumNotIdentity,
    ValidationError,
    ZeroElement,
)
from .numerics import (
    Subspace,
    as_square,
    check_hermitian,
    check_unitary,
    dagger,
    hs_norm,
    numerical_rank,
    orth_complement,
    orthonormalize,
)
from .tolerances import Tolerances, resolve


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    @classmethod
    def from_array(cls, a, tol: Tolerances | None = None) -> "DensityMatrix":
        tol = resolve(tol)
        m = check_hermitian(a, tol, "density matrix")
        w = np.linalg.eigvalsh(0.5 * (m + dagger(m)))
        if w.min() < -tol.tol_psd:
            raise NotDensityMatrix(f"density matrix has eigenvalue {w.min():.3e}")
        tr = np.trace(m).real
        if abs(tr - 1.0) > tol.tol_trace:
            raise NotDensityMatrix(f"density matrix has trace {tr!r}")
        return cls(m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True, eq=False)
class Unitary:
    matrix: np.ndarray

    @classmethod
    def from_array(cls, a, tol: Tolerances | None = None) -> "Unitary":
        return cls(check_unitary(a, tol))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def maximally_mixed(d: int) -> DensityMatrix:
    """The state ``I/d``."""
    if int(d) != d or d < 2:
        raise BadDimension(f"dimension must be an integer >= 2, got {d!r}")
    return DensityMatrix(np.eye(int(d), dtype=complex) / d)


def haar_random_unitary(d: int, seed) -> Unitary:
    """Haar-distributed unitary, deterministic in ``seed``.

    QR of a complex Ginibre matrix with the phases of ``diag(R)`` absorbed
    into ``Q`` (Mezzadri's recipe).
    """
    if d < 1:
        raise BadDimension(f"dimension must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return Unitary(q * ph)


# ---------------------------------------------------------------------------
# POVMs


class PovmTag(str, enum.Enum):
    GENERAL = "General"
    PVM = "Pvm"
    RANK_ONE = "RankOnePovm"
    TWO_PROJ_RANK_ONE = "TwoProjRankOne"


@dataclass(frozen=True, eq=False)
class PovmKind:
    """Classification of a POVM into the measurement classes we treat.

    ``tag`` is the most specific class. The boolean flags record every class
    the POVM belongs to; for a two-outcome rank-1 PVM on a qubit both the
    rank-1 view (``phis``, ``scale``) and the two-projection view
    (``z``, ``theta``) are filled in.
    """

    tag: PovmTag
    ranks: tuple[int, ...]
    is_pvm: bool
    is_rank_one: bool
    is_two_proj: bool
    is_scaled_projection: bool
    phis: np.ndarray | None = None  # rows are the unit vectors phi_i
    scale: float | None = None
    z: np.ndarray | None = None
    theta: Subspace | None = None


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple[np.ndarray, ...]
    kind: PovmKind

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def k(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]


def canonical_phase(v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Rotate ``v`` so that its first coordinate with modulus above ``tol`` is real positive."""
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return v
    c = v[idx[0]]
    return v * (abs(c) / c)


def _dominant_vector(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (a + dagger(a)))
    return v[:, -1]


def validate_povm(elements: Sequence, tol: Tolerances | None = None) -> Povm:
    """Check that ``elements`` form a POVM and classify it.

    Raises ``NotPsd`` / ``ZeroElement`` (with ``.index``) for a bad element and
    ``SumNotIdentity`` (with ``.residual``) when the elements do not sum to I.
    """
    tol = resolve(tol)
    if len(elements) == 0:
        raise ValidationError("POVM must have at least one element")
    mats = []
    d = None
    for i, e in enumerate(elements):
        m = check_hermitian(e, tol, f"POVM element {i + 1}")
        if d is None:
            d = m.shape[0]
        elif m.shape[0] != d:
            raise DimensionMismatch(f"POVM element {i + 1} has dimension {m.shape[0]}, expected {d}")
        w = np.linalg.eigvalsh(0.5 * (m + dagger(m)))
        if w.min() < -tol.tol_psd:
            raise NotPsd(f"POVM element {i + 1} has eigenvalue {w.min():.3e}", index=i)
        if w.max() <= tol.tol_psd:
            raise ZeroElement(f"POVM element {i + 1} is zero", index=i)
        mats.append(m)
    residual = hs_norm(sum(mats) - np.eye(d))
    if residual > tol.tol_sum:
        raise SumNotIdentity(f"POVM elements sum to I only up to {residual:.3e}", residual=residual)
    kind = _classify(mats, tol)
    return Povm(tuple(mats), kind)


def classify_povm(p: Povm, tol: Tolerances | None = None) -> PovmKind:
    return _classify(list(p.elements), resolve(tol))


def _classify(mats: list[np.ndarray], tol: Tolerances) -> PovmKind:
    d = mats[0].shape[0]
    k = len(mats)
    ranks = tuple(numerical_rank(m, tol.tol_psd) for m in mats)

    def rel(a, b):
        return hs_norm(a - b) <= tol.tol_recon * max(1.0, hs_norm(b))

    scaled = []
    for m in mats:
        c = np.trace(m @ m).real / np.trace(m).real
        scaled.append(rel(m @ m, c * m))
    is_scaled = all(scaled)
    is_pvm = all(rel(m @ m, m) for m in mats) and all(
        hs_norm(mats[i] @ mats[j]) <= tol.tol_recon
        for i in range(k) for j in range(k) if i != j
    )

    phis = scale = None
    is_rank_one = False
    if all(r == 1 for r in ranks):
        scale = d / k
        vecs = [canonical_phase(_dominant_vector(m), tol.tol_rank) for m in mats]
        if all(rel(m, scale * np.outer(v, v.conj())) for m, v in zip(mats, vecs)):
            is_rank_one = True
            phis = np.array(vecs)
        else:
            scale = None

    z = theta = None
    is_two_proj = is_pvm and k == 2 and ranks == (d - 1, 1)
    if is_two_proj:
        z = canonical_phase(_dominant_vector(mats[1]), tol.tol_rank)
        theta = orth_complement(orthonormalize([z], tol.tol_rank))

    if is_two_proj:
        tag = PovmTag.TWO_PROJ_RANK_ONE
    elif is_rank_one:
        tag = PovmTag.RANK_ONE
    elif is_pvm:
        tag = PovmTag.PVM
    else:
        tag = PovmTag.GENERAL
    return PovmKind(tag, ranks, is_pvm, is_rank_one, is_two_proj, is_scaled,
                    phis=phis, scale=scale, z=z, theta=theta)


def rank_one_povm(vectors, tol: Tolerances | None = None) -> Povm:
    """Rank-1 POVM ``{(d/k)|phi_i><phi_i|}`` from (not necessarily normalized) vectors."""
    vs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if not vs:
        raise ValidationError("need at least one vector")
    d, k = vs[0].shape[0], len(vs)
    elements = []
    for i, v in enumerate(vs):
        if v.shape != (d,):
            raise DimensionMismatch(f"vector {i + 1} has dimension {v.shape[0]}, expected {d}")
        n = np.linalg.norm(v)
        if n == 0:
            raise ZeroElement(f"vector {i + 1} is zero", index=i)
        v = v / n
        elements.append((d / k) * np.outer(v, v.conj()))
    return validate_povm(elements, tol)


def pvm_from_basis(basis, block_sizes: Sequence[int], tol: Tolerances | None = None) -> Povm:
    """PVM of projections onto consecutive column blocks of a unitary ``basis``."""
    b = check_unitary(basis, tol, "basis")
    if sum(block_sizes) != b.shape[0] or any(s < 1 for s in block_sizes):
        raise ValidationError(f"block sizes {list(block_sizes)} do not partition dimension {b.shape[0]}")
    elements = []
    start = 0
    for s in block_sizes:
        cols = b[:, start:start + s]
        elements.append(cols @ dagger(cols))
        start += s
    return validate_povm(elements, tol)


def computational_pvm(d: int, tol: Tolerances | None = None) -> Povm:
    return pvm_from_basis(np.eye(d), [1] * d, tol)
