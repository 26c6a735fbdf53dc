"""Named and seeded random (U, POVM) instances.

Reducible instances are built exactly: ``U`` is block diagonal in a basis
adapted to a splitting ``C^d = A + A^perp`` and the measurement respects the
splitting, so the invariant subspace is present to machine precision.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .numerics import dagger
from .pifs import Pifs
from .quantum import (
    Povm,
    computational_pvm,
    haar_random_unitary,
    pvm_from_basis,
    rank_one_povm,
    validate_povm,
)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _haar(d: int, rng: np.random.Generator) -> np.ndarray:
    return haar_random_unitary(d, rng.integers(2**63)).matrix


def example_eigenbasis_pvm(d: int = 3, u_diag=None) -> Pifs:
    """Diagonal ``U`` measured by ``{P_{e_1..e_{d-1}}, P_{e_d}}``; outcomes never switch.

    Default ``U`` for ``d = 3`` is ``diag(1, i, -1)``.
    """
    if u_diag is None:
        u_diag = [1, 1j, -1] if d == 3 else np.exp(2j * np.pi * np.arange(d) / (d + 1))
    u = np.diag(np.asarray(u_diag, dtype=complex))
    return Pifs.build(u, pvm_from_basis(np.eye(d), [d - 1, 1]))


def hadamard_qubit() -> Pifs:
    return Pifs.build(HADAMARD, computational_pvm(2))


def trine_vectors() -> np.ndarray:
    angles = np.deg2rad([0.0, 120.0, 240.0])
    return np.stack([np.cos(angles / 2), np.sin(angles / 2)], axis=1).astype(complex)


def trine_povm() -> Povm:
    """Three real qubit states at Bloch angles 0, 120, 240 degrees, scaled by 2/3."""
    return rank_one_povm(trine_vectors())


def harmonic_frame(d: int, k: int, rng=None) -> np.ndarray:
    """``k`` unit vectors in C^d with ``sum (d/k) |phi><phi| = I`` (rows of the result).

    Rows of ``d`` distinct columns of the ``k``-point DFT matrix, rescaled;
    with ``rng`` the frequency set is drawn at random.
    """
    if k < d:
        raise ValidationError(f"need k >= d, got k={k}, d={d}")
    rng = _rng(rng) if rng is not None else None
    freqs = np.arange(d) if rng is None else np.sort(rng.choice(k, size=d, replace=False))
    j = np.arange(k)[:, None]
    return np.exp(2j * np.pi * j * freqs[None, :] / k) / np.sqrt(d)


def random_rank1_instance(d: int, k: int, seed) -> Pifs:
    """Haar ``U`` with a Haar-rotated harmonic frame; generically ergodic."""
    rng = _rng(seed)
    frame = harmonic_frame(d, k, rng) @ _haar(d, rng).T
    return Pifs.build(_haar(d, rng), rank_one_povm(frame))


def reducible_rank1_instance(d: int, k: int, seed, split: int | None = None) -> Pifs:
    """Rank-1 instance with a common invariant subspace of dimension ``split``.

    Needs ``split * k / d`` to be an integer (the number of frame vectors in
    the subspace); the first admissible split is used when ``split`` is None.
    """
    rng = _rng(seed)
    splits = [a for a in range(1, d) if (a * k) % d == 0]
    if split is None:
        if not splits:
            raise ValidationError(f"no reducible rank-1 POVM with d={d}, k={k}")
        split = splits[rng.integers(len(splits))]
    elif split not in splits:
        raise ValidationError(f"split {split} not admissible for d={d}, k={k}")
    k1 = split * k // d
    basis = _haar(d, rng)
    a_basis, b_basis = basis[:, :split], basis[:, split:]
    fa = harmonic_frame(split, k1, rng) @ a_basis.T
    fb = harmonic_frame(d - split, k - k1, rng) @ b_basis.T
    vectors = np.vstack([fa, fb])[rng.permutation(k)]
    block = np.zeros((d, d), dtype=complex)
    block[:split, :split] = _haar(split, rng)
    block[split:, split:] = _haar(d - split, rng)
    u = basis @ block @ dagger(basis)
    return Pifs.build(u, rank_one_povm(vectors))


def random_pvm2_instance(d: int, seed) -> Pifs:
    """Haar ``U`` with ``{I - |z><z|, |z><z|}`` for a random unit ``z``; generically ergodic."""
    rng = _rng(seed)
    u = _haar(d, rng)
    z = _haar(d, rng)[:, 0]
    return Pifs.build(u, pvm2_from_vector(z))


def reducible_pvm2_instance(d: int, seed, degenerate: bool = False) -> Pifs:
    """Two-projection PVM where some eigenvector of ``U`` is orthogonal to ``z``.

    With ``degenerate`` the first two eigenvalues of ``U`` coincide, which
    forces such an eigenvector for every ``z``.
    """
    rng = _rng(seed)
    v = _haar(d, rng)
    phases = np.exp(2j * np.pi * rng.random(d))
    if degenerate and d >= 2:
        phases[1] = phases[0]
        z = _haar(d, rng)[:, 0]
    else:
        n_theta = int(rng.integers(1, d))  # eigenvectors forced into Theta
        coeffs = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        coeffs[:n_theta] = 0
        z = v @ coeffs
        z /= np.linalg.norm(z)
    u = (v * phases) @ dagger(v)
    return Pifs.build(u, pvm2_from_vector(z))


def pvm2_from_vector(z) -> Povm:
    z = np.asarray(z, dtype=complex).reshape(-1)
    z = z / np.linalg.norm(z)
    p2 = np.outer(z, z.conj())
    return validate_povm([np.eye(len(z)) - p2, p2])


def random_general_instance(d: int, k: int, seed) -> Pifs:
    """Haar ``U`` with a full-rank POVM ``G^{-1/2} X_i G^{-1/2}`` from random ``X_i``."""
    rng = _rng(seed)
    xs = []
    for _ in range(k):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        xs.append(a @ dagger(a))
    g = sum(xs)
    w, vec = np.linalg.eigh(g)
    g_isqrt = (vec / np.sqrt(w)) @ dagger(vec)
    elements = [g_isqrt @ x @ g_isqrt for x in xs]
    elements = [0.5 * (e + dagger(e)) for e in elements]
    # absorb the rounding in the summation into the last element
    elements[-1] = elements[-1] + (np.eye(d) - sum(elements))
    return Pifs.build(_haar(d, rng), validate_povm(elements))


def random_pvm_instance(d: int, block_sizes, seed) -> Pifs:
    rng = _rng(seed)
    return Pifs.build(_haar(d, rng), pvm_from_basis(_haar(d, rng), block_sizes))


KINDS = ("rank1", "pvm2", "pvm", "general")


def seeded_instances(kind: str, count: int, seed: int = 0, max_dim: int = 4) -> list[Pifs]:
    """``count`` reproducible instances of one measurement class.

    Dimensions cycle through ``2..max_dim`` and, for ``rank1`` and
    ``general``, ``k`` through ``d..d+2``. About a third of the rank-1 and
    two-projection instances are built reducible so both verdicts occur.
    ``pvm`` instances have ``d >= 3`` and a block split that is neither all
    rank-1 nor ``(d-1, 1)``, so they are plain PVMs.
    """
    if kind not in KINDS:
        raise ValidationError(f"kind must be one of {KINDS}")
    rng = np.random.default_rng([seed, KINDS.index(kind)])
    out = []
    for j in range(count):
        d = 2 + j % (max_dim - 1)
        k = d + (j // (max_dim - 1)) % 3
        s = int(rng.integers(2**63))
        reducible = rng.random() < 1 / 3
        if kind == "rank1":
            if reducible and any((a * k) % d == 0 for a in range(1, d)):
                out.append(reducible_rank1_instance(d, k, s))
            else:
                out.append(random_rank1_instance(d, k, s))
        elif kind == "pvm2":
            out.append(reducible_pvm2_instance(d, s, degenerate=rng.random() < 0.3) if reducible
                       else random_pvm2_instance(d, s))
        elif kind == "pvm":
            d = 3 + j % (max_dim - 2)
            while True:
                cuts = sorted(rng.choice(np.arange(1, d), size=int(rng.integers(1, d)), replace=False))
                sizes = np.diff([0, *cuts, d]).tolist()
                # skip the splits that fall in the rank-1 or two-projection classes
                if sizes != [1] * d and sizes != [d - 1, 1]:
                    break
            out.append(random_pvm_instance(d, sizes, s))
        else:
            out.append(random_general_instance(d, k, s))
    return out
