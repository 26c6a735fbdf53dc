"""Markov chain on outcomes induced by a rank-1 POVM.

For a rank-1 POVM every post-measurement state is one of the pure states
``|phi_i><phi_i|``, so outcome sequences form a Markov chain with uniform
initial law and transition matrix ``Q_ij = (d/k) |<phi_j, U phi_i>|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import EmptyString, ValidationError, WrongPovmKind
from .pifs import Pifs
from .tolerances import DEFAULT


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    q: np.ndarray
    zero_prob_threshold: float = DEFAULT.zero_prob_threshold

    @property
    def k(self) -> int:
        return self.q.shape[0]

    def row_residual(self) -> float:
        return float(np.abs(self.q.sum(axis=1) - 1).max())

    def column_residual(self) -> float:
        return float(np.abs(self.q.sum(axis=0) - 1).max())

    def is_bistochastic(self, tol: float = DEFAULT.tol_sum) -> bool:
        return self.row_residual() <= tol and self.column_residual() <= tol

    def adjacency(self) -> np.ndarray:
        return self.q > self.zero_prob_threshold


def transition_matrix(p: Pifs) -> TransitionMatrix:
    kind = p.povm.kind
    if not kind.is_rank_one:
        raise WrongPovmKind(f"transition matrix needs a rank-1 POVM, got {kind.tag.value}")
    phi = kind.phis  # rows phi_i
    overlaps = phi.conj() @ p.u @ phi.T  # [j, i] = <phi_j, U phi_i>
    q = kind.scale * np.abs(overlaps.T) ** 2
    return TransitionMatrix(q, p.zero_prob_threshold)


def markov_cylinder_prob(q: TransitionMatrix, s: Sequence[int]) -> float:
    """``(1/k) * prod_r Q[i_r, i_{r+1}]``."""
    s = tuple(s)
    if not s:
        raise EmptyString("Markov cylinder probability needs a nonempty string")
    if any(not 0 <= i < q.k for i in s):
        raise ValidationError(f"symbol outside 1..{q.k}")
    val = 1.0 / q.k
    for a, b in zip(s[:-1], s[1:]):
        val *= q.q[a, b]
    return float(val)


def markov_cylinder_table(q: TransitionMatrix, n: int) -> np.ndarray:
    """All length-``n`` cylinder probabilities, shape ``(k,)*n``."""
    table = np.full(q.k, 1.0 / q.k)
    for _ in range(n - 1):
        # new[..., a, b] = table[..., a] * Q[a, b]
        table = table[..., :, None] * q.q
    return table


@dataclass(frozen=True)
class IrreducibilityResult:
    irreducible: bool
    components: tuple[tuple[int, ...], ...]
    closed_set: tuple[int, ...] | None  # proper subset with no outgoing edges

    def __bool__(self):
        return self.irreducible


def is_irreducible(q: TransitionMatrix) -> IrreducibilityResult:
    """Strong connectivity of the graph ``i -> j`` iff ``Q_ij > threshold``.

    When reducible, ``closed_set`` is a proper nonempty set of states that
    the chain never leaves (the smallest-indexed closed strongly connected
    component).
    """
    adj = q.adjacency()
    n_comp, labels = connected_components(adj.astype(np.int8), directed=True, connection="strong")
    comps = [tuple(int(i) for i in np.flatnonzero(labels == c)) for c in range(n_comp)]
    comps.sort()
    if n_comp == 1:
        return IrreducibilityResult(True, tuple(comps), None)
    closed = None
    for comp in comps:
        inside = np.zeros(q.k, dtype=bool)
        inside[list(comp)] = True
        if not adj[np.ix_(inside, ~inside)].any():
            closed = comp
            break
    return IrreducibilityResult(False, tuple(comps), closed)
