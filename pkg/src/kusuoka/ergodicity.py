"""Ergodicity criteria for the cylinder measure of a repeatedly measured system.

Three families of tests live here:

* irreducibility of an operator family (sufficient for ergodicity in
  general), decided by the dimension of the algebra it generates;
* for rank-1 POVMs, the geometric search for a ``U``-invariant subspace
  that contains or is orthogonal to every ``phi_i`` (equivalent to
  non-ergodicity, as is reducibility of the transition matrix);
* for two-projection PVMs with ranks ``(d-1, 1)``, the existence of an
  eigenvector of ``U`` orthogonal to the rank-1 direction ``z``, together
  with the trace limit that gives the mass of the eventually-all-1 set.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, TooManyOutcomes, ValidationError, WrongPovmKind
from .markov import is_irreducible, transition_matrix
from .numerics import (
    Subspace,
    as_square,
    contains,
    dagger,
    hs_norm,
    image,
    is_invariant,
    orth_complement,
    orthonormalize,
    same_span,
    unitary_eig,
)
from .pifs import Pifs
from .quantum import Povm, PovmTag
from .tolerances import Tolerances, resolve

log = logging.getLogger(__name__)

RANK1_SUBSET_GUARD = 20
M_MAX_CAP = 500
M_MAX_HARD = 10**6  # ceiling when the cap is lifted


# ---------------------------------------------------------------------------
# irreducibility of operator families


@dataclass(frozen=True)
class AlgebraSpan:
    """Result of the Burnside closure: the algebra is all of M_d iff ``dim == d*d``."""

    irreducible: bool
    dim: int
    ambient_dim: int

    def __bool__(self):
        return self.irreducible


def algebra_span_dim(family: Sequence, tol: Tolerances | None = None) -> int:
    """Dimension of the unital algebra generated by ``family``.

    Starting from ``{I}``, basis elements are left-multiplied by every
    generator and Gram-Schmidt'ed into the running basis of ``C^{d x d}``
    until nothing new appears. Each round adds at least one dimension, so
    at most ``d^2`` rounds run.
    """
    tol = resolve(tol)
    gens = [as_square(a) for a in family]
    if not gens:
        raise ValidationError("operator family is empty")
    d = gens[0].shape[0]
    if any(g.shape != (d, d) for g in gens):
        raise ValidationError("operators in a family must share one dimension")
    thresholds = [tol.tol_rank * max(1.0, np.linalg.norm(g, 2)) for g in gens]
    basis = np.zeros((d * d, d * d), dtype=complex)
    basis[0] = np.eye(d).reshape(-1) / np.sqrt(d)
    n = 1
    frontier = [0]
    while frontier and n < d * d:
        new = []
        for b in frontier:
            bm = basis[b].reshape(d, d)
            for g, thr in zip(gens, thresholds):
                x = (g @ bm).reshape(-1)
                q = basis[:n]
                for _ in range(2):
                    x = x - q.T @ (q.conj() @ x)
                nrm = np.linalg.norm(x)
                if nrm > thr:
                    basis[n] = x / nrm
                    new.append(n)
                    n += 1
                    if n == d * d:
                        return n
        frontier = new
    return n


def algebra_irreducible(family: Sequence, tol: Tolerances | None = None) -> AlgebraSpan:
    """Whether ``family`` has no common invariant subspace other than 0 and C^d."""
    gens = list(family)
    d = as_square(gens[0]).shape[0]
    n = algebra_span_dim(gens, tol)
    return AlgebraSpan(n == d * d, n, d)


def adjoint_family_equiv_check(family: Sequence, tol: Tolerances | None = None) -> bool:
    """A family and its adjoints are irreducible together; always true."""
    a = algebra_irreducible(family, tol).irreducible
    b = algebra_irreducible([dagger(as_square(f)) for f in family], tol).irreducible
    return a == b


def kraus_family(u, povm: Povm, tol: Tolerances | None = None) -> list[np.ndarray]:
    return list(Pifs.build(u, povm, tol).kraus)


# ---------------------------------------------------------------------------
# scaled projections


def scaled_projection_criterion(u, povm: Povm, w: Subspace, tol: Tolerances | None = None) -> bool:
    """Whether ``W`` is invariant under every ``sqrt(Pi_i) U``, for POVMs of scaled projections.

    Decided as ``U(W) = W`` and ``Pi_i(W) <= W`` for all ``i``; the direct
    test on ``sqrt(Pi_i) U`` is evaluated too and must give the same answer.
    """
    tol = resolve(tol)
    if not povm.kind.is_scaled_projection:
        raise WrongPovmKind("POVM elements are not scaled projections")
    if w.is_trivial():
        raise ValidationError("criterion needs a non-trivial subspace")
    um = np.asarray(u, dtype=complex)
    simplified = same_span(image(um, w), w, tol.tol_orth) and all(
        is_invariant(e, w, tol.tol_orth) for e in povm.elements
    )
    direct = all(is_invariant(k, w, tol.tol_orth) for k in kraus_family(um, povm, tol))
    if simplified != direct:
        raise ConsistencyError(
            f"invariance under U and Pi_i ({simplified}) disagrees with invariance "
            f"under sqrt(Pi_i) U ({direct})"
        )
    return simplified


# ---------------------------------------------------------------------------
# rank-1 POVMs


@dataclass(frozen=True, eq=False)
class SubspaceWitness:
    """Non-trivial ``U``-invariant ``W`` with ``phi_i`` in ``W`` for ``i in subset``
    and ``phi_j`` orthogonal to ``W`` otherwise."""

    subset: tuple[int, ...]
    subspace: Subspace

    def to_dict(self):
        return {
            "type": "subspace",
            "subset": [i + 1 for i in self.subset],
            "dimension": self.subspace.dim,
            "basis": _complex_list(self.subspace.basis.T),
        }


def invariant_hull(u, vectors, tol_rank: float) -> Subspace:
    """Smallest ``U``-invariant subspace containing ``vectors`` (block Krylov).

    By Cayley-Hamilton ``U^d`` is a combination of ``I, U, ..., U^{d-1}``, so
    applying ``U`` to the newest basis vectors until no new direction appears
    takes at most ``d - 1`` rounds.
    """
    um = np.asarray(u, dtype=complex)
    d = um.shape[0]
    w = orthonormalize(list(vectors), tol_rank, ambient_dim=d)
    fresh = w.basis
    for _ in range(d - 1):
        if fresh.shape[1] == 0 or w.dim == d:
            break
        grown = orthonormalize(np.hstack([w.basis, um @ fresh]), tol_rank)
        fresh = grown.basis[:, w.dim:]
        w = grown
    return w


def rank1_subset_search(u, povm: Povm, tol: Tolerances | None = None) -> SubspaceWitness | None:
    """Search for a witness of non-ergodicity for a rank-1 POVM.

    For each nonempty proper subset ``S`` (by size, then lexicographically)
    build ``W(S)``, the invariant hull of ``{phi_i : i in S}``, and accept
    it when it is a proper subspace orthogonal to every ``phi_j``, ``j not in S``.
    """
    tol = resolve(tol)
    kind = povm.kind
    if not kind.is_rank_one:
        raise WrongPovmKind(f"subset search needs a rank-1 POVM, got {kind.tag.value}")
    k, d = povm.k, povm.dim
    if k > RANK1_SUBSET_GUARD:
        raise TooManyOutcomes(f"{k} outcomes exceeds the subset-search guard of {RANK1_SUBSET_GUARD}")
    um = np.asarray(u, dtype=complex)
    phis = kind.phis
    for size in range(1, k):
        for subset in itertools.combinations(range(k), size):
            w = invariant_hull(um, [phis[i] for i in subset], tol.tol_rank)
            if w.dim >= d:
                continue
            outside = [j for j in range(k) if j not in subset]
            if all(np.linalg.norm(dagger(w.basis) @ phis[j]) <= tol.tol_orth for j in outside):
                return SubspaceWitness(subset, w)
    return None


# ---------------------------------------------------------------------------
# two-projection PVMs


@dataclass(frozen=True, eq=False)
class EigenvectorWitness:
    """Unit eigenvector ``v`` of ``U`` (eigenvalue ``eigenvalue``) lying in Theta."""

    vector: np.ndarray
    eigenvalue: complex

    def to_dict(self):
        return {
            "type": "eigenvector",
            "vector": _complex_list(self.vector),
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
        }


@dataclass(frozen=True, eq=False)
class ThetaEigenspace:
    eigenvalue: complex
    eigenspace_dim: int
    basis: np.ndarray  # orthonormal basis of Theta intersected with the eigenspace

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def _require_two_proj(povm: Povm):
    if not povm.kind.is_two_proj:
        raise WrongPovmKind(f"needs a two-projection PVM of ranks (d-1, 1), got {povm.kind.tag.value}")


def theta_eigenspaces(u, povm: Povm, tol: Tolerances | None = None) -> list[ThetaEigenspace]:
    """``Theta`` intersected with each eigenspace of ``U``.

    Inside an eigenspace ``E`` the intersection is the orthogonal complement
    of ``P_E z`` in ``E``; it is all of ``E`` when ``|P_E z| <= tol``.
    """
    tol = resolve(tol)
    _require_two_proj(povm)
    z = povm.kind.z
    spec = unitary_eig(u, tol=tol)
    out = []
    for lam, e in spec.eigenspaces():
        coeff = dagger(e) @ z  # coordinates of P_E z in the basis of E
        m = e.shape[1]
        if np.linalg.norm(coeff) <= tol.tol_rank:
            basis = e
        else:
            c = coeff / np.linalg.norm(coeff)
            # orthonormal basis of c^perp inside C^m
            comp = orth_complement(orthonormalize([c], tol.tol_rank))
            basis = e @ comp.basis
        out.append(ThetaEigenspace(complex(lam), m, basis))
    return out


def pvm2_eigenvector_in_theta(u, povm: Povm, tol: Tolerances | None = None) -> EigenvectorWitness | None:
    """An eigenvector of ``U`` orthogonal to ``z``, or None if there is none."""
    for te in theta_eigenspaces(u, povm, tol):
        if te.dim >= 1:
            v = te.basis[:, 0]
            um = np.asarray(u, dtype=complex)
            lam = complex(np.vdot(v, um @ v))
            return EigenvectorWitness(v, lam)
    return None


@dataclass(frozen=True)
class LemmaTraceLimit:
    sequence: np.ndarray  # sequence[m-1] = tr((PU)^m (PU)^{*m}), m = 1..m_max
    spectral_value: int
    m_max: int
    rate: float  # spectral radius of PU off the unimodular part
    convergence_gap: float  # sequence[-1] - spectral_value
    converged: bool


def _default_m_max(pu: np.ndarray, invariant: Subspace, tol_conv: float,
                   cap: int | None = M_MAX_CAP) -> tuple[int, float]:
    limit = M_MAX_HARD if cap is None else cap
    comp = orth_complement(invariant)
    if comp.dim == 0:
        return 1, 0.0
    restricted = dagger(comp.basis) @ pu @ comp.basis
    r = float(np.max(np.abs(np.linalg.eigvals(restricted))))
    d = pu.shape[0]
    if r < 1e-12:
        return max(comp.dim + 1, 2 * d), r
    if r >= 1.0 - 1e-12:
        return limit, r
    # r^(2m) * (margin for transient growth) <= tol_conv
    m = math.ceil(math.log(tol_conv * 1e-2) / (2.0 * math.log(r))) + 2 * d
    return max(1, min(limit, m)), r


def lemma_trace_limit(u, povm: Povm, m_max: int | None = None, tol: Tolerances | None = None,
                      cap: int | None = M_MAX_CAP) -> LemmaTraceLimit:
    """Trace sequence ``tr((PU)^m (PU)^{*m})`` and its limit from eigenspace geometry.

    ``P`` is the rank ``d-1`` projection. The limit equals the sum over
    eigenvalues of ``dim(Theta ∩ E_lambda)``. When ``m_max`` is not given
    it is chosen from the spectral radius of ``PU`` restricted to the
    complement of that sum, capped at ``cap`` (500 by default; None lifts
    the cap). A capped run that stops short reports ``converged=False``.
    """
    tol = resolve(tol)
    _require_two_proj(povm)
    um = np.asarray(u, dtype=complex)
    d = um.shape[0]
    parts = theta_eigenspaces(um, povm, tol)
    spectral_value = sum(te.dim for te in parts)
    pu = povm.elements[0] @ um
    inv_vectors = np.hstack([te.basis for te in parts]) if parts else np.zeros((d, 0))
    invariant = orthonormalize(inv_vectors, tol.tol_rank, ambient_dim=d)
    auto_m, rate = _default_m_max(pu, invariant, tol.tol_conv, cap)
    if m_max is None:
        m_max = auto_m
    if m_max < 1:
        raise ValidationError("m_max must be >= 1")
    seq = np.empty(m_max)
    y = np.eye(d, dtype=complex)
    for m in range(m_max):
        y = pu @ y
        seq[m] = hs_norm(y) ** 2
    gap = float(seq[-1] - spectral_value)
    return LemmaTraceLimit(seq, int(spectral_value), int(m_max), rate, gap, abs(gap) <= tol.tol_conv)


def nonergodic_tail_mass(u, povm: Povm, tol: Tolerances | None = None) -> float:
    """Measure of the set of outcome sequences that are eventually all 1."""
    _require_two_proj(povm)
    parts = theta_eigenspaces(u, povm, tol)
    return sum(te.dim for te in parts) / povm.dim


# ---------------------------------------------------------------------------
# verdict


class Status(str, enum.Enum):
    ERGODIC = "Ergodic"
    NON_ERGODIC = "NonErgodic"
    UNKNOWN = "UnknownSufficientOnly"


class Criterion(str, enum.Enum):
    RANK1 = "Rank1Equivalence"
    TWO_PROJ = "TwoProjEquivalence"
    KUSUOKA = "KusuokaSufficient"


@dataclass(frozen=True, eq=False)
class IndexSubsetWitness:
    """Proper set of outcomes closed under the transition graph."""

    subset: tuple[int, ...]

    def to_dict(self):
        return {"type": "index_subset", "subset": [i + 1 for i in self.subset]}


@dataclass(frozen=True, eq=False)
class ErgodicityVerdict:
    status: Status
    criterion_used: Criterion
    witness: object = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return bool(self.diagnostics.get("consistent", True))

    def to_dict(self):
        return {
            "status": self.status.value,
            "criterion_used": self.criterion_used.value,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "diagnostics": self.diagnostics,
        }


def _rank1_checks(p: Pifs, tol: Tolerances) -> dict:
    q = transition_matrix(p)
    irr = is_irreducible(q)
    search = rank1_subset_search(p.u, p.povm, tol)
    return {"transition_irreducible": irr.irreducible,
            "subset_search_found": search is not None,
            "closed_set": None if irr.closed_set is None else [i + 1 for i in irr.closed_set],
            "_search": search,
            "_irr": irr}


def ergodicity_verdict(p: Pifs) -> ErgodicityVerdict:
    """Decide ergodicity with the strongest criterion available for the POVM class.

    Rank-1 POVMs and ``(d-1, 1)`` PVMs get an exact answer; for anything else
    an irreducible Kraus family proves ergodicity and a reducible one leaves
    the question open (``UnknownSufficientOnly``).
    """
    tol = p.tol
    kind = p.povm.kind
    alg = algebra_irreducible(p.kraus, tol)
    diag = {"povm_kind": kind.tag.value, "algebra_dim": alg.dim, "full_dim": p.dim ** 2,
            "algebra_irreducible": alg.irreducible}

    if kind.is_two_proj:
        w = pvm2_eigenvector_in_theta(p.u, p.povm, tol)
        status = Status.NON_ERGODIC if w is not None else Status.ERGODIC
        diag["eigenvector_in_theta"] = w is not None
        agree = [alg.irreducible == (w is None)]
        if kind.is_rank_one:
            r1 = _rank1_checks(p, tol)
            diag.update({k: v for k, v in r1.items() if not k.startswith("_")})
            agree += [r1["transition_irreducible"] == (w is None),
                      r1["subset_search_found"] == (w is not None)]
        diag["consistent"] = all(agree)
        verdict = ErgodicityVerdict(status, Criterion.TWO_PROJ, w, diag)
    elif kind.is_rank_one:
        r1 = _rank1_checks(p, tol)
        diag.update({k: v for k, v in r1.items() if not k.startswith("_")})
        irr, search = r1["_irr"], r1["_search"]
        status = Status.ERGODIC if irr.irreducible else Status.NON_ERGODIC
        witness = None
        if not irr.irreducible:
            witness = search if search is not None else IndexSubsetWitness(irr.closed_set)
        diag["consistent"] = (alg.irreducible == irr.irreducible
                              and (search is None) == irr.irreducible)
        verdict = ErgodicityVerdict(status, Criterion.RANK1, witness, diag)
    else:
        status = Status.ERGODIC if alg.irreducible else Status.UNKNOWN
        diag["consistent"] = True
        if not alg.irreducible:
            log.info("reducible Kraus family outside the exact classes (algebra dim %d of %d)",
                     alg.dim, p.dim ** 2)
        verdict = ErgodicityVerdict(status, Criterion.KUSUOKA, None, diag)

    if not verdict.consistent:
        log.warning("ergodicity criteria disagree: %s", diag)
    return verdict


def verify_witness(p: Pifs, verdict: ErgodicityVerdict, atol: float = 1e-8) -> bool:
    """Re-check a non-ergodicity witness independently of how it was found."""
    w = verdict.witness
    if w is None:
        return verdict.status != Status.NON_ERGODIC
    if isinstance(w, EigenvectorWitness):
        v = w.vector
        ok_eig = np.linalg.norm(p.u @ v - w.eigenvalue * v) <= atol
        ok_theta = abs(np.vdot(p.povm.kind.z, v)) <= atol
        return bool(ok_eig and ok_theta and abs(np.linalg.norm(v) - 1) <= atol)
    if isinstance(w, SubspaceWitness):
        if not scaled_projection_criterion(p.u, p.povm, w.subspace, p.tol):
            return False
        return _no_cross_mass(p, w.subset, atol)
    if isinstance(w, IndexSubsetWitness):
        return _no_cross_mass(p, w.subset, atol)
    return False


def _no_cross_mass(p: Pifs, subset, atol: float) -> bool:
    q = transition_matrix(p).q
    inside = np.zeros(q.shape[0], dtype=bool)
    inside[list(subset)] = True
    if inside.all() or not inside.any():
        return False
    return bool(q[np.ix_(inside, ~inside)].max() <= atol and q[np.ix_(~inside, inside)].max() <= atol)


def _complex_list(a) -> list:
    a = np.asarray(a)
    if a.ndim == 1:
        return [[float(x.real), float(x.imag)] for x in a]
    return [_complex_list(row) for row in a]
