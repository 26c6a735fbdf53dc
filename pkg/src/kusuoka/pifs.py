"""Repeated measurement with unitary evolution as a partial iterated function
system, and the induced shift-invariant measure on outcome cylinders.

Outcome strings are tuples of 0-based symbols. ``parse_outcomes`` and
``format_outcomes`` convert to and from the 1-based text form ``"1,2,1"``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import ConsistencyError, DimensionMismatch, ValidationError, ZeroProbabilityBranch
from .numerics import as_square, dagger, hs_norm, psd_sqrt
from .quantum import DensityMatrix, Povm, Unitary, validate_povm
from .tolerances import Tolerances, resolve

OutcomeString = tuple


def parse_outcomes(text: str) -> tuple[int, ...]:
    """``"1,2,1"`` -> ``(0, 1, 0)``. The empty string maps to the empty tuple."""
    text = text.strip()
    if not text:
        return ()
    try:
        symbols = tuple(int(t) - 1 for t in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"cannot parse outcome string {text!r}") from exc
    if any(s < 0 for s in symbols):
        raise ValidationError(f"outcome symbols are 1-based: {text!r}")
    return symbols


def format_outcomes(s: Sequence[int]) -> str:
    return ",".join(str(i + 1) for i in s)


def all_strings(k: int, n: int) -> Iterator[tuple[int, ...]]:
    """Every string of length ``n`` over ``{0..k-1}`` in lexicographic order."""
    return itertools.product(range(k), repeat=n)


@dataclass(frozen=True, eq=False)
class Pifs:
    """The pair ``(U, POVM)`` with Kraus factors ``sqrt(Pi_i) U`` precomputed."""

    u: np.ndarray
    povm: Povm
    sqrt_elements: tuple[np.ndarray, ...]
    kraus: tuple[np.ndarray, ...]
    tol: Tolerances

    @classmethod
    def build(cls, u, povm, tol: Tolerances | None = None) -> "Pifs":
        tol = resolve(tol)
        if isinstance(u, Unitary):
            um = u.matrix
        else:
            um = Unitary.from_array(u, tol).matrix
        if not isinstance(povm, Povm):
            povm = validate_povm(povm, tol)
        if povm.dim != um.shape[0]:
            raise DimensionMismatch(f"unitary is {um.shape[0]}-dimensional, POVM is {povm.dim}-dimensional")
        roots = tuple(psd_sqrt(e, tol) for e in povm.elements)
        kraus = tuple(r @ um for r in roots)
        return cls(um, povm, roots, kraus, tol)

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    @property
    def k(self) -> int:
        return len(self.kraus)

    @property
    def zero_prob_threshold(self) -> float:
        return self.tol.zero_prob_threshold

    @property
    def rho_star(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex) / self.dim

    def channel(self, rho) -> np.ndarray:
        """``rho -> sum_i K_i rho K_i*``; fixes ``I/d``."""
        r = np.asarray(rho, dtype=complex)
        return sum(k @ r @ dagger(k) for k in self.kraus)

    def adjoint_family(self) -> list[np.ndarray]:
        """The operators ``U* sqrt(Pi_i)`` generating the cylinder measure."""
        return [dagger(k) for k in self.kraus]

    def check_string(self, s: Sequence[int]) -> tuple[int, ...]:
        s = tuple(int(i) for i in s)
        bad = [i for i in s if not 0 <= i < self.k]
        if bad:
            raise ValidationError(f"symbol(s) {[b + 1 for b in bad]} outside 1..{self.k}")
        return s

    def word(self, s: Sequence[int]) -> np.ndarray:
        """``K_{i_n} ... K_{i_1}`` for ``s = (i_1, ..., i_n)``."""
        m = np.eye(self.dim, dtype=complex)
        for i in s:
            m = self.kraus[i] @ m
        return m


def _state(p: Pifs, rho) -> np.ndarray:
    r = np.asarray(rho, dtype=complex)
    if r.shape != (p.dim, p.dim):
        raise DimensionMismatch(f"state has shape {r.shape}, expected {(p.dim, p.dim)}")
    return r


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, float(x)))


def outcome_prob(p: Pifs, rho, i: int) -> float:
    """Born-rule probability ``tr(Pi_i U rho U*)`` of outcome ``i``."""
    r = _state(p, rho)
    (i,) = p.check_string((i,))
    k = p.kraus[i]
    return _clamp(np.trace(k @ r @ dagger(k)).real)


def outcome_probs(p: Pifs, rho) -> np.ndarray:
    r = _state(p, rho)
    return np.array([_clamp(np.trace(k @ r @ dagger(k)).real) for k in p.kraus])


def evolve(p: Pifs, rho, i: int) -> DensityMatrix:
    """Post-measurement state after evolving by ``U`` and observing outcome ``i``.

    Raises ``ZeroProbabilityBranch`` where the outcome is (numerically) impossible.
    """
    r = _state(p, rho)
    (i,) = p.check_string((i,))
    k = p.kraus[i]
    out = k @ r @ dagger(k)
    prob = np.trace(out).real
    if prob <= p.zero_prob_threshold:
        raise ZeroProbabilityBranch(f"outcome {i + 1} has probability {prob:.3e}")
    out = out / prob
    return DensityMatrix(0.5 * (out + dagger(out)))


def string_prob(p: Pifs, rho, s: Sequence[int]) -> float:
    """Probability that the system started in ``rho`` emits ``s``.

    ``tr(M rho M*)`` with ``M = K_{i_n} ... K_{i_1}``; the empty string has
    probability 1.
    """
    r = _state(p, rho)
    s = p.check_string(s)
    if not s:
        return 1.0
    m = p.word(s)
    return _clamp(np.trace(m @ r @ dagger(m)).real)


def string_prob_recursive(p: Pifs, rho, s: Sequence[int]) -> float:
    """Same quantity evaluated step by step through the normalized states.

    Used only to cross-check :func:`string_prob`; a branch of probability
    below ``zero_prob_threshold`` short-circuits to 0.
    """
    r = _state(p, rho)
    s = p.check_string(s)
    total = 1.0
    for idx, i in enumerate(s):
        pi = outcome_prob(p, r, i)
        total *= pi
        if total <= p.zero_prob_threshold:
            return 0.0
        if idx + 1 < len(s):
            r = evolve(p, r, i).matrix
    return total


def cylinder_prob_pair(p: Pifs, s: Sequence[int]) -> tuple[float, float]:
    """Cylinder probability from the trace product and from the HS-norm form.

    The second value is ``|U* sqrt(Pi_{i_1}) ... U* sqrt(Pi_{i_n})|_HS^2 / d``.
    Neither value is clamped.
    """
    s = p.check_string(s)
    if not s:
        return 1.0, 1.0
    m = p.word(s)
    trace_form = np.trace(m @ dagger(m)).real / p.dim
    a = np.eye(p.dim, dtype=complex)
    for i in s:
        a = a @ dagger(p.kraus[i])
    hs_form = hs_norm(a) ** 2 / p.dim
    return float(trace_form), float(hs_form)


def kusuoka_cylinder_prob(p: Pifs, s: Sequence[int]) -> float:
    """Measure of the cylinder ``C_s`` when the system starts maximally mixed.

    Both closed forms are evaluated; a disagreement above ``tol_recon``
    raises ``ConsistencyError``.
    """
    a, b = cylinder_prob_pair(p, s)
    if abs(a - b) > p.tol.tol_recon:
        raise ConsistencyError(f"trace form {a!r} and HS form {b!r} disagree")
    return _clamp(a)


def cylinder_table(p: Pifs, n: int, rho=None) -> np.ndarray:
    """Probabilities of all strings of length ``n`` as an array of shape ``(k,)*n``.

    Entry ``[i_1, ..., i_n]`` is the probability of emitting ``(i_1..i_n)``
    from ``rho`` (default ``I/d``). Words are built for all strings at once.
    """
    d, k = p.dim, p.k
    r = p.rho_star if rho is None else _state(p, rho)
    if n == 0:
        return np.array(1.0)
    kr = np.stack(p.kraus)
    words = kr.copy()  # words[idx] = K_{i_n} ... K_{i_1}, idx lexicographic in (i_1..i_n)
    for _ in range(n - 1):
        words = np.einsum("jab,wbc->wjac", kr, words).reshape(-1, d, d)
    vals = np.einsum("wab,bc,wac->w", words, r, words.conj()).real
    return vals.reshape((k,) * n)


def hs_cylinder_table(p: Pifs, n: int) -> np.ndarray:
    """Like :func:`cylinder_table` but through ``|U* sqrt(Pi_{i_1}) ... |_HS^2 / d``."""
    d, k = p.dim, p.k
    if n == 0:
        return np.array(1.0)
    adj = np.stack(p.adjoint_family())
    prods = adj.copy()  # prods[idx] = A_{i_1} ... A_{i_n}
    for _ in range(n - 1):
        prods = np.einsum("wab,jbc->wjac", prods, adj).reshape(-1, d, d)
    vals = np.einsum("wab,wab->w", prods, prods.conj()).real / d
    return vals.reshape((k,) * n)
