"""Exhaustive checks that every outcome string is as likely as its reverse."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EnumerationTooLarge, WrongPovmKind
from .pifs import Pifs, all_strings, cylinder_table, string_prob

ENUMERATION_GUARD = 10**7


@dataclass(frozen=True)
class ReversibilityScan:
    max_discrepancy: float
    worst_string: tuple[int, ...]
    strings_checked: int


def reversibility_scan(p: Pifs, n_max: int) -> ReversibilityScan:
    """Largest ``|P(C_s) - P(C_reverse(s))|`` over all strings of length ``1..n_max``.

    Ties keep the first string in (length, lexicographic) order.
    """
    k = p.k
    total = sum(k ** n for n in range(1, n_max + 1))
    if total > ENUMERATION_GUARD:
        raise EnumerationTooLarge(f"{total} strings exceeds the guard of {ENUMERATION_GUARD}")
    best, worst = -1.0, ()
    for n in range(1, n_max + 1):
        table = cylinder_table(p, n)
        disc = np.abs(table - table.transpose(tuple(range(n - 1, -1, -1))))
        flat = int(np.argmax(disc))
        if disc.flat[flat] > best:
            best = float(disc.flat[flat])
            worst = tuple(int(i) for i in np.unravel_index(flat, disc.shape))
    return ReversibilityScan(max(best, 0.0), worst, total)


@dataclass(frozen=True)
class FactCheck:
    holds: bool
    max_residual_first_two: float  # p(1^m 2 | I/d) vs p(1^m | Pi_2) / d
    max_residual_factorization: float  # p(s | I/d) vs p(prefix | I/d) * p(suffix | Pi_2)


def fact_identities_check(p: Pifs, m_max: int, n_max: int = 6) -> FactCheck:
    """Check the two identities behind reversibility for a ``(d-1, 1)`` PVM.

    Outcome 1 (index 0) is the rank ``d-1`` projection and outcome 2 (index 1)
    the rank-1 projection ``Pi_2``, which as a state is pure.

    * ``p(1^m 2)`` from ``I/d`` equals ``p(1^m)`` from ``Pi_2`` divided by ``d``,
      for ``m = 0..m_max``;
    * whenever outcome 2 occurs at a position ``r`` before the end of ``s``,
      ``p(s)`` factorizes as ``p(s[:r+1]) * p(s[r+1:] | Pi_2)``, checked on
      every string up to length ``n_max``.
    """
    if not p.povm.kind.is_two_proj:
        raise WrongPovmKind("identities hold for two-projection PVMs of ranks (d-1, 1)")
    d = p.dim
    rho = p.rho_star
    pi2 = p.povm.elements[1]
    r1 = 0.0
    for m in range(m_max + 1):
        lhs = string_prob(p, rho, (0,) * m + (1,))
        rhs = string_prob(p, pi2, (0,) * m) / d
        r1 = max(r1, abs(lhs - rhs))
    r2 = 0.0
    for n in range(2, n_max + 1):
        for s in all_strings(p.k, n):
            whole = string_prob(p, rho, s)
            for r in range(n - 1):
                if s[r] == 1:
                    split = string_prob(p, rho, s[:r + 1]) * string_prob(p, pi2, s[r + 1:])
                    r2 = max(r2, abs(whole - split))
    tol = p.tol.tol_rev
    return FactCheck(r1 <= tol and r2 <= tol, r1, r2)
