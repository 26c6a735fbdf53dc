"""Cylinder measures defined directly by a family of operators ``A_1..A_k``.

With ``sum_i A_i A_i* = I`` and a density ``rho`` fixed by
``Phi(rho) = sum_i A_i* rho A_i``, the cylinder of ``(i_1..i_n)`` gets mass
``tr(A_{i_n}* ... A_{i_1}* rho A_{i_1} ... A_{i_n})``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoFixedPoint, NonUniqueWarning, SumNotIdentity, ValidationError
from .ergodicity import algebra_irreducible
from .numerics import as_square, dagger, hs_norm
from .pifs import Pifs
from .quantum import DensityMatrix
from .tolerances import Tolerances, resolve

TRANSFER_MAX_DIM = 8
POWER_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    operators: tuple[np.ndarray, ...]

    @classmethod
    def build(cls, operators: Sequence, tol: Tolerances | None = None) -> "OperatorFamily":
        tol = resolve(tol)
        ops = tuple(as_square(a, f"operator {i + 1}") for i, a in enumerate(operators))
        if not ops:
            raise ValidationError("operator family is empty")
        d = ops[0].shape[0]
        if any(a.shape != (d, d) for a in ops):
            raise ValidationError("operators must share one dimension")
        res = hs_norm(sum(a @ dagger(a) for a in ops) - np.eye(d))
        if res > tol.tol_sum:
            raise SumNotIdentity(f"sum A_i A_i* differs from I by {res:.3e}", residual=res)
        return cls(ops)

    @classmethod
    def from_pifs(cls, p: Pifs) -> "OperatorFamily":
        """The family ``U* sqrt(Pi_i)`` whose measure with ``I/d`` is the PIFS cylinder measure."""
        return cls.build(p.adjoint_family(), p.tol)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def k(self) -> int:
        return len(self.operators)

    def dual_map(self, rho) -> np.ndarray:
        """``rho -> sum_i A_i* rho A_i``."""
        r = np.asarray(rho, dtype=complex)
        return sum(dagger(a) @ r @ a for a in self.operators)

    def transfer_matrix(self) -> np.ndarray:
        """Matrix of ``dual_map`` on row-major vectorized ``d x d`` matrices."""
        # vec(A* X A) = (A* kron A^T) vec(X) for row-major vec
        return sum(np.kron(dagger(a), a.T) for a in self.operators)


@dataclass(frozen=True, eq=False)
class KusuokaSystem:
    family: OperatorFamily
    rho: DensityMatrix
    irreducible: bool


def _normalize(v: np.ndarray, d: int) -> np.ndarray:
    rho = v.reshape(d, d)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + dagger(rho))


def _power_iteration(family: OperatorFamily, tol: Tolerances) -> np.ndarray:
    d = family.dim
    rho = np.eye(d, dtype=complex) / d
    avg = rho.copy()
    for n in range(1, POWER_MAX_ITER + 1):
        rho = family.dual_map(rho)
        # Cesaro averaging converges also for periodic maps
        avg = avg + (rho - avg) / (n + 1)
        cand = 0.5 * (avg + dagger(avg))
        if hs_norm(family.dual_map(cand) - cand) <= tol.tol_fix:
            return cand / np.trace(cand).real
        if hs_norm(family.dual_map(rho) - rho) <= tol.tol_fix:
            return rho / np.trace(rho).real
    raise NoFixedPoint("power iteration did not reach the residual floor")


def stationary_density(family: OperatorFamily, tol: Tolerances | None = None,
                       method: str | None = None) -> DensityMatrix:
    """Density ``rho`` with ``sum_i A_i* rho A_i = rho``.

    For ``d <= 8`` the fixed space is read off the transfer matrix; if it is
    more than one-dimensional a ``NonUniqueWarning`` is issued and the
    answer is the one reached by power iteration from ``I/d``. Larger ``d``
    use power iteration directly.
    """
    tol = resolve(tol)
    d = family.dim
    if method is None:
        method = "transfer" if d <= TRANSFER_MAX_DIM else "power"
    if method == "power":
        rho = _power_iteration(family, tol)
    elif method == "transfer":
        t = family.transfer_matrix()
        _, sv, vh = np.linalg.svd(t - np.eye(d * d))
        null_dim = int(np.sum(sv <= 1e-8 * max(1.0, sv[0])))
        if null_dim == 0:
            raise NoFixedPoint(f"transfer matrix has no eigenvalue 1 (smallest gap {sv[-1]:.3e})")
        if null_dim > 1:
            warnings.warn(f"eigenvalue 1 of the transfer matrix has multiplicity {null_dim}; "
                          "the stationary density is not unique", NonUniqueWarning, stacklevel=2)
            rho = _power_iteration(family, tol)
        else:
            rho = _normalize(vh[-1].conj(), d)
    else:
        raise ValidationError(f"unknown method {method!r}")
    res = hs_norm(family.dual_map(rho) - rho)
    if res > tol.tol_fix:
        raise NoFixedPoint(f"fixed-point residual {res:.3e} above tol_fix")
    return DensityMatrix(rho)


def fixed_point_residual(family: OperatorFamily, rho) -> float:
    r = np.asarray(rho, dtype=complex)
    return hs_norm(family.dual_map(r) - r)


def kusuoka_system(family: OperatorFamily, tol: Tolerances | None = None) -> KusuokaSystem:
    tol = resolve(tol)
    irr = algebra_irreducible(family.operators, tol).irreducible
    return KusuokaSystem(family, stationary_density(family, tol), irr)


def kusuoka_prob(sys: KusuokaSystem, s: Sequence[int]) -> float:
    """``tr(X* rho X)`` with ``X = A_{i_1} ... A_{i_n}``."""
    ops = sys.family.operators
    x = np.eye(sys.family.dim, dtype=complex)
    for i in s:
        if not 0 <= i < len(ops):
            raise ValidationError(f"symbol {i + 1} outside 1..{len(ops)}")
        x = x @ ops[i]
    return float(np.trace(dagger(x) @ sys.rho.matrix @ x).real)


def kusuoka_table(sys: KusuokaSystem, n: int) -> np.ndarray:
    """All length-``n`` cylinder masses, shape ``(k,)*n``."""
    d, k = sys.family.dim, sys.family.k
    if n == 0:
        return np.array(1.0)
    ops = np.stack(sys.family.operators)
    prods = ops.copy()
    for _ in range(n - 1):
        prods = np.einsum("wab,jbc->wjac", prods, ops).reshape(-1, d, d)
    vals = np.einsum("wba,bc,wca->w", prods.conj(), sys.rho.matrix, prods).real
    return vals.reshape((k,) * n)
