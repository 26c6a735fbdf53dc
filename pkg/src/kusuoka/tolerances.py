"""Numerical tolerances shared by every module."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Named tolerances; every check in the library reads one of these.

    Relative checks (``tol_herm``, ``tol_recon``) are scaled by the
    Hilbert-Schmidt norm of the matrix under test. The rest are absolute.
    """

    tol_unit: float = 1e-10
    tol_herm: float = 1e-10
    tol_psd: float = 1e-10
    tol_rank: float = 1e-9
    tol_recon: float = 1e-9
    tol_orth: float = 1e-9
    tol_cluster: float = 1e-8
    tol_sum: float = 1e-10
    tol_trace: float = 1e-10
    tol_rev: float = 1e-10
    tol_fix: float = 1e-10
    tol_pd: float = 1e-12
    tol_conv: float = 1e-6
    zero_prob_threshold: float = 1e-12

    def replace(self, **changes) -> "Tolerances":
        unknown = set(changes) - set(self.names())
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return dataclasses.replace(self, **{k: float(v) for k, v in changes.items()})

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


DEFAULT = Tolerances()


def resolve(tol: Tolerances | None) -> Tolerances:
    return DEFAULT if tol is None else tol
