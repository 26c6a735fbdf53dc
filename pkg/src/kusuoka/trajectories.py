"""Seeded Monte Carlo sampling of measurement records.

Trajectory ``j`` of a run with master seed ``s`` draws its uniforms from a
Philox stream keyed by ``(s, j)``. Trajectories are therefore identical
whether sampled alone, in a batch, or on any number of threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, ValidationError
from .pifs import Pifs, format_outcomes
from .quantum import DensityMatrix

BATCH = 4096


def stream(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for trajectory ``index`` under master ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def _uniforms(seed: int, index: int, n: int) -> np.ndarray:
    # 1 - U[0,1) lies in (0, 1], so u = 0 can never select a zero-probability outcome
    return 1.0 - stream(seed, index).random(n)


def _run(p: Pifs, u: np.ndarray, record_states: bool = False):
    """Evolve ``len(u)`` trajectories in lockstep; ``u[j, t]`` drives step ``t`` of trajectory ``j``.

    Outcome ``i`` is chosen when ``u`` falls in ``(cdf_{i-1}, cdf_i]``.
    """
    n_traj, n = u.shape
    d, k = p.dim, p.k
    kraus = np.stack(p.kraus)
    rho = np.broadcast_to(p.rho_star, (n_traj, d, d)).copy()
    outcomes = np.empty((n_traj, n), dtype=np.int16)
    states = [rho.copy()] if record_states else None
    rows = np.arange(n_traj)
    kraus_h = kraus.conj().transpose(0, 2, 1)
    for t in range(n):
        left = np.matmul(kraus[None], rho[:, None])  # K_i rho, shape (n, k, d, d)
        # tr(K_i rho K_i*) without forming every branch
        probs = np.einsum("niab,iab->ni", left, kraus.conj()).real
        probs = np.where(probs > p.zero_prob_threshold, probs, 0.0)
        total = probs.sum(axis=1)
        if np.abs(total - 1).max() > p.tol.tol_sum:
            raise ConsistencyError(f"outcome probabilities sum to {total.min()}..{total.max()}")
        cdf = np.cumsum(probs / total[:, None], axis=1)
        choice = np.minimum((cdf < u[:, t, None]).sum(axis=1), k - 1)
        outcomes[:, t] = choice
        chosen = np.matmul(left[rows, choice], kraus_h[choice])
        rho = chosen / probs[rows, choice][:, None, None]
        rho = 0.5 * (rho + rho.conj().transpose(0, 2, 1))
        if record_states:
            states.append(rho.copy())
    return outcomes, states


@dataclass(frozen=True, eq=False)
class Trajectory:
    outcomes: tuple[int, ...]
    seed: int
    states: list[DensityMatrix] | None = None

    @property
    def length(self) -> int:
        return len(self.outcomes)

    def render(self) -> str:
        return format_outcomes(self.outcomes)


def sample_trajectory(p: Pifs, n: int, seed: int, record_states: bool = False, index: int = 0) -> Trajectory:
    """One measurement record of length ``n`` started from ``I/d``.

    ``index`` selects the stream; trajectory ``j`` of :func:`sample_outcomes`
    equals ``sample_trajectory(p, n, seed, index=j)``.
    """
    if n < 1:
        raise ValidationError("trajectory length must be >= 1")
    out, states = _run(p, _uniforms(seed, index, n)[None, :], record_states)
    dms = None if states is None else [DensityMatrix(s[0]) for s in states]
    return Trajectory(tuple(int(i) for i in out[0]), seed, dms)


def sample_outcomes(p: Pifs, n_samples: int, traj_len: int, seed: int, threads: int = 1) -> np.ndarray:
    """Outcome records of ``n_samples`` independent trajectories, shape ``(n_samples, traj_len)``."""
    if traj_len < 1 or n_samples < 1:
        raise ValidationError("need n_samples >= 1 and traj_len >= 1")
    chunks = [(a, min(a + BATCH, n_samples)) for a in range(0, n_samples, BATCH)]

    def work(bounds):
        a, b = bounds
        u = np.stack([_uniforms(seed, j, traj_len) for j in range(a, b)])
        return _run(p, u)[0]

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    return np.vstack(parts)


@dataclass(frozen=True, eq=False)
class EmpiricalStats:
    """Prefix counts over independent trajectories.

    ``cylinder_counts[s]`` counts trajectories whose first ``len(s)`` outcomes
    are ``s``; every string of length ``1..prefix_len`` is present.
    ``symbol_frequencies[i]`` is the fraction of all recorded steps showing ``i``.
    """

    sample_count: int
    prefix_len: int
    k: int
    cylinder_counts: dict = field(repr=False)
    symbol_frequencies: np.ndarray = field(repr=False)

    def frequency(self, s: Sequence[int]) -> float:
        return self.cylinder_counts[tuple(s)] / self.sample_count

    def standard_error(self, s: Sequence[int]) -> float:
        f = self.frequency(s)
        return float(np.sqrt(f * (1 - f) / self.sample_count))

    @property
    def standard_errors(self) -> dict:
        return {s: self.standard_error(s) for s in self.cylinder_counts}

    def to_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "prefix_len": self.prefix_len,
            "symbol_frequencies": [float(x) for x in self.symbol_frequencies],
            "cylinders": [
                {"string": format_outcomes(s), "count": int(c),
                 "frequency": c / self.sample_count, "standard_error": self.standard_error(s)}
                for s, c in self.cylinder_counts.items()
            ],
        }


def prefix_stats(outcomes: np.ndarray, k: int, prefix_len: int) -> EmpiricalStats:
    n_samples, traj_len = outcomes.shape
    if not 1 <= prefix_len <= traj_len:
        raise ValidationError(f"prefix length must be in 1..{traj_len}")
    counts = {}
    code = np.zeros(n_samples, dtype=np.int64)
    for length in range(1, prefix_len + 1):
        code = code * k + outcomes[:, length - 1]
        binned = np.bincount(code, minlength=k ** length)
        for c, s in enumerate(np.ndindex(*(k,) * length)):
            counts[s] = int(binned[c])
    freqs = np.bincount(outcomes.reshape(-1), minlength=k) / outcomes.size
    return EmpiricalStats(n_samples, prefix_len, k, counts, freqs)


def empirical_cylinder_freq(p: Pifs, L: int, n_samples: int, traj_len: int, seed: int,
                            threads: int = 1) -> EmpiricalStats:
    """Empirical frequencies of all cylinders of length ``<= L``."""
    if L > traj_len:
        raise ValidationError("prefix length L must not exceed traj_len")
    return prefix_stats(sample_outcomes(p, n_samples, traj_len, seed, threads), p.k, L)


def birkhoff_average(p: Pifs, f, traj_len: int, seed: int, index: int = 0) -> float:
    """Time average of ``f(outcome_t)`` along one trajectory; ``f`` is indexed by symbol."""
    weights = np.asarray(f, dtype=float)
    if weights.shape != (p.k,):
        raise ValidationError(f"need one weight per outcome ({p.k})")
    out, _ = _run(p, _uniforms(seed, index, traj_len)[None, :])
    return float(weights[out[0]].mean())


def constant_tail_fraction(outcomes: np.ndarray, symbol: int, window: int | None = None) -> float:
    """Fraction of records whose last ``window`` outcomes (default: all) equal ``symbol``."""
    tail = outcomes if window is None else outcomes[:, -window:]
    return float(np.all(tail == symbol, axis=1).mean())
