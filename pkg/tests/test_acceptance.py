"""Acceptance criteria 1-10.

Each test prints one ``PASS``/``FAIL`` line; the lines are repeated in the
pytest terminal summary. Run on its own with::

    pytest tests/test_acceptance.py -v
    python tests/test_acceptance.py
"""

import io
import itertools
import json
import time
import warnings
from contextlib import redirect_stdout
from pathlib import Path

import numpy as np

from kusuoka.cli import main as cli_main
from kusuoka.ergodicity import (
    Status,
    algebra_irreducible,
    ergodicity_verdict,
    lemma_trace_limit,
    pvm2_eigenvector_in_theta,
    rank1_subset_search,
)
from kusuoka.errors import NonUniqueWarning
from kusuoka.general_kusuoka import OperatorFamily, fixed_point_residual, stationary_density
from kusuoka.instances import example_eigenbasis_pvm, hadamard_qubit, seeded_instances
from kusuoka.markov import is_irreducible, markov_cylinder_table, transition_matrix
from kusuoka.numerics import unitary_eig
from kusuoka.pifs import Pifs, cylinder_table, hs_cylinder_table
from kusuoka.quantum import haar_random_unitary, pvm_from_basis
from kusuoka.reversibility import reversibility_scan
from kusuoka.trajectories import constant_tail_fraction, empirical_cylinder_freq, sample_outcomes

EX8_MODEL = str(Path(__file__).resolve().parent.parent / "demos" / "models" / "example_eigenbasis.json")
RESULTS: list[str] = []


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)


def cli_json(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(list(argv))
    assert code == 0
    return json.loads(buf.getvalue())["results"]


def test_01_eigenbasis_example():
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 11):
        ones = cli_json("prob", EX8_MODEL, "--string", ",".join(["1"] * n))["probability"]
        twos = cli_json("prob", EX8_MODEL, "--string", ",".join(["2"] * n))["probability"]
        worst = max(worst, abs(ones - 2 / 3), abs(twos - 1 / 3))
    p = example_eigenbasis_pvm()
    mixed = 0.0
    for n in range(2, 11):
        table = cylinder_table(p, n).reshape(-1)
        mixed = max(mixed, table[1:-1].max())  # everything except 1^n and 2^n
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and mixed <= 1e-12 and elapsed < 1.0
    report(1, ok, f"constant-string error {worst:.1e}, max mixed {mixed:.1e}, {elapsed:.2f}s")
    assert ok


def test_02_qubit_eigenbasis_corollary():
    t0 = time.perf_counter()
    disagreements = 0
    for seed in range(50):
        u = haar_random_unitary(2, 1000 + seed).matrix
        eig_basis = np.hstack([e for _, e in unitary_eig(u).eigenspaces()])
        v = ergodicity_verdict(Pifs.build(u, pvm_from_basis(eig_basis, [1, 1])))
        disagreements += v.status != Status.NON_ERGODIC
    for seed in range(50):
        u = haar_random_unitary(2, 2000 + seed).matrix
        basis = haar_random_unitary(2, 3000 + seed).matrix
        v = ergodicity_verdict(Pifs.build(u, pvm_from_basis(basis, [1, 1])))
        disagreements += v.status != Status.ERGODIC
    elapsed = time.perf_counter() - t0
    ok = disagreements == 0 and elapsed < 5.0
    report(2, ok, f"{disagreements} disagreements over 50 eigenbasis + 50 generic PVMs, {elapsed:.2f}s")
    assert ok


def test_03_rank_one_equivalence():
    t0 = time.perf_counter()
    instances = seeded_instances("rank1", 120, seed=2024)
    disagreements, reducible = 0, 0
    for p in instances:
        ii = algebra_irreducible(p.kraus).irreducible
        iii = rank1_subset_search(p.u, p.povm) is None
        iv = is_irreducible(transition_matrix(p)).irreducible
        disagreements += not (ii == iii == iv)
        reducible += not iv
    dims = sorted({(p.dim, p.k) for p in instances})
    elapsed = time.perf_counter() - t0
    ok = disagreements == 0 and len(instances) >= 100 and elapsed < 60.0
    report(3, ok, f"{len(instances)} instances ({reducible} non-ergodic, {len(dims)} (d,k) pairs), "
                  f"{disagreements} disagreements, {elapsed:.2f}s")
    assert ok


def test_04_two_projection_equivalence():
    t0 = time.perf_counter()
    instances = seeded_instances("pvm2", 120, seed=2024)
    disagreements, found = 0, 0
    for p in instances:
        has_eigvec = pvm2_eigenvector_in_theta(p.u, p.povm) is not None
        disagreements += has_eigvec != (not algebra_irreducible(p.kraus).irreducible)
        found += has_eigvec
    elapsed = time.perf_counter() - t0
    ok = disagreements == 0 and len(instances) >= 100 and elapsed < 60.0
    report(4, ok, f"{len(instances)} instances ({found} with eigenvector in Theta), "
                  f"{disagreements} disagreements, {elapsed:.2f}s")
    assert ok


def test_05_trace_limit():
    t0 = time.perf_counter()
    worst, worst_m = 0.0, 0
    for p in seeded_instances("pvm2", 25, seed=55):
        # m_max from the spectral gap, without the default 500-step cap
        res = lemma_trace_limit(p.u, p.povm, cap=None)
        worst = max(worst, abs(res.sequence[-1] - res.spectral_value))
        worst_m = max(worst_m, res.m_max)
    ex = example_eigenbasis_pvm()
    res = lemma_trace_limit(ex.u, ex.povm, m_max=100)
    const_err = float(np.abs(res.sequence - 2).max())
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and const_err <= 1e-12 and res.spectral_value == 2 and elapsed < 30.0
    report(5, ok, f"max |trace - limit| {worst:.1e} (largest m_max {worst_m}), "
                  f"example deviation from 2 {const_err:.1e}, {elapsed:.2f}s")
    assert ok


def test_06_reversibility():
    t0 = time.perf_counter()
    worst = max(reversibility_scan(p, 8).max_discrepancy for p in seeded_instances("pvm2", 25, seed=66))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 60.0
    report(6, ok, f"max discrepancy {worst:.1e} over 25 instances, n <= 8, {elapsed:.2f}s")
    assert ok


def test_07_measure_identities():
    cons = shift = forms = total = 0.0
    for kind in ("rank1", "pvm2", "pvm", "general"):
        for p in seeded_instances(kind, 25, seed=77):
            tables = [np.array(1.0)] + [cylinder_table(p, n) for n in range(1, 7)]
            for n in range(1, 7):
                cons = max(cons, np.abs(tables[n].sum(axis=-1) - tables[n - 1]).max())
                shift = max(shift, np.abs(tables[n].sum(axis=0) - tables[n - 1]).max())
                forms = max(forms, np.abs(tables[n] - hs_cylinder_table(p, n)).max())
            total = max(total, abs(tables[6].sum() - 1))
    ok = cons <= 1e-10 and shift <= 1e-10 and forms <= 1e-10 and total <= 1e-9
    report(7, ok, f"consistency {cons:.1e}, shift {shift:.1e}, trace vs HS {forms:.1e}, "
                  f"|sum - 1| {total:.1e} over 4 x 25 instances")
    assert ok


def test_08_markov_layer():
    err = bist = 0.0
    for p in seeded_instances("rank1", 25, seed=88):
        q = transition_matrix(p)
        bist = max(bist, q.row_residual(), q.column_residual())
        for n in range(1, 7):
            err = max(err, np.abs(markov_cylinder_table(q, n) - cylinder_table(p, n)).max())
    ok = err <= 1e-10 and bist <= 1e-10
    report(8, ok, f"Markov vs trace {err:.1e}, bistochastic residual {bist:.1e}")
    assert ok


def test_09_monte_carlo():
    t0 = time.perf_counter()
    had = hadamard_qubit()
    n = 100_000
    stats = empirical_cylinder_freq(had, 2, n, 3, seed=9)
    exact = cylinder_table(had, 2)
    z_max = 0.0
    for s in itertools.product(range(2), repeat=2):
        z_max = max(z_max, abs(stats.frequency(s) - exact[s]) / stats.standard_error(s))
    f11 = stats.frequency((0, 0))
    ex = example_eigenbasis_pvm()
    m = 10_000
    frac = constant_tail_fraction(sample_outcomes(ex, m, 50, seed=99), 0)
    z_ex = abs(frac - 2 / 3) / np.sqrt(frac * (1 - frac) / m)
    elapsed = time.perf_counter() - t0
    ok = z_max <= 3 and z_ex <= 3 and elapsed < 120.0
    report(9, ok, f"Hadamard max |z| {z_max:.2f} (freq(1,1) = {f11:.4f}), "
                  f"all-1 fraction {frac:.4f} (|z| {z_ex:.2f}), {elapsed:.2f}s")
    assert ok


def test_10_fixed_point():
    worst = 0.0
    instances = [p for kind in ("rank1", "pvm2", "pvm", "general") for p in seeded_instances(kind, 7, seed=10)][:25]
    for p in instances:
        fam = OperatorFamily.from_pifs(p)
        with warnings.catch_warnings():
            # reducible instances legitimately warn; the answer must still be I/d
            warnings.simplefilter("ignore", NonUniqueWarning)
            rho = stationary_density(fam)
        dev = np.abs(rho.matrix - np.eye(p.dim) / p.dim).max()
        worst = max(worst, dev, fixed_point_residual(fam, rho))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        stationary_density(OperatorFamily.build([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]))
    warned = any(issubclass(w.category, NonUniqueWarning) for w in caught)
    ok = worst <= 1e-10 and warned
    report(10, ok, f"max deviation/residual {worst:.1e} over {len(instances)} instances, "
                   f"diagonal family warns: {warned}")
    assert ok


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    raise SystemExit(1 if failed else 0)
