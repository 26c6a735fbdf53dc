import warnings

import numpy as np
import pytest

from kusuoka.ergodicity import algebra_irreducible
from kusuoka.errors import NonUniqueWarning, SumNotIdentity
from kusuoka.general_kusuoka import (
    OperatorFamily,
    fixed_point_residual,
    kusuoka_prob,
    kusuoka_system,
    kusuoka_table,
    stationary_density,
)
from kusuoka.instances import random_general_instance, seeded_instances
from kusuoka.pifs import cylinder_table
from kusuoka.quantum import haar_random_unitary

INSTANCES = [p for kind in ("rank1", "pvm2", "pvm", "general") for p in seeded_instances(kind, 5, seed=8)]


def twirled(p, seed):
    """Family ``V* A_i V`` for a Haar ``V``: same algebra up to conjugation."""
    v = haar_random_unitary(p.dim, seed).matrix
    return OperatorFamily.build([v.conj().T @ a @ v for a in p.adjoint_family()])


@pytest.mark.parametrize("p", INSTANCES, ids=lambda p: f"{p.povm.kind.tag.value}-d{p.dim}")
def test_pifs_family_fixes_maximally_mixed(p):
    fam = OperatorFamily.from_pifs(p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonUniqueWarning)
        rho = stationary_density(fam)
    np.testing.assert_allclose(rho.matrix, np.eye(p.dim) / p.dim, atol=1e-10)
    assert fixed_point_residual(fam, rho) <= 1e-10


def test_single_unitary_returns_maximally_mixed():
    u = haar_random_unitary(3, 2).matrix
    fam = OperatorFamily.build([u])
    with pytest.warns(NonUniqueWarning):
        rho = stationary_density(fam)
    np.testing.assert_allclose(rho.matrix, np.eye(3) / 3, atol=1e-10)


def test_diagonal_family_is_not_unique():
    fam = OperatorFamily.build([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    with pytest.warns(NonUniqueWarning):
        rho = stationary_density(fam)
    assert fixed_point_residual(fam, rho) <= 1e-10
    # every diagonal density is fixed
    for a in (0.1, 0.5, 0.9):
        assert fixed_point_residual(fam, np.diag([a, 1 - a])) <= 1e-15


def test_power_iteration_matches_transfer():
    p = seeded_instances("general", 3, seed=1)[2]
    fam = twirled(p, 4)
    a = stationary_density(fam, method="transfer")
    b = stationary_density(fam, method="power")
    np.testing.assert_allclose(a.matrix, b.matrix, atol=1e-9)


def test_family_must_sum_to_identity():
    with pytest.raises(SumNotIdentity):
        OperatorFamily.build([np.eye(2), np.eye(2)])


@pytest.mark.parametrize("p", INSTANCES, ids=lambda p: f"{p.povm.kind.tag.value}-d{p.dim}")
def test_pifs_measure_is_kusuoka_measure(p):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonUniqueWarning)
        sys = kusuoka_system(OperatorFamily.from_pifs(p))
    n_max = 6 if p.k <= 3 else 4
    for n in range(1, n_max + 1):
        np.testing.assert_allclose(kusuoka_table(sys, n), cylinder_table(p, n), atol=1e-12)


def test_empty_string():
    sys = kusuoka_system(OperatorFamily.from_pifs(seeded_instances("general", 1)[0]))
    assert kusuoka_prob(sys, ()) == pytest.approx(1.0)


def test_trivial_family():
    with pytest.warns(NonUniqueWarning):
        sys = kusuoka_system(OperatorFamily.build([np.eye(3)]))
    for s in [(0,), (0, 0, 0)]:
        assert kusuoka_prob(sys, s) == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(6))
def test_twirled_irreducible_families(seed):
    p = seeded_instances("general", 6, seed=seed)[seed]
    fam = twirled(p, seed + 100)
    assert algebra_irreducible(fam.operators).irreducible
    with warnings.catch_warnings():
        warnings.simplefilter("error", NonUniqueWarning)
        sys = kusuoka_system(fam)
    assert sys.irreducible
    assert np.linalg.eigvalsh(sys.rho.matrix).min() > 1e-12
    prev = kusuoka_table(sys, 1)
    assert prev.sum() == pytest.approx(1, abs=1e-12)
    for n in range(2, 5):
        table = kusuoka_table(sys, n)
        np.testing.assert_allclose(table.sum(axis=-1), prev, atol=1e-12)
        np.testing.assert_allclose(table.sum(axis=0), prev, atol=1e-12)
        prev = table
    assert kusuoka_prob(sys, (0, 1, 0)) == pytest.approx(kusuoka_table(sys, 3)[0, 1, 0], abs=1e-14)


def test_non_unital_family_has_non_uniform_density():
    # amplitude-damping type family: A_1 A_1* + A_2 A_2* = I but the dual map is not unital
    g = 0.3
    a1 = np.array([[1, 0], [0, np.sqrt(1 - g)]])
    a2 = np.array([[0, 0], [np.sqrt(g), 0]])
    fam = OperatorFamily.build([a1, a2])
    rho = stationary_density(fam)
    assert fixed_point_residual(fam, rho) <= 1e-10
    assert abs(np.trace(rho.matrix) - 1) <= 1e-12
    assert np.linalg.norm(rho.matrix - np.eye(2) / 2) > 1e-3


def test_large_dimension_uses_power_iteration():
    p = random_general_instance(9, 3, 0)
    rho = stationary_density(OperatorFamily.from_pifs(p))
    np.testing.assert_allclose(rho.matrix, np.eye(9) / 9, atol=1e-10)
