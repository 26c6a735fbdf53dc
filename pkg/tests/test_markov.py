import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kusuoka.errors import EmptyString, WrongPovmKind
from kusuoka.instances import (
    example_eigenbasis_pvm,
    hadamard_qubit,
    random_rank1_instance,
    reducible_rank1_instance,
    seeded_instances,
    trine_vectors,
)
from kusuoka.markov import (
    TransitionMatrix,
    is_irreducible,
    markov_cylinder_prob,
    markov_cylinder_table,
    transition_matrix,
)
from kusuoka.pifs import Pifs, cylinder_table
from kusuoka.quantum import computational_pvm, rank_one_povm

PHASE = np.diag([1, np.exp(0.9j)])


def test_hadamard_transition():
    q = transition_matrix(hadamard_qubit())
    np.testing.assert_allclose(q.q, np.full((2, 2), 0.5), atol=1e-15)


def test_diagonal_unitary_gives_identity():
    q = transition_matrix(Pifs.build(PHASE, computational_pvm(2)))
    np.testing.assert_allclose(q.q, np.eye(2), atol=1e-15)


def test_identity_evolution_uses_frame_overlaps():
    vs = trine_vectors()
    q = transition_matrix(Pifs.build(np.eye(2), rank_one_povm(vs)))
    expected = (2 / 3) * np.abs(vs.conj() @ vs.T) ** 2
    np.testing.assert_allclose(q.q, expected, atol=1e-14)
    np.testing.assert_allclose(np.diag(q.q), 2 / 3)


def test_transition_needs_rank_one():
    with pytest.raises(WrongPovmKind):
        transition_matrix(example_eigenbasis_pvm())


def test_markov_single_symbol():
    q = transition_matrix(random_rank1_instance(3, 5, 2))
    for i in range(5):
        assert markov_cylinder_prob(q, (i,)) == pytest.approx(0.2)


def test_markov_hadamard_string():
    q = transition_matrix(hadamard_qubit())
    assert markov_cylinder_prob(q, (0, 1, 0)) == pytest.approx(1 / 8, abs=1e-15)


def test_markov_forbidden_step():
    q = transition_matrix(Pifs.build(PHASE, computational_pvm(2)))
    assert markov_cylinder_prob(q, (0, 1)) == 0.0


def test_markov_empty_string():
    with pytest.raises(EmptyString):
        markov_cylinder_prob(transition_matrix(hadamard_qubit()), ())


def test_irreducible_complete_graph():
    assert is_irreducible(TransitionMatrix(np.full((2, 2), 0.5))).irreducible


def test_identity_is_reducible_with_witness():
    res = is_irreducible(TransitionMatrix(np.eye(2)))
    assert not res.irreducible
    assert res.closed_set == (0,)


def test_block_diagonal_is_reducible():
    a = np.array([[0.3, 0.7], [0.7, 0.3]])
    q = np.zeros((4, 4))
    q[:2, :2] = a
    q[2:, 2:] = a
    res = is_irreducible(TransitionMatrix(q))
    assert not res.irreducible
    assert res.closed_set == (0, 1)


def test_one_way_leak_picks_closed_component():
    # state 0 leaks into {1, 2}; only {1, 2} is closed
    q = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, 0.5]])
    res = is_irreducible(TransitionMatrix(q))
    assert not res.irreducible
    assert res.closed_set == (1, 2)


@pytest.mark.parametrize("p", seeded_instances("rank1", 25, seed=3), ids=lambda p: f"d{p.dim}-k{p.k}")
def test_markov_matches_trace_formula(p):
    q = transition_matrix(p)
    assert q.is_bistochastic(1e-10)
    assert np.all(q.q >= 0) and np.all(q.q <= 1 + 1e-12)
    n_max = 6 if p.k <= 4 else 5
    for n in range(1, n_max + 1):
        np.testing.assert_allclose(markov_cylinder_table(q, n), cylinder_table(p, n), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2), st.integers(0, 10**6))
def test_uniform_is_stationary(d, extra, seed):
    q = transition_matrix(random_rank1_instance(d, d + extra, seed))
    k = q.k
    np.testing.assert_allclose(np.full(k, 1 / k) @ q.q, np.full(k, 1 / k), atol=1e-12)
    assert q.column_residual() <= 1e-10


def test_reducible_instance_has_closed_set():
    q = transition_matrix(reducible_rank1_instance(4, 4, 0, split=2))
    res = is_irreducible(q)
    assert not res.irreducible
    s = list(res.closed_set)
    rest = [j for j in range(4) if j not in s]
    assert q.q[np.ix_(s, rest)].max() <= 1e-12
