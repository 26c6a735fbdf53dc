import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kusuoka.errors import BadDimension, NotPsd, SumNotIdentity, ZeroElement
from kusuoka.instances import (
    random_general_instance,
    random_pvm2_instance,
    random_rank1_instance,
    trine_vectors,
)
from kusuoka.numerics import orthonormalize, same_span
from kusuoka.quantum import (
    PovmTag,
    canonical_phase,
    computational_pvm,
    haar_random_unitary,
    maximally_mixed,
    pvm_from_basis,
    rank_one_povm,
    validate_povm,
)


def test_computational_qubit_pvm_has_every_view():
    povm = validate_povm([np.diag([1, 0]), np.diag([0, 1])])
    kind = povm.kind
    assert kind.is_pvm and kind.is_rank_one and kind.is_two_proj
    assert kind.ranks == (1, 1)
    assert kind.scale == 1.0
    # d = 2: both the rank-1 and the two-projection data are present
    assert kind.phis is not None and kind.z is not None
    assert kind.tag == PovmTag.TWO_PROJ_RANK_ONE


def test_trivial_half_identity_is_general():
    kind = validate_povm([np.eye(2) / 2, np.eye(2) / 2]).kind
    assert kind.tag == PovmTag.GENERAL
    assert kind.ranks == (2, 2)
    assert not kind.is_pvm and not kind.is_rank_one
    assert kind.is_scaled_projection


def test_eigenbasis_split_is_two_proj():
    kind = validate_povm([np.diag([1, 1, 0]), np.diag([0, 0, 1])]).kind
    assert kind.tag == PovmTag.TWO_PROJ_RANK_ONE
    np.testing.assert_allclose(kind.z, [0, 0, 1])
    assert same_span(kind.theta, orthonormalize([np.eye(3)[:, 0], np.eye(3)[:, 1]]))


def test_reversed_split_is_plain_pvm():
    # rank pattern (1, d-1) is not the ordered (d-1, 1) class
    kind = validate_povm([np.diag([0, 0, 1]), np.diag([1, 1, 0])]).kind
    assert kind.tag == PovmTag.PVM


def test_trine_is_rank_one():
    povm = rank_one_povm(trine_vectors())
    assert povm.kind.tag == PovmTag.RANK_ONE
    assert povm.kind.scale == pytest.approx(2 / 3)
    # the defining sum, done by hand
    total = sum((2 / 3) * np.outer(v, v.conj()) for v in trine_vectors())
    np.testing.assert_allclose(total, np.eye(2), atol=1e-15)


def test_rank_one_povm_normalizes():
    vs = trine_vectors() * np.array([[1.0], [5.0], [0.1]])
    a = rank_one_povm(vs)
    b = rank_one_povm(trine_vectors())
    for x, y in zip(a.elements, b.elements):
        np.testing.assert_allclose(x, y, atol=1e-15)


def test_single_identity_element():
    kind = validate_povm([np.eye(3)]).kind
    assert kind.tag == PovmTag.PVM
    assert kind.ranks == (3,)


def test_validate_rejects_bad_sum():
    with pytest.raises(SumNotIdentity) as exc:
        validate_povm([np.diag([1, 0]), np.diag([0, 0.5])])
    assert exc.value.residual == pytest.approx(0.5)


def test_validate_rejects_negative_element():
    with pytest.raises(NotPsd) as exc:
        validate_povm([np.diag([1.5, 1]), np.diag([-0.5, 0])])
    assert exc.value.index == 1


def test_validate_rejects_zero_element():
    with pytest.raises(ZeroElement) as exc:
        validate_povm([np.eye(2), np.zeros((2, 2))])
    assert exc.value.index == 1


def test_maximally_mixed():
    np.testing.assert_allclose(maximally_mixed(2).matrix, np.diag([0.5, 0.5]))
    np.testing.assert_allclose(maximally_mixed(3).matrix, np.eye(3) / 3)
    with pytest.raises(BadDimension):
        maximally_mixed(1)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
def test_haar_unitary_contract(d):
    u = haar_random_unitary(d, 11).matrix
    assert np.linalg.norm(u.conj().T @ u - np.eye(d)) <= 1e-10


def test_haar_unitary_deterministic():
    np.testing.assert_array_equal(haar_random_unitary(3, 42).matrix, haar_random_unitary(3, 42).matrix)


def test_haar_first_moment():
    # E|U_11|^2 = 1/d, Var = (d-1)/(d^2 (d+1))
    d, n = 3, 10_000
    x = np.array([abs(haar_random_unitary(d, s).matrix[0, 0]) ** 2 for s in range(n)])
    sigma = np.sqrt((d - 1) / (d * d * (d + 1)) / n)
    assert abs(x.mean() - 1 / d) <= 3 * sigma


def test_canonical_phase():
    v = canonical_phase(np.array([0, 1j, 1]) / np.sqrt(2))
    assert v[0] == 0 and v[1].imag == 0 and v[1].real > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 3), st.integers(0, 10**6))
def test_traces_sum_to_dimension(d, extra, seed):
    povm = random_general_instance(d, d + extra, seed).povm
    assert sum(np.trace(e).real for e in povm.elements) == pytest.approx(d, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2), st.integers(0, 10**6))
def test_rank_one_traces(d, extra, seed):
    povm = random_rank1_instance(d, d + extra, seed).povm
    k = povm.k
    for e in povm.elements:
        assert np.trace(e).real == pytest.approx(d / k, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6))
def test_two_proj_relations(d, seed):
    p1, p2 = random_pvm2_instance(d, seed).povm.elements
    np.testing.assert_allclose(p1 + p2, np.eye(d), atol=1e-10)
    assert np.linalg.norm(p1 @ p2) <= 1e-10


def test_pvm_from_basis_blocks():
    u = haar_random_unitary(4, 3).matrix
    povm = pvm_from_basis(u, [2, 1, 1])
    assert povm.kind.ranks == (2, 1, 1)
    assert povm.kind.tag == PovmTag.PVM


def test_computational_pvm_is_rank_one_for_d3():
    assert computational_pvm(3).kind.tag == PovmTag.RANK_ONE
