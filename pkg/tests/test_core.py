import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from tensornorm.core import (
    Biquadratic,
    SymMatrix,
    Tensor3,
    contract,
    flatten_biquadratic,
    gram,
    inner,
    multilinear_form,
    rank_one,
    slice_matrices,
    unfold,
)

dims3 = st.tuples(*[st.integers(1, 4)] * 3)
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def tensors(draw, dims=dims3):
    d = draw(dims)
    return Tensor3(draw(arrays(np.float64, d, elements=finite)))


# listed entries of the worked example, one-based (i, j, p, q) -> value
EX1_T3 = {
    (1, 1, 1, 1): 29, (1, 1, 2, 1): -13, (2, 1, 1, 1): -13, (2, 1, 2, 1): 35,
    (1, 2, 1, 2): 6, (2, 2, 2, 2): 21, (1, 1, 2, 2): 19, (2, 2, 1, 1): 19,
    (1, 2, 2, 1): -14, (2, 1, 1, 2): -14, (1, 1, 1, 2): 8, (1, 2, 1, 1): 8,
    (2, 1, 2, 2): 5, (2, 2, 2, 1): 5, (1, 2, 2, 2): 0, (2, 2, 1, 2): 0,
}


def test_tensor3_rejects_bad_input():
    with pytest.raises(ValueError):
        Tensor3(np.array([[[np.nan]]]))
    with pytest.raises(ValueError):
        Tensor3(np.zeros((2, 2)))
    with pytest.raises(ValueError, match="expected 12"):
        Tensor3.from_entries((2, 2, 3), range(11))


def test_tensor3_is_immutable(ex1):
    with pytest.raises(ValueError):
        ex1.data[0, 0, 0] = 1.0


def test_from_entries_order():
    A = Tensor3.from_entries((2, 3, 4), range(24))
    assert A.data[1, 2, 3] == 1 * 12 + 2 * 4 + 3
    np.testing.assert_array_equal(A.entries, np.arange(24))


def test_contract_example_entries(ex1):
    T = contract(ex1, 3)
    assert T.dims == (2, 2)
    for (i, j, p, q), val in EX1_T3.items():
        assert T.data[i - 1, j - 1, p - 1, q - 1] == val


def test_contract_zero():
    for axis in (1, 2, 3):
        assert not np.any(contract(Tensor3.zeros((2, 3, 4)), axis).data)


def test_contract_rank_one_expansion(rng):
    u, v, w = rng.standard_normal(3), rng.standard_normal(4), rng.standard_normal(2)
    w /= np.linalg.norm(w)
    T = contract(rank_one(u, v, w), 3)
    for i, j, p, q in itertools.product(range(3), range(4), range(3), range(4)):
        assert T.data[i, j, p, q] == pytest.approx(u[i] * v[j] * u[p] * v[q], abs=1e-12)


def test_contract_matches_loops(rng):
    a = rng.standard_normal((2, 3, 4))
    A = Tensor3(a)
    d1, d2, d3 = a.shape
    t1 = contract(A, 1).data
    t2 = contract(A, 2).data
    for j, k, q, r in itertools.product(range(d2), range(d3), range(d2), range(d3)):
        assert t1[j, k, q, r] == pytest.approx(sum(a[i, j, k] * a[i, q, r] for i in range(d1)), abs=1e-12)
    for i, k, p, r in itertools.product(range(d1), range(d3), range(d1), range(d3)):
        assert t2[i, k, p, r] == pytest.approx(sum(a[i, j, k] * a[p, j, r] for j in range(d2)), abs=1e-12)
    assert contract(A, 1).dims == (3, 4) and contract(A, 2).dims == (2, 4)


@given(tensors(), st.sampled_from([1, 2, 3]))
def test_contract_pair_symmetry_exhaustive(A, axis):
    t = contract(A, axis).data
    n1, n2 = t.shape[:2]
    for i, j, p, q in itertools.product(range(n1), range(n2), range(n1), range(n2)):
        assert t[i, j, p, q] == t[p, q, i, j]


@given(tensors(), st.sampled_from([1, 2, 3]))
def test_flattening_is_psd(A, axis):
    S = flatten_biquadratic(contract(A, axis)).data
    scale = max(np.max(np.abs(S)), 1.0)
    assert np.linalg.eigvalsh(S).min() >= -1e-10 * scale


def test_flatten_example(ex1):
    expected = [[29, 8, -13, 19], [8, 6, -14, 0], [-13, -14, 35, 5], [19, 0, 5, 21]]
    np.testing.assert_array_equal(flatten_biquadratic(contract(ex1, 3)).data, expected)


def test_flatten_identity_biquadratic():
    d1, d2 = 2, 3
    t = np.einsum("ip,jq->ijpq", np.eye(d1), np.eye(d2))
    np.testing.assert_array_equal(flatten_biquadratic(Biquadratic(t)).data, np.eye(d1 * d2))


def test_flatten_pairing_spectrum_invariant(rng):
    A = Tensor3(rng.standard_normal((3, 4, 2)))
    T = contract(A, 3)
    d1, d2 = T.dims
    row = flatten_biquadratic(T).data
    col = np.empty_like(row)
    for i, j, p, q in itertools.product(range(d1), range(d2), range(d1), range(d2)):
        col[j * d1 + i, q * d1 + p] = T.data[i, j, p, q]
    np.testing.assert_allclose(np.linalg.eigvalsh(row), np.linalg.eigvalsh(col), atol=1e-10)


def test_biquadratic_requires_pair_symmetry(rng):
    t = rng.standard_normal((2, 2, 2, 2))
    with pytest.raises(ValueError, match="pair symmetry"):
        Biquadratic(t)
    # t_ijpq = t_pjiq is not required
    B = contract(Tensor3(np.arange(12.0).reshape(2, 2, 3) - 5), 3)
    assert B.data[0, 0, 1, 1] != B.data[1, 0, 0, 1]


def test_symmatrix_mirrors_upper():
    S = SymMatrix([[1.0, 2.0], [5.0, 3.0]])
    np.testing.assert_array_equal(S.data, [[1, 2], [2, 3]])


def test_unfold_example(ex1):
    M = unfold(ex1, 1).data
    np.testing.assert_array_equal(M[0], [4, 3, 2, 1, 2, -1])
    np.testing.assert_array_equal(M[1], [-1, -5, 3, 2, 1, 4])


def test_unfold_shapes_and_scalar(rng):
    A = Tensor3(rng.standard_normal((2, 3, 4)))
    assert unfold(A, 1).data.shape == (2, 12)
    assert unfold(A, 2).data.shape == (3, 8)
    assert unfold(A, 3).data.shape == (4, 6)
    assert unfold(Tensor3([[[2.5]]]), 2).data.tolist() == [[2.5]]


@given(tensors(), st.sampled_from([1, 2, 3]))
def test_gram_is_unfold_product(A, axis):
    M = unfold(A, axis).data
    G = gram(A, axis).data
    scale = max(1.0, np.max(np.abs(G)))
    np.testing.assert_allclose(G, M @ M.T, rtol=1e-12, atol=1e-12 * scale)


def test_gram_matches_double_sum(rng):
    a = rng.standard_normal((3, 2, 4))
    G = gram(Tensor3(a), 1).data
    for i, j in itertools.product(range(3), range(3)):
        expected = sum(a[i, k, l] * a[j, k, l] for k in range(2) for l in range(4))
        assert G[i, j] == pytest.approx(expected, abs=1e-12)


def test_gram_example_trace(ex1):
    squares = [16, 1, 9, 4, 4, 1, 1, 4, 25, 1, 9, 16]
    G = gram(ex1, 1).data
    assert np.trace(G) == sum(squares) == 91
    assert np.linalg.eigvalsh(G).min() >= 0


@given(tensors())
def test_gram_traces_equal_frobenius(A):
    fro2 = sum(float(v) ** 2 for v in A.entries)
    for axis in (1, 2, 3):
        assert np.trace(gram(A, axis).data) == pytest.approx(fro2, rel=1e-12, abs=1e-12)


def test_gram_zero():
    assert not np.any(gram(Tensor3.zeros((2, 3, 2)), 2).data)


def test_slice_matrices_example(ex1):
    T = contract(ex1, 3)
    G = [s.data.tolist() for s in slice_matrices(T, "second")]
    H = [s.data.tolist() for s in slice_matrices(T, "first")]
    assert G == [[[29, -13], [-13, 35]], [[6, 0], [0, 21]]]
    assert H == [[[29, 8], [8, 6]], [[35, 5], [5, 21]]]


def test_slice_matrices_diagonal_biquadratic(rng):
    d = rng.uniform(0.5, 2.0, size=(2, 3))
    t = np.zeros((2, 3, 2, 3))
    for i, j in itertools.product(range(2), range(3)):
        t[i, j, i, j] = d[i, j]
    T = Biquadratic(t)
    for mode in ("first", "second"):
        for s in slice_matrices(T, mode):
            assert np.count_nonzero(s.data - np.diag(np.diag(s.data))) == 0
    with pytest.raises(ValueError):
        slice_matrices(T, "third")


def test_inner_and_forms(ex1, rng):
    assert inner(ex1, ex1) == 91
    u, v, w = rng.standard_normal(2), rng.standard_normal(3), rng.standard_normal(4)
    R = rank_one(u, v, w)
    expected = np.dot(u, u) * np.dot(v, v) * np.dot(w, w)
    assert multilinear_form(R, u, v, w) == pytest.approx(expected, rel=1e-12)
    for i, j, k in itertools.product(range(2), range(2), range(3)):
        e = [np.eye(d)[n] for d, n in zip((2, 2, 3), (i, j, k))]
        assert inner(ex1, rank_one(*e)) == ex1.data[i, j, k]
        assert multilinear_form(ex1, *e) == ex1.data[i, j, k]


def test_dimension_mismatch(ex1):
    with pytest.raises(ValueError):
        inner(ex1, Tensor3.zeros((2, 3, 2)))
    with pytest.raises(ValueError):
        multilinear_form(ex1, [1, 0], [1, 0], [1, 0])


@given(tensors(), st.data())
def test_contracted_form_is_sum_of_squares(A, data):
    d1, d2, _ = A.dims
    x = np.array(data.draw(st.lists(finite, min_size=d1, max_size=d1)))
    y = np.array(data.draw(st.lists(finite, min_size=d2, max_size=d2)))
    lhs = contract(A, 3).form(x, y)
    rhs = float(np.sum(np.einsum("ijk,i,j->k", A.data, x, y) ** 2))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)
    assert lhs >= -1e-9
