import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensornorm.bounds import (
    MODES,
    Biquadratic,
    build_report,
    flatten_bound,
    lower_slice,
    nuclear_bounds,
    nuclear_decomposition,
    report_dict,
    report_items,
    sandwich,
    slice_bound,
    upper_flatten,
    upper_gram,
)
from tensornorm.config import RunConfig
from tensornorm.core import AXES, Tensor3, rank_one
from tensornorm.msolve import spectral_norm

FAST = RunConfig(restarts=8, nuclear_restarts=4)


def odeco(rng, dims, weights):
    """Orthogonally decomposable tensor with the given weights."""
    Qs = [np.linalg.qr(rng.standard_normal((d, d)))[0] for d in dims]
    a = np.zeros(dims)
    for r, w in enumerate(weights):
        a += w * np.einsum("i,j,k->ijk", Qs[0][:, r], Qs[1][:, r], Qs[2][:, r])
    return Tensor3(a)


def test_example_bounds(ex1):
    assert upper_flatten(ex1, 3) == pytest.approx(7.2937, abs=1e-4)
    assert upper_flatten(ex1, 2) == pytest.approx(8.2529, abs=1e-4)
    assert upper_flatten(ex1, 1) == pytest.approx(7.8874, abs=1e-4)
    assert lower_slice(ex1, 3, "second") == pytest.approx(6.7336, abs=1e-4)
    assert lower_slice(ex1, 1, "first") == pytest.approx(6.7336, abs=1e-4)
    assert max(lower_slice(ex1, k, m) for k in AXES for m in MODES) <= 6.7673 < 7.2937


def test_slice_bounds_pair_up(rng):
    # the slices of two contractions are the Gram matrices of the same tensor slices
    A = Tensor3(rng.standard_normal((2, 3, 4)))
    assert lower_slice(A, 3, "second") == pytest.approx(lower_slice(A, 1, "first"), abs=1e-12)
    assert lower_slice(A, 3, "first") == pytest.approx(lower_slice(A, 2, "first"), abs=1e-12)
    assert lower_slice(A, 2, "second") == pytest.approx(lower_slice(A, 1, "second"), abs=1e-12)


def test_slice_bound_is_max_slice_spectral_norm(rng):
    A = Tensor3(rng.standard_normal((3, 2, 4)))
    # contraction over the second index, slices at fixed third index
    by_slice = max(np.linalg.norm(A.data[:, :, k], 2) for k in range(4))
    assert lower_slice(A, 2, "second") == pytest.approx(by_slice, abs=1e-10)
    by_slice = max(np.linalg.norm(A.data[i], 2) for i in range(3))
    assert lower_slice(A, 2, "first") == pytest.approx(by_slice, abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000), st.sampled_from([(2, 2, 3), (3, 3, 3), (2, 4, 5), (4, 1, 2)]))
def test_bounds_bracket_norm(seed, dims):
    A = Tensor3(np.random.default_rng(seed).standard_normal(dims))
    est = spectral_norm(A, restarts=16, tol=1e-12)
    for k in AXES:
        assert est <= upper_flatten(A, k) + 1e-9
        assert upper_flatten(A, k) == pytest.approx(upper_gram(A, k), abs=1e-9)
        for m in MODES:
            assert lower_slice(A, k, m) <= est + 1e-9


def test_upper_equals_largest_unfolding_singular_value(rng):
    A = Tensor3(rng.standard_normal((3, 2, 5)))
    from tensornorm.core import unfold
    for k in AXES:
        assert upper_gram(A, k) == pytest.approx(np.linalg.norm(unfold(A, k).data, 2), abs=1e-10)


def test_diagonal_biquadratic_attains_both(rng):
    d = rng.uniform(0.1, 3.0, size=(3, 2))
    t = np.zeros((3, 2, 3, 2))
    for i, j in itertools.product(range(3), range(2)):
        t[i, j, i, j] = d[i, j]
    T = Biquadratic(t)
    for mode in MODES:
        assert slice_bound(T, mode) == pytest.approx(d.max(), abs=1e-14)
    assert flatten_bound(T) == pytest.approx(d.max(), abs=1e-14)


def test_sandwich_chain(ex1, rng):
    for A in (ex1, Tensor3(rng.standard_normal((3, 4, 2)))):
        est = spectral_norm(A, tol=1e-12)
        for k in AXES:
            rec = sandwich(A, k, est)
            lo, L, n2, rho, hi = rec.chain()
            assert lo <= L + 1e-9 and L <= n2 + 1e-6 and n2 <= rho + 1e-9 and rho <= hi + 1e-9
            assert all(v.passed for v in rec.verdicts())


def test_sandwich_on_diagonal_is_tight():
    a = np.zeros((3, 3, 3))
    for r, w in enumerate([3.0, -2.0, 1.0]):
        a[r, r, r] = w
    A = Tensor3(a)
    for k in AXES:
        rec = sandwich(A, k, 3.0)
        assert rec.L == pytest.approx(9.0, abs=1e-9)
        assert rec.rho_gram == pytest.approx(9.0, abs=1e-9)


def test_nuclear_identities(ex1):
    nb = nuclear_bounds(ex1)
    for k in AXES:
        assert np.sqrt(nb.gram[k]) == pytest.approx(nb.frobenius, abs=1e-9)
        assert nb.flattening[k] == pytest.approx(nb.gram[k], abs=1e-9)
        assert nb.identity_gap(k) <= 1e-9


def test_unfolding_nuclear_matches_svd(rng):
    from tensornorm.core import unfold
    A = Tensor3(rng.standard_normal((2, 3, 4)))
    nb = nuclear_bounds(A)
    for k in AXES:
        ref = np.linalg.svd(unfold(A, k).data, compute_uv=False).sum()
        assert nb.unfold[k] == pytest.approx(ref, abs=1e-6)


def test_odeco_nuclear_recovery(rng):
    w = [2.5, -1.5, 0.5]
    A = odeco(rng, (3, 4, 3), w)
    nb = nuclear_bounds(A)
    nu = nuclear_decomposition(A, restarts=8)
    exact = sum(abs(x) for x in w)
    assert nu.converged and not nu.loose
    assert nu.value == pytest.approx(exact, abs=1e-8)
    assert nb.best_lower <= exact + 1e-9
    assert nb.unfold[1] == pytest.approx(exact, abs=1e-6)
    lo, hi = nb.bracket
    assert lo <= exact + 1e-9
    assert spectral_norm(A, tol=1e-12) == pytest.approx(2.5, abs=1e-9)


def test_greedy_tail_bounds_truncation(rng):
    A = Tensor3(rng.standard_normal((2, 2, 3)))
    full = nuclear_decomposition(A, restarts=4)
    cut = nuclear_decomposition(A, max_rank=1, restarts=4)
    assert cut.tail > 0 and not cut.converged and cut.loose
    assert cut.value >= nuclear_bounds(A).best_lower - 1e-9
    assert full.value >= nuclear_bounds(A).best_lower - 1e-9


def test_rank_one_nuclear_and_uppers(rng):
    u, v, w = (x / np.linalg.norm(x) for x in (rng.standard_normal(d) for d in (2, 3, 4)))
    A = rank_one(3.0 * u, v, w)
    assert nuclear_decomposition(A).value == pytest.approx(3.0, abs=1e-9)
    for k in AXES:
        assert upper_flatten(A, k) == pytest.approx(3.0, abs=1e-9)
        assert nuclear_bounds(A).identity_gap(k) == pytest.approx(0.0, abs=1e-8)


def test_report_example_passes(ex1):
    rep = build_report(ex1, FAST)
    assert rep.passed, rep.failures()
    names = {v.name for v in rep.verdicts}
    assert "nuclear.flattening_vs_lower_sq" in names
    assert len(rep.lower_slice) == 6 and len(rep.sandwich) == 3


def test_report_skips_invalid_dimension_check():
    # a 4x4x1 identity breaks best_lower^2 / d3 <= flattening nuclear norm
    A = Tensor3(np.eye(4)[:, :, None])
    rep = build_report(A, FAST)
    assert "nuclear.flattening_vs_lower_sq" not in {v.name for v in rep.verdicts}
    assert rep.passed, rep.failures()


def test_report_zero_tensor():
    rep = build_report(Tensor3.zeros((2, 2, 2)), FAST)
    assert rep.estimate == 0.0
    assert rep.passed, rep.failures()


def test_report_adversarial_equal_weights():
    # two orthogonal rank-one terms of equal weight: HOPM has two competing maxima
    e = np.eye(2)
    a = np.einsum("i,j,k->ijk", e[0], e[0], e[0]) + np.einsum("i,j,k->ijk", e[1], e[1], e[1])
    rep = build_report(Tensor3(a), FAST)
    assert rep.estimate == pytest.approx(1.0, abs=1e-9)
    assert rep.passed, rep.failures()


def test_report_serializations(ex1):
    rep = build_report(ex1, FAST)
    items = dict(report_items(rep, 4))
    assert items["spectral_norm"] == "6.7673"
    assert items["upper.flatten.axis3"] == "7.2937"
    d = report_dict(rep)
    assert d["spectral_norm"] == pytest.approx(6.7673, abs=1e-4)
    assert all("name" in v for v in d["verdicts"])
