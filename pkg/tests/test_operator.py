import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gabor_rip import kernels
from gabor_rip.analysis import welch_bound
from gabor_rip.errors import DimensionError, InvalidSupportError, ResourceError
from gabor_rip.operator import GaborOperator, SparseVector, a_q_apply, a_q_dense, all_a_q_apply
from gabor_rip.tf_core import TFIndex, Window, make_window, tf_shift

from conftest import crandn

KINDS = ["rademacher", "steinhaus", "gaussian"]


def delta(n, q=0):
    e = np.zeros(n, dtype=complex)
    e[q] = 1.0
    return e


def brute_dense(g):
    """Column ell*n + k is pi(k, ell) g, built atom by atom."""
    n = len(g)
    return np.stack([tf_shift(g, TFIndex.from_idx(i, n)) for i in range(n * n)], axis=1)


def test_dense_delta_window_n2():
    op = GaborOperator(delta(2))
    D = op.build_dense()
    e0, e1 = delta(2, 0), delta(2, 1)
    np.testing.assert_allclose(D, np.stack([e0, e1, e0, -e1], axis=1), atol=1e-15)


@pytest.mark.parametrize("kind", KINDS)
def test_dense_matches_atomwise_and_unit_columns(kind):
    op = GaborOperator.from_spec(kind, 8, 5)
    D = op.build_dense()
    np.testing.assert_allclose(D, brute_dense(op.g), atol=1e-14)
    np.testing.assert_allclose(np.linalg.norm(D, axis=0), 1.0, atol=1e-12)
    # first block: the n cyclic shifts of g
    for k in range(8):
        np.testing.assert_allclose(D[:, k], np.roll(op.g, k), atol=0)


def test_dense_memory_guard():
    op = GaborOperator.from_spec("rademacher", 300, 0)
    with pytest.raises(ResourceError):
        op.build_dense()
    small = GaborOperator(make_window("rademacher", 20, 0), dense_limit=10)
    with pytest.raises(ResourceError):
        small.build_dense()
    assert small.build_dense(force=True).shape == (20, 400)


@pytest.mark.parametrize("transform", ["numpy", "naive"])
@pytest.mark.parametrize("n", [4, 8, 16, 7])
def test_fast_paths_match_dense(n, transform, rng):
    for trial in range(20):
        op = GaborOperator(make_window(KINDS[trial % 3], n, trial), transform=transform)
        D = op.build_dense()
        x = crandn(rng, n * n)
        y = crandn(rng, n)
        fx = op.synthesis_apply(x)
        assert np.linalg.norm(fx - D @ x) <= 1e-10 * np.linalg.norm(D @ x)
        fy = op.analysis_apply(y)
        ref = D.conj().T @ y
        assert np.linalg.norm(fy - ref) <= 1e-10 * np.linalg.norm(ref)


def test_synthesis_examples():
    op = GaborOperator.from_spec("steinhaus", 6, 2)
    assert np.all(op.synthesis_apply(np.zeros(36)) == 0)
    for idx in (0, 5, 13, 35):
        e = np.zeros(36)
        e[idx] = 1
        np.testing.assert_allclose(op.synthesis_apply(e), tf_shift(op.g, TFIndex.from_idx(idx, 6)), atol=1e-13)


def test_synthesis_rademacher_seed3_matches_dense(rng):
    op = GaborOperator.from_spec("rademacher", 8, 3)
    x = crandn(rng, 64)
    np.testing.assert_allclose(op.synthesis_apply(x), op.build_dense() @ x, atol=1e-12)


def test_sparse_input_paths_agree(rng):
    n = 32
    op = GaborOperator.from_spec("steinhaus", n, 9)
    for s in (1, 3, 8, 40):
        supp = rng.choice(n * n, s, replace=False)
        sv = SparseVector(n * n, supp, crandn(rng, s))
        np.testing.assert_allclose(op.synthesis_apply(sv), op.synthesis_apply(sv.to_dense()), atol=1e-12)


def test_synthesis_length_error():
    op = GaborOperator.from_spec("rademacher", 4, 0)
    with pytest.raises(DimensionError):
        op.synthesis_apply(np.ones(15))
    with pytest.raises(DimensionError):
        op.analysis_apply(np.ones(5))
    with pytest.raises(DimensionError):
        op.synthesis_apply(SparseVector(9, [1], [1.0]))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 20), seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(KINDS))
def test_adjoint_pairing(n, seed, kind):
    rng = np.random.default_rng(seed)
    op = GaborOperator.from_spec(kind, n, seed)
    x = crandn(rng, n * n)
    y = crandn(rng, n)
    lhs = np.vdot(y, op.synthesis_apply(x))  # <Psi x, y>
    rhs = np.vdot(op.analysis_apply(y), x)   # <x, Psi^* y>
    assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)


def test_analysis_examples():
    op = GaborOperator.from_spec("rademacher", 9, 4)
    assert abs(op.analysis_apply(op.g)[0] - 1) < 1e-12
    al = GaborOperator.from_spec("alltop", 5)
    for idx in range(25):
        out = al.analysis_apply(al.atom(idx))
        assert abs(out[idx] - 1) < 1e-10
        others = np.delete(np.abs(out), idx)
        assert others.max() <= 1 / np.sqrt(5) + 1e-10


def test_a_q_examples(rng):
    n = 6
    for q in range(n):
        for idx in range(n * n):
            e = np.zeros(n * n)
            e[idx] = 1
            np.testing.assert_allclose(a_q_apply(q, e, n), tf_shift(delta(n, q), TFIndex.from_idx(idx, n)),
                                       atol=1e-13)
        assert np.all(a_q_apply(q, np.zeros(n * n), n) == 0)
    op = GaborOperator.from_spec("gaussian", n, 1)
    z = crandn(rng, n * n)
    total = sum(op.g[q] * op.a_q_apply(q, z) for q in range(n))
    np.testing.assert_allclose(total, op.synthesis_apply(z), atol=1e-12)
    np.testing.assert_allclose(all_a_q_apply(z, n), np.array([a_q_dense(q, n) @ z for q in range(n)]), atol=1e-12)


def test_psi_is_sum_of_weighted_a_q():
    op = GaborOperator.from_spec("steinhaus", 5, 8)
    D = sum(op.g[q] * a_q_dense(q, 5) for q in range(5))
    np.testing.assert_allclose(D, op.build_dense(), atol=1e-14)


def test_tight_frame():
    # Psi Psi^* = n ||g||^2 I for a full Gabor system; basis pursuit relies on it
    for kind in KINDS:
        D = GaborOperator.from_spec(kind, 7, 2).build_dense()
        np.testing.assert_allclose(D @ D.conj().T, 7 * np.eye(7), atol=1e-12)


def test_atom_inner_product_examples():
    op = GaborOperator.from_spec("steinhaus", 8, 4)
    D = op.build_dense()
    n = 8
    for a, b in [((0, 0), (0, 0)), ((1, 2), (3, 5)), ((7, 7), (0, 1)), ((2, 3), (2, 3))]:
        ia, ib = TFIndex(*a).idx(n), TFIndex(*b).idx(n)
        assert abs(op.atom_inner_product(a, b) - np.vdot(D[:, ib], D[:, ia])) < 1e-12
        assert abs(op.atom_inner_product(a, b) - np.conj(op.atom_inner_product(b, a))) < 1e-12
    assert abs(op.atom_inner_product((3, 4), (3, 4)) - 1) < 1e-12
    dop = GaborOperator(delta(6))
    assert abs(dop.atom_inner_product((0, 0), (0, 1)) - 1) < 1e-15
    al = GaborOperator.from_spec("alltop", 5)
    for a, b in itertools.combinations(itertools.product(range(5), range(5)), 2):
        expect = 5 ** -0.5 if a[0] != b[0] else 0.0  # same translate: orthogonal modulations
        assert abs(abs(al.atom_inner_product(a, b)) - expect) < 1e-10


def test_gram_matches_dense(rng):
    op = GaborOperator.from_spec("gaussian", 9, 11)
    D = op.build_dense()
    for s in (1, 2, 5, 9):
        supp = rng.choice(81, s, replace=False)
        np.testing.assert_allclose(op.gram(supp), D[:, supp].conj().T @ D[:, supp], atol=1e-12)


@pytest.mark.parametrize("impl", kernels.available())
def test_kernel_backends_agree(impl, rng):
    op = GaborOperator.from_spec("steinhaus", 11, 3)
    w = np.exp(2j * np.pi * np.arange(11) / 11)
    supports = np.array([rng.choice(121, 4, replace=False) for _ in range(50)])
    ell, k = np.divmod(supports, 11)
    ref = kernels.gram_batch(op.shift_table, w, k, ell, impl="numpy")
    np.testing.assert_allclose(kernels.gram_batch(op.shift_table, w, k, ell, impl=impl), ref, atol=1e-14)
    vals = crandn(rng, 4)
    np.testing.assert_allclose(kernels.sparse_synthesis(op.g, w, k[0], ell[0], vals, impl=impl),
                               op.build_dense()[:, supports[0]] @ vals, atol=1e-13)


@pytest.mark.parametrize("n", [5, 7, 11, 13])
def test_alltop_coherence(n):
    assert abs(GaborOperator.from_spec("alltop", n).coherence() - n ** -0.5) <= 1e-10


def test_coherence_delta_window():
    for n in (2, 5, 8):
        assert GaborOperator(delta(n)).coherence() == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("kind", KINDS)
def test_coherence_brute_force_and_welch(kind):
    for n in (4, 5, 6):
        op = GaborOperator.from_spec(kind, n, n)
        G = op.build_dense().conj().T @ op.build_dense()
        brute = np.abs(G - np.diag(np.diag(G))).max()
        assert abs(op.coherence() - brute) < 1e-12
        assert op.coherence() >= welch_bound(n, n * n) - 1e-12


def test_difference_class_invariance(rng):
    n = 9
    op = GaborOperator.from_spec("rademacher", n, 1)
    for _ in range(50):
        a, b, tau = (TFIndex(*rng.integers(0, n, 2)) for _ in range(3))
        assert abs(abs(op.atom_inner_product(a, b)) - abs(op.atom_inner_product(a + tau, b + tau))) < 1e-10


def test_sparse_vector_roundtrip_and_validation():
    x = np.zeros(16, dtype=complex)
    x[[3, 9, 1]] = [1j, 2, -1]
    sv = SparseVector.from_dense(x)
    assert sv.nnz == 3 and list(sv.support) == [1, 3, 9]
    np.testing.assert_array_equal(sv.to_dense(), x)
    assert SparseVector.from_dense(sv.to_dense()).support.tolist() == sv.support.tolist()
    unsorted = SparseVector(16, [9, 1], [5, 6])
    assert unsorted.support.tolist() == [1, 9] and unsorted.values.tolist() == [6, 5]
    with pytest.raises(InvalidSupportError):
        SparseVector(16, [1, 1], [1, 2])
    with pytest.raises(InvalidSupportError):
        SparseVector(16, [16], [1])
    with pytest.raises(DimensionError):
        SparseVector(16, [1, 2], [1])
    assert SparseVector(16, [2], [0.6]).in_unit_sparse_set(1)
    assert not SparseVector(16, [2, 3], [0.9, 0.9]).in_unit_sparse_set(2)


def test_custom_window_wrapping():
    w = Window.custom(delta(4))
    assert w.kind.value == "custom"
    np.testing.assert_allclose(w.epsilon, [2, 0, 0, 0])


def test_pure_fallback_selected_by_env():
    code = ("from gabor_rip import kernels, GaborOperator, exact_rip_constant;"
            "op = GaborOperator.from_spec('rademacher', 4, 0);"
            "print(kernels.BACKEND, repr(exact_rip_constant(op, 3).delta_hat))")
    env = {**os.environ, "GABOR_RIP_PURE": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, value = out.stdout.split()
    assert backend == "numpy"
    from gabor_rip.analysis import exact_rip_constant
    assert float(value) == pytest.approx(exact_rip_constant(GaborOperator.from_spec("rademacher", 4, 0), 3).delta_hat,
                                         abs=1e-13)
