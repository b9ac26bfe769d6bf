import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wcluster import (
    IllConditionedError,
    NonFiniteError,
    NotSpdError,
    check_spd,
    ensure_spd,
    inv_sqrt_spd,
    sqrt_spd,
)
from wcluster.spd import spd_roots, sym_part

from conftest import random_spd


class TestSqrt:
    def test_identity(self):
        for d in (1, 2, 5):
            assert np.array_equal(sqrt_spd(np.eye(d)), np.eye(d))

    def test_diagonal(self):
        assert np.allclose(sqrt_spd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)

    def test_random_involution(self, rng):
        # oracle: multiply the result by itself
        for _ in range(20):
            d = int(rng.integers(1, 11))
            g = rng.normal(size=(d, d))
            a = g @ g.T + np.eye(d)
            b = sqrt_spd(a)
            assert np.linalg.norm(b @ b - a) / np.linalg.norm(a) < 1e-10

    def test_not_symmetric(self):
        with pytest.raises(NotSpdError):
            sqrt_spd(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_not_positive(self):
        with pytest.raises(NotSpdError):
            sqrt_spd(np.diag([1.0, -1.0]))

    def test_non_finite(self):
        with pytest.raises(NonFiniteError):
            sqrt_spd(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestInvSqrt:
    def test_identity(self):
        assert np.allclose(inv_sqrt_spd(np.eye(3)), np.eye(3), atol=1e-14)

    def test_diagonal(self):
        assert np.allclose(inv_sqrt_spd(np.diag([4.0, 25.0])), np.diag([0.5, 0.2]), atol=1e-14)

    def test_random_triple_product(self, rng):
        # oracle: explicit triple product B A B == I
        for _ in range(20):
            d = int(rng.integers(1, 11))
            a = random_spd(rng, d)
            b = inv_sqrt_spd(a)
            assert np.linalg.norm(b @ a @ b - np.eye(d)) < 1e-9

    def test_ill_conditioned(self):
        with pytest.raises(IllConditionedError):
            inv_sqrt_spd(np.diag([1.0, 1e-15]))


class TestEnsureSpd:
    def test_rank_one_repair(self):
        # eigenvalues of [[4,4],[4,4]] are 0 and 8, so the repair adds jitter + 0
        out = ensure_spd(np.array([[4.0, 4.0], [4.0, 4.0]]), jitter=1e-8)
        expected = np.array([[4.0 + 1e-8, 4.0], [4.0, 4.0 + 1e-8]])
        assert np.allclose(out, expected, rtol=0, atol=1e-16)

    def test_identity_unchanged(self):
        assert np.array_equal(ensure_spd(np.eye(3), jitter=1e-8), np.eye(3))

    def test_healthy_matrix_unchanged(self):
        a = np.array([[1.0, 0.5], [0.5, 1.0]])  # eigenvalues 0.5 and 1.5
        assert np.array_equal(ensure_spd(a), a)

    def test_symmetrizes_first(self):
        a = np.array([[2.0, 1.0], [0.0, 2.0]])
        out = ensure_spd(a)
        assert np.allclose(out, np.array([[2.0, 0.5], [0.5, 2.0]]))

    def test_non_finite(self):
        with pytest.raises(NonFiniteError):
            ensure_spd(np.array([[np.inf, 0.0], [0.0, 1.0]]))

    def test_bad_jitter(self):
        with pytest.raises(ValueError):
            ensure_spd(np.eye(2), jitter=0.0)

    def test_output_always_passes_invariants(self, rng):
        for _ in range(30):
            d = int(rng.integers(1, 8))
            a = sym_part(rng.normal(size=(d, d)))  # generically indefinite
            check_spd(ensure_spd(a))


class TestProperties:
    def test_sqrt_inv_sqrt_consistency(self, rng):
        for _ in range(20):
            d = int(rng.integers(1, 11))
            a = random_spd(rng, d)
            assert np.linalg.norm(sqrt_spd(a) @ inv_sqrt_spd(a) - np.eye(d)) < 1e-9

    def test_sqrt_commutes_with_input(self, rng):
        for _ in range(20):
            d = int(rng.integers(1, 11))
            a = random_spd(rng, d)
            b = sqrt_spd(a)
            assert np.linalg.norm(a @ b - b @ a) < 1e-9

    def test_spd_roots_match_separate_calls(self, rng):
        a = random_spd(rng, 6)
        root, inv_root = spd_roots(a)
        assert np.allclose(root, sqrt_spd(a), atol=1e-13)
        assert np.allclose(inv_root, inv_sqrt_spd(a), atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(
    eigs=st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=1, max_size=6),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_sqrt_involution_hypothesis(eigs, seed):
    rng = np.random.default_rng(seed)
    d = len(eigs)
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    q = q * np.sign(np.diag(r))
    a = (q * np.array(eigs)) @ q.T
    b = sqrt_spd(ensure_spd(a))
    assert np.linalg.norm(b @ b - a) <= 1e-9 * max(1.0, np.linalg.norm(a))
