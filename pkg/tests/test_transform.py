import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from fodgmm import DimensionError, apply, build_fd, build_fod


def test_fd_t3_matches_hand_matrix():
    D = build_fd(3)
    assert_array_equal(D.entries, [[-1.0, 1.0, 0.0], [0.0, -1.0, 1.0]])
    assert D.kind == "fd"
    assert (D.rows, D.cols) == (2, 3)


def test_fd_t2_smallest_case():
    assert_array_equal(build_fd(2).entries, [[-1.0, 1.0]])


def test_fd_t5_hand_built_band():
    expected = np.array(
        [
            [-1, 1, 0, 0, 0],
            [0, -1, 1, 0, 0],
            [0, 0, -1, 1, 0],
            [0, 0, 0, -1, 1],
        ],
        dtype=float,
    )
    D = build_fd(5)
    assert_array_equal(D.entries, expected)
    assert_allclose(D.entries.sum(axis=1), 0.0, atol=1e-12)


@pytest.mark.parametrize("T", [0, 1])
def test_fd_rejects_short_series(T):
    with pytest.raises(DimensionError, match="differenced"):
        build_fd(T)
    with pytest.raises(DimensionError):
        build_fod(T)


def test_fod_t2_hand_values():
    c = math.sqrt(0.5)
    assert_allclose(build_fod(2).entries, [[c, -c]], atol=1e-15)


def test_fod_t3_hand_values():
    # row 1: sqrt(2/3) * (1, -1/2, -1/2); row 2: sqrt(1/2) * (0, 1, -1)
    c1 = math.sqrt(2.0 / 3.0)
    c2 = math.sqrt(0.5)
    expected = [[c1, -c1 / 2, -c1 / 2], [0.0, c2, -c2]]
    assert_allclose(build_fod(3).entries, expected, atol=1e-15)


@pytest.mark.parametrize("T", range(2, 51))
def test_fod_rows_orthonormal(T):
    F = build_fod(T).entries
    assert_allclose(F @ F.T, np.eye(T - 1), atol=1e-12)


@pytest.mark.parametrize("T", range(2, 51))
def test_rows_annihilate_constants(T):
    ones = np.ones(T)
    assert np.abs(build_fd(T).entries @ ones).max() < 1e-12
    assert np.abs(build_fod(T).entries @ ones).max() < 1e-12


def test_apply_fd_pairwise_differences():
    D = build_fd(3)
    assert_allclose(apply(D, np.array([1.0, 2.0, 4.0])), [1.0, 2.0])


@pytest.mark.parametrize("T", [2, 5, 17])
def test_apply_fd_constant_vector_is_zero(T):
    D = build_fd(T)
    assert_allclose(apply(D, np.full(T, 3.7)), np.zeros(T - 1), atol=1e-12)


def test_apply_fod_t2_hand_product():
    # sqrt(1/2) * (3 - 1) = sqrt(2)
    F = build_fod(2)
    assert_allclose(apply(F, np.array([3.0, 1.0])), [math.sqrt(2.0)], atol=1e-15)


def test_apply_rejects_length_mismatch():
    D = build_fd(4)
    with pytest.raises(DimensionError):
        apply(D, np.ones(5))


@pytest.mark.parametrize("kind", ["fd", "fod"])
@pytest.mark.parametrize("T", [2, 3, 8, 30])
def test_apply_is_linear(kind, T):
    rng = np.random.default_rng(T)
    M = build_fd(T) if kind == "fd" else build_fod(T)
    u, w = rng.standard_normal(T), rng.standard_normal(T)
    a, b = 2.5, -1.25
    lhs = apply(M, a * u + b * w)
    rhs = a * apply(M, u) + b * apply(M, w)
    assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("kind", ["fd", "fod"])
@pytest.mark.parametrize("T", [2, 3, 11, 40])
def test_apply_shift_invariance(kind, T):
    rng = np.random.default_rng(T + 100)
    M = build_fd(T) if kind == "fd" else build_fod(T)
    v = rng.standard_normal(T)
    shift = 1234.5
    scale = abs(shift) * np.abs(M.entries).max()
    assert_allclose(apply(M, v + shift), apply(M, v), atol=1e-12 * scale)


def test_entries_are_immutable():
    D = build_fd(4)
    with pytest.raises(ValueError):
        D.entries[0, 0] = 9.0
