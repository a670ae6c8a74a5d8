import numpy as np
import pytest

from projshape.linalg import (
    DEFAULT_RANK_TOL,
    batched_ranks,
    default_tol,
    normalize_rows,
    null_space_basis,
    numerical_rank,
    row_space_basis,
)


def test_rank_cutoff_is_relative():
    M = np.diag([1.0, 1e-6, 1e-12])
    assert numerical_rank(M) == 2
    assert numerical_rank(1e8 * M) == 2
    assert numerical_rank(M, tol=1e-3) == 1
    assert numerical_rank(np.zeros((2, 2))) == 0
    # a nonzero matrix keeps rank 1 under any tolerance
    assert numerical_rank(M, tol=10.0) == 1
    with pytest.raises(ValueError):
        numerical_rank(np.zeros((0, 3)))


def test_batched_ranks_match_single(rng):
    stack = rng.standard_normal((20, 3, 4))
    stack[::3, 2] = stack[::3, 0] + stack[::3, 1]
    stack[5] = 0.0
    expected = [numerical_rank(m) if m.any() else 0 for m in stack]
    assert batched_ranks(stack).tolist() == expected


def test_env_override(monkeypatch):
    monkeypatch.delenv("PROJSHAPE_TOL", raising=False)
    assert default_tol() == DEFAULT_RANK_TOL
    monkeypatch.setenv("PROJSHAPE_TOL", "1e-3")
    assert default_tol() == 1e-3
    assert numerical_rank(np.diag([1.0, 1e-6])) == 1


def test_bases(rng):
    M = rng.standard_normal((2, 4))
    R = row_space_basis(np.vstack([M, M.sum(axis=0)]))
    N = null_space_basis(M)
    assert R.shape == (2, 4) and N.shape == (4, 2)
    assert np.allclose(M @ N, 0.0)
    assert np.allclose(np.linalg.norm(normalize_rows(M), axis=1), 1.0)
