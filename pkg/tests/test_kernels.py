import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from projshape import kernels
from projshape.errors import Cancelled


def brute(W):
    k = W.shape[0]
    return max(
        np.array((1.0,) + s) @ W @ np.array((1.0,) + s)
        for s in itertools.product([1.0, -1.0], repeat=k - 1)
    )


@pytest.mark.parametrize("backend", kernels.AVAILABLE)
@settings(max_examples=60, deadline=None)
@given(k=st.integers(1, 11), seed=st.integers(0, 2**32 - 1))
def test_matches_enumeration(backend, k, seed):
    A = np.random.default_rng(seed).standard_normal((k, k))
    W = A + A.T
    value, s = kernels.max_sign_form(W, backend=backend)
    assert s[0] == 1.0 and set(np.unique(s)) <= {-1.0, 1.0}
    assert value == pytest.approx(brute(W), abs=1e-9)
    assert s @ W @ s == pytest.approx(value, abs=1e-9)


@pytest.mark.skipif("cython" not in kernels.AVAILABLE, reason="extension not built")
def test_compiled_split_path(monkeypatch):
    # a tiny low group forces many outer steps through the incremental updates
    monkeypatch.setattr(kernels, "_LOW_BITS", 3)
    monkeypatch.setattr(kernels, "_CHUNK", 16)
    rng = np.random.default_rng(5)
    for k in range(4, 12):
        A = rng.standard_normal((k, k))
        W = A + A.T
        value, s = kernels.max_sign_form(W, backend="cython")
        assert value == pytest.approx(brute(W), abs=1e-9)
        assert s @ W @ s == pytest.approx(value, abs=1e-9)


def test_backends_agree_on_value():
    A = np.random.default_rng(3).standard_normal((18, 18))
    W = A + A.T
    values = [kernels.max_sign_form(W, backend=b)[0] for b in kernels.AVAILABLE]
    assert max(values) - min(values) < 1e-9


@pytest.mark.parametrize("backend", kernels.AVAILABLE)
def test_cancel(backend, monkeypatch):
    monkeypatch.setattr(kernels, "_CHUNK", 1 << 4)
    monkeypatch.setattr(kernels._signsearch_py, "_BLOCK_ENTRIES", 1 << 4)
    W = np.eye(16)
    with pytest.raises(Cancelled):
        kernels.max_sign_form(W, cancel=lambda: True, backend=backend)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        kernels.max_sign_form(np.ones((2, 3)))
    with pytest.raises(ValueError):
        kernels.max_sign_form(np.eye(3), backend="fortran")
