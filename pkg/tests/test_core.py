import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from projshape import (
    Configuration,
    GroupElement,
    act,
    canonicalize_point,
    compose,
    configuration_rank,
    load,
    save,
)
from projshape.core import dumps_csv, dumps_json, loads_csv, loads_json
from projshape.errors import DimensionMismatch, InvariantViolation, ParseError, ZeroVector

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_configuration_is_read_only():
    c = Configuration([[1, 0], [0, 1], [1, 1], [1, 2]])
    assert (c.k, c.d) == (4, 1)
    with pytest.raises(ValueError):
        c.matrix[0, 0] = 5.0


@pytest.mark.parametrize(
    "rows",
    [
        [[1, 0], [0, 0], [1, 1], [1, 2]],
        [[1, 0], [np.nan, 1], [1, 1], [1, 2]],
        [[1], [2], [3], [4]],
        [[1, 0], [0, 1]],
        [1, 2, 3],
    ],
)
def test_invalid_configurations(rows):
    with pytest.raises(InvariantViolation):
        Configuration(rows)


def test_canonical_point_sign_and_norm():
    p = canonicalize_point([0.0, -3.0, 4.0])
    assert np.allclose(p.coords, [0.0, 0.6, -0.8])
    assert p == canonicalize_point([0.0, 6.0, -8.0])
    with pytest.raises(ZeroVector):
        canonicalize_point([0.0, 0.0])


@settings(max_examples=200, deadline=None)
@given(arrays(float, 4, elements=finite), st.floats(0.01, 100) | st.floats(-100, -0.01))
def test_canonicalization_is_scale_invariant(v, lam):
    if np.linalg.norm(v) < 1e-3 or np.max(np.abs(v)) / np.linalg.norm(v) < 1e-6:
        return
    # a coordinate near the sign cutoff may flip the decision; skip those
    u = v / np.linalg.norm(v)
    if np.any((np.abs(u) > 1e-13) & (np.abs(u) < 1e-10)):
        return
    assert canonicalize_point(v) == canonicalize_point(lam * v)


def test_group_action_composes(rng):
    c = Configuration(rng.standard_normal((6, 3)))
    g1 = GroupElement.random(6, 2, rng)
    g2 = GroupElement.random(6, 2, rng)
    lhs = act(g2, act(g1, c)).matrix
    rhs = act(compose(g2, g1), c).matrix
    assert np.allclose(lhs, rhs, atol=1e-12 * np.abs(lhs).max())
    assert act(GroupElement.identity(6, 2), c) == c


def test_group_action_size_mismatch(rng):
    c = Configuration(rng.standard_normal((6, 3)))
    with pytest.raises(DimensionMismatch):
        act(GroupElement.identity(5, 2), c)
    with pytest.raises(InvariantViolation):
        GroupElement(np.ones(3), np.zeros((2, 2)))
    with pytest.raises(InvariantViolation):
        GroupElement(np.array([1.0, 0.0]), np.eye(2))


def test_rank_is_invariant(rng):
    c = Configuration(np.hstack([rng.standard_normal((7, 2)), np.zeros((7, 2))]))
    assert configuration_rank(c) == 2
    assert configuration_rank(act(GroupElement.random(7, 3, rng), c)) == 2


@settings(max_examples=50, deadline=None)
@given(arrays(float, (5, 3), elements=finite))
def test_json_csv_round_trip_is_bit_exact(m):
    if np.any(np.linalg.norm(m, axis=1) == 0):
        return
    c = Configuration(m)
    assert loads_json(dumps_json(c)) == c
    assert loads_csv(dumps_csv(c)) == c


def test_file_round_trip(tmp_path, three_lines):
    for name in ("a.json", "a.csv"):
        save(three_lines, tmp_path / name)
        assert load(tmp_path / name) == three_lines
    doc = json.loads((tmp_path / "a.json").read_text())
    assert doc["d"] == 3 and doc["k"] == 7


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"rows": [[1, 0]]}',
        '{"d": 2, "matrix": [[1, 0], [0, 1], [1, 1], [1, 2]]}',
        '{"k": 3, "matrix": [[1, 0], [0, 1], [1, 1], [1, 2]]}',
        '{"matrix": [[1, 0], [0, 1, 2]]}',
        '{"d": "1", "matrix": [[1, 0], [0, 1], [1, 1], [1, 2]]}',
    ],
)
def test_json_parse_errors(text):
    with pytest.raises(ParseError):
        loads_json(text)


def test_csv_parse_errors():
    with pytest.raises(ParseError):
        loads_csv("1,x\n")
    with pytest.raises(ParseError):
        loads_csv("\n\n")
