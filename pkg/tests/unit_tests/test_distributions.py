import json

import numpy as np
import pytest

from divlat.distributions import load_rows, normalize, random, random_pairs, validate
from divlat.errors import MalformedRow, NonPositiveEntry, RowValidationError, SumNotOne, TooShort


def test_validate_accepts_simplex_point():
    """unit testing of validate on a well-formed distribution.

    Args:
        None


    Return : assert, None.

    """

    p = validate([0.2, 0.3, 0.5])
    assert p.n == 3
    assert np.isclose(p.probs.sum(), 1.0)
    with pytest.raises(ValueError):
        p.probs[0] = 0.9


@pytest.mark.parametrize(
    "raw, error",
    [
        ([1.0], TooShort),
        ([], TooShort),
        ([0.0, 1.0], NonPositiveEntry),
        ([-0.1, 1.1], NonPositiveEntry),
        ([0.5, 0.6], SumNotOne),
        ([0.5, 0.5 - 1e-9], SumNotOne),
    ],
)
def test_validate_rejects(raw, error):
    with pytest.raises(error):
        validate(raw)


def test_validate_sum_tolerance():
    # drift of 1e-13 stays inside the accepted band
    validate([0.5, 0.5 + 1e-13])


def test_normalize_scales_counts():
    p = normalize([1, 3])
    assert p == validate([0.25, 0.75])
    with pytest.raises(NonPositiveEntry):
        normalize([0, 3])


def test_normalize_is_idempotent(random_pair_list):
    for p, _ in random_pair_list[:20]:
        once = normalize(p.probs)
        twice = normalize(once.probs)
        assert np.max(np.abs(once.probs - twice.probs)) <= 1e-15
        assert np.max(np.abs(once.probs - p.probs)) <= 1e-15


def test_random_is_deterministic_and_positive():
    a = random(50, 7)
    b = random(50, 7)
    c = random(50, 8)
    assert a == b
    assert hash(a) == hash(b)
    assert a != c
    assert np.all(a.probs > 0)
    assert abs(a.probs.sum() - 1.0) <= 1e-12


def test_random_pairs_keyed_per_dimension(params):
    """unit testing of random_pairs stream independence.

    Args:
        params (dictionary from conftest.py)


    Return : assert, None.

    """

    first = random_pairs(10, 3, params["SEED"])
    again = random_pairs(10, 3, params["SEED"])
    assert first == again
    assert len(first) == 10
    for p, q in first:
        assert p.n == q.n == 3
        assert abs(p.probs.sum() - 1.0) <= 1e-12
        assert abs(q.probs.sum() - 1.0) <= 1e-12
    with pytest.raises(TooShort):
        random_pairs(1, 1, params["SEED"])


def test_load_rows_csv_ragged(tmp_path):
    path = tmp_path / "rows.csv"
    path.write_text("0.5,0.5\n0.25,0.75\n0.2,0.3,0.5\n0.1,0.1,0.8\n", encoding="utf-8")
    rows = load_rows(str(path), "csv")
    assert rows == [[0.5, 0.5], [0.25, 0.75], [0.2, 0.3, 0.5], [0.1, 0.1, 0.8]]


def test_load_rows_json_both_layouts(tmp_path):
    arrays = tmp_path / "arrays.json"
    arrays.write_text(json.dumps([[0.5, 0.5], [0.25, 0.75]]), encoding="utf-8")
    objects = tmp_path / "objects.json"
    objects.write_text(json.dumps([{"p": [0.5, 0.5], "q": [0.25, 0.75]}]), encoding="utf-8")
    assert load_rows(str(arrays), "json") == load_rows(str(objects), "json")


def test_load_rows_csv_keeps_interior_gap(tmp_path):
    path = tmp_path / "gap.csv"
    path.write_text("0.25,,0.75\n0.5,0.5\n", encoding="utf-8")
    rows = load_rows(str(path), "csv")
    assert len(rows) == 2
    assert len(rows[0]) == 3
    assert np.isnan(rows[0][1])
    assert rows[1] == [0.5, 0.5]
    with pytest.raises(NonPositiveEntry):
        validate(rows[0])


@pytest.mark.parametrize(
    "payload, row",
    [
        ([[0.5, 0.5], 0.5], 1),
        ([{"p": [0.5, 0.5], "q": [0.25, 0.75]}, {"p": [0.5, 0.5]}], 2),
        ({"p": [0.5, 0.5], "q": [0.25, 0.75]}, 0),
    ],
)
def test_load_rows_json_malformed(tmp_path, payload, row):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(RowValidationError) as info:
        load_rows(str(path), "json")
    assert info.value.row == row
    assert isinstance(info.value.cause, MalformedRow)
