from collections import Counter
from fractions import Fraction

import pytest

from divlat.distributions import random_pairs, validate
from divlat.errors import DimensionMismatch
from divlat.generators import MeasureId, combo
from divlat.inequalities import (
    FAMILIES,
    InequalityRecord,
    _proportional,
    catalog,
    chain13_audit,
    report_to_dict,
    restatements,
    select,
    theorem_parts,
    to_json,
    verify,
    verify_suite,
)

FAMILY_SIZES = {
    "theorem-part": 59,
    "chain2": 13,
    "chain13": 9,
    "group1": 16,
    "group2": 39,
    "reverse14": 10,
    "reverse15": 9,
    "reverse16": 6,
    "pyramid-line": 100,
}


def test_catalog_shape():
    """unit testing of the catalog family sizes and label uniqueness.

    Args:
        None


    Return : assert, None.

    """

    records = catalog()
    assert Counter(r.family for r in records) == FAMILY_SIZES
    assert len(records) == 261
    assert [r.family for r in records] == sorted((r.family for r in records), key=FAMILIES.index)
    labels = [(r.family, r.label) for r in records]
    assert len(set(labels)) == len(labels)


def test_theorem_parts():
    parts = theorem_parts()
    assert [p.part for p in parts] == list(range(1, 60))
    assert all(p.beta > 0 for p in parts)
    assert parts[0].lower is None
    assert parts[11].beta == Fraction(1, 8)
    assert parts[58].beta == Fraction(1, 24)
    assert {p.part for p in parts if not p.monotone_required} == {7, 34, 39, 43, 54}
    record = parts[15].record()
    assert record.constant == Fraction(3)
    assert record.label == "part 16"


def test_every_record_holds(random_pair_list):
    """unit testing of the whole catalog on seeded random pairs.

    Args:
        random_pair_list (list from conftest.py)


    Return : assert, None.

    """

    report = verify_suite(catalog(), random_pair_list, 1e-10)
    assert report.total == 261 * len(random_pair_list)
    assert report.ok, report.failures
    assert report.worst_slack >= -1e-10


def test_threaded_run_matches_serial(random_pair_list):
    serial = verify_suite(catalog(), random_pair_list, 1e-10)
    threaded = verify_suite(catalog(), random_pair_list, 1e-10, threads=4)
    assert report_to_dict(serial) == report_to_dict(threaded)


def test_group1_item5_needs_fifteen_i(sample_pair):
    m1, m2, i, t = MeasureId.M1, MeasureId.M2, MeasureId.I, MeasureId.T
    printed = InequalityRecord("group1", "printed", combo({m1: 12, m2: 20}), combo({i: 5, t: 3}))
    assert verify(printed, *sample_pair) < 0
    stored = select(["group1"])[4]
    assert stored.label == "G1.5"
    assert verify(stored, *sample_pair) == pytest.approx(2.04e-5, rel=0.02)


def test_group1_item16_uses_single_f(sample_pair):
    stored = select(["group1"])[15]
    assert stored.label == "G1.16"
    assert stored.rhs.coefficient(MeasureId.F) == 1
    assert stored.rhs.coefficient(MeasureId.M3) == 1536
    assert verify(stored, *sample_pair) > 0


def test_restatements():
    found = restatements()
    assert len(found) == 56
    assert set(range(1, 60)) - set(found) == {43, 54, 57}
    assert found[1] == "G2.1"
    assert found[5] == "G1.1"
    assert found[9] == found[10] == "G2.22"
    assert found[59] == "G1.16"
    by_label = {r.label: r for r in catalog() if r.family in ("group1", "group2")}
    for part in theorem_parts():
        if part.part in found:
            assert _proportional(part.record().omega(), by_label[found[part.part]].omega())


def test_chain2_branches(params):
    """unit testing of the forked chain2 links on many two-point pairs.

    Args:
        params (dictionary from conftest.py)


    Return : assert, None.

    """

    records = select(["chain2"])
    labels = [r.label for r in records]
    assert any(label.endswith("D9 -> D22") for label in labels)
    assert any(label.endswith("D28 -> D22") for label in labels)
    assert not any(label.endswith("D9 -> D28") for label in labels)
    report = verify_suite(records, random_pairs(10000, 2, params["SEED"]), 1e-10)
    assert report.total == 13 * 10000
    assert report.ok, report.failures


def test_chain13_audit():
    rows = chain13_audit()
    assert len(rows) == 9
    assert all(row["consistent"] for row in rows)
    assert [row["part"] for row in rows[:6]] == ["part 1", "part 2", "part 3", "part 4", "part 6", "part 7"]
    assert rows[-1]["composed"] == Fraction(1, 9)


def test_verify_suite_reports_failures(random_pair_list):
    i, j = MeasureId.I, MeasureId.J
    wrong = InequalityRecord("group1", "J <= I", combo({j: 1}), combo({i: 1}))
    right = InequalityRecord("group1", "I <= J", combo({i: 1}), combo({j: 1}))
    pairs = random_pair_list[:50]
    report = verify_suite([right, wrong], pairs, 1e-10)
    assert report.total == 100
    assert report.passed == 50
    assert report.failures == {"J <= I": 50}
    assert report.worst_record == "J <= I"
    assert report.worst_raw_slack < 0
    assert not report.ok


def test_verify_suite_edges(sample_pair):
    empty = verify_suite([], [sample_pair], 1e-10)
    assert (empty.total, empty.passed, empty.worst_record) == (0, 0, None)
    with pytest.raises(ValueError):
        verify_suite(catalog(), [sample_pair], 0.0)
    mixed = (validate([0.5, 0.5]), validate([0.2, 0.3, 0.5]))
    with pytest.raises(DimensionMismatch):
        verify_suite(catalog(), [sample_pair, mixed], 1e-10)


def test_select_and_export():
    with pytest.raises(ValueError):
        select(["group3"])
    records = select(["reverse16"])
    assert len(records) == 6
    rows = to_json(records)
    assert rows[0]["family"] == "reverse16"
    assert rows[0]["constant"] == [3, 2]
    assert all(len(term) == 3 for row in rows for term in row["lhs"] + row["rhs"])
