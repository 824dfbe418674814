"""Catalog of the inequalities among the eleven chain measures and their verification.

Every inequality is stored as ``lhs <= rhs`` with both sides expanded to exact
rational coefficients over the 15 measures. Difference-form statements (the
theorem parts, the corner chain, the reverse chains) keep their pyramid
indices alongside the expansion, but evaluation only ever uses the expansion.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from joblib import Parallel, delayed

from divlat.base_logger import logging
from divlat.errors import DimensionMismatch
from divlat.generators import ALL_MEASURES, LinearCombo, MeasureId, combo
from divlat.measures import evaluate_all, evaluate_batch
from divlat.pyramid import PYRAMID_SIZE, difference, pyramid_lines

FAMILIES = (
    "theorem-part",
    "chain2",
    "chain13",
    "group1",
    "group2",
    "reverse14",
    "reverse15",
    "reverse16",
    "pyramid-line",
)

CHUNK_PAIRS = 2048
ABS_FLOOR = 1e-12

D, I, M1, M2, H, M3, J, T, K0, PSI, F = (  # noqa: E741
    MeasureId.DELTA,
    MeasureId.I,
    MeasureId.M1,
    MeasureId.M2,
    MeasureId.H,
    MeasureId.M3,
    MeasureId.J,
    MeasureId.T,
    MeasureId.K0,
    MeasureId.PSI,
    MeasureId.F,
)


@dataclass(frozen=True)
class InequalityRecord:
    family: str
    label: str
    lhs: LinearCombo
    rhs: LinearCombo
    constant: Fraction = None
    note: str = ""

    def omega(self):
        """rhs - lhs as one LinearCombo (nonnegative when the record holds)."""

        return self.rhs - self.lhs

    def __str__(self):
        return f"{self.label}: {self.lhs} <= {self.rhs}"


@dataclass(frozen=True)
class TheoremPart:
    """One proved inequality numerator <= beta * denominator.

    ``lower`` and ``upper`` are the pyramid differences D_a and D_b when the
    part is stated in difference form; the first part compares plain measure
    combinations instead.
    """

    part: int
    numerator: LinearCombo
    denominator: LinearCombo
    beta: Fraction
    lower: object = None
    upper: object = None
    proof: str = "derivative-sign"
    note: str = ""

    @property
    def label(self):
        return f"part {self.part}"

    @property
    def monotone_required(self):
        return self.proof == "derivative-sign"

    def record(self):
        return InequalityRecord(
            "theorem-part", self.label, self.numerator, self.denominator.scaled(self.beta), self.beta, self.note
        )


@dataclass
class VerificationReport:
    total: int
    passed: int
    worst_slack: float
    worst_record: str
    worst_pair: tuple
    tolerance: float
    worst_raw_slack: float = 0.0
    failures: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.passed == self.total


# (part, a, b, beta, proof) for D^a <= beta D^b
_PARTS = (
    (2, 3, 6, "9/11"),
    (3, 6, 10, "11/12"),
    (4, 10, 15, "4/5"),
    (5, 15, 8, "5"),
    (6, 15, 21, "15/16"),
    (7, 21, 28, "2/3", "chain2"),
    (8, 8, 28, "1/8"),
    (9, 11, 14, "3/7"),
    (10, 14, 9, "7/4"),
    (11, 9, 5, "4/3"),
    (12, 5, 36, "1/8"),
    (13, 5, 22, "3/8"),
    (14, 5, 26, "1/5"),
    (15, 5, 19, "3/7"),
    (16, 5, 2, "3"),
    (17, 22, 25, "8/13"),
    (18, 26, 25, "15/13"),
    (19, 25, 24, "13/12"),
    (20, 24, 23, "4/3"),
    (21, 24, 18, "12/5"),
    (22, 18, 17, "5/4"),
    (23, 36, 35, "3/2"),
    (24, 23, 35, "9/16"),
    (25, 2, 35, "1/16"),
    (26, 17, 35, "1/4"),
    (27, 35, 34, "16/15"),
    (28, 34, 33, "15/13"),
    (29, 33, 32, "13/12"),
    (30, 32, 31, "4/3"),
    (31, 32, 30, "3/2"),
    (32, 32, 45, "1/4"),
    (33, 30, 44, "1/5"),
    (34, 45, 44, "6/5", "chain2"),
    (35, 31, 43, "3/13"),
    (36, 44, 43, "40/39"),
    (37, 43, 42, "39/37"),
    (38, 42, 41, "37/36"),
    (39, 41, 39, "9/8", "chain2"),
    (40, 41, 40, "12/11"),
    (41, 40, 37, "11/8"),
    (42, 39, 37, "4/3"),
    (43, 37, 38, "1", "pyramid"),
    (44, 37, 55, "1/3"),
    (45, 38, 54, "3/8"),
    (46, 55, 54, "9/8"),
    (47, 54, 53, "64/63"),
    (48, 53, 52, "63/61"),
    (49, 52, 51, "61/60"),
    (50, 51, 49, "15/14"),
    (51, 51, 50, "20/19"),
    (52, 50, 47, "19/16"),
    (53, 49, 47, "7/6"),
    (54, 47, 48, "1", "pyramid"),
    (55, 48, 46, "2"),
    (56, 17, 16, "4"),
    (57, 2, 16, "1"),
    (58, 23, 16, "9"),
    (59, 16, 46, "1/24"),
)

_PART_NOTES = {
    5: "body combination repeats the part 4 form; the header inequality is encoded",
}

# lhs <= rhs
_GROUP1 = (
    ({M1: 80, M3: 16}, {D: 1, H: 20}, ""),
    ({D: 1, H: 32}, {T: 4, M1: 128}, ""),
    ({D: 6, M2: 256}, {I: 192, K0: 3}, ""),
    ({M1: 288, M2: 224}, {I: 168, J: 9}, ""),
    ({M1: 12, M2: 20}, {I: 15, T: 3}, "printed with 5I, which fails at P=(1/2,1/2), Q=(1/4,3/4); 15I expands part 14"),
    ({J: 9, M2: 256}, {I: 192, T: 72}, ""),
    ({T: 10, M2: 32}, {J: 3, H: 10}, ""),
    ({I: 72, T: 128}, {K0: 9, M3: 512}, ""),
    ({I: 8, J: 4}, {K0: 1, H: 32}, ""),
    ({D: 4, K0: 8}, {PSI: 1, H: 64}, ""),
    ({I: 16, K0: 10}, {PSI: 1, J: 10}, ""),
    ({K0: 26, M1: 192}, {PSI: 3, M3: 832}, ""),
    ({M1: 32, M3: 32}, {J: 1, T: 8}, "valid but weaker than part 57, which expands to J + 8I"),
    ({D: 4, PSI: 3}, {F: 1, K0: 6}, ""),
    ({I: 48, PSI: 8}, {F: 3, T: 128}, ""),
    ({J: 48, PSI: 1}, {F: 1, M3: 1536}, "printed with 2F, which is valid but weaker; part 59 expands to F"),
)

# (measure, relation, numerator terms, denominator): measure <= or >= terms / denominator
_GROUP2 = (
    (I, "<=", {D: 1, M1: 128}, 36),
    (I, "<=", {D: 4, K0: 1}, 24),
    (I, "<=", {D: 20, PSI: 1}, 96),
    (I, "<=", {D: 32, F: 1}, 144),
    (M1, "<=", {D: 1, M2: 24}, 88),
    (M1, "<=", {I: 120, K0: 1}, 512),
    (M1, "<=", {I: 624, PSI: 1}, 2560),
    (M1, "<=", {I: 1008, F: 1}, 4096),
    (M1, ">=", {I: 3, M2: 2}, 18),
    (M2, "<=", {D: 1, H: 44}, 64),
    (M2, "<=", {T: 1, M1: 26}, 10),
    (M2, "<=", {K0: 1, M1: 208}, 80),
    (M2, "<=", {PSI: 1, M1: 1184}, 416),
    (M2, "<=", {F: 1, M1: 1952}, 672),
    (M2, ">=", {I: 3, H: 9}, 16),
    (H, "<=", {D: 1, M3: 64}, 20),
    (H, "<=", {J: 3, M2: 128}, 120),
    (H, "<=", {T: 1, M2: 16}, 13),
    (H, "<=", {K0: 1, M2: 128}, 104),
    (H, "<=", {PSI: 1, M2: 768}, 592),
    (H, "<=", {F: 1, M2: 1280}, 976),
    (H, ">=", {I: 3, M3: 16}, 7),
    (M3, "<=", {D: 2, J: 15}, 512),
    (M3, "<=", {J: 3, H: 8}, 128),
    (M3, "<=", {T: 1, H: 3}, 16),
    (M3, "<=", {K0: 1, H: 24}, 128),
    (M3, "<=", {F: 1, H: 304}, 1280),
    (M3, "<=", {PSI: 1, H: 176}, 768),
    (J, "<=", {K0: 1, H: 16}, 3),
    (J, "<=", {D: 2, T: 16}, 3),
    (J, "<=", {PSI: 1, H: 128}, 18),
    (J, "<=", {F: 1, H: 224}, 30),
    (J, ">=", {T: 120, M2: 256}, 39),
    (J, ">=", {T: 8, M3: 256}, 9),
    (K0, "<=", {J: 6, PSI: 1}, 8),
    (K0, "<=", {J: 12, F: 1}, 14),
    (K0, "<=", {PSI: 3, M3: 512}, 22),
    (K0, "<=", {F: 3, M3: 1024}, 38),
    (PSI, "<=", {F: 1, T: 16}, 2),
)

_GROUP2_NOTES = {37: "printed under the number 39"}


def _level_links(levels):
    """Links between successive levels of (coefficient, pyramid index); every
    member of a level is linked to every member of the next one."""

    return tuple((x, y) for here, there in zip(levels, levels[1:]) for x in here for y in there)


# chain2 forks after 2/3 D10 into two parallel branches that meet at D22:
# 2 D9 goes straight to D22, 1/2 D21 passes through 1/3 D28
_CHAIN2 = (
    (("1", 1), ("2/3", 10)),
    (("2/3", 10), ("2", 9)),
    (("2/3", 10), ("1/2", 21)),
    (("2", 9), ("1", 22)),
    (("1/2", 21), ("1/3", 28)),
    (("1/3", 28), ("1", 22)),
) + _level_links(
    (
        (("1", 22),),
        (("2/3", 24),),
        (("2", 17),),
        (("1/6", 45),),
        (("1/5", 44),),
        (("2/9", 41),),
        (("1/4", 39),),
        (("1/3", 38),),
    )
)

_CHAIN13 = tuple(
    ((c, k),)
    for c, k in (
        ("1", 1),
        ("8/9", 3),
        ("8/11", 6),
        ("2/3", 10),
        ("8/15", 15),
        ("1/2", 21),
        ("1/3", 28),
        ("1/3", 36),
        ("1/6", 45),
        ("1/9", 55),
    )
)

_REVERSE = {
    "reverse14": (
        (("1", 55),),
        (("9/8", 54),),
        (("8/7", 53),),
        (("72/61", 52),),
        (("6/5", 51),),
        (("9/7", 49), ("24/19", 50)),
        (("3/2", 47),),
        (("3/2", 48),),
        (("3", 46),),
    ),
    "reverse15": (
        (("1", 45),),
        (("6/5", 44),),
        (("16/13", 43),),
        (("48/37", 42),),
        (("4/3", 41),),
        (("3/2", 39), ("16/11", 40)),
        (("2", 37),),
        (("2", 38),),
    ),
    "reverse16": (
        (("1", 36),),
        (("3/2", 35),),
        (("8/5", 34),),
        (("24/13", 33),),
        (("2", 32),),
        (("3", 30), ("8/3", 31)),
    ),
}

_REVERSE_NOTES = {("reverse15", 44, 43): "printed as 16/15; composing part 36 gives 16/13"}


def _c(terms):
    return combo({m: Fraction(v) for m, v in terms.items()})


@lru_cache(maxsize=None)
def theorem_parts():
    """The 59 proved parts, in part order.

    Return : tuple of TheoremPart.

    """

    parts = [
        TheoremPart(
            1,
            _c({I: 1}),
            _c({D: 1, M1: 128}),
            Fraction(1, 36),
            note="pyramid form D1 <= 8/9 D3",
        )
    ]
    for row in _PARTS:
        number, a, b, beta = row[:4]
        proof = row[4] if len(row) > 4 else "derivative-sign"
        lower, upper = difference(a), difference(b)
        parts.append(
            TheoremPart(
                number,
                lower.combo,
                upper.combo,
                Fraction(beta),
                lower,
                upper,
                proof,
                _PART_NOTES.get(number, "statement reconstructed from the part header"),
            )
        )
    for number, note in _PART_NOTES.items():
        logging.warning("part %d: %s", number, note)
    return tuple(parts)


def _group1_records():
    records = []
    for k, (lhs, rhs, note) in enumerate(_GROUP1, start=1):
        if note:
            logging.warning("group 1 item %d: %s", k, note)
        records.append(InequalityRecord("group1", f"G1.{k}", _c(lhs), _c(rhs), note=note))
    return records


def _group2_records():
    records = []
    for k, (measure, relation, terms, den) in enumerate(_GROUP2, start=1):
        single = _c({measure: 1})
        bound = _c(terms).scaled(Fraction(1, den))
        lhs, rhs = (single, bound) if relation == "<=" else (bound, single)
        records.append(InequalityRecord("group2", f"G2.{k}", lhs, rhs, note=_GROUP2_NOTES.get(k, "")))
    return records


def _chain_records(family, links, prefix):
    records = []
    for link, ((ca, a), (cb, b)) in enumerate(links, start=1):
        ca_f, cb_f = Fraction(ca), Fraction(cb)
        note = _REVERSE_NOTES.get((family, a, b), "")
        if note:
            logging.warning("%s link D%d -> D%d: %s", family, a, b, note)
        records.append(
            InequalityRecord(
                family,
                f"{prefix} link {link}: D{a} -> D{b}",
                difference(a).combo.scaled(ca_f),
                difference(b).combo.scaled(cb_f),
                cb_f / ca_f,
                note,
            )
        )
    return records


def _pyramid_line_records():
    records = []
    for k in range(1, PYRAMID_SIZE + 1):
        d = difference(k)
        records.append(
            InequalityRecord(
                "pyramid-line",
                f"D{k} >= 0",
                combo({d.lower.id: d.lower.coeff}),
                combo({d.upper.id: d.upper.coeff}),
            )
        )
    for line, row in enumerate(pyramid_lines(), start=1):
        for a, b in zip(row, row[1:]):
            records.append(
                InequalityRecord(
                    "pyramid-line",
                    f"line {line}: D{a} <= D{b}",
                    difference(a).combo,
                    difference(b).combo,
                    Fraction(1),
                )
            )
    return records


@lru_cache(maxsize=None)
def catalog():
    """Every inequality record, grouped by family in FAMILIES order.

    Return : tuple of InequalityRecord.

    """

    records = [p.record() for p in theorem_parts()]
    records += _chain_records("chain2", _CHAIN2, "(2)")
    records += _chain_records("chain13", _level_links(_CHAIN13), "(13)")
    records += _group1_records()
    records += _group2_records()
    for family, levels in _REVERSE.items():
        records += _chain_records(family, _level_links(levels), f"({family[-2:]})")
    records += _pyramid_line_records()
    logging.info("Catalog built with %d records", len(records))
    return tuple(records)


def select(families, records=None):
    """Records of the given families, catalog order preserved."""

    wanted = set(families)
    unknown = wanted - set(FAMILIES)
    if unknown:
        raise ValueError(f"unknown families: {', '.join(sorted(unknown))}")
    return tuple(r for r in (records or catalog()) if r.family in wanted)


def _proportional(a, b):
    """True iff LinearCombos a and b differ by a positive rational factor."""

    if set(a.measures()) != set(b.measures()) or not a.terms:
        return False
    m0 = a.terms[0][0]
    ratio = b.coefficient(m0) / a.coefficient(m0)
    return ratio > 0 and all(b.coefficient(m) == ratio * c for m, c in a.terms)


def restatements():
    """Map each theorem part to the group record with the same normalized inequality.

    Return : dict part number -> group label; parts with no restatement are absent.

    """

    groups = [r for r in catalog() if r.family in ("group1", "group2")]
    found = {}
    for part in theorem_parts():
        omega = part.record().omega()
        for g in groups:
            if _proportional(omega, g.omega()):
                found[part.part] = g.label
                break
    return found


def chain13_audit():
    """Exact consistency check of the corner chain against the theorem parts.

    Each link c_k D_a <= c_{k+1} D_b is matched to the theorem part proving the
    same inequality, when there is one. A matched part in difference form must
    carry beta = c_{k+1} / c_k; the first link matches the first part through
    its expanded coefficient vector. The running product of link ratios must
    reproduce each printed coefficient.

    Return : list of dict, one per link.

    """

    links = [r for r in catalog() if r.family == "chain13"]
    coefficients = [Fraction(c) for ((c, _),) in _CHAIN13]
    parts = theorem_parts()
    rows = []
    product = Fraction(1)
    for k, link in enumerate(links):
        ratio = link.constant
        match = next((p for p in parts if _proportional(p.record().omega(), link.omega())), None)
        factor = ratio
        consistent = True
        if match is not None and match.lower is not None:
            factor = match.beta
            consistent = match.beta == ratio
        product *= factor
        rows.append(
            {
                "link": link.label,
                "ratio": ratio,
                "part": match.label if match else None,
                "part_beta": match.beta if match else None,
                "composed": product,
                "printed": coefficients[k + 1],
                "consistent": consistent and product == coefficients[k + 1],
            }
        )
    return rows


def _matrices(records):
    index = {m: k for k, m in enumerate(ALL_MEASURES)}
    shape = (len(records), len(ALL_MEASURES))
    lhs, rhs = np.zeros(shape), np.zeros(shape)
    for r, rec in enumerate(records):
        for m, c in rec.lhs.terms:
            lhs[r, index[m]] = float(c)
        for m, c in rec.rhs.terms:
            rhs[r, index[m]] = float(c)
    return lhs, rhs


def _values_matrix(values):
    return np.column_stack([values[m] for m in ALL_MEASURES])


def _slacks(V, lhs, rhs):
    """Raw slack and term scale, shape (pairs, records)."""

    raw = V @ rhs.T - V @ lhs.T
    weight = np.maximum(np.abs(lhs), np.abs(rhs))
    scale = np.zeros_like(raw)
    absV = np.abs(V)
    for m in range(V.shape[1]):
        np.maximum(scale, absV[:, m : m + 1] * weight[None, :, m], out=scale)
    return raw, scale


def verify(record, p, q):
    """Slack rhs - lhs of one record at (P, Q).

    Args:
        record (InequalityRecord, mandatory)
        p, q (Distribution, mandatory)

    Return : float, nonnegative when the inequality holds.

    """

    values = evaluate_all(p, q)
    lhs = sum(float(c) * values[m].value for m, c in record.lhs.terms)
    rhs = sum(float(c) * values[m].value for m, c in record.rhs.terms)
    return rhs - lhs


def _chunk_result(P, Q, lhs, rhs, tol):
    V = _values_matrix(evaluate_batch(P, Q))
    raw, scale = _slacks(V, lhs, rhs)
    normalized = raw / np.maximum(scale, ABS_FLOOR / tol)
    fails = np.count_nonzero(normalized < -tol, axis=0)
    # argmin over pairs first, then earliest record among equal minima
    per_record = normalized.min(axis=0)
    r = int(np.argmin(per_record))
    c = int(np.argmin(normalized[:, r]))
    return fails, float(normalized[c, r]), float(raw[c, r]), r, c


def verify_suite(records, pairs, tol, threads=1):
    """Check every record on every pair.

    A record passes at a pair iff slack >= -tol * scale, with scale the largest
    absolute term on either side floored at 1e-12 / tol. ``worst_slack`` is
    the smallest normalized slack; ties go to the earliest record, then the
    earliest pair.

    Args:
        records (sequence of InequalityRecord, mandatory)
        pairs (sequence of (Distribution, Distribution), mandatory)
        tol (float, mandatory): > 0
        threads (int, optional)

    Return : VerificationReport.

    """

    if tol <= 0:
        raise ValueError("tolerance must be positive")
    records = tuple(records)
    pairs = list(pairs)
    total = len(records) * len(pairs)
    if total == 0:
        return VerificationReport(total, 0, 0.0, None, None, tol)

    for k, (p, q) in enumerate(pairs):
        if p.n != q.n:
            raise DimensionMismatch(f"pair {k}: dimensions differ: {p.n} != {q.n}")

    lhs, rhs = _matrices(records)
    # contiguous runs of equal dimension keep the original pair order
    chunks = []
    start = 0
    while start < len(pairs):
        n = pairs[start][0].n
        stop = start
        while stop < len(pairs) and stop - start < CHUNK_PAIRS and pairs[stop][0].n == n:
            stop += 1
        chunks.append((start, stop))
        start = stop

    def run(bounds):
        lo, hi = bounds
        P = np.stack([pairs[k][0].probs for k in range(lo, hi)])
        Q = np.stack([pairs[k][1].probs for k in range(lo, hi)])
        return _chunk_result(P, Q, lhs, rhs, tol)

    results = Parallel(n_jobs=threads, prefer="threads")(delayed(run)(b) for b in chunks)

    fails = np.zeros(len(records), dtype=np.int64)
    worst = None
    for (lo, _), (chunk_fails, value, raw, r, c) in zip(chunks, results):
        fails += chunk_fails
        key = (value, r, lo + c)
        if worst is None or key < worst[0]:
            worst = (key, raw)
    (worst_value, worst_r, worst_pair), worst_raw = worst
    failures = {records[r].label: int(n) for r, n in enumerate(fails) if n}
    passed = total - int(fails.sum())
    logging.info(
        "Verified %d records on %d pairs: %d/%d passed, worst %.3e at %s",
        len(records),
        len(pairs),
        passed,
        total,
        worst_value,
        records[worst_r].label,
    )
    return VerificationReport(
        total,
        passed,
        worst_value,
        records[worst_r].label,
        pairs[worst_pair],
        tol,
        worst_raw,
        failures,
    )


def _terms_json(lc):
    return [[m.value, c.numerator, c.denominator] for m, c in lc.terms]


def to_json(records):
    """Catalog records as JSON-ready dicts."""

    rows = []
    for r in records:
        rows.append(
            {
                "label": r.label,
                "family": r.family,
                "lhs": _terms_json(r.lhs),
                "rhs": _terms_json(r.rhs),
                "constant": None if r.constant is None else [r.constant.numerator, r.constant.denominator],
                "note": r.note,
            }
        )
    return rows


def report_to_dict(report):
    pair = None
    if report.worst_pair is not None:
        pair = {"p": report.worst_pair[0].probs.tolist(), "q": report.worst_pair[1].probs.tolist()}
    return {
        "total": report.total,
        "passed": report.passed,
        "worst_slack": report.worst_slack,
        "worst_raw_slack": report.worst_raw_slack,
        "worst_record": report.worst_record,
        "worst_pair": pair,
        "tolerance": report.tolerance,
        "failures": dict(sorted(report.failures.items())),
    }
