"""Closed-form evaluation of the chain divergences and the mean sums.

This is the direct path: each measure is summed exactly as displayed in its
definition, independent of the generating functions in ``divlat.generators``.
The three mean divergences are summed in the algebraically equal forms
w (sqrt(p) - sqrt(q))^2 / (4 (r + w)) and friends, which do not cancel
catastrophically when P is close to Q.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from divlat.base_logger import logging
from divlat.errors import DimensionMismatch, IncompleteValues
from divlat.generators import ALL_MEASURES, MeasureId

# scaled chain: 1/4 Delta <= I <= 4 M1 <= 4/3 M2 <= h <= 4 M3 <= 1/8 J <= T <= 1/8 K0 <= 1/16 Psi <= 1/16 F
CHAIN5 = (
    (MeasureId.DELTA, Fraction(1, 4)),
    (MeasureId.I, Fraction(1)),
    (MeasureId.M1, Fraction(4)),
    (MeasureId.M2, Fraction(4, 3)),
    (MeasureId.H, Fraction(1)),
    (MeasureId.M3, Fraction(4)),
    (MeasureId.J, Fraction(1, 8)),
    (MeasureId.T, Fraction(1)),
    (MeasureId.K0, Fraction(1, 8)),
    (MeasureId.PSI, Fraction(1, 16)),
    (MeasureId.F, Fraction(1, 16)),
)

CHAIN1 = (
    (MeasureId.DELTA, Fraction(1, 4)),
    (MeasureId.I, Fraction(1)),
    (MeasureId.H, Fraction(1)),
    (MeasureId.J, Fraction(1, 8)),
    (MeasureId.T, Fraction(1)),
    (MeasureId.PSI, Fraction(1, 16)),
)

CHAIN4 = (
    (MeasureId.G, Fraction(1)),
    (MeasureId.N1, Fraction(1)),
    (MeasureId.N2, Fraction(1)),
    (MeasureId.A, Fraction(1)),
)


@dataclass(frozen=True)
class MeasureValue:
    id: MeasureId
    value: float

    def __float__(self):
        return float(self.value)


def _pieces(p, q):
    sp, sq = np.sqrt(p), np.sqrt(q)
    w = (sp + sq) / 2
    r = np.sqrt((p + q) / 2)
    return sp, sq, w, r


def _terms(measure, p, q):
    if measure is MeasureId.DELTA:
        return (p - q) ** 2 / (p + q)
    if measure is MeasureId.I:
        return (p * np.log(2 * p / (p + q)) + q * np.log(2 * q / (p + q))) / 2
    if measure is MeasureId.H:
        return (np.sqrt(p) - np.sqrt(q)) ** 2 / 2
    if measure is MeasureId.J:
        return (p - q) * np.log(p / q)
    if measure is MeasureId.T:
        return (p + q) / 2 * np.log((p + q) / (2 * np.sqrt(p * q)))
    if measure is MeasureId.PSI:
        return (p - q) ** 2 * (p + q) / (p * q)
    if measure is MeasureId.K0:
        return (p - q) ** 2 / np.sqrt(p * q)
    if measure is MeasureId.F:
        pq = p * q
        return (p**2 - q**2) ** 2 / (2 * pq * np.sqrt(pq))
    if measure is MeasureId.G:
        return np.sqrt(p * q)
    sp, sq, w, r = _pieces(p, q)
    if measure is MeasureId.N1:
        return w**2
    if measure is MeasureId.N2:
        return r * w
    if measure is MeasureId.M1:
        return w * (sp - sq) ** 2 / (4 * (r + w))
    if measure is MeasureId.M2:
        return w * (sp - sq) ** 2 / (4 * (r + w)) + (sp - sq) ** 2 / 4
    if measure is MeasureId.M3:
        return r * (sp - sq) ** 2 / (4 * (r + w))
    raise KeyError(measure)


def _sum(measure, p, q):
    if measure is MeasureId.A:
        return np.ones(p.shape[:-1]) if p.ndim > 1 else 1.0
    return np.sum(_terms(measure, p, q), axis=-1)


def _check_dims(p, q):
    if p.n != q.n:
        raise DimensionMismatch(f"dimensions differ: {p.n} != {q.n}")


def evaluate(measure, p, q):
    """Closed-form value of one measure.

    Args:
        measure (MeasureId, mandatory)
        p, q (Distribution, mandatory)

    Return : MeasureValue (nats for I, J and T).

    """

    _check_dims(p, q)
    return MeasureValue(measure, float(_sum(measure, p.probs, q.probs)))


def evaluate_all(p, q):
    """All 15 measures for one pair, keyed by MeasureId."""

    _check_dims(p, q)
    return {m: MeasureValue(m, float(_sum(m, p.probs, q.probs))) for m in ALL_MEASURES}


def evaluate_batch(P, Q):
    """Vectorized evaluation over stacked pairs.

    Args:
        P, Q (ndarray, mandatory): shape (pairs, n), one distribution per row

    Return : dict MeasureId -> ndarray of shape (pairs,).

    """

    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    if P.shape != Q.shape:
        raise DimensionMismatch(f"batch shapes differ: {P.shape} != {Q.shape}")
    return {m: np.asarray(_sum(m, P, Q), dtype=np.float64) for m in ALL_MEASURES}


def _lookup(values, measure):
    if measure not in values:
        raise IncompleteValues(f"no value for {measure.value}")
    return float(values[measure])


def _chain_slacks(values, chain, tol, label):
    scaled = [float(c) * _lookup(values, m) for m, c in chain]
    slacks = [scaled[k + 1] - scaled[k] for k in range(len(scaled) - 1)]
    worst = min(slacks)
    if worst < -tol:
        logging.warning("%s violated: worst link slack %.3e (tolerance %.1e)", label, worst, tol)
    return slacks


def check_chain5(values, tol=1e-12):
    """Slacks of the ten links of the eleven-measure chain, in chain order."""

    return _chain_slacks(values, CHAIN5, tol, "chain of eleven measures")


def check_chain1(values, tol=1e-12):
    """Slacks of 1/4 Delta <= I <= h <= 1/8 J <= T <= 1/16 Psi."""

    return _chain_slacks(values, CHAIN1, tol, "chain of six classical measures")


def check_chain4(values, tol=1e-12):
    """Slacks of G <= N1 <= N2 <= A."""

    return _chain_slacks(values, CHAIN4, tol, "chain of mean sums")


def mean_identities(values):
    """Residuals of the Hellinger identities among the mean sums.

    h = A - G and 2 (A - N1) = A - G hold exactly. The pair (N1, G) differs
    by h / 2, not h, so its residual is reported against h / 2.

    Return : dict label -> residual (zero up to round-off).

    """

    h = _lookup(values, MeasureId.H)
    a = _lookup(values, MeasureId.A)
    g = _lookup(values, MeasureId.G)
    n1 = _lookup(values, MeasureId.N1)
    return {
        "h = A - G": h - (a - g),
        "2(A - N1) = A - G": 2 * (a - n1) - (a - g),
        "2(N1 - G) = h": 2 * (n1 - g) - h,
    }
