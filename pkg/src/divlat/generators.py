"""Csiszar generating functions of the chain divergences.

Every measure is written as C_f(P||Q) = sum_i q_i f(p_i / q_i) with a convex f
normalized to f(1) = 0. Each f carries hand-derived first and second
derivatives. The formulas accept numpy arrays as well as ``mpmath.mpf``
scalars, so the same code serves vectorized sweeps and high-precision
evaluation near x = 1.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import mpmath
import numpy as np

from divlat.base_logger import logging
from divlat.errors import DimensionMismatch, EmptyGrid, NotADivergence


class MeasureId(Enum):
    DELTA = "Delta"
    I = "I"  # noqa: E741
    M1 = "M1"
    M2 = "M2"
    H = "h"
    M3 = "M3"
    J = "J"
    T = "T"
    K0 = "K0"
    PSI = "Psi"
    F = "F"
    G = "G"
    N1 = "N1"
    N2 = "N2"
    A = "A"

    @classmethod
    def parse(cls, tag):
        for member in cls:
            if member.value == tag or member.name == tag:
                return member
        raise ValueError(f"unknown measure tag {tag!r}")


ALL_MEASURES = tuple(MeasureId)
DIVERGENCES = ALL_MEASURES[:11]
MEAN_SUMS = ALL_MEASURES[11:]
MEASURE_ORDER = {m: k for k, m in enumerate(ALL_MEASURES)}


@dataclass(frozen=True)
class GeneratingFunction:
    """A normalized convex f with analytic derivatives."""

    name: str
    value: object
    d1: object
    d2: object


def _is_mp(x):
    return isinstance(x, (mpmath.mpf, mpmath.mpc))


def _sqrt(x):
    return mpmath.sqrt(x) if _is_mp(x) else np.sqrt(x)


def _log(x):
    return mpmath.log(x) if _is_mp(x) else np.log(x)


# triangular discrimination
def _delta(x):
    return (x - 1) ** 2 / (x + 1)


def _delta_d1(x):
    return (x - 1) * (x + 3) / (x + 1) ** 2


def _delta_d2(x):
    return 8 / (x + 1) ** 3


# Jensen-Shannon
def _jsd(x):
    return (x * _log(2 * x / (x + 1)) + _log(2 / (x + 1))) / 2


def _jsd_d1(x):
    return _log(2 * x / (x + 1)) / 2


def _jsd_d2(x):
    return 1 / (2 * x * (x + 1))


# Hellinger
def _hellinger(x):
    return (_sqrt(x) - 1) ** 2 / 2


def _hellinger_d1(x):
    return (1 - 1 / _sqrt(x)) / 2


def _hellinger_d2(x):
    return 1 / (4 * x * _sqrt(x))


# J-divergence
def _jdiv(x):
    return (x - 1) * _log(x)


def _jdiv_d1(x):
    return _log(x) + 1 - 1 / x


def _jdiv_d2(x):
    return (x + 1) / x**2


# arithmetic-geometric mean divergence
def _agm(x):
    return (x + 1) / 2 * _log((x + 1) / (2 * _sqrt(x)))


def _agm_d1(x):
    return _log((x + 1) / (2 * _sqrt(x))) / 2 + (x - 1) / (4 * x)


def _agm_d2(x):
    return (x**2 + 1) / (4 * x**2 * (x + 1))


# symmetric chi-square
def _psi(x):
    return (x - 1) ** 2 * (x + 1) / x


def _psi_d1(x):
    return 2 * x - 1 - 1 / x**2


def _psi_d2(x):
    return 2 + 2 / x**3


# Jain-Srivastava
def _k0(x):
    return (x - 1) ** 2 / _sqrt(x)


def _k0_d1(x):
    s = _sqrt(x)
    return 3 * s / 2 - 1 / s - 1 / (2 * x * s)


def _k0_d2(x):
    s = _sqrt(x)
    return 3 / (4 * s) + 1 / (2 * x * s) + 3 / (4 * x**2 * s)


# Kumar-Johnson
def _kj(x):
    return (x**2 - 1) ** 2 / (2 * x * _sqrt(x))


def _kj_d1(x):
    s = _sqrt(x)
    return 5 * x * s / 4 - 1 / (2 * s) - 3 / (4 * x**2 * s)


def _kj_d2(x):
    s = _sqrt(x)
    return 15 * s / 8 + 1 / (4 * x * s) + 15 / (8 * x**3 * s)


# Mean divergences. With s = sqrt(x), r = sqrt((x+1)/2) and w = (s+1)/2 the
# per-term means are G: s, N1: w**2, N2: r*w, A: (x+1)/2.
def _means(x):
    s = _sqrt(x)
    r = _sqrt((x + 1) / 2)
    w = (s + 1) / 2
    return s, r, w


def _n2_derivs(x):
    s, r, w = _means(x)
    d1 = w / (4 * r) + r / (4 * s)
    d2 = -w / (16 * r**3) + 1 / (8 * r * s) - r / (8 * x * s)
    return d1, d2


def _m1(x):
    s, r, w = _means(x)
    return w * (s - 1) ** 2 / (4 * (r + w))


def _m1_d1(x):
    s = _sqrt(x)
    return _n2_derivs(x)[0] - (1 + 1 / s) / 4


def _m1_d2(x):
    s = _sqrt(x)
    return _n2_derivs(x)[1] + 1 / (8 * x * s)


def _m2(x):
    s = _sqrt(x)
    return _m1(x) + (s - 1) ** 2 / 4


def _m2_d1(x):
    return _n2_derivs(x)[0] - 1 / (2 * _sqrt(x))


def _m2_d2(x):
    return _n2_derivs(x)[1] + 1 / (4 * x * _sqrt(x))


def _m3(x):
    s, r, w = _means(x)
    return r * (s - 1) ** 2 / (4 * (r + w))


def _m3_d1(x):
    return 0.5 - _n2_derivs(x)[0]


def _m3_d2(x):
    return -_n2_derivs(x)[1]


_TABLE = {
    MeasureId.DELTA: (_delta, _delta_d1, _delta_d2),
    MeasureId.I: (_jsd, _jsd_d1, _jsd_d2),
    MeasureId.M1: (_m1, _m1_d1, _m1_d2),
    MeasureId.M2: (_m2, _m2_d1, _m2_d2),
    MeasureId.H: (_hellinger, _hellinger_d1, _hellinger_d2),
    MeasureId.M3: (_m3, _m3_d1, _m3_d2),
    MeasureId.J: (_jdiv, _jdiv_d1, _jdiv_d2),
    MeasureId.T: (_agm, _agm_d1, _agm_d2),
    MeasureId.K0: (_k0, _k0_d1, _k0_d2),
    MeasureId.PSI: (_psi, _psi_d1, _psi_d2),
    MeasureId.F: (_kj, _kj_d1, _kj_d2),
}


def generating_function(measure):
    """Return the generating function of one of the 11 chain divergences.

    Args:
        measure (MeasureId, mandatory)

    Return : GeneratingFunction.

    """

    if measure not in _TABLE:
        raise NotADivergence(f"{measure.value} is a mean sum and has no normalized generating function")
    value, d1, d2 = _TABLE[measure]
    return GeneratingFunction(measure.value, value, d1, d2)


@dataclass(frozen=True)
class LinearCombo:
    """A finite sum of measures with exact rational coefficients.

    ``terms`` is a tuple of (MeasureId, Fraction) in chain order with no zero
    coefficients; build instances with ``combo``.
    """

    terms: tuple

    def coefficient(self, measure):
        for m, c in self.terms:
            if m == measure:
                return c
        return Fraction(0)

    def as_dict(self):
        return dict(self.terms)

    def __add__(self, other):
        merged = self.as_dict()
        for m, c in other.terms:
            merged[m] = merged.get(m, Fraction(0)) + c
        return combo(merged)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, factor):
        return combo({m: c * Fraction(factor) for m, c in self.terms})

    def measures(self):
        return tuple(m for m, _ in self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = m.value if mag == 1 else f"{mag}*{m.value}"
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def combo(terms):
    """Build a LinearCombo from a mapping MeasureId -> int/Fraction/str."""

    cleaned = {}
    for m, c in dict(terms).items():
        c = Fraction(c)
        if c != 0:
            cleaned[m] = c
    return LinearCombo(tuple(sorted(cleaned.items(), key=lambda item: MEASURE_ORDER[item[0]])))


def _combine(parts):
    def evaluate(x):
        total = 0
        for c, fn in parts:
            total = total + fn(x) * c.numerator / c.denominator
        return total

    return evaluate


def linear_combination(lc, name=None):
    """Generating function of a linear combination of divergences.

    Args:
        lc (LinearCombo, mandatory)
        name (string, optional)

    Return : GeneratingFunction whose value/d1/d2 are the same combination of
    the constituent functions.

    """

    gfs = [(c, generating_function(m)) for m, c in lc.terms]
    return GeneratingFunction(
        name or str(lc),
        _combine([(c, g.value) for c, g in gfs]),
        _combine([(c, g.d1) for c, g in gfs]),
        _combine([(c, g.d2) for c, g in gfs]),
    )


def eval_csiszar(f, p, q):
    """Evaluate C_f(P||Q) = sum_i q_i f(p_i / q_i).

    Args:
        f (GeneratingFunction, mandatory)
        p, q (Distribution, mandatory): same dimension

    Return : float.

    """

    if p.n != q.n:
        raise DimensionMismatch(f"dimensions differ: {p.n} != {q.n}")
    return float(np.sum(q.probs * f.value(p.probs / q.probs)))


def check_convexity(f, grid):
    """True iff f'' > 0 at every grid point."""

    points = np.asarray(grid, dtype=np.float64)
    if points.size == 0:
        raise EmptyGrid("convexity check needs at least one grid point")
    ok = bool(np.all(f.d2(points) > 0))
    if not ok:
        logging.debug("Convexity check failed for %s", f.name)
    return ok
