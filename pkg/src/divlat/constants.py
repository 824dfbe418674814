"""Recovery of the tight constants and exact polynomial certificates.

For a proved inequality C_{f1} <= beta C_{f2}, beta is the supremum of
g(x) = f1''(x) / f2''(x) over x > 0, reached as x -> 1. At x = 1 both second
derivatives of a pyramid difference vanish to second order, so g is evaluated
in high precision near 1 and its limit is taken by extrapolation.
"""

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
import sympy
from joblib import Parallel, delayed
from scipy.optimize import minimize_scalar

from divlat.base_logger import logging
from divlat.errors import DenominatorVanishes, ExtrapolationDiverged, OutOfRange, ZeroPolynomial
from divlat.generators import GeneratingFunction, LinearCombo, linear_combination

HIGH_DPS = 40
NEAR_ONE_BAND = 0.25
LIMIT_STEPS = ("1e-2", "1e-3", "1e-4")
LIMIT_AGREEMENT = 1e-6
GRID_LO, GRID_HI = 1e-6, 1e6
MIN_GRID_POINTS = 100
SLOPE_TOL = 1e-9
LIMIT_RTOL = 1e-6
SUP_RTOL = 1e-9


def _as_gf(item):
    if isinstance(item, GeneratingFunction):
        return item
    if isinstance(item, LinearCombo):
        return linear_combination(item)
    return linear_combination(item.combo, name=item.label)


class RatioFunction:
    """g(x) = numerator''(x) / denominator''(x) for two generating functions."""

    def __init__(self, numerator, denominator, name=None):
        self.numerator = numerator
        self.denominator = denominator
        self.name = name or f"{numerator.name} / {denominator.name}"
        self._limit = None

    def _mp_ratio(self, x):
        with mpmath.workdps(HIGH_DPS):
            xm = mpmath.mpf(x)
            num, den = self.numerator.d2(xm), self.denominator.d2(xm)
            if den <= 0:
                raise DenominatorVanishes(f"{self.name}: denominator second derivative {float(den)!r} at x={x!r}")
            return num / den

    def second_derivatives(self, x):
        """Pair (f1'', f2'') on an array of x, high precision within the band around 1."""

        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        num = np.empty_like(x)
        den = np.empty_like(x)
        near = np.abs(np.log(x)) < NEAR_ONE_BAND
        far = ~near
        with np.errstate(all="ignore"):
            num[far] = self.numerator.d2(x[far])
            den[far] = self.denominator.d2(x[far])
        with mpmath.workdps(HIGH_DPS):
            for k in np.flatnonzero(near):
                xm = mpmath.mpf(float(x[k]))
                num[k] = float(self.numerator.d2(xm))
                den[k] = float(self.denominator.d2(xm))
        return num, den

    def eval(self, x):
        """g at a scalar or array of x > 0; x = 1 maps to the limit."""

        arr = np.asarray(x, dtype=np.float64)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        out = np.empty_like(arr)
        near = np.abs(np.log(arr)) < NEAR_ONE_BAND
        far = ~near
        if np.any(far):
            with np.errstate(all="ignore"):
                num = self.numerator.d2(arr[far])
                den = self.denominator.d2(arr[far])
            if np.any(den <= 0):
                bad = arr[far][np.argmax(den <= 0)]
                raise DenominatorVanishes(f"{self.name}: denominator second derivative <= 0 at x={bad!r}")
            out[far] = num / den
        for k in np.flatnonzero(near):
            out[k] = self.limit() if arr[k] == 1.0 else float(self._mp_ratio(float(arr[k])))
        return float(out[0]) if scalar else out

    def limit(self):
        if self._limit is None:
            self._limit = limit_at_one(self)
        return self._limit

    def __call__(self, x):
        return self.eval(x)


def _check_denominator(g, n_points=200):
    left, right = log_grids(GRID_LO, GRID_HI, 2 * n_points)
    _, den = g.second_derivatives(np.exp(np.concatenate([left, right])))
    if np.any(den <= 0):
        raise DenominatorVanishes(f"{g.name}: denominator second derivative is not positive on the grid")


def ratio_function(d1, d2):
    """Build g = f1'' / f2'' for differences, combinations or generating functions.

    Args:
        d1 (DifferenceId | LinearCombo | GeneratingFunction, mandatory)
        d2 (DifferenceId | LinearCombo | GeneratingFunction, mandatory)

    Return : RatioFunction.

    """

    g = RatioFunction(_as_gf(d1), _as_gf(d2))
    _check_denominator(g)
    return g


def limit_at_one(g):
    """Extrapolated value of g(x) as x -> 1.

    Symmetric averages of g(1 + h) and g(1 - h) cancel the odd terms; one
    Richardson step in h**2 removes the quadratic one. Two successive
    estimates must agree to LIMIT_AGREEMENT.

    Return : float.

    """

    with mpmath.workdps(HIGH_DPS):
        steps = [mpmath.mpf(h) for h in LIMIT_STEPS]
        sym = [(g._mp_ratio(1 + h) + g._mp_ratio(1 - h)) / 2 for h in steps]
        rich = [(100 * sym[k + 1] - sym[k]) / 99 for k in range(len(sym) - 1)]
        spread = abs(rich[-1] - rich[-2])
        if spread > LIMIT_AGREEMENT * max(1, abs(rich[-1])):
            raise ExtrapolationDiverged(f"{g.name}: successive estimates differ by {float(spread):.3e}")
        return float(rich[-1])


def log_grids(lo, hi, n_points):
    """Log-x samples of [lo, 1) and (1, hi], kept separate so x = 1 is never sampled."""

    n_left = n_points // 2
    n_right = n_points - n_left
    left = np.linspace(np.log(lo), 0.0, n_left + 1)[:-1]
    right = np.linspace(0.0, np.log(hi), n_right + 1)[1:]
    return left, right


def _check_grid_args(lo, hi, n_points):
    if not (0 < lo < 1 < hi):
        raise OutOfRange(f"need 0 < lo < 1 < hi, got lo={lo}, hi={hi}")
    if n_points < MIN_GRID_POINTS:
        raise OutOfRange(f"need at least {MIN_GRID_POINTS} grid points, got {n_points}")


def grid_sup(g, lo=GRID_LO, hi=GRID_HI, n_points=10000):
    """Largest value of g over a log grid of [lo, hi], refined by golden section.

    The refinement runs in u = ln x around the best sample, only when that
    sample strictly beats both neighbours.

    Return : float.

    """

    _check_grid_args(lo, hi, n_points)
    left, right = log_grids(lo, hi, n_points)
    u = np.concatenate([left, right])
    values = g.eval(np.exp(u))
    i = int(np.argmax(values))
    best = float(values[i])
    if 0 < i < len(u) - 1 and values[i] > values[i - 1] and values[i] > values[i + 1]:
        res = minimize_scalar(
            lambda v: -g.eval(float(np.exp(v))),
            bracket=(u[i - 1], u[i], u[i + 1]),
            method="golden",
            options={"xtol": 1e-10},
        )
        best = max(best, float(-res.fun))
    logging.debug("grid_sup %s: %.12g at x=%.6g", g.name, best, float(np.exp(u[i])))
    return best


def grid_inf(g, lo=GRID_LO, hi=GRID_HI, n_points=10000):
    """Smallest sampled value of g; an empirical lower constant, not a proved one."""

    _check_grid_args(lo, hi, n_points)
    left, right = log_grids(lo, hi, n_points)
    return float(np.min(g.eval(np.exp(np.concatenate([left, right])))))


def monotonicity_check(g, n_points=10000, lo=GRID_LO, hi=GRID_HI):
    """True iff g rises on (0, 1) and falls on (1, inf), up to SLOPE_TOL.

    Slopes are taken in u = ln x and compared against SLOPE_TOL scaled by
    max(1, |g|).
    """

    _check_grid_args(lo, hi, n_points)
    left, right = log_grids(lo, hi, n_points)
    ok = True
    for u, sign in ((left, 1.0), (right, -1.0)):
        values = g.eval(np.exp(u))
        slopes = np.diff(values) / np.diff(u)
        allowance = SLOPE_TOL * np.maximum(1.0, np.abs(values[1:]))
        if np.any(sign * slopes < -allowance):
            ok = False
    if not ok:
        logging.debug("monotonicity failed for %s", g.name)
    return ok


@dataclass(frozen=True)
class ConstantEstimate:
    part_label: str
    claimed: Fraction
    limit_at_one: float
    grid_sup: float
    grid_inf: float
    monotone_ok: bool
    monotone_required: bool = True

    @property
    def limit_ok(self):
        return abs(self.limit_at_one - float(self.claimed)) <= LIMIT_RTOL * float(self.claimed)

    @property
    def sup_ok(self):
        return self.grid_sup <= float(self.claimed) * (1 + SUP_RTOL)

    @property
    def passed(self):
        return self.limit_ok and self.sup_ok and (self.monotone_ok or not self.monotone_required)

    def as_row(self):
        return {
            "part": self.part_label,
            "claimed_num": self.claimed.numerator,
            "claimed_den": self.claimed.denominator,
            "limit": self.limit_at_one,
            "grid_sup": self.grid_sup,
            "grid_inf": self.grid_inf,
            "monotone_ok": self.monotone_ok,
            "monotone_required": self.monotone_required,
            "pass": self.passed,
        }


def estimate(part, grid_points=10000):
    """Recover the constant of one theorem part.

    Args:
        part (TheoremPart, mandatory)
        grid_points (int, optional)

    Return : ConstantEstimate.

    """

    g = ratio_function(part.numerator, part.denominator)
    est = ConstantEstimate(
        part.label,
        part.beta,
        g.limit(),
        grid_sup(g, n_points=grid_points),
        grid_inf(g, n_points=grid_points),
        monotonicity_check(g, grid_points),
        part.monotone_required,
    )
    if not est.passed:
        logging.warning(
            "%s: claimed %s, limit %.12g, sup %.12g, monotone %s",
            part.label,
            part.beta,
            est.limit_at_one,
            est.grid_sup,
            est.monotone_ok,
        )
    return est


def sweep(parts, grid_points=10000, threads=1):
    """Estimate every part; results come back in input order.

    Workers are processes because mpmath keeps its working precision in
    global state.
    """

    parts = list(parts)
    logging.info("Constant sweep over %d parts with %d grid points", len(parts), grid_points)
    results = Parallel(n_jobs=threads)(delayed(estimate)(p, grid_points) for p in parts)
    logging.info("Constant sweep finished: %d/%d passed", sum(r.passed for r in results), len(results))
    return list(results)


@dataclass(frozen=True)
class IntegerPolynomial:
    """Integer polynomial in t, coefficients in ascending degree."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = [int(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __call__(self, t):
        return sum(c * t**k for k, c in enumerate(self.coeffs))

    def to_sympy(self, symbol):
        return sympy.Poly(list(reversed(self.coeffs)), symbol, domain=sympy.QQ)


# the sign-deciding polynomials of parts 12 and 59, in t = sqrt(x)
V_POLY = IntegerPolynomial((4, -9, 24, -41, 60, 50, -48, 50, 60, -41, 24, -9, 4))
M_POLY = IntegerPolynomial(
    (
        2025, 9270, 14344, 8634, 27498, 15106, 9952, -2034, -9001, -9380, -12776, 1444,
        -36436,
        1444, -12776, -9380, -9001, -2034, 9952, 15106, 27498, 8634, 14344, 9270, 2025,
    )
)  # fmt: skip
V_AT_ONE = 128
M_AT_ONE = 73728


def _sign_at_zero_plus(poly):
    for c in reversed(poly.all_coeffs()):
        if c != 0:
            return 1 if c > 0 else -1
    return 0


def _variations(signs):
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_positive_roots(p):
    """Exact number of distinct real roots in (0, inf), by a Sturm sequence over QQ.

    Args:
        p (IntegerPolynomial, mandatory)

    Return : int.

    """

    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no finite root count")
    if p.degree == 0:
        return 0
    t = sympy.Symbol("t")
    chain = sympy.sturm(p.to_sympy(t))
    at_zero = [_sign_at_zero_plus(s) for s in chain]
    at_inf = [1 if s.LC() > 0 else -1 for s in chain if not s.is_zero]
    return _variations(at_zero) - _variations(at_inf)


def eval_at_one(p):
    """Exact p(1), i.e. the coefficient sum."""

    return sum(p.coeffs)


def positive_on_half_line(p):
    """p(t) > 0 for all t > 0: no positive root and a positive value at t = 1."""

    return count_positive_roots(p) == 0 and eval_at_one(p) > 0


def squares_difference(a, b):
    """(a^2 - b^2) / (a + b) for positive rationals; equals a - b exactly.

    A positive result from the squared quantities therefore orders a and b.
    """

    a, b = Fraction(a), Fraction(b)
    if a <= 0 or b <= 0:
        raise OutOfRange("both arguments must be positive")
    return (a * a - b * b) / (a + b)


def check_polynomials():
    """Gate the transcribed polynomials on their known values at t = 1."""

    for name, poly, expected in (("v", V_POLY, V_AT_ONE), ("m", M_POLY, M_AT_ONE)):
        got = eval_at_one(poly)
        if got != expected:
            raise ValueError(f"{name}(1) = {got}, expected {expected}: coefficient transcription error")
    return True
