import json
from dataclasses import dataclass

import numpy as np
import pandas as pd

from divlat.base_logger import logging
from divlat.errors import MalformedRow, NonPositiveEntry, RowValidationError, SumNotOne, TooShort

SUM_TOLERANCE = 1e-12
TINY_DRAW = 1e-300


@dataclass(frozen=True, eq=False)
class Distribution:
    """A strictly positive point of the probability simplex.

    ``probs`` is a read-only float64 array; construct through ``validate``,
    ``normalize`` or ``random`` rather than directly.
    """

    probs: np.ndarray

    @property
    def n(self):
        return self.probs.shape[0]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.probs, other.probs))

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __repr__(self):
        return f"Distribution(n={self.n}, probs={self.probs.tolist()})"


def _as_array(raw):
    arr = np.array(raw, dtype=np.float64).ravel()
    if arr.shape[0] < 2:
        raise TooShort(f"a distribution needs at least 2 entries, got {arr.shape[0]}")
    if not np.all(arr > 0):
        bad = int(np.argmin(arr > 0))
        raise NonPositiveEntry(f"entry {bad} is {arr[bad]!r}; all entries must be > 0")
    return arr


def _freeze(arr):
    arr.setflags(write=False)
    return Distribution(arr)


def validate(raw):
    """Check a raw sequence against the simplex invariants.

    Args:
        raw (sequence of float, mandatory)

    Return : Distribution, the input accepted as-is.

    """

    arr = _as_array(raw)
    total = float(np.sum(arr))
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise SumNotOne(f"entries sum to {total!r}, outside 1 +/- {SUM_TOLERANCE}")
    return _freeze(arr)


def normalize(raw):
    """Scale positive weights (e.g. histogram counts) onto the simplex.

    Args:
        raw (sequence of positive float, mandatory)

    Return : Distribution.

    """

    arr = _as_array(raw)
    return _freeze(arr / np.sum(arr))


def _draw(rng, shape):
    draws = rng.standard_exponential(shape)
    small = draws < TINY_DRAW
    while np.any(small):
        draws[small] = rng.standard_exponential(int(np.count_nonzero(small)))
        small = draws < TINY_DRAW
    return draws


def random(n, seed):
    """Uniform draw from the simplex of dimension n (Dirichlet with unit concentration).

    Args:
        n (int, mandatory): number of entries, at least 2
        seed (int, mandatory)

    Return : Distribution, bit-identical for identical (n, seed).

    """

    if n < 2:
        raise TooShort(f"a distribution needs at least 2 entries, got {n}")
    rng = np.random.default_rng(seed)
    draws = _draw(rng, n)
    return _freeze(draws / np.sum(draws))


def random_pairs(count, n, seed):
    """Generate ``count`` independent (P, Q) pairs of dimension n.

    The stream is keyed on (seed, n) so adding a dimension to a run does not
    perturb the pairs drawn for the others.

    Return : list of (Distribution, Distribution).

    """

    if n < 2:
        raise TooShort(f"a distribution needs at least 2 entries, got {n}")
    rng = np.random.default_rng([seed, n])
    draws = _draw(rng, (count, 2, n))
    draws /= np.sum(draws, axis=2, keepdims=True)
    logging.debug("Drew %d random pairs of dimension %d (seed %d)", count, n, seed)
    return [(_freeze(draws[i, 0].copy()), _freeze(draws[i, 1].copy())) for i in range(count)]


def _trim_trailing(values):
    end = len(values)
    while end and pd.isna(values[end - 1]):
        end -= 1
    return values[:end]


def _json_rows(payload):
    if not isinstance(payload, list):
        raise RowValidationError(0, MalformedRow(f"expected a JSON array at top level, got {type(payload).__name__}"))
    rows = []
    for k, item in enumerate(payload):
        try:
            if isinstance(item, dict):
                pair = [list(item["p"]), list(item["q"])]
            else:
                pair = [list(item)]
        except KeyError as err:
            raise RowValidationError(len(rows), MalformedRow(f"item {k} has no key {err}")) from err
        except TypeError as err:
            raise RowValidationError(len(rows), MalformedRow(f"item {k} is not a sequence: {item!r}")) from err
        rows.extend(pair)
    return rows


def load_rows(path, fmt):
    """Read raw rows from a CSV or JSON file.

    CSV holds one distribution per line; short lines are padded by pandas and
    only that trailing padding is dropped, so an empty interior field stays NaN
    and fails validation. JSON holds either an array of arrays or an array of
    {"p": [...], "q": [...]} objects, which are flattened to consecutive rows.

    Args:
        path (string, mandatory)
        fmt (string, mandatory): "csv" or "json"

    Return : list of list of float.

    """

    logging.info("Loading distributions from %s (%s)", path, fmt)
    if fmt == "csv":
        with open(path, encoding="utf-8") as handle:
            width = max((line.count(",") + 1 for line in handle if line.strip()), default=0)
        if width == 0:
            return []
        df = pd.read_csv(path, header=None, names=range(width), skip_blank_lines=True)
        return [_trim_trailing(row.tolist()) for _, row in df.iterrows()]

    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    return _json_rows(payload)
