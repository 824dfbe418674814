import mpmath
import pytest

from divlat.distributions import random_pairs, validate


def pytest_addoption(parser):
    """function to take command line arguments in pytest to size the property tests.

    Args:
        parser


    Return : None.

    """

    parser.addoption("--pairs", help="random pairs per dimension", type=int, default=300)
    parser.addoption("--seed", help="seed of the random pairs", type=int, default=42)
    parser.addoption(
        "--grid-points",
        help="grid points used by the constant recovery tests",
        type=int,
        default=2000,
    )


@pytest.fixture
def params(request):
    """fixture function to access params in subsequent tests when and where required.

    Args:
        request


    Return : params.

    """

    params = {}
    params["PAIRS"] = request.config.getoption("--pairs")
    params["SEED"] = request.config.getoption("--seed")
    params["GRID_POINTS"] = request.config.getoption("--grid-points")
    params["DIMS"] = (2, 3, 5, 10, 50)
    return params


@pytest.fixture
def sample_pair():
    """P = (1/2, 1/2), Q = (1/4, 3/4), the pair used for the spot values."""

    return validate([0.5, 0.5]), validate([0.25, 0.75])


@pytest.fixture
def random_pair_list(params):
    """fixture function to seeded random pairs over every test dimension.

    Args:
        params


    Return : list of (Distribution, Distribution)

    """

    pairs = []
    for n in params["DIMS"]:
        pairs += random_pairs(params["PAIRS"], n, params["SEED"])
    return pairs


def high_precision_measures(p, q, dps=50):
    """Every measure summed term by term in 50-digit arithmetic, straight from its definition."""

    with mpmath.workdps(dps):
        P = [mpmath.mpf(v) for v in p]
        Q = [mpmath.mpf(v) for v in q]
        out = {k: mpmath.mpf(0) for k in ("Delta", "I", "h", "J", "T", "Psi", "K0", "F", "G", "N1", "N2", "A")}
        for a, b in zip(P, Q):
            s = mpmath.sqrt(a * b)
            mid = (a + b) / 2
            root_mean = ((mpmath.sqrt(a) + mpmath.sqrt(b)) / 2)
            out["Delta"] += (a - b) ** 2 / (a + b)
            out["I"] += (a * mpmath.log(2 * a / (a + b)) + b * mpmath.log(2 * b / (a + b))) / 2
            out["h"] += (mpmath.sqrt(a) - mpmath.sqrt(b)) ** 2 / 2
            out["J"] += (a - b) * mpmath.log(a / b)
            out["T"] += mid * mpmath.log(mid / s)
            out["Psi"] += (a - b) ** 2 * (a + b) / (a * b)
            out["K0"] += (a - b) ** 2 / s
            out["F"] += (a**2 - b**2) ** 2 / (2 * (a * b) ** mpmath.mpf(1.5))
            out["G"] += s
            out["N1"] += root_mean**2
            out["N2"] += mpmath.sqrt(mid) * root_mean
            out["A"] += mid
        out["M1"] = out["N2"] - out["N1"]
        out["M2"] = out["N2"] - out["G"]
        out["M3"] = out["A"] - out["N2"]
        return {k: float(v) for k, v in out.items()}


@pytest.fixture
def oracle(sample_pair):
    """fixture function to the high-precision measure values at the sample pair.

    Args:
        sample_pair


    Return : dict measure tag -> float

    """

    p, q = sample_pair
    return high_precision_measures(p.probs.tolist(), q.probs.tolist())


@pytest.fixture
def mp_measures():
    return high_precision_measures
