"""The 55 nonnegative differences between scaled members of the eleven-measure chain.

Line L of the pyramid (L = 1..10) holds the differences whose upper member
sits at chain position L + 1, ordered from the nearest lower member to the
farthest:

    D^1_{I Delta}
    D^2_{M1 I} <= D^3_{M1 Delta}
    D^4_{M2 M1} <= D^5_{M2 I} <= D^6_{M2 Delta}
    ...
    D^46_{F Psi} <= ... <= D^55_{F Delta}
"""

from dataclasses import dataclass
from fractions import Fraction

from divlat.base_logger import logging
from divlat.errors import OutOfRange
from divlat.generators import MeasureId, combo, linear_combination
from divlat.measures import CHAIN5, evaluate_all

CHAIN_LENGTH = len(CHAIN5)
PYRAMID_SIZE = CHAIN_LENGTH * (CHAIN_LENGTH - 1) // 2

_SYMBOLS = {
    MeasureId.DELTA: "Δ",
    MeasureId.PSI: "Ψ",
}


@dataclass(frozen=True)
class ChainPosition:
    pos: int
    id: MeasureId
    coeff: Fraction

    @property
    def symbol(self):
        return _SYMBOLS.get(self.id, self.id.value)


CHAIN_POSITIONS = tuple(ChainPosition(k + 1, m, c) for k, (m, c) in enumerate(CHAIN5))


@dataclass(frozen=True)
class DifferenceId:
    index: int
    upper: ChainPosition
    lower: ChainPosition

    @property
    def line(self):
        return self.upper.pos - 1

    @property
    def label(self):
        return f"D{self.index}_{self.upper.id.value}{self.lower.id.value}"

    @property
    def combo(self):
        """Measure-coefficient expansion upper.coeff * X - lower.coeff * Y."""

        return combo({self.upper.id: self.upper.coeff}) - combo({self.lower.id: self.lower.coeff})

    def __str__(self):
        return f"D^{self.index}_{{{self.upper.symbol}{self.lower.symbol}}}"


def difference_index(upper_pos, lower_pos):
    """Locate the pyramid entry for a pair of chain positions.

    The numbering is index = L (L - 1) / 2 + k with L = upper_pos - 1 and
    k = upper_pos - lower_pos.

    Args:
        upper_pos (int, mandatory): 2..11
        lower_pos (int, mandatory): 1..upper_pos - 1

    Return : DifferenceId.

    """

    if not (1 <= lower_pos < upper_pos <= CHAIN_LENGTH):
        raise OutOfRange(f"need 1 <= lower < upper <= {CHAIN_LENGTH}, got upper={upper_pos}, lower={lower_pos}")
    line = upper_pos - 1
    k = upper_pos - lower_pos
    return DifferenceId(
        line * (line - 1) // 2 + k,
        CHAIN_POSITIONS[upper_pos - 1],
        CHAIN_POSITIONS[lower_pos - 1],
    )


def inverse_index(index):
    """Return (upper_pos, lower_pos) of pyramid entry ``index``."""

    if not (1 <= index <= PYRAMID_SIZE):
        raise OutOfRange(f"pyramid index must lie in 1..{PYRAMID_SIZE}, got {index}")
    line = 1
    while line * (line + 1) // 2 < index:
        line += 1
    k = index - line * (line - 1) // 2
    upper = line + 1
    return upper, upper - k


def difference(index):
    """DifferenceId by pyramid number."""

    return difference_index(*inverse_index(index))


def all_differences():
    return tuple(difference(k) for k in range(1, PYRAMID_SIZE + 1))


def pyramid_lines():
    """Indices of each pyramid line, nearest lower member first."""

    lines = []
    for line in range(1, CHAIN_LENGTH):
        start = line * (line - 1) // 2
        lines.append(list(range(start + 1, start + line + 1)))
    return lines


def evaluate_difference(d, p, q):
    """Value of one difference measure at (P, Q).

    Args:
        d (DifferenceId, mandatory)
        p, q (Distribution, mandatory)

    Return : float.

    """

    values = evaluate_all(p, q)
    return _difference_from(d, values)


def _difference_from(d, values):
    upper = float(values[d.upper.id])
    lower = float(values[d.lower.id])
    return float(d.upper.coeff) * upper - float(d.lower.coeff) * lower


def difference_generating_function(d):
    return linear_combination(d.combo, name=d.label)


def pyramid_table(p, q):
    """All 55 differences at (P, Q), in pyramid order.

    Return : list of float.

    """

    values = evaluate_all(p, q)
    table = [_difference_from(d, values) for d in all_differences()]
    logging.debug("Pyramid table computed for n=%d, min entry %.3e", p.n, min(table))
    return table


def to_dot(values=None, extra_edges=()):
    """Render the pyramid as a Graphviz digraph.

    Within-line orderings become solid edges; ``extra_edges`` holds
    (lower_index, upper_index, label) triples drawn dashed, e.g. theorem
    constants. When ``values`` is given each node shows its value.

    Return : string.

    """

    lines = ["digraph pyramid {", "  rankdir=LR;", "  node [shape=box];"]
    for row in pyramid_lines():
        members = []
        for index in row:
            d = difference(index)
            text = d.label if values is None else f"{d.label}\\n{values[index - 1]:.6g}"
            lines.append(f'  d{index} [label="{text}"];')
            members.append(f"d{index}")
        lines.append("  { rank=same; " + "; ".join(members) + "; }")
        for a, b in zip(row, row[1:]):
            lines.append(f"  d{a} -> d{b};")
    for a, b, label in extra_edges:
        lines.append(f'  d{a} -> d{b} [style=dashed, label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
