"""H-represented polytopes `D y <= d` (y free): vertex enumeration,
redundancy of single inequalities and the perfect polytope check.

Vertex enumeration scans all m-row subsystems, which is exponential in
m and only meant for small instances."""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple

from dbpsolve.exceptions import RankDeficientError, SingularMatrixError, UnboundedSetError
from dbpsolve.lp import INFEASIBLE, UNBOUNDED, LpProblem, solve_lp
from dbpsolve.rational import dot, format_rational, rank, solve_square_system, transpose

logger = logging.getLogger(__name__)


class Redundancy(str, Enum):
    NOT_REDUNDANT = "not_redundant"
    WEAKLY = "weakly"
    STRONGLY = "strongly"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: dict


@dataclass
class PerfectReport:
    """Outcome of `check_perfect`.

    `violations` lists every failed condition (kinds "a", "b", "c") with
    a witness; `cone_overlaps` lists vertex pairs whose symmetric cones
    intersect and does not take part in `is_perfect`."""

    redundant_rows: List[int] = field(default_factory=list)
    vertices: List[Tuple[Fraction, ...]] = field(default_factory=list)
    violations: List[Violation] = field(default_factory=list)
    cone_overlaps: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def is_perfect(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        def stringify(value):
            if isinstance(value, Fraction):
                return format_rational(value)
            if isinstance(value, (list, tuple)):
                return [stringify(v) for v in value]
            return value

        return {
            "is_perfect": self.is_perfect,
            "redundant_rows": list(self.redundant_rows),
            "vertices": stringify(self.vertices),
            "violations": [
                {"kind": v.kind, "witness": {k: stringify(w) for k, w in v.witness.items()}}
                for v in self.violations
            ],
            "cone_overlaps": [list(pair) for pair in self.cone_overlaps],
        }


def _free(m):
    return [False] * m


def coordinate_ranges(D: Sequence[Sequence[Fraction]], d: Sequence[Fraction]):
    """(min, max) of every coordinate over `D y <= d`.

    :returns: list of pairs, or None when the set is empty
    :raises UnboundedSetError: when some coordinate is unbounded"""

    m = len(D[0])
    ranges = []
    for j in range(m):
        unit = [Fraction(int(i == j)) for i in range(m)]
        bounds = []
        for sense in ("min", "max"):
            outcome = solve_lp(LpProblem(objective=unit, sense=sense, le_rows=list(D), le_rhs=list(d), nonneg=_free(m)))
            if outcome.status == INFEASIBLE:
                return None
            if outcome.status == UNBOUNDED:
                raise UnboundedSetError(f"Dy <= d is unbounded along y_{j + 1}")
            bounds.append(outcome.value)
        ranges.append(tuple(bounds))
    return ranges


def _freeze(D, d):
    return tuple(tuple(Fraction(v) for v in row) for row in D), tuple(Fraction(v) for v in d)


@lru_cache(maxsize=256)
def _vertices(D: tuple, d: tuple) -> tuple:
    if coordinate_ranges(D, d) is None:
        return ()
    m = len(D[0])
    found = set()
    for rows in itertools.combinations(range(len(D)), m):
        try:
            point = solve_square_system([D[i] for i in rows], [d[i] for i in rows])
        except SingularMatrixError:
            continue
        if all(dot(row, point) <= b for row, b in zip(D, d)):
            found.add(tuple(point))
    return tuple(sorted(found))


def enumerate_vertices(D: Sequence[Sequence[Fraction]], d: Sequence[Fraction]) -> List[Tuple[Fraction, ...]]:
    """All vertices of the bounded polytope `D y <= d`, sorted
    lexicographically. Results are cached on the content of (D, d).

    :raises UnboundedSetError: when the set is unbounded"""

    return list(_vertices(*_freeze(D, d)))


def tight_rows(D, d, point) -> List[int]:
    return [i for i, (row, b) in enumerate(zip(D, d)) if dot(row, point) == b]


def classify_redundancy(s: Sequence[Fraction], s0: Fraction, D, d) -> Redundancy:
    """Classifies `s y <= s0` against the consistent system `D y <= d`.

    Uses the LP  min d v  s.t.  D^T v = s, v >= 0,  whose optimum equals
    the maximum of `s y` over the system."""

    s0 = Fraction(s0)
    if all(v == 0 for v in s):
        return Redundancy.DEGENERATE if s0 >= 0 else Redundancy.NOT_REDUNDANT
    m = len(s)
    outcome = solve_lp(LpProblem(objective=list(d), eq_rows=transpose(D, m), eq_rhs=list(s)))
    if outcome.status == INFEASIBLE:
        return Redundancy.NOT_REDUNDANT
    if outcome.status == UNBOUNDED:
        # Only possible when D y <= d itself is empty.
        return Redundancy.STRONGLY
    if outcome.value < s0:
        return Redundancy.STRONGLY
    if outcome.value == s0:
        return Redundancy.WEAKLY
    return Redundancy.NOT_REDUNDANT


def interior_slack(D, d) -> Fraction:
    """Largest uniform slack delta with `D y + delta <= d`, or None when
    there is no finite maximum."""

    m = len(D[0])
    rows = [list(row) + [Fraction(1)] for row in D]
    objective = [Fraction(0)] * m + [Fraction(1)]
    outcome = solve_lp(LpProblem(objective=objective, sense="max", le_rows=rows, le_rhs=list(d), nonneg=_free(m) + [False]))
    return outcome.value if outcome.is_optimal else None


def cones_overlapping(D, d, vertices) -> List[Tuple[int, int]]:
    """Pairs of vertex indices whose symmetric cones
    {y : D_i y >= d_i for i tight at the vertex} intersect."""

    m = len(D[0])
    active = [tight_rows(D, d, vertex) for vertex in vertices]
    overlaps = []
    for r, k in itertools.combinations(range(len(vertices)), 2):
        rows = [[-v for v in D[i]] for i in active[r] + active[k]]
        rhs = [-d[i] for i in active[r] + active[k]]
        outcome = solve_lp(LpProblem(objective=[Fraction(0)] * m, le_rows=rows, le_rhs=rhs, nonneg=_free(m)))
        if outcome.status != INFEASIBLE:
            overlaps.append((r, k))
    return overlaps


def cones_disjoint(D, d) -> bool:
    """True when the symmetric cones of all vertex pairs are disjoint."""

    D, d = _freeze(D, d)
    return not cones_overlapping(D, d, enumerate_vertices(D, d))


def vertex_cover(D, d) -> List[Tuple[Tuple[Fraction, ...], List[int]]]:
    """Every vertex with the rows tight at it."""

    D, d = _freeze(D, d)
    return [(vertex, tight_rows(D, d, vertex)) for vertex in enumerate_vertices(D, d)]


def check_perfect(D, d) -> PerfectReport:
    """Checks that `D y <= d` is a perfect polytope:

    a) no row is redundant with respect to the others, the set is
       bounded and has a nonempty interior;
    b) the equality solution of every nonsingular m-row subsystem lies
       in the set;
    c) every vertex has exactly m tight rows.

    :raises RankDeficientError: when rank D < m"""

    D, d = _freeze(D, d)
    m = len(D[0])
    if rank(D) != m:
        raise RankDeficientError(f"rank of D has to be m={m}")
    report = PerfectReport()

    for i in range(len(D)):
        others = [row for k, row in enumerate(D) if k != i]
        others_rhs = [b for k, b in enumerate(d) if k != i]
        tag = classify_redundancy(D[i], d[i], others, others_rhs) if others else Redundancy.NOT_REDUNDANT
        if tag is not Redundancy.NOT_REDUNDANT:
            report.redundant_rows.append(i)
            report.violations.append(Violation("a", {"row": i, "redundancy": tag.value}))

    try:
        ranges = coordinate_ranges(D, d)
    except UnboundedSetError as e:
        report.violations.append(Violation("a", {"unbounded": str(e)}))
        return report
    slack = interior_slack(D, d)
    if ranges is None or slack is None or slack <= 0:
        # bounded sets always have a finite slack, so None means empty here
        report.violations.append(Violation("a", {"interior": "empty", "slack": slack}))
        if ranges is None:
            return report

    for rows in itertools.combinations(range(len(D)), m):
        try:
            point = solve_square_system([D[i] for i in rows], [d[i] for i in rows])
        except SingularMatrixError:
            continue
        if any(dot(row, point) > b for row, b in zip(D, d)):
            report.violations.append(Violation("b", {"rows": list(rows), "point": point}))

    report.vertices = enumerate_vertices(D, d)
    for vertex in report.vertices:
        tight = tight_rows(D, d, vertex)
        if len(tight) != m:
            report.violations.append(Violation("c", {"point": list(vertex), "tight_rows": tight}))

    report.cone_overlaps = cones_overlapping(D, d, report.vertices)
    logger.debug("perfect check: %s vertices, %s violations", len(report.vertices), len(report.violations))
    return report
