"""Exact rational simplex.

`solve_lp` runs a two phase tableau simplex with Bland's rule over
`Fraction` entries. Problems are given as `LpProblem` (equality rows,
``<=`` rows and a per-variable nonnegativity mask) and are converted to
standard form internally:

- free variables are split into a positive and a negative column,
- every ``<=`` row gets a slack column,
- rows with a negative right hand side are negated,
- one artificial column is added per row for phase I.

Outcomes carry certificates that can be checked by substitution:
optimal solutions, Farkas multipliers for infeasible problems and
improving rays for unbounded ones."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from dbpsolve.exceptions import (
    MalformedProblemError,
    PivotBudgetExceeded,
    SingularBasisError,
    ZeroPivotError,
)
from dbpsolve.rational import Mat, Vec, dot, zeros

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LpProblem:
    """Linear program over variables x_1..x_n.

    :param objective: cost vector of length n
    :param sense: "min" or "max"
    :param eq_rows: rows of `eq_rows @ x = eq_rhs`
    :param le_rows: rows of `le_rows @ x <= le_rhs`
    :param nonneg: per-variable flag, `None` means every variable is
        nonnegative"""

    objective: Vec
    sense: str = "min"
    eq_rows: Mat = field(default_factory=list)
    eq_rhs: Vec = field(default_factory=list)
    le_rows: Mat = field(default_factory=list)
    le_rhs: Vec = field(default_factory=list)
    nonneg: Optional[List[bool]] = None

    def __post_init__(self):
        n = len(self.objective)
        if self.sense not in ("min", "max"):
            raise MalformedProblemError(f"unknown sense {self.sense!r}")
        if len(self.eq_rows) != len(self.eq_rhs) or len(self.le_rows) != len(self.le_rhs):
            raise MalformedProblemError("row and right hand side counts differ")
        if any(len(row) != n for row in [*self.eq_rows, *self.le_rows]):
            raise MalformedProblemError(f"every row needs {n} columns")
        if self.nonneg is None:
            self.nonneg = [True] * n
        elif len(self.nonneg) != n:
            raise MalformedProblemError(f"nonneg mask needs {n} entries")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.num_vars:
            return False
        if any(flag and value < 0 for flag, value in zip(self.nonneg, x)):
            return False
        if any(dot(row, x) != b for row, b in zip(self.eq_rows, self.eq_rhs)):
            return False
        return all(dot(row, x) <= b for row, b in zip(self.le_rows, self.le_rhs))


@dataclass(frozen=True)
class BasicSolution:
    """Values of all variables plus the basis (standard form columns)."""

    values: Tuple[Fraction, ...]
    basis: Tuple[int, ...]


@dataclass(frozen=True)
class LpOutcome:
    status: str
    value: Optional[Fraction] = None
    solution: Optional[BasicSolution] = None
    ray: Optional[Tuple[Fraction, ...]] = None
    point: Optional[Tuple[Fraction, ...]] = None
    farkas: Optional[Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]] = None
    pivots: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass(frozen=True)
class Tableau:
    """Canonical tableau: `rows @ x = rhs` with identity on `basis` columns.

    `basis[i]` is the column that is basic in row `i`."""

    rows: Tuple[Tuple[Fraction, ...], ...]
    rhs: Tuple[Fraction, ...]
    basis: Tuple[int, ...]

    @property
    def is_feasible(self) -> bool:
        return all(value >= 0 for value in self.rhs)

    @property
    def num_cols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def column(self, col: int) -> Tuple[Fraction, ...]:
        return tuple(row[col] for row in self.rows)

    def basic_values(self) -> Tuple[Fraction, ...]:
        values = zeros(self.num_cols)
        for row, col in enumerate(self.basis):
            values[col] = self.rhs[row]
        return tuple(values)

    def pivot(self, row: int, col: int) -> "Tableau":
        return pivot(self, row, col)


def _pivot_in_place(rows: List[List[Fraction]], rhs: List[Fraction], r: int, c: int) -> None:
    element = rows[r][c]
    if element == 0:
        raise ZeroPivotError(f"pivot element at ({r}, {c}) is zero")
    if element != 1:
        rows[r] = [v / element for v in rows[r]]
        rhs[r] = rhs[r] / element
    pivot_row = rows[r]
    for i, row in enumerate(rows):
        factor = row[c]
        if i != r and factor != 0:
            rows[i] = [a - factor * b for a, b in zip(row, pivot_row)]
            rhs[i] = rhs[i] - factor * rhs[r]


def pivot(tableau: Tableau, row: int, col: int) -> Tableau:
    """Brings `col` into the basis at `row` and eliminates it elsewhere."""

    rows = [list(r) for r in tableau.rows]
    rhs = list(tableau.rhs)
    _pivot_in_place(rows, rhs, row, col)
    basis = list(tableau.basis)
    basis[row] = col
    return Tableau(tuple(map(tuple, rows)), tuple(rhs), tuple(basis))


def reduced_tableau(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], basis: Sequence[int]) -> Tableau:
    """Expresses the system `matrix @ x = rhs` in terms of `basis`.

    Basis columns are eliminated in the given order, each one on the
    first row not yet used that has a nonzero entry in it, so the result
    does not depend on row ordering quirks.

    :raises SingularBasisError: when the basis columns are dependent"""

    rows = [[Fraction(v) for v in row] for row in matrix]
    values = [Fraction(v) for v in rhs]
    if len(basis) != len(rows):
        raise SingularBasisError(f"basis has {len(basis)} columns for {len(rows)} rows")
    used: List[Optional[int]] = [None] * len(rows)
    for col in basis:
        row = next((i for i in range(len(rows)) if used[i] is None and rows[i][col] != 0), None)
        if row is None:
            raise SingularBasisError(f"basis column {col} is dependent on the others")
        _pivot_in_place(rows, values, row, col)
        used[row] = col
    return Tableau(tuple(map(tuple, rows)), tuple(values), tuple(used))


class _StandardForm:
    """Standard form `A x = b, x >= 0, b >= 0` of an `LpProblem`."""

    def __init__(self, problem: LpProblem):
        self.problem = problem
        self.columns: List[Tuple[int, int]] = []
        for j, flag in enumerate(problem.nonneg):
            self.columns.append((j, 1))
            if not flag:
                self.columns.append((j, -1))
        self.num_structural = len(self.columns)
        num_le = len(problem.le_rows)
        self.num_cols = self.num_structural + num_le

        self.rows: List[List[Fraction]] = []
        self.rhs: List[Fraction] = []
        self.signs: List[int] = []
        all_rows = [*problem.le_rows, *problem.eq_rows]
        all_rhs = [*problem.le_rhs, *problem.eq_rhs]
        for i, (row, b) in enumerate(zip(all_rows, all_rhs)):
            std = [Fraction(row[j]) * s for j, s in self.columns]
            slacks = zeros(num_le)
            if i < num_le:
                slacks[i] = Fraction(1)
            std.extend(slacks)
            sign = -1 if b < 0 else 1
            self.rows.append([v * sign for v in std])
            self.rhs.append(Fraction(b) * sign)
            self.signs.append(sign)

        cost = [Fraction(problem.objective[j]) * s for j, s in self.columns]
        if problem.sense == "max":
            cost = [-v for v in cost]
        self.cost = cost + zeros(num_le)

    def to_original(self, std_values: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        values = zeros(self.problem.num_vars)
        for (j, s), v in zip(self.columns, std_values):
            values[j] += s * v
        return tuple(values)


def _simplex(rows, rhs, basis, cost, allowed, counter, budget):
    """Minimizes `cost @ x` from a canonical feasible tableau.

    Returns `None` on optimality, otherwise the entering column of an
    unbounded direction. Bland's rule: the entering column is the
    smallest index with a negative reduced cost; ratio ties are broken
    by the smallest basic column index, which is the leaving rule Bland
    termination rests on. A smallest row index rule can cycle once the
    row order and the basis order differ."""

    while True:
        entering = None
        for j in allowed:
            reduced = cost[j] - sum((cost[basis[i]] * rows[i][j] for i in range(len(rows))), Fraction(0))
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return None
        leaving = None
        best = None
        for i, row in enumerate(rows):
            if row[entering] > 0:
                ratio = rhs[i] / row[entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best, leaving = ratio, i
        if leaving is None:
            return entering
        _pivot_in_place(rows, rhs, leaving, entering)
        basis[leaving] = entering
        counter[0] += 1
        if counter[0] > budget:
            raise PivotBudgetExceeded(f"more than {budget} pivots")


def _phase_one(std: _StandardForm, counter, budget):
    num_rows = len(std.rows)
    width = std.num_cols
    rows = [list(row) + [Fraction(int(i == k)) for k in range(num_rows)] for i, row in enumerate(std.rows)]
    rhs = list(std.rhs)
    basis = [width + i for i in range(num_rows)]
    cost = zeros(width) + [Fraction(1)] * num_rows
    _simplex(rows, rhs, basis, cost, range(width + num_rows), counter, budget)
    return rows, rhs, basis


def _farkas(std: _StandardForm, rows, basis):
    width = std.num_cols
    num_rows = len(std.rows)
    multipliers = []
    for i in range(num_rows):
        pi = sum((rows[r][width + i] for r in range(num_rows) if basis[r] >= width), Fraction(0))
        multipliers.append(-pi * std.signs[i])
    num_le = len(std.problem.le_rows)
    return tuple(multipliers[:num_le]), tuple(multipliers[num_le:])


def _drive_out_artificials(std: _StandardForm, rows, rhs, basis, counter):
    width = std.num_cols
    r = 0
    while r < len(rows):
        if basis[r] >= width:
            col = next((j for j in range(width) if rows[r][j] != 0), None)
            if col is None:
                logger.debug("dropping redundant row %s", r)
                del rows[r], rhs[r], basis[r]
                continue
            _pivot_in_place(rows, rhs, r, col)
            basis[r] = col
            counter[0] += 1
        r += 1
    for i in range(len(rows)):
        rows[i] = rows[i][:width]


def pivot_budget(problem: LpProblem) -> int:
    """C(rows + cols, rows) + rows, with cols counting every column of
    the phase I tableau: structural, free splits, slacks and one
    artificial per row. That bounds the bases Bland's rule can visit,
    and driving out artificials adds at most one pivot per row."""

    std_rows = len(problem.eq_rows) + len(problem.le_rows)
    std_cols = len(problem.objective) + problem.nonneg.count(False) + len(problem.le_rows)
    tableau_cols = std_cols + std_rows
    return math.comb(std_rows + tableau_cols, std_rows) + std_rows


def solve_lp(problem: LpProblem) -> LpOutcome:
    """Solves `problem` exactly.

    :returns: `LpOutcome` with status optimal (value and basic solution),
        infeasible (Farkas multipliers for the ``<=`` rows and the
        equality rows) or unbounded (feasible point and improving ray)"""

    std = _StandardForm(problem)
    counter = [0]
    budget = pivot_budget(problem)

    rows, rhs, basis = _phase_one(std, counter, budget)
    width = std.num_cols
    infeasibility = sum((rhs[i] for i in range(len(rows)) if basis[i] >= width), Fraction(0))
    if infeasibility > 0:
        farkas = _farkas(std, rows, basis)
        logger.debug("infeasible after %s pivots", counter[0])
        return LpOutcome(INFEASIBLE, farkas=farkas, pivots=counter[0])

    _drive_out_artificials(std, rows, rhs, basis, counter)
    entering = _simplex(rows, rhs, basis, std.cost, range(width), counter, budget)

    std_values = zeros(width)
    for i, col in enumerate(basis):
        std_values[col] = rhs[i]
    point = std.to_original(std_values)
    if entering is not None:
        direction = zeros(width)
        direction[entering] = Fraction(1)
        for i, col in enumerate(basis):
            direction[col] = -rows[i][entering]
        ray = std.to_original(direction)
        logger.debug("unbounded after %s pivots", counter[0])
        return LpOutcome(UNBOUNDED, ray=ray, point=point, pivots=counter[0])

    value = dot(problem.objective, point)
    solution = BasicSolution(values=point, basis=tuple(basis))
    logger.debug("optimal value %s after %s pivots", value, counter[0])
    return LpOutcome(OPTIMAL, value=value, solution=solution, pivots=counter[0])


def find_bfs(problem: LpProblem) -> Optional[BasicSolution]:
    """Phase I only: a basic feasible solution of the constraints of
    `problem` (its objective is ignored) or None when infeasible."""

    zero_objective = LpProblem(
        objective=zeros(problem.num_vars),
        eq_rows=problem.eq_rows,
        eq_rhs=problem.eq_rhs,
        le_rows=problem.le_rows,
        le_rhs=problem.le_rhs,
        nonneg=list(problem.nonneg),
    )
    outcome = solve_lp(zero_objective)
    if outcome.status == INFEASIBLE:
        return None
    return outcome.solution


def strict_feasibility(problem: LpProblem, strict_row: int) -> bool:
    """True iff the system of `problem` has a solution where ``<=`` row
    `strict_row` holds strictly. Adds a slack sigma >= 0 to that row and
    maximizes it."""

    if not 0 <= strict_row < len(problem.le_rows):
        raise MalformedProblemError(f"no <= row {strict_row}")
    sigma = [Fraction(0)] * problem.num_vars + [Fraction(1)]
    le_rows = [list(row) + [Fraction(int(i == strict_row))] for i, row in enumerate(problem.le_rows)]
    extended = LpProblem(
        objective=sigma,
        sense="max",
        eq_rows=[list(row) + [Fraction(0)] for row in problem.eq_rows],
        eq_rhs=list(problem.eq_rhs),
        le_rows=le_rows,
        le_rhs=list(problem.le_rhs),
        nonneg=list(problem.nonneg) + [True],
    )
    outcome = solve_lp(extended)
    if outcome.status == INFEASIBLE:
        return False
    return outcome.status == UNBOUNDED or outcome.value > 0


def verify_optimal(problem: LpProblem, outcome: LpOutcome) -> bool:
    values = outcome.solution.values
    return problem.is_feasible_point(values) and dot(problem.objective, values) == outcome.value


def verify_farkas(problem: LpProblem, farkas) -> bool:
    """Checks `y_le >= 0`, `y^T A >= 0` on nonnegative variables, `= 0`
    on free ones and `y^T b < 0`."""

    y_le, y_eq = farkas
    if any(y < 0 for y in y_le):
        return False
    rows = [*problem.le_rows, *problem.eq_rows]
    multipliers = [*y_le, *y_eq]
    for j, flag in enumerate(problem.nonneg):
        combined = sum((y * row[j] for y, row in zip(multipliers, rows)), Fraction(0))
        if combined < 0 or (not flag and combined != 0):
            return False
    return dot(multipliers, [*problem.le_rhs, *problem.eq_rhs]) < 0


def verify_ray(problem: LpProblem, outcome: LpOutcome) -> bool:
    ray, point = outcome.ray, outcome.point
    if not problem.is_feasible_point(point):
        return False
    if any(flag and value < 0 for flag, value in zip(problem.nonneg, ray)):
        return False
    if any(dot(row, ray) != 0 for row in problem.eq_rows):
        return False
    if any(dot(row, ray) > 0 for row in problem.le_rows):
        return False
    gain = dot(problem.objective, ray)
    return gain < 0 if problem.sense == "min" else gain > 0
