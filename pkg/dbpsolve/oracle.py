"""Brute force referee for the criterion and the solver.

Everything here enumerates vertices and solves small LPs; nothing is
shared with `dbpsolve.criterion` beyond the rational and LP primitives.
Values are exact."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from dbpsolve.exceptions import ValidationError
from dbpsolve.instance import DbpInstance, x_polytope
from dbpsolve.lp import INFEASIBLE, LpProblem, solve_lp, strict_feasibility
from dbpsolve.polytope import enumerate_vertices
from dbpsolve.rational import dot, format_rational, mat_vec, transpose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    """Exact optimum (offset included) and an attaining (x, vertex) pair."""

    z_star: Fraction
    argmin: Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]
    per_vertex: Tuple[Tuple[Tuple[Fraction, ...], Fraction], ...]

    def to_dict(self) -> dict:
        x, y = self.argmin
        return {
            "z_star": format_rational(self.z_star),
            "x": [format_rational(v) for v in x],
            "y": [format_rational(v) for v in y],
            "per_vertex": [
                {"vertex": [format_rational(v) for v in vertex], "value": format_rational(value)}
                for vertex, value in self.per_vertex
            ],
        }


def _x_costs(inst: DbpInstance, y: Sequence[Fraction]):
    return [cy + gi for cy, gi in zip(mat_vec(inst.C, y), inst.g)]


def oracle_value(inst: DbpInstance) -> OracleResult:
    """Minimizes over x for every vertex of Y and keeps the best."""

    per_vertex = []
    best = None
    for y in enumerate_vertices(inst.D, inst.d):
        outcome = solve_lp(LpProblem(objective=_x_costs(inst, y), le_rows=list(inst.A), le_rhs=list(inst.a)))
        if not outcome.is_optimal:
            raise ValidationError(f"x_unbounded_objective: inner LP at y={list(map(str, y))} is {outcome.status}")
        value = outcome.value + dot(inst.e, y) + inst.z_offset
        per_vertex.append((y, value))
        if best is None or value < best[0]:
            best = (value, outcome.solution.values, y)
    if best is None:
        raise ValidationError("Y has no vertices")
    z_star, x, y = best
    logger.debug("oracle value %s over %s vertices", z_star, len(per_vertex))
    return OracleResult(z_star=z_star, argmin=(tuple(x), tuple(y)), per_vertex=tuple(per_vertex))


def _dual_side_system(inst: DbpInstance, y, h) -> LpProblem:
    # -A^T u <= C y + g^T  and  a^T u <= e y - h, u >= 0
    At = transpose(inst.A, inst.n)
    rows = [[-v for v in row] for row in At] + [list(inst.a)]
    rhs = _x_costs(inst, y) + [dot(inst.e, y) - h]
    return LpProblem(objective=[Fraction(0)] * inst.q, le_rows=rows, le_rhs=rhs)


def oracle_subset(inst: DbpInstance, h) -> bool:
    """True iff Y lies inside Y_h, i.e. the dual side system with a
    strict last row is solvable at every vertex of Y. `h` is compared
    with the bilinear part of the objective (offset excluded)."""

    h = Fraction(h)
    for y in enumerate_vertices(inst.D, inst.d):
        problem = _dual_side_system(inst, y, h)
        if not strict_feasibility(problem, inst.n):
            return False
    return True


def flip_point(inst: DbpInstance, probes: Sequence[Fraction]) -> Optional[Fraction]:
    """Smallest probe at which `oracle_subset` is false."""

    failing = [Fraction(h) for h in probes if not oracle_subset(inst, h)]
    return min(failing) if failing else None


@dataclass(frozen=True)
class DualityCheck:
    name: str
    left: object
    right: object
    passed: bool


@dataclass
class DualityReport:
    checks: List[DualityCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def discrepancies(self) -> List[str]:
        return [f"{c.name}: {c.left} != {c.right}" for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        def text(value):
            return format_rational(value) if isinstance(value, Fraction) else value

        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "left": text(c.left), "right": text(c.right), "passed": c.passed}
                for c in self.checks
            ],
        }


def _y_side_value(inst, y):
    # max_u e y - a u  s.t.  -A^T u <= C y + g^T, u >= 0
    At = transpose(inst.A, inst.n)
    outcome = solve_lp(
        LpProblem(
            objective=[-v for v in inst.a],
            sense="max",
            le_rows=[[-v for v in row] for row in At],
            le_rhs=_x_costs(inst, y),
        )
    )
    return outcome.value + dot(inst.e, y) if outcome.is_optimal else None


def _x_side_problem(inst, x):
    Dt = transpose(inst.D, inst.m)
    target = [-(cx + ej) for cx, ej in zip(mat_vec(transpose(inst.C, inst.m), x), inst.e)]
    return Dt, target


def _x_side_value(inst, x):
    # max_v g x - d v  s.t.  D^T v = -(C^T x + e^T), v >= 0
    Dt, target = _x_side_problem(inst, x)
    outcome = solve_lp(LpProblem(objective=[-v for v in inst.d], sense="max", eq_rows=Dt, eq_rhs=target))
    return outcome.value + dot(inst.g, x) if outcome.is_optimal else None


def _y_side_consistent(inst, y, h):
    return solve_lp(_dual_side_system(inst, y, h)).status != INFEASIBLE


def _x_side_consistent(inst, x, h):
    # D^T v = -(C^T x + e^T), d v <= g x - h, v >= 0
    Dt, target = _x_side_problem(inst, x)
    problem = LpProblem(
        objective=[Fraction(0)] * inst.p,
        eq_rows=Dt,
        eq_rhs=target,
        le_rows=[list(inst.d)],
        le_rhs=[dot(inst.g, x) - h],
    )
    return solve_lp(problem).status != INFEASIBLE


def check_duality(inst: DbpInstance, h_samples: Optional[Sequence[Fraction]] = None) -> DualityReport:
    """Checks the min-max and parametric duality identities exactly.

    - "y_side": min over Y-vertices of max_u (e y - a u) equals z*;
    - "x_side": min over X-vertices of max_v (g x - d v) equals z*;
    - "consistency@h": for every sampled h, the dual side system is
      consistent at all Y-vertices iff the primal side system is
      consistent at all X-vertices.

    z* is the bilinear optimum (offset excluded). By default h is
    sampled at z* - 1, z* and z* + 1."""

    oracle = oracle_value(inst)
    z_star = oracle.z_star - inst.z_offset
    y_vertices = enumerate_vertices(inst.D, inst.d)
    x_rows, x_rhs = x_polytope(inst)
    x_vertices = enumerate_vertices(x_rows, x_rhs)

    report = DualityReport()
    y_values = [_y_side_value(inst, y) for y in y_vertices]
    y_side = None if None in y_values else min(y_values)
    report.checks.append(DualityCheck("y_side", y_side, z_star, y_side == z_star))

    x_values = [_x_side_value(inst, x) for x in x_vertices]
    x_side = None if None in x_values else min(x_values)
    report.checks.append(DualityCheck("x_side", x_side, z_star, x_side == z_star))

    samples = h_samples if h_samples is not None else (z_star - 1, z_star, z_star + 1)
    for h in samples:
        h = Fraction(h)
        all_y = all(_y_side_consistent(inst, y, h) for y in y_vertices)
        all_x = all(_x_side_consistent(inst, x, h) for x in x_vertices)
        report.checks.append(DualityCheck(f"consistency@{format_rational(h)}", all_y, all_x, all_y == all_x))

    for problem in report.discrepancies:
        logger.warning("duality check failed: %s", problem)
    return report
