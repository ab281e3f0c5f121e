import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dbpsolve.exceptions import MalformedProblemError, SingularBasisError, UnboundedSetError, ZeroPivotError
from dbpsolve.lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LpProblem,
    Tableau,
    _simplex,
    find_bfs,
    pivot,
    pivot_budget,
    reduced_tableau,
    solve_lp,
    strict_feasibility,
    verify_farkas,
    verify_optimal,
    verify_ray,
)
from dbpsolve.polytope import enumerate_vertices
from dbpsolve.rational import dot, mat, vec


def _box_lp(costs, rows, rhs, box=3):
    """min costs x s.t. rows x <= rhs, 0 <= x <= box."""

    n = len(costs)
    box_rows = [[int(i == j) for j in range(n)] for i in range(n)]
    return LpProblem(
        objective=vec(costs),
        le_rows=mat(list(rows) + box_rows),
        le_rhs=vec(list(rhs) + [box] * n),
    )


def _brute_force(problem):
    n = problem.num_vars
    rows = list(problem.le_rows) + [[Fraction(-int(i == j)) for j in range(n)] for i in range(n)]
    rhs = list(problem.le_rhs) + [Fraction(0)] * n
    vertices = enumerate_vertices(rows, rhs)
    if not vertices:
        return INFEASIBLE, None
    return OPTIMAL, min(dot(problem.objective, v) for v in vertices)


@pytest.mark.lp
class TestLpProblem:
    def test_rejects_unknown_sense(self):
        with pytest.raises(MalformedProblemError):
            LpProblem(objective=vec([1]), sense="maximize")

    def test_rejects_row_of_wrong_width(self):
        with pytest.raises(MalformedProblemError):
            LpProblem(objective=vec([1, 1]), le_rows=mat([[1]]), le_rhs=vec([1]))

    def test_defaults_to_nonnegative_variables(self):
        assert LpProblem(objective=vec([1, 1])).nonneg == [True, True]


@pytest.mark.lp
class TestSolveLp:
    def test_finds_optimal_vertex(self):
        problem = LpProblem(objective=vec([1, 0]), eq_rows=mat([[1, 1]]), eq_rhs=vec([1]))

        outcome = solve_lp(problem)

        assert outcome.status == OPTIMAL
        assert outcome.value == 0
        assert outcome.solution.values == (0, 1)
        assert verify_optimal(problem, outcome)

    def test_reports_infeasible_with_farkas_certificate(self):
        problem = LpProblem(objective=vec([1]), eq_rows=mat([[1]]), eq_rhs=vec([-1]))

        outcome = solve_lp(problem)

        assert outcome.status == INFEASIBLE
        assert verify_farkas(problem, outcome.farkas)

    def test_reports_infeasible_le_rows(self):
        problem = LpProblem(objective=vec([0, 0]), le_rows=mat([[1, 1], [-1, -1]]), le_rhs=vec([1, -2]))

        outcome = solve_lp(problem)

        assert outcome.status == INFEASIBLE
        assert verify_farkas(problem, outcome.farkas)

    def test_reports_unbounded_with_ray(self):
        problem = LpProblem(objective=vec([1]), sense="max")

        outcome = solve_lp(problem)

        assert outcome.status == UNBOUNDED
        assert outcome.ray == (1,)
        assert verify_ray(problem, outcome)

    def test_maximizes(self):
        problem = LpProblem(objective=vec([1, 2]), sense="max", le_rows=mat([[1, 1]]), le_rhs=vec([4]))

        outcome = solve_lp(problem)

        assert outcome.value == 8
        assert outcome.solution.values == (0, 4)

    def test_handles_free_variables(self):
        problem = LpProblem(
            objective=vec([1]), le_rows=mat([[-1]]), le_rhs=vec([3]), nonneg=[False]
        )

        outcome = solve_lp(problem)

        assert outcome.value == -3
        assert outcome.solution.values == (-3,)

    def test_counts_pivots(self):
        problem = LpProblem(objective=vec([1, 0]), eq_rows=mat([[1, 1]]), eq_rhs=vec([1]))

        assert solve_lp(problem).pivots >= 1

    def test_does_not_cycle_on_degenerate_problem(self):
        # Beale's example, cycles under the largest coefficient rule
        problem = LpProblem(
            objective=vec(["-3/4", 20, "-1/2", 6]),
            le_rows=mat([["1/4", -8, -1, 9], ["1/2", -12, "-1/2", 3], [0, 0, 1, 0]]),
            le_rhs=vec([0, 0, 1]),
        )

        outcome = solve_lp(problem)

        assert outcome.status == OPTIMAL
        assert outcome.value == Fraction(-5, 4)

    def test_ratio_tie_leaves_smallest_basic_column(self):
        # both rows tie at ratio 1; row 1 holds the smaller basic column
        rows = [[Fraction(1), Fraction(0), Fraction(1)], [Fraction(1), Fraction(1), Fraction(0)]]
        rhs = [Fraction(1), Fraction(1)]
        basis = [2, 1]
        counter = [0]

        entering = _simplex(rows, rhs, basis, vec([-1, 0, 0]), range(3), counter, 10)

        assert entering is None
        assert basis == [2, 0]
        assert rhs == [0, 1]
        assert counter == [1]

    @given(
        st.lists(st.integers(-3, 3), min_size=2, max_size=2),
        st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=1, max_size=3),
        st.lists(st.integers(-3, 3), min_size=3, max_size=3),
    )
    @settings(max_examples=60, deadline=None)
    def test_agrees_with_vertex_enumeration(self, costs, rows, rhs):
        problem = _box_lp(costs, rows, rhs[: len(rows)])

        outcome = solve_lp(problem)

        status, value = _brute_force(problem)
        assert outcome.status == status
        if status == OPTIMAL:
            assert outcome.value == value
            assert verify_optimal(problem, outcome)
        else:
            assert verify_farkas(problem, outcome.farkas)

    @pytest.mark.slowtest
    def test_agrees_with_vertex_enumeration_on_random_problems(self):
        rng = random.Random(2024)
        for _ in range(500):
            n = rng.randint(1, 3)
            costs = [rng.randint(-5, 5) for _ in range(n)]
            rows = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(rng.randint(1, 3))]
            rhs = [rng.randint(-5, 5) for _ in rows]
            problem = _box_lp(costs, rows, rhs)

            outcome = solve_lp(problem)

            status, value = _brute_force(problem)
            assert outcome.status == status
            if status == OPTIMAL:
                assert outcome.value == value


def _check_certificate(problem, outcome):
    assert outcome.pivots <= pivot_budget(problem)
    if outcome.status == OPTIMAL:
        assert verify_optimal(problem, outcome)
    elif outcome.status == INFEASIBLE:
        assert verify_farkas(problem, outcome.farkas)
    else:
        assert verify_ray(problem, outcome)


def _random_rows(rng, n, count, bound=5):
    return [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(count)]


@pytest.mark.lp
class TestRandomFamilies:
    @pytest.mark.parametrize("seed", range(4))
    def test_free_polyhedra_match_boxed_optimum(self, seed):
        # vertices of these polyhedra have coordinates below 1000
        rng = random.Random(seed)
        for _ in range(40):
            n = rng.randint(1, 3)
            rows = _random_rows(rng, n, rng.randint(1, 4))
            rhs = [rng.randint(-5, 5) for _ in rows]
            costs = [rng.randint(-5, 5) for _ in range(n)]
            problem = LpProblem(objective=vec(costs), le_rows=mat(rows), le_rhs=vec(rhs))

            outcome = solve_lp(problem)

            _check_certificate(problem, outcome)
            if outcome.status != UNBOUNDED:
                status, value = _brute_force(_box_lp(costs, rows, rhs, box=1000))
                assert outcome.status == status
                assert outcome.value == value

    @pytest.mark.parametrize("seed", range(4))
    def test_unbounded_family_returns_improving_ray(self, seed):
        rng = random.Random(100 + seed)
        for _ in range(40):
            n = rng.randint(1, 4)
            rows = _random_rows(rng, n, rng.randint(1, 4))
            for row in rows:
                row[0] = -abs(row[0])
            rhs = [rng.randint(0, 5) for _ in rows]
            costs = [-rng.randint(1, 5)] + [rng.randint(-5, 5) for _ in range(n - 1)]
            problem = LpProblem(objective=vec(costs), le_rows=mat(rows), le_rhs=vec(rhs))

            outcome = solve_lp(problem)

            assert outcome.status == UNBOUNDED
            _check_certificate(problem, outcome)

    @pytest.mark.parametrize("seed", range(4))
    def test_infeasible_family_returns_farkas_multipliers(self, seed):
        rng = random.Random(200 + seed)
        for _ in range(40):
            n = rng.randint(1, 4)
            rows = _random_rows(rng, n, rng.randint(0, 3))
            rhs = [rng.randint(-5, 5) for _ in rows]
            contradiction = [rng.randint(-5, 5) for _ in range(n)]
            level = rng.randint(-5, 5)
            # r x <= level and -r x <= -level - 1 cannot both hold
            rows += [contradiction, [-v for v in contradiction]]
            rhs += [level, -level - 1]
            eq_rows = _random_rows(rng, n, rng.randint(0, 1))
            eq_rhs = [rng.randint(-5, 5) for _ in eq_rows]
            problem = LpProblem(
                objective=vec([rng.randint(-5, 5) for _ in range(n)]),
                le_rows=mat(rows),
                le_rhs=vec(rhs),
                eq_rows=mat(eq_rows),
                eq_rhs=vec(eq_rhs),
            )

            outcome = solve_lp(problem)

            assert outcome.status == INFEASIBLE
            _check_certificate(problem, outcome)

    @pytest.mark.slowtest
    def test_mixed_families_with_free_variables_and_equalities(self):
        rng = random.Random(2025)
        for _ in range(600):
            n = rng.randint(1, 5)
            le_rows = _random_rows(rng, n, rng.randint(0, 5))
            eq_rows = _random_rows(rng, n, rng.randint(0, 2))
            problem = LpProblem(
                objective=vec([rng.randint(-5, 5) for _ in range(n)]),
                sense=rng.choice(["min", "max"]),
                le_rows=mat(le_rows),
                le_rhs=vec([rng.randint(-5, 5) for _ in le_rows]),
                eq_rows=mat(eq_rows),
                eq_rhs=vec([rng.randint(-5, 5) for _ in eq_rows]),
                nonneg=[rng.random() < 0.8 for _ in range(n)],
            )

            outcome = solve_lp(problem)

            _check_certificate(problem, outcome)

    def test_budget_counts_bases_of_the_phase_one_tableau(self):
        problem = _box_lp([1, -1], [[1, 1]], [2])

        # 3 rows, 2 structural and 3 slack columns, 3 artificial columns
        assert pivot_budget(problem) == math.comb(3 + 5 + 3, 3) + 3


@pytest.mark.lp
class TestFindBfs:
    def test_returns_basic_feasible_solution(self):
        problem = LpProblem(objective=vec([0, 0]), eq_rows=mat([[1, 1]]), eq_rhs=vec([1]))

        bfs = find_bfs(problem)

        assert bfs.values == (1, 0)
        assert bfs.basis == (0,)

    def test_returns_none_when_infeasible(self):
        problem = LpProblem(objective=vec([0]), eq_rows=mat([[1]]), eq_rhs=vec([-1]))

        assert find_bfs(problem) is None

    def test_ignores_objective(self):
        problem = LpProblem(objective=vec([-1]), sense="min")

        assert find_bfs(problem).values == (0,)


@pytest.mark.lp
class TestTableau:
    def test_reduces_to_given_basis(self):
        tableau = reduced_tableau(mat([[2, 1]]), vec([4]), [0])

        assert tableau.rows == ((1, Fraction(1, 2)),)
        assert tableau.rhs == (2,)
        assert tableau.basis == (0,)
        assert tableau.basic_values() == (2, 0)

    def test_raises_for_singular_basis(self):
        with pytest.raises(SingularBasisError):
            reduced_tableau(mat([[1, 1], [2, 2]]), vec([1, 2]), [0, 1])

    def test_pivots(self):
        tableau = Tableau(rows=((Fraction(1), Fraction(2)),), rhs=(Fraction(4),), basis=(0,))

        result = pivot(tableau, 0, 1)

        assert result.rows == ((Fraction(1, 2), 1),)
        assert result.rhs == (2,)
        assert result.basis == (1,)
        assert tableau.pivot(0, 1) == result

    def test_raises_for_zero_pivot(self):
        tableau = Tableau(rows=((Fraction(1), Fraction(0)),), rhs=(Fraction(4),), basis=(0,))

        with pytest.raises(ZeroPivotError):
            pivot(tableau, 0, 1)


@pytest.mark.lp
class TestStrictFeasibility:
    def test_strict_row_can_hold_strictly(self):
        problem = LpProblem(objective=vec([0]), le_rows=mat([[1]]), le_rhs=vec([1]))

        assert strict_feasibility(problem, 0)

    def test_strict_row_only_holds_with_equality(self):
        problem = LpProblem(objective=vec([0]), le_rows=mat([[1]]), le_rhs=vec([0]))

        assert not strict_feasibility(problem, 0)

    def test_strict_row_with_unbounded_slack(self):
        problem = LpProblem(objective=vec([0]), le_rows=mat([[-1]]), le_rhs=vec([-5]))

        assert strict_feasibility(problem, 0)

    def test_infeasible_system(self):
        problem = LpProblem(objective=vec([0]), le_rows=mat([[1], [-1]]), le_rhs=vec([1, -2]))

        assert not strict_feasibility(problem, 0)

    def test_raises_for_missing_row(self):
        problem = LpProblem(objective=vec([0]))

        with pytest.raises(MalformedProblemError):
            strict_feasibility(problem, 0)


def test_vertex_enumeration_rejects_unbounded_sets():
    with pytest.raises(UnboundedSetError):
        enumerate_vertices(mat([[-1]]), vec([0]))
