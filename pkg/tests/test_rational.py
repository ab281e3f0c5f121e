from fractions import Fraction

import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from dbpsolve.exceptions import MalformedProblemError, SingularMatrixError
from dbpsolve.rational import (
    best_rational_in_interval,
    ceil_log2_plus1,
    format_rational,
    mat,
    parse_rational,
    rank,
    solve_square_system,
    transpose,
)


class TestParseRational:
    def test_accepts_ints_fractions_and_text(self):
        assert parse_rational(3) == 3
        assert parse_rational(Fraction(1, 3)) == Fraction(1, 3)
        assert parse_rational("7") == 7
        assert parse_rational(" -2/6 ") == Fraction(-1, 3)

    @pytest.mark.parametrize("value", [0.5, True, "0.5", "1e3", "", "1/0", "a/b", None])
    def test_rejects_inexact_values(self, value):
        with pytest.raises(ValueError):
            parse_rational(value)

    def test_formats_integers_without_denominator(self):
        assert format_rational(Fraction(4, 2)) == "2"
        assert format_rational(Fraction(-3, 6)) == "-1/2"

    @given(st.fractions())
    def test_format_is_parsed_back(self, value):
        assert parse_rational(format_rational(value)) == value


class TestSolveSquareSystem:
    def test_solves_identity(self):
        assert solve_square_system(mat([[1, 0], [0, 1]]), [3, 4]) == [3, 4]

    def test_solves_diagonal(self):
        assert solve_square_system(mat([[2, 0], [0, 4]]), [1, 1]) == [Fraction(1, 2), Fraction(1, 4)]

    def test_needs_row_swap(self):
        assert solve_square_system(mat([[0, 1], [1, 0]]), [5, 6]) == [6, 5]

    def test_raises_when_singular(self):
        with pytest.raises(SingularMatrixError):
            solve_square_system(mat([[1, 1], [1, 1]]), [1, 2])

    def test_raises_when_not_square(self):
        with pytest.raises(MalformedProblemError):
            solve_square_system(mat([[1, 1]]), [1])

    def test_empty_system_has_empty_solution(self):
        assert solve_square_system([], []) == []


class TestDenseHelpers:
    def test_rank(self):
        assert rank(mat([[1, 0], [0, 1], [-1, 0]])) == 2
        assert rank(mat([[1, 2], [2, 4]])) == 1
        assert rank([]) == 0

    def test_transpose_of_empty_matrix_keeps_columns(self):
        assert transpose([], 2) == [[], []]
        assert transpose(mat([[1, 2]])) == [[1], [2]]


class TestCeilLog2Plus1:
    @pytest.mark.parametrize("v, expected", [(0, 0), (1, 1), (2, 2), (3, 2), (7, 3), (8, 4)])
    def test_values(self, v, expected):
        assert ceil_log2_plus1(v) == expected

    def test_raises_for_negative(self):
        with pytest.raises(ValueError):
            ceil_log2_plus1(-1)

    @given(st.integers(min_value=0, max_value=2**80))
    def test_is_smallest_power(self, v):
        t = ceil_log2_plus1(v)
        assert 2**t >= v + 1
        assert t == 0 or 2 ** (t - 1) < v + 1


class TestBestRationalInInterval:
    def test_finds_one_third(self):
        center, radius = Fraction(341, 1024), Fraction(1, 2048)
        assert best_rational_in_interval(center - radius, center + radius, 10) == Fraction(1, 3)

    def test_returns_none_when_denominator_bound_too_small(self):
        center, radius = Fraction(341, 1024), Fraction(1, 2048)
        assert best_rational_in_interval(center - radius, center + radius, 2) is None

    def test_degenerate_interval(self):
        assert best_rational_in_interval(5, 5, 1) == 5

    def test_negative_interval(self):
        eps = Fraction(1, 4096)
        assert best_rational_in_interval(Fraction(-1, 2) - eps, Fraction(-1, 2) + eps, 4) == Fraction(-1, 2)

    def test_interval_around_zero_gives_zero(self):
        assert best_rational_in_interval(Fraction(-1, 3), Fraction(1, 7), 1) == 0

    def test_open_lower_end_is_excluded(self):
        assert best_rational_in_interval(0, 1, 1, open_lo=True) == 1
        assert best_rational_in_interval(Fraction(-1), Fraction(-1, 3), 8, open_lo=True) == Fraction(-1, 2)
        assert best_rational_in_interval(2, 2, 1, open_lo=True) is None

    def test_empty_interval(self):
        assert best_rational_in_interval(1, 0, 10) is None

    @pytest.mark.slowtest
    def test_recovers_every_small_fraction(self):
        eps = Fraction(1, 2**14)
        for q in range(1, 65):
            for p in range(-64, 65):
                target = Fraction(p, q)
                assert best_rational_in_interval(target - eps, target + eps, 64) == target

    @given(
        st.integers(min_value=-50, max_value=50),
        st.integers(min_value=1, max_value=50),
        st.integers(min_value=1, max_value=1000),
    )
    def test_result_lies_in_interval(self, p, q, width):
        lo = Fraction(p, q)
        hi = lo + Fraction(1, width)
        best = best_rational_in_interval(lo, hi, 10**6)
        assert lo <= best <= hi
        assert best.denominator <= q

    @given(
        st.integers(min_value=-64, max_value=64),
        st.integers(min_value=1, max_value=64),
        st.integers(min_value=-(2**14), max_value=2**14),
    )
    @example(p=1, q=3, k=2**14)
    @example(p=1, q=3, k=-(2**14))
    @example(p=-64, q=63, k=2**14)
    def test_recovers_fraction_from_any_nearby_midpoint(self, p, q, k):
        # |m - p/q| = |k| / 2^28 <= 2^-14
        eps = Fraction(1, 2**14)
        m = Fraction(p, q) + Fraction(k, 2**28)

        assert best_rational_in_interval(m - eps, m + eps, 64) == Fraction(p, q)

    @given(
        st.integers(min_value=-64, max_value=64),
        st.integers(min_value=1, max_value=64),
        st.integers(min_value=0, max_value=2**14 - 1),
    )
    @example(p=5, q=7, k=0)
    @example(p=5, q=7, k=2**14 - 1)
    def test_recovers_fraction_from_half_open_interval(self, p, q, k):
        # (lo, hi] of width 2^-14 with p/q anywhere from hi down to just above lo
        width = Fraction(1, 2**14)
        hi = Fraction(p, q) + Fraction(k, 2**28)

        assert best_rational_in_interval(hi - width, hi, 64, open_lo=True) == Fraction(p, q)

    def test_half_open_interval_excludes_fraction_at_lower_end(self):
        width = Fraction(1, 2**14)
        lo = Fraction(5, 7)

        assert best_rational_in_interval(lo, lo + width, 64, open_lo=True) is None
        assert best_rational_in_interval(lo, lo + width, 64) == lo
