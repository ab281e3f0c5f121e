"""Exact rational scalars and dense linear algebra over `Fraction`.

Matrices are lists of rows, vectors are lists; every entry is a
`fractions.Fraction`. Nothing in here ever rounds."""

import math
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import List, Optional, Sequence

from dbpsolve.exceptions import MalformedProblemError, SingularMatrixError

Rational = Fraction
Vec = List[Fraction]
Mat = List[List[Fraction]]


def parse_rational(value) -> Fraction:
    """Converts an integer, a `Fraction` or a text "p" / "p/q" into a
    `Fraction`. Floats and booleans are rejected since they cannot be
    trusted to be exact.

    :param value: int, Fraction or str
    :returns: `Fraction`"""

    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"{value!r} is not an exact rational")
    if isinstance(value, _RationalABC):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or "." in text or "e" in text.lower():
            raise ValueError(f"{value!r} is not of the form p or p/q")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{value!r} is not of the form p or p/q")
    raise ValueError(f"{value!r} is not an exact rational")


def format_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vec(values: Sequence) -> Vec:
    return [parse_rational(v) for v in values]


def mat(rows: Sequence[Sequence]) -> Mat:
    return [vec(row) for row in rows]


def zeros(n: int) -> Vec:
    return [Fraction(0)] * n


def identity(n: int) -> Mat:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(matrix: Sequence[Sequence[Fraction]], cols: Optional[int] = None) -> Mat:
    """Transposes `matrix`; `cols` gives the column count of an empty matrix."""

    if not matrix:
        return [[] for _ in range(cols or 0)]
    return [list(column) for column in zip(*matrix)]


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise MalformedProblemError(f"length mismatch: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def mat_vec(matrix: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> Vec:
    return [dot(row, x) for row in matrix]


def ceil_log2_plus1(v: int) -> int:
    """Smallest t with 2**t >= v + 1."""

    if v < 0:
        raise ValueError("ceil_log2_plus1 is defined for v >= 0")
    return int(v).bit_length()


def _row_echelon(rows: Mat) -> Mat:
    rows = [list(row) for row in rows]
    if not rows:
        return rows
    width = len(rows[0])
    lead = 0
    for col in range(width):
        pivot_row = next((i for i in range(lead, len(rows)) if rows[i][col] != 0), None)
        if pivot_row is None:
            continue
        rows[lead], rows[pivot_row] = rows[pivot_row], rows[lead]
        for i in range(lead + 1, len(rows)):
            if rows[i][col] != 0:
                factor = rows[i][col] / rows[lead][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[lead])]
        lead += 1
        if lead == len(rows):
            break
    return rows[:lead]


def rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    return len(_row_echelon([list(row) for row in matrix]))


def solve_square_system(matrix: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vec:
    """Solves `matrix @ x = b` exactly by Gauss-Jordan elimination.

    :param matrix: n x n matrix
    :param b: right hand side of length n
    :returns: the unique solution
    :raises SingularMatrixError: when `matrix` is rank deficient"""

    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(b) != n:
        raise MalformedProblemError("solve_square_system needs a square system")
    augmented = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot_row = next((i for i in range(col, n) if augmented[i][col] != 0), None)
        if pivot_row is None:
            raise SingularMatrixError(f"column {col} has no pivot")
        augmented[col], augmented[pivot_row] = augmented[pivot_row], augmented[col]
        pivot = augmented[col][col]
        augmented[col] = [v / pivot for v in augmented[col]]
        for i in range(n):
            if i != col and augmented[i][col] != 0:
                factor = augmented[i][col]
                augmented[i] = [a - factor * p for a, p in zip(augmented[i], augmented[col])]
    return [row[n] for row in augmented]


def _simplest_nonnegative(lo, hi, lo_open, hi_open) -> Fraction:
    # Continued-fraction descent; `hi is None` stands for +infinity.
    terms = []
    while True:
        candidate = math.ceil(lo)
        if candidate == lo and lo_open:
            candidate += 1
        if hi is None or candidate < hi or (candidate == hi and not hi_open):
            terms.append(candidate)
            break
        whole = math.floor(lo)
        terms.append(whole)
        new_lo = 1 / (hi - whole)
        new_hi = None if lo == whole else 1 / (lo - whole)
        lo, hi, lo_open, hi_open = new_lo, new_hi, hi_open, lo_open
    value = Fraction(terms.pop())
    while terms:
        value = terms.pop() + 1 / value
    return value


def best_rational_in_interval(lo, hi, den_bound: int, *, open_lo: bool = False) -> Optional[Fraction]:
    """Returns the simplest rational in `[lo, hi]` (or `(lo, hi]` with
    `open_lo`), i.e. the one with the smallest denominator and, among
    those, the smallest absolute numerator. Returns None when that
    rational has a denominator above `den_bound` (then no rational with
    a denominator within the bound lies in the interval) or when the
    interval is empty."""

    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi or (lo == hi and open_lo):
        return None
    if (lo < 0 or (lo == 0 and not open_lo)) and hi >= 0:
        best = Fraction(0)
    elif hi < 0:
        best = -_simplest_nonnegative(-hi, -lo, False, open_lo)
    else:
        best = _simplest_nonnegative(lo, hi, open_lo, False)
    if best.denominator > den_bound:
        return None
    return best
