"""Disjoint bilinear programming instances.

An instance describes

    minimize  x^T C y + g x + e y + z_offset
    s.t.      A x <= a, x >= 0          (the set X)
              D y <= d                  (the set Y, y free)

`DbpInstance` stores every field as tuples of `Fraction` so instances
are immutable and hashable. Load-time checks live in
`validate_instance`; the encoding length L and the min-max upper bounds
are computed here as well."""

import hashlib
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from dbpsolve.exceptions import (
    EmptySetError,
    NonIntegerInstanceError,
    RankDeficientError,
    UnboundedSetError,
    ValidationError,
)
from dbpsolve.lp import INFEASIBLE, UNBOUNDED, LpProblem, solve_lp
from dbpsolve.rational import (
    ceil_log2_plus1,
    dot,
    format_rational,
    identity,
    mat_vec,
    parse_rational,
    rank,
    transpose,
)

logger = logging.getLogger(__name__)

Row = Tuple[Fraction, ...]


def _as_vector(values) -> Row:
    return tuple(parse_rational(v) for v in values)


def _as_matrix(rows) -> Tuple[Row, ...]:
    return tuple(_as_vector(row) for row in rows)


@dataclass(frozen=True)
class DbpInstance:
    n: int
    m: int
    q: int
    p: int
    C: Tuple[Row, ...]
    A: Tuple[Row, ...]
    a: Row
    g: Row
    e: Row
    D: Tuple[Row, ...]
    d: Row
    z_offset: Fraction = Fraction(0)

    @classmethod
    def from_lists(cls, *, C, A, a, g, e, D, d, z_offset=0, n=None, m=None, q=None, p=None):
        """Builds an instance from nested lists of ints, Fractions or
        "p/q" strings. Dimensions are inferred when not given; given
        dimensions are checked by `validate_instance`, not here.

        :returns: `DbpInstance` (not validated)"""

        g = _as_vector(g)
        e = _as_vector(e)
        a = _as_vector(a)
        d = _as_vector(d)
        return cls(
            n=len(g) if n is None else n,
            m=len(e) if m is None else m,
            q=len(a) if q is None else q,
            p=len(d) if p is None else p,
            C=_as_matrix(C),
            A=_as_matrix(A),
            a=a,
            g=g,
            e=e,
            D=_as_matrix(D),
            d=d,
            z_offset=parse_rational(z_offset),
        )

    def bilinear(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
        """x^T C y + g x + e y, without the offset."""

        return dot(x, mat_vec(self.C, y)) + dot(self.g, x) + dot(self.e, y)

    def objective(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
        return self.bilinear(x, y) + self.z_offset

    def to_dict(self) -> dict:
        def text(rows):
            return [[format_rational(v) for v in row] for row in rows]

        return {
            "n": self.n,
            "m": self.m,
            "q": self.q,
            "p": self.p,
            "C": text(self.C),
            "A": text(self.A),
            "a": [format_rational(v) for v in self.a],
            "g": [format_rational(v) for v in self.g],
            "e": [format_rational(v) for v in self.e],
            "D": text(self.D),
            "d": [format_rational(v) for v in self.d],
            "z_offset": format_rational(self.z_offset),
        }


def instance_hash(inst: DbpInstance) -> str:
    canonical = json.dumps(inst.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def x_polytope(inst: DbpInstance):
    """X = {x >= 0 : Ax <= a} written as rows `Dx x <= dx` with free x."""

    rows = [list(row) for row in inst.A] + [[-v for v in row] for row in identity(inst.n)]
    rhs = list(inst.a) + [Fraction(0)] * inst.n
    return rows, rhs


def _check_shape(name, rows, num_rows, num_cols):
    if len(rows) != num_rows or any(len(row) != num_cols for row in rows):
        raise ValidationError(f"{name} has to be a {num_rows}x{num_cols} matrix")


def _check_length(name, values, length):
    if len(values) != length:
        raise ValidationError(f"{name} has to have {length} entries, got {len(values)}")


def validate_instance(inst: DbpInstance) -> DbpInstance:
    """Runs the load-time checks: dimensions, m < p, rank D = m and X
    nonempty and bounded (one LP per coordinate).

    :returns: the same instance, for chaining
    :raises ValidationError: or one of its subclasses"""

    if min(inst.n, inst.m, inst.p) < 1 or inst.q < 0:
        raise ValidationError("n, m and p have to be positive, q nonnegative")
    _check_shape("C", inst.C, inst.n, inst.m)
    _check_shape("A", inst.A, inst.q, inst.n)
    _check_shape("D", inst.D, inst.p, inst.m)
    _check_length("a", inst.a, inst.q)
    _check_length("g", inst.g, inst.n)
    _check_length("e", inst.e, inst.m)
    _check_length("d", inst.d, inst.p)
    if not inst.m < inst.p:
        raise ValidationError(f"m < p is required, got m={inst.m}, p={inst.p}")
    if rank(inst.D) != inst.m:
        raise RankDeficientError(f"rank of D has to be m={inst.m}")

    for j in range(inst.n):
        unit = [Fraction(int(i == j)) for i in range(inst.n)]
        outcome = solve_lp(LpProblem(objective=unit, sense="max", le_rows=list(inst.A), le_rhs=list(inst.a)))
        if outcome.status == INFEASIBLE:
            raise EmptySetError("X = {x >= 0 : Ax <= a} is empty")
        if outcome.status == UNBOUNDED:
            raise UnboundedSetError(f"X is unbounded along x_{j + 1}")
    logger.debug("instance %sx%s with q=%s, p=%s passed validation", inst.n, inst.m, inst.q, inst.p)
    return inst


def _require_integer(name, values):
    for v in values:
        if Fraction(v).denominator != 1:
            raise NonIntegerInstanceError(f"{name} has a non-integer entry {format_rational(v)}")


def compute_length(inst: DbpInstance) -> int:
    """Integer upper bound L on the encoding length of an integer instance.

    L = L1 + L2 + (qm + q + m) * (1 + ceil(log2(H + 1))) with L1 taken
    over (A, a), L2 over (D, d) and H the largest absolute value in C,
    g and e. Every logarithm is rounded up. The offset is not part of
    the bilinear problem and is ignored."""

    flat_a = [v for row in inst.A for v in row] + list(inst.a)
    flat_d = [v for row in inst.D for v in row] + list(inst.d)
    flat_objective = [v for row in inst.C for v in row] + list(inst.g) + list(inst.e)
    _require_integer("A/a", flat_a)
    _require_integer("D/d", flat_d)
    _require_integer("C/g/e", flat_objective)

    def log_sum(values):
        return sum(ceil_log2_plus1(abs(int(v))) for v in values)

    length_x = log_sum(flat_a) + ceil_log2_plus1(inst.n * (inst.q + 1))
    length_y = log_sum(flat_d) + ceil_log2_plus1(inst.p * (inst.m + 1))
    largest = max((abs(int(v)) for v in flat_objective), default=0)
    size = inst.q * inst.m + inst.q + inst.m
    return length_x + length_y + size * (1 + ceil_log2_plus1(largest))


def minimax_bounds(inst: DbpInstance) -> Tuple[Fraction, Fraction]:
    """Upper bounds on the optimum of the bilinear part (offset excluded).

    M1 = min_x max_y f and M2 = max_x min_y f. The inner problem over Y
    is replaced by its LP dual, so each bound is one LP over (x, v):

        M1 = min  g x + d v    s.t. Ax <= a, D^T v - C^T x = e, x, v >= 0
        M2 = max  g x - d w    s.t. Ax <= a, D^T w + C^T x = -e, x, w >= 0
    """

    n, p = inst.n, inst.p
    Dt = transpose(inst.D, inst.m)
    Ct = transpose(inst.C, inst.m)
    le_rows = [list(row) + [Fraction(0)] * p for row in inst.A]

    upper_rows = [[-v for v in Ct[j]] + list(Dt[j]) for j in range(inst.m)]
    upper = solve_lp(
        LpProblem(
            objective=list(inst.g) + list(inst.d),
            eq_rows=upper_rows,
            eq_rhs=list(inst.e),
            le_rows=le_rows,
            le_rhs=list(inst.a),
        )
    )
    lower_rows = [list(Ct[j]) + list(Dt[j]) for j in range(inst.m)]
    lower = solve_lp(
        LpProblem(
            objective=list(inst.g) + [-v for v in inst.d],
            sense="max",
            eq_rows=lower_rows,
            eq_rhs=[-v for v in inst.e],
            le_rows=le_rows,
            le_rhs=list(inst.a),
        )
    )
    if not (upper.is_optimal and lower.is_optimal):
        raise ValidationError(f"min-max bounds are not finite ({upper.status}, {lower.status})")
    logger.debug("min-max bounds for n=%s: M1=%s, M2=%s", n, upper.value, lower.value)
    return upper.value, lower.value
