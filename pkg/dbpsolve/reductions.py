"""Builders turning boolean feasibility systems, boolean LPs and
piecewise-linear concave programs into `DbpInstance` objects.

Every builder returns an instance whose `z_offset` carries the constant
part of the objective, so instance values match the source problem
exactly."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from dbpsolve.exceptions import GroupTooSmallError, ValidationError
from dbpsolve.instance import DbpInstance
from dbpsolve.oracle import oracle_value
from dbpsolve.rational import ceil_log2_plus1, identity, parse_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BooleanSystem:
    """Integer system `A x <= a` over boolean x in {0, 1}^n."""

    n: int
    A: Tuple[Tuple[Fraction, ...], ...] = ()
    a: Tuple[Fraction, ...] = ()

    @classmethod
    def from_lists(cls, n, A=(), a=()):
        A = tuple(tuple(parse_rational(v) for v in row) for row in A)
        a = tuple(parse_rational(v) for v in a)
        if len(A) != len(a) or any(len(row) != n for row in A):
            raise ValidationError(f"boolean system needs q rows of {n} entries and q right hand sides")
        if any(v.denominator != 1 for row in A for v in row) or any(v.denominator != 1 for v in a):
            raise ValidationError("boolean systems have integer coefficients")
        return cls(n=n, A=A, a=a)

    def with_row(self, row: Sequence[Fraction], rhs: Fraction) -> "BooleanSystem":
        return BooleanSystem(self.n, self.A + (tuple(Fraction(v) for v in row),), self.a + (Fraction(rhs),))

    def satisfied_by(self, bits: Sequence[int]) -> bool:
        return all(sum(c * b for c, b in zip(row, bits)) <= rhs for row, rhs in zip(self.A, self.a))


@dataclass(frozen=True)
class PlcpProblem:
    """Minimize sum_j min_k (c^{jk} x + c0^{jk}) over {x >= 0 : Ax <= a}.

    `pieces[j]` is the list of (c^{jk}, c0^{jk}) pairs of group j."""

    n: int
    pieces: Tuple[Tuple[Tuple[Tuple[Fraction, ...], Fraction], ...], ...]
    A: Tuple[Tuple[Fraction, ...], ...]
    a: Tuple[Fraction, ...]

    @classmethod
    def from_lists(cls, n, pieces, A, a):
        groups = tuple(
            tuple((tuple(parse_rational(v) for v in c), parse_rational(c0)) for c, c0 in group)
            for group in pieces
        )
        return cls(
            n=n,
            pieces=groups,
            A=tuple(tuple(parse_rational(v) for v in row) for row in A),
            a=tuple(parse_rational(v) for v in a),
        )

    @property
    def l(self) -> int:
        return len(self.pieces)

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum(
            (min(sum((ci * xi for ci, xi in zip(c, x)), Fraction(0)) + c0 for c, c0 in group) for group in self.pieces),
            Fraction(0),
        )


def _unit_cube_rows(n):
    rows = [list(row) for row in identity(n)] + [[-v for v in row] for row in identity(n)]
    rhs = [Fraction(1)] * n + [Fraction(0)] * n
    return rows, rhs


def _boolean_x_side(bs: BooleanSystem):
    rows = [list(row) for row in bs.A] + [list(row) for row in identity(bs.n)]
    rhs = list(bs.a) + [Fraction(1)] * bs.n
    return rows, rhs


def reduce_boolean_feasibility(bs: BooleanSystem) -> DbpInstance:
    """sum_j x_j y_j + (1 - x_j)(1 - y_j) over 0 <= x <= 1 with the rows
    of `bs`, and the unit cube for y. The optimum is 0 exactly when `bs`
    has a boolean solution x*, with y* = 1 - x*."""

    n = bs.n
    A, a = _boolean_x_side(bs)
    D, d = _unit_cube_rows(n)
    return DbpInstance.from_lists(
        C=[[2 * v for v in row] for row in identity(n)],
        A=A,
        a=a,
        g=[-1] * n,
        e=[-1] * n,
        D=D,
        d=d,
        z_offset=n,
    )


def boolean_encoding_length(c: Sequence[Fraction], bs: BooleanSystem) -> int:
    """Binary encoding length of the boolean LP (c, bs), logarithms rounded up."""

    entries = [v for row in bs.A for v in row] + list(bs.a) + list(c)
    return sum(ceil_log2_plus1(abs(int(v))) for v in entries) + ceil_log2_plus1(bs.n * (len(bs.a) + 1))


def default_big_m(c: Sequence[Fraction], bs: BooleanSystem) -> int:
    bound = bs.n * 2 ** (3 * boolean_encoding_length(c, bs) + 1)
    return 1 << max(bound - 1, 0).bit_length()


def reduce_boolean_lp_big_m(c: Sequence, bs: BooleanSystem, big_m: Optional[int] = None) -> DbpInstance:
    """c x + M sum_j (x_j y_j + (1 - x_j)(1 - y_j)) over the boolean
    relaxation of `bs`. M defaults to the smallest power of two that is
    at least n * 2^(3L + 1); pass `big_m` to try other values."""

    c = [parse_rational(v) for v in c]
    if len(c) != bs.n:
        raise ValidationError(f"cost vector needs {bs.n} entries")
    if any(v.denominator != 1 for v in c):
        raise ValidationError("boolean LP costs have to be integers")
    big_m = default_big_m(c, bs) if big_m is None else big_m
    logger.debug("big-M reduction with M=%s", big_m)
    n = bs.n
    A, a = _boolean_x_side(bs)
    D, d = _unit_cube_rows(n)
    return DbpInstance.from_lists(
        C=[[2 * big_m * v for v in row] for row in identity(n)],
        A=A,
        a=a,
        g=[cj - big_m for cj in c],
        e=[-big_m] * n,
        D=D,
        d=d,
        z_offset=n * big_m,
    )


@dataclass
class BisectionPlan:
    """Integer bisection over the budget t in `c x <= t`.

    Each member of the family is the boolean feasibility reduction of
    `bs` extended with the budget row. `probes` records every t asked
    by `search`."""

    c: Tuple[Fraction, ...]
    bs: BooleanSystem
    lo: int
    hi: int
    probes: List[int] = field(default_factory=list)

    def system_for(self, t: int) -> BooleanSystem:
        return self.bs.with_row(self.c, t)

    def instance_for(self, t: int) -> DbpInstance:
        return reduce_boolean_feasibility(self.system_for(t))

    @staticmethod
    def midpoint(lo: int, hi: int) -> int:
        return (lo + hi) // 2

    def search(self, is_feasible: Callable[[int], bool]) -> Optional[int]:
        """Smallest integer t in [lo, hi] for which `is_feasible(t)`,
        assuming feasibility is monotone in t; None when even `hi` fails."""

        self.probes = []

        def probe(t):
            self.probes.append(t)
            return is_feasible(t)

        if not probe(self.hi):
            return None
        lo, hi = self.lo, self.hi
        while lo < hi:
            mid = self.midpoint(lo, hi)
            if probe(mid):
                hi = mid
            else:
                lo = mid + 1
        return hi


def plan_boolean_bisection(c: Sequence, bs: BooleanSystem) -> BisectionPlan:
    c = tuple(parse_rational(v) for v in c)
    if any(v.denominator != 1 for v in c):
        raise ValidationError("boolean LP costs have to be integers")
    bound = bs.n * int(max((abs(v) for v in c), default=0))
    return BisectionPlan(c=c, bs=bs, lo=-bound, hi=bound)


def solve_boolean_lp(c: Sequence, bs: BooleanSystem, decide: Optional[Callable[[DbpInstance], bool]] = None):
    """Optimum of the boolean LP by bisection over t, deciding each
    member with `decide(instance) -> bool` (defaults to the brute force
    oracle: optimum equal to 0).

    :returns: (optimal t, boolean point) or (None, None) when infeasible"""

    if decide is None:

        def decide(inst):
            try:
                return oracle_value(inst).z_star == 0
            except ValidationError:
                # empty relaxation
                return False

    plan = plan_boolean_bisection(c, bs)
    best = plan.search(lambda t: decide(plan.instance_for(t)))
    if best is None:
        return None, None
    x, _ = oracle_value(plan.instance_for(best)).argmin
    return best, extract_boolean(x)


def reduce_plcp(pp: PlcpProblem) -> DbpInstance:
    """One y variable per non-last piece of each group. For group j with
    pieces 1..m_j the last piece is the reference, so

        C column (j, k) = c^{jk} - c^{jm_j},  e_(j, k) = c0^{jk} - c0^{jm_j},
        g = sum_j c^{jm_j},                   z_offset = sum_j c0^{jm_j},

    and Y is the product of simplices {sum_k y_jk <= 1, y >= 0}.

    :raises GroupTooSmallError: when a group has fewer than 2 pieces"""

    for j, group in enumerate(pp.pieces):
        if len(group) < 2:
            raise GroupTooSmallError(f"group {j + 1} has {len(group)} piece(s), at least 2 are needed")
    n = pp.n
    columns, e = [], []
    g = [Fraction(0)] * n
    offset = Fraction(0)
    group_rows = []
    for group in pp.pieces:
        last_c, last_c0 = group[-1]
        g = [gi + ci for gi, ci in zip(g, last_c)]
        offset += last_c0
        start = len(columns)
        for c, c0 in group[:-1]:
            columns.append([ci - li for ci, li in zip(c, last_c)])
            e.append(c0 - last_c0)
        group_rows.append(range(start, len(columns)))

    m = len(columns)
    D = [[Fraction(int(col in cols)) for col in range(m)] for cols in group_rows]
    D += [[-v for v in row] for row in identity(m)]
    d = [Fraction(1)] * pp.l + [Fraction(0)] * m
    C = [[columns[k][i] for k in range(m)] for i in range(n)]
    return DbpInstance.from_lists(C=C, A=pp.A, a=pp.a, g=g, e=e, D=D, d=d, z_offset=offset, n=n, q=len(pp.a))


def extract_boolean(x: Sequence[Fraction]) -> Optional[Tuple[int, ...]]:
    """Bits of x when every coordinate is exactly 0 or 1, else None."""

    if any(v not in (0, 1) for v in x):
        return None
    return tuple(int(v) for v in x)
