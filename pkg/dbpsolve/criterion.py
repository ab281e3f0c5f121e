"""Decision of "Y is not contained in Y_h" through basic feasible
solutions of the W-system.

For an instance and a level h the W-system is the equality system

    [ A    I   0    0 ] [x]       [ a  ]
    [ C^T  0   D^T  0 ] [s]   =   [ -e ]      all variables >= 0
    [ g    0  -d^T  1 ] [v]       [ h  ]
                        [v_last]

with r = q + m + 1 rows. `check_subset` answers NotSubset when it finds
a basic feasible solution with the v_last column in the basis (and
returns that solution as a certificate), Subset otherwise:

1. find any basic feasible solution; done if v_last is basic;
2. reduce the system to that basis; if the v_last column has a
   positive entry, or a nonzero entry in a row with zero right hand
   side, one pivot brings it into the basis;
3. otherwise split the rows into zero rows (v_last entry 0) and
   negative rows (v_last entry < 0, right hand side > 0);
4. for each negative row i0 maximize
   z_i0 = sum_j w_i0j alpha_j - w_i0,0 over the nonbasic variables;
   any unbounded row means Subset, a row with optimum >= 0 yields a
   certificate, otherwise Subset.

Every certificate is verified by substitution before it is returned."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from dbpsolve.exceptions import (
    InternalInconsistencyError,
    PatternViolationError,
    PreconditionViolatedError,
    SingularBasisError,
    VerificationFailedError,
)
from dbpsolve.instance import DbpInstance
from dbpsolve.lp import (
    INFEASIBLE,
    UNBOUNDED,
    BasicSolution,
    LpOutcome,
    LpProblem,
    Tableau,
    find_bfs,
    reduced_tableau,
    solve_lp,
)
from dbpsolve.rational import dot, format_rational

logger = logging.getLogger(__name__)

NOT_SUBSET = "NotSubset"
SUBSET = "Subset"

X_ORIG = "x_orig"
X_SLACK = "x_slack"
V = "v"
V_LAST = "v_last"


@dataclass(frozen=True)
class WSystem:
    W: Tuple[Tuple[Fraction, ...], ...]
    W0: Tuple[Fraction, ...]
    var_roles: Tuple[str, ...]
    h: Fraction

    @property
    def r(self) -> int:
        return len(self.W)

    @property
    def num_cols(self) -> int:
        return len(self.var_roles)

    @property
    def last_col(self) -> int:
        return self.num_cols - 1

    def columns_with_role(self, role: str) -> List[int]:
        return [j for j, tag in enumerate(self.var_roles) if tag == role]

    def problem(self) -> LpProblem:
        return LpProblem(
            objective=[Fraction(0)] * self.num_cols,
            eq_rows=[list(row) for row in self.W],
            eq_rhs=list(self.W0),
        )

    def x_part(self, values: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        return tuple(values[j] for j in self.columns_with_role(X_ORIG))

    def v_part(self, values: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        return tuple(values[j] for j in self.columns_with_role(V))


def build_w_system(inst: DbpInstance, h) -> WSystem:
    n, q, p, m = inst.n, inst.q, inst.p, inst.m
    zero = Fraction(0)
    rows = []
    for i in range(q):
        slack = [Fraction(int(i == k)) for k in range(q)]
        rows.append(tuple(inst.A[i]) + tuple(slack) + (zero,) * p + (zero,))
    for j in range(m):
        c_column = tuple(inst.C[k][j] for k in range(n))
        d_column = tuple(inst.D[k][j] for k in range(p))
        rows.append(c_column + (zero,) * q + d_column + (zero,))
    rows.append(tuple(inst.g) + (zero,) * q + tuple(-v for v in inst.d) + (Fraction(1),))
    rhs = tuple(inst.a) + tuple(-v for v in inst.e) + (Fraction(h),)
    roles = (X_ORIG,) * n + (X_SLACK,) * q + (V,) * p + (V_LAST,)
    return WSystem(W=tuple(rows), W0=rhs, var_roles=roles, h=Fraction(h))


def affine_case(inst: DbpInstance) -> Optional[Tuple[Fraction, ...]]:
    """Minimizer of g x over {Ax <= a, C^T x = -e^T, x >= 0}, or None
    when that system is inconsistent."""

    Ct = [[inst.C[k][j] for k in range(inst.n)] for j in range(inst.m)]
    outcome = solve_lp(
        LpProblem(
            objective=list(inst.g),
            eq_rows=Ct,
            eq_rhs=[-v for v in inst.e],
            le_rows=list(inst.A),
            le_rhs=list(inst.a),
        )
    )
    if outcome.status == INFEASIBLE:
        return None
    if not outcome.is_optimal:
        raise InternalInconsistencyError("affine case LP is unbounded on a bounded X")
    return outcome.solution.values


@dataclass(frozen=True)
class RowEvidence:
    row: int
    bounded: bool
    t_star: Optional[Fraction]


@dataclass(frozen=True)
class CheckOutcome:
    verdict: str
    w_system: WSystem
    certificate: Optional[BasicSolution] = None
    evidence: Tuple[RowEvidence, ...] = ()
    notes: Tuple[str, ...] = ()
    repair: Optional[dict] = None

    @property
    def x_part(self) -> Optional[Tuple[Fraction, ...]]:
        return self.w_system.x_part(self.certificate.values) if self.certificate else None

    @property
    def v_part(self) -> Optional[Tuple[Fraction, ...]]:
        return self.w_system.v_part(self.certificate.values) if self.certificate else None

    def to_dict(self) -> dict:
        report = {
            "verdict": self.verdict,
            "h": format_rational(self.w_system.h),
            "notes": list(self.notes),
            "evidence": [
                {
                    "row": e.row,
                    "bounded": e.bounded,
                    "t_star": None if e.t_star is None else format_rational(e.t_star),
                }
                for e in self.evidence
            ],
        }
        if self.repair is not None:
            report["repair"] = self.repair
        if self.certificate is not None:
            report["certificate"] = {
                "values": [format_rational(v) for v in self.certificate.values],
                "basis": list(self.certificate.basis),
            }
        return report


@dataclass(frozen=True)
class PartitionedTableau:
    """Reduced tableau with its rows split by the sign of the v_last column.

    Rows keep their original indices: `zero_rows` and `negative_rows`
    hold them in increasing order and `row_order` stores the permutation
    putting zero rows first, so `permuted()` gives the tableau in that
    order. `k` is the 1-based position of the first negative row
    (r + 1 when there is none)."""

    tableau: Tableau
    col: int
    zero_rows: Tuple[int, ...]
    negative_rows: Tuple[int, ...]
    nonbasic: Tuple[int, ...]
    row_order: Tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.zero_rows) + 1

    @property
    def inverse_row_order(self) -> Tuple[int, ...]:
        inverse = [0] * len(self.row_order)
        for position, row in enumerate(self.row_order):
            inverse[row] = position
        return tuple(inverse)

    def permuted(self) -> Tableau:
        return Tableau(
            rows=tuple(self.tableau.rows[i] for i in self.row_order),
            rhs=tuple(self.tableau.rhs[i] for i in self.row_order),
            basis=tuple(self.tableau.basis[i] for i in self.row_order),
        )

    def w(self, row: int, col: int) -> Fraction:
        return self.tableau.rows[row][col]

    def w0(self, row: int) -> Fraction:
        return self.tableau.rhs[row]

    def basic(self, row: int) -> int:
        return self.tableau.basis[row]

    def z(self, row: int, alpha: Sequence[Fraction]) -> Fraction:
        """z_row(alpha) for values `alpha` aligned with `nonbasic`."""

        return sum((self.w(row, j) * a for j, a in zip(self.nonbasic, alpha)), Fraction(0)) - self.w0(row)


def partition_tableau(tableau: Tableau, col: int) -> PartitionedTableau:
    """:raises PatternViolationError: when the `col` column has a positive
    entry or a negative entry in a row whose right hand side is not
    positive"""

    zero_rows, negative_rows = [], []
    for i, (row, rhs) in enumerate(zip(tableau.rows, tableau.rhs)):
        entry = row[col]
        if entry == 0:
            zero_rows.append(i)
        elif entry < 0 and rhs > 0:
            negative_rows.append(i)
        else:
            raise PatternViolationError(f"row {i}: entry {entry} with right hand side {rhs}")
    basic = set(tableau.basis)
    nonbasic = tuple(j for j in range(tableau.num_cols) if j not in basic and j != col)
    return PartitionedTableau(
        tableau, col, tuple(zero_rows), tuple(negative_rows), nonbasic, row_order=tuple(zero_rows + negative_rows)
    )


def _row_lp(pt: PartitionedTableau, i0: int) -> LpOutcome:
    """max sum_j w_i0j alpha_j over the inequality form of the tableau,
    variables ordered as `pt.nonbasic` then v_last."""

    permuted = pt.permuted()
    rows = [[row[j] for j in pt.nonbasic] + [row[pt.col]] for row in permuted.rows]
    rhs = list(permuted.rhs)
    objective = [pt.w(i0, j) for j in pt.nonbasic] + [Fraction(0)]
    return solve_lp(LpProblem(objective=objective, sense="max", le_rows=rows, le_rhs=rhs))


def _zero_rows_lp(pt: PartitionedTableau, i0: int) -> LpOutcome:
    """Same objective restricted to the zero rows, over `pt.nonbasic` only."""

    rows = [[pt.w(i, j) for j in pt.nonbasic] for i in pt.zero_rows]
    rhs = [pt.w0(i) for i in pt.zero_rows]
    objective = [pt.w(i0, j) for j in pt.nonbasic]
    return solve_lp(LpProblem(objective=objective, sense="max", le_rows=rows, le_rhs=rhs))


def boundedness_check(pt: PartitionedTableau, i0: int) -> bool:
    """True when z_i0 is bounded above on the inequality form of the
    tableau, i.e. when the homogeneous system

        zero rows:      sum_j w_ij alpha_j              <= 0
        negative rows:  sum_j w_ij alpha_j + w_ic alpha_c <= 0
        row i0:         sum_j w_i0j alpha_j              = 1
        alpha >= 0

    has no solution."""

    if i0 not in pt.negative_rows:
        raise PatternViolationError(f"row {i0} is not a negative row")
    rows = [[pt.w(i, j) for j in pt.nonbasic] + [pt.w(i, pt.col)] for i in pt.row_order]
    problem = LpProblem(
        objective=[Fraction(0)] * (len(pt.nonbasic) + 1),
        eq_rows=[[pt.w(i0, j) for j in pt.nonbasic] + [Fraction(0)]],
        eq_rhs=[Fraction(1)],
        le_rows=rows,
        le_rhs=[Fraction(0)] * len(rows),
    )
    return solve_lp(problem).status == INFEASIBLE


def certificate_problems(ws: WSystem, solution: BasicSolution) -> List[str]:
    """Reasons why `solution` is not a basic feasible solution of `ws`
    with v_last in its basis; empty when it is one."""

    problems = []
    values = solution.values
    if len(values) != ws.num_cols:
        return [f"expected {ws.num_cols} values, got {len(values)}"]
    for i, (row, rhs) in enumerate(zip(ws.W, ws.W0)):
        if dot(row, values) != rhs:
            problems.append(f"row {i} is not satisfied")
    if any(v < 0 for v in values):
        problems.append("negative component")
    if ws.last_col not in solution.basis:
        problems.append("v_last is not basic")
    if len(set(solution.basis)) != ws.r:
        problems.append(f"basis has {len(set(solution.basis))} columns, {ws.r} needed")
    if any(v != 0 for j, v in enumerate(values) if j not in solution.basis):
        problems.append("nonbasic component is nonzero")
    if not problems:
        try:
            reduced_tableau(ws.W, ws.W0, solution.basis)
        except SingularBasisError:
            problems.append("basis columns are dependent")
    return problems


def verify_certificate(ws: WSystem, solution: BasicSolution) -> bool:
    return not certificate_problems(ws, solution)


def _assemble(pt: PartitionedTableau, row: int, t: Fraction, zero_rows_outcome: LpOutcome) -> BasicSolution:
    alpha_bar = zero_rows_outcome.solution.values
    values = [Fraction(0)] * pt.tableau.num_cols
    for j, a in zip(pt.nonbasic, alpha_bar):
        values[j] = a
    pivot_entry = pt.w(row, pt.col)
    values[pt.col] = -t / pivot_entry
    for i in pt.zero_rows:
        values[pt.basic(i)] = -pt.z(i, alpha_bar)
    for i in pt.negative_rows:
        if i == row:
            values[pt.basic(i)] = Fraction(0)
        else:
            values[pt.basic(i)] = -pt.z(i, alpha_bar) + pt.w(i, pt.col) / pivot_entry * t

    # LP columns: nonbasic structurals first, then one slack per zero row.
    lp_columns = list(pt.nonbasic) + [pt.basic(i) for i in pt.zero_rows]
    basis = [lp_columns[j] for j in zero_rows_outcome.solution.basis]
    basis.append(pt.col)
    basis.extend(pt.basic(i) for i in pt.negative_rows if i != row)
    return BasicSolution(values=tuple(values), basis=tuple(basis))


def construct_certificate(
    ws: WSystem,
    pt: PartitionedTableau,
    i0: int,
    t_star: Fraction,
    zero_rows_outcome: Optional[LpOutcome] = None,
) -> BasicSolution:
    """Basic feasible solution with v_last basic, built from the optimum
    of z_i0 over the zero rows:

        alpha_c  = -t* / w_i0,c,   alpha_basic(i0) = 0,
        alpha_basic(i) = w_i0 - sum_j w_ij alpha_j + (w_ic / w_i0,c) t*
                         for the other negative rows,
        alpha_basic(i) = w_i0 - sum_j w_ij alpha_j for the zero rows.

    :raises VerificationFailedError: when the result does not solve `ws`"""

    if t_star < 0:
        raise PreconditionViolatedError("a certificate needs t* >= 0")
    if zero_rows_outcome is None:
        zero_rows_outcome = _zero_rows_lp(pt, i0)
    solution = _assemble(pt, i0, t_star, zero_rows_outcome)
    problems = certificate_problems(ws, solution)
    if problems:
        raise VerificationFailedError(
            "; ".join(problems),
            data={
                "h": format_rational(ws.h),
                "row": i0,
                "t_star": format_rational(t_star),
                "values": [format_rational(v) for v in solution.values],
                "basis": list(solution.basis),
            },
        )
    return solution


def _tableau_solution(tableau: Tableau) -> BasicSolution:
    return BasicSolution(values=tableau.basic_values(), basis=tableau.basis)


def _verified(ws: WSystem, solution: BasicSolution, notes: List[str]) -> CheckOutcome:
    problems = certificate_problems(ws, solution)
    if problems:
        raise InternalInconsistencyError(
            "certificate failed substitution: " + "; ".join(problems),
            data={"h": format_rational(ws.h), "values": [format_rational(v) for v in solution.values]},
        )
    return CheckOutcome(NOT_SUBSET, ws, certificate=solution, notes=tuple(notes))


def check_subset(inst: DbpInstance, h, *, check_affine: bool = True) -> CheckOutcome:
    """Decides whether Y lies in Y_h for a validated perfect instance.

    :param check_affine: set to False when the caller already knows the
        affine case does not hold (the solver does so once per solve)
    :returns: `CheckOutcome` with verdict NotSubset (and certificate) or
        Subset (and per-row evidence)
    :raises PreconditionViolatedError: when the affine case holds
    :raises InternalInconsistencyError: when a certificate cannot be
        verified"""

    if check_affine and affine_case(inst) is not None:
        raise PreconditionViolatedError("C^T x = -e^T is consistent on X; use the affine case instead")
    ws = build_w_system(inst, h)
    notes: List[str] = []

    bfs = find_bfs(ws.problem())
    if bfs is None:
        raise InternalInconsistencyError("W-system is infeasible", data={"h": format_rational(ws.h)})
    if ws.last_col in bfs.basis:
        logger.debug("h=%s: v_last basic in the first basic solution", ws.h)
        notes.append("initial_basis")
        return _verified(ws, bfs, notes)

    tableau = reduced_tableau(ws.W, ws.W0, bfs.basis)
    col = ws.last_col
    column = tableau.column(col)
    positive = [i for i, w in enumerate(column) if w > 0]
    if positive:
        row = min(positive, key=lambda i: (tableau.rhs[i] / column[i], tableau.basis[i]))
        notes.append("pivot_positive")
        return _verified(ws, _tableau_solution(tableau.pivot(row, col)), notes)
    degenerate = [i for i, w in enumerate(column) if w != 0 and tableau.rhs[i] == 0]
    if degenerate:
        notes.append("pivot_degenerate")
        return _verified(ws, _tableau_solution(tableau.pivot(degenerate[0], col)), notes)

    pt = partition_tableau(tableau, col)
    if not pt.negative_rows:
        notes.append("no_negative_rows")
        return CheckOutcome(SUBSET, ws, notes=tuple(notes))

    evidence = []
    for i0 in pt.negative_rows:
        bounded = boundedness_check(pt, i0)
        outcome = _row_lp(pt, i0)
        if bounded != (outcome.status != UNBOUNDED):
            raise InternalInconsistencyError(
                f"row {i0}: homogeneous test says bounded={bounded}, LP status {outcome.status}",
                data={"h": format_rational(ws.h), "row": i0},
            )
        t_star = outcome.value - pt.w0(i0) if outcome.is_optimal else None
        evidence.append(RowEvidence(row=i0, bounded=bounded, t_star=t_star))
    logger.debug("h=%s: k=%s, row evidence %s", ws.h, pt.k, evidence)

    if any(not e.bounded for e in evidence):
        notes.append("unbounded_row")
        return CheckOutcome(SUBSET, ws, evidence=tuple(evidence), notes=tuple(notes))
    candidates = [e for e in evidence if e.t_star >= 0]
    if not candidates:
        return CheckOutcome(SUBSET, ws, evidence=tuple(evidence), notes=tuple(notes))

    i0, t_star = candidates[0].row, candidates[0].t_star
    zero_rows_outcome = _zero_rows_lp(pt, i0)
    if not zero_rows_outcome.is_optimal or zero_rows_outcome.value - pt.w0(i0) != t_star:
        raise InternalInconsistencyError(
            f"row {i0}: optimum over the zero rows differs from t*={t_star}",
            data={"h": format_rational(ws.h), "row": i0},
        )
    repair = None
    try:
        solution = construct_certificate(ws, pt, i0, t_star, zero_rows_outcome)
        notes.append(f"certificate_row_{i0}")
    except VerificationFailedError as e:
        # the negative row that is tightest at the same point
        alpha_bar = zero_rows_outcome.solution.values
        tightest = max(pt.negative_rows, key=lambda i: (pt.z(i, alpha_bar) / -pt.w(i, pt.col), -i))
        logger.warning("h=%s: certificate for row %s rejected (%s), using row %s", ws.h, i0, e, tightest)
        notes.append(f"certificate_repaired_{i0}_to_{tightest}")
        solution = _assemble(pt, tightest, pt.z(tightest, alpha_bar), zero_rows_outcome)
        repair = dict(e.data, message=str(e), repaired_row=tightest)
    outcome = _verified(ws, solution, notes)
    return CheckOutcome(
        NOT_SUBSET,
        ws,
        certificate=outcome.certificate,
        evidence=tuple(evidence),
        notes=outcome.notes,
        repair=repair,
    )
