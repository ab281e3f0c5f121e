"""Bisection on the level h with exact rational recovery of the optimum.

`solve` keeps an interval [lo, hi] with Subset at lo and NotSubset at
hi, halves it at exact midpoints until its width is at most
2^(-2L-2), recovers h* as the simplest rational in (lo, hi] and reruns
the criterion at h* to read x* and the dual vector v* off the
certificate. y* then solves Dy <= d together with one equality row
built from v*.

Internal contradictions never raise out of `solve`: they are collected
as `Discrepancy` records on the result."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from dbpsolve.criterion import NOT_SUBSET, SUBSET, CheckOutcome, affine_case, check_subset
from dbpsolve.exceptions import (
    InternalInconsistencyError,
    PatternViolationError,
    PivotBudgetExceeded,
    RecoveryFailedError,
    ValidationError,
)
from dbpsolve.instance import DbpInstance, compute_length, minimax_bounds, validate_instance
from dbpsolve.lp import LpProblem, solve_lp
from dbpsolve.polytope import check_perfect, enumerate_vertices
from dbpsolve.rational import best_rational_in_interval, dot, format_rational, mat_vec, transpose

logger = logging.getLogger(__name__)

AFFINE = "affine"
BISECTION = "bisection"

BOUND_VIOLATION = "bound_violation"
RECOVERY_FAILED = "recovery_failed"
INFEASIBLE_RECOVERY = "infeasible_recovery"
INTERNAL_INCONSISTENCY = "internal_inconsistency"
RERUN_SUBSET = "rerun_subset"
OBJECTIVE_MISMATCH = "objective_mismatch"
X_NOT_OPTIMAL = "x_not_optimal"
TRACE_NOT_MONOTONE = "trace_not_monotone"
BIT_SIZE = "bit_size"
AFFINE_NOT_OPTIMAL = "affine_not_optimal"
CERTIFICATE_REPAIRED = "certificate_repaired"


@dataclass(frozen=True)
class SolveOptions:
    skip_validation: bool = False
    use_minimax_bounds: bool = True
    check_self_consistency: bool = True


@dataclass(frozen=True)
class Discrepancy:
    kind: str
    message: str
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message, "data": self.data}


@dataclass(frozen=True)
class Probe:
    h: Fraction
    verdict: str


@dataclass
class SolveResult:
    """Outcome of `solve`.

    `h_star`, `x_star`, `y_star` and `z_check` stay None when a
    discrepancy stopped the run before they were known. `h_star` is the
    bilinear level, so without discrepancies
    z_check == h_star + instance offset."""

    mode: str
    length: Optional[int] = None
    h_star: Optional[Fraction] = None
    x_star: Optional[Tuple[Fraction, ...]] = None
    y_star: Optional[Tuple[Fraction, ...]] = None
    z_check: Optional[Fraction] = None
    iterations: int = 0
    trace: List[Probe] = field(default_factory=list)
    discrepancies: List[Discrepancy] = field(default_factory=list)

    @property
    def has_discrepancy(self) -> bool:
        return bool(self.discrepancies)

    def to_report(self) -> dict:
        def text(value):
            return None if value is None else format_rational(value)

        def texts(values):
            return None if values is None else [format_rational(v) for v in values]

        return {
            "mode": self.mode,
            "length": self.length,
            "h_star": text(self.h_star),
            "x_star": texts(self.x_star),
            "y_star": texts(self.y_star),
            "z_check": text(self.z_check),
            "iterations": self.iterations,
            "trace": [{"h": format_rational(p.h), "verdict": p.verdict} for p in self.trace],
            "discrepancy": [d.to_dict() for d in self.discrepancies] or None,
        }


def recover_y(inst: DbpInstance, v_star: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    """Lexicographically smallest y with Dy <= d and
    (D^T v*) y = d v*, found by one LP per coordinate.

    :raises RecoveryFailedError: when the system has no solution"""

    m = inst.m
    equality_rows = [mat_vec(transpose(inst.D, m), v_star)]
    equality_rhs = [dot(inst.d, v_star)]
    free = [False] * m
    point: List[Fraction] = []
    for j in range(m):
        unit = [Fraction(int(k == j)) for k in range(m)]
        outcome = solve_lp(
            LpProblem(
                objective=unit,
                eq_rows=equality_rows,
                eq_rhs=equality_rhs,
                le_rows=list(inst.D),
                le_rhs=list(inst.d),
                nonneg=free,
            )
        )
        if not outcome.is_optimal:
            raise RecoveryFailedError(f"no y for v*={[format_rational(v) for v in v_star]} ({outcome.status})")
        point.append(outcome.value)
        equality_rows = equality_rows + [unit]
        equality_rhs = equality_rhs + [outcome.value]
    return tuple(point)


def _validate(inst: DbpInstance) -> None:
    validate_instance(inst)
    report = check_perfect(inst.D, inst.d)
    if not report.is_perfect:
        kinds = sorted({v.kind for v in report.violations})
        raise ValidationError(f"Y is not a perfect polytope, failed conditions: {', '.join(kinds)}")


def _best_response_value(inst: DbpInstance, y: Sequence[Fraction]) -> Optional[Fraction]:
    costs = [cy + gi for cy, gi in zip(mat_vec(inst.C, y), inst.g)]
    outcome = solve_lp(LpProblem(objective=costs, le_rows=list(inst.A), le_rhs=list(inst.a)))
    if not outcome.is_optimal:
        return None
    return outcome.value + dot(inst.e, y) + inst.z_offset


def _check_vertex_minimum(inst: DbpInstance, result: SolveResult) -> None:
    """Compares z_check with the minimum of the best responses over
    every vertex of Y."""

    responses = [_best_response_value(inst, y) for y in enumerate_vertices(inst.D, inst.d)]
    values = [v for v in responses if v is not None]
    minimum = min(values) if values else None
    if minimum != result.z_check:
        result.discrepancies.append(
            Discrepancy(
                AFFINE_NOT_OPTIMAL,
                f"minimum over the vertices of Y is {minimum}, z_check is {result.z_check}",
                {
                    "vertex_minimum": None if minimum is None else format_rational(minimum),
                    "z_check": format_rational(result.z_check),
                },
            )
        )


def _finish(inst: DbpInstance, result: SolveResult, opts: SolveOptions) -> SolveResult:
    result.z_check = inst.objective(result.x_star, result.y_star)
    if result.z_check != result.h_star + inst.z_offset:
        result.discrepancies.append(
            Discrepancy(
                OBJECTIVE_MISMATCH,
                f"z_check={result.z_check} differs from h*+offset={result.h_star + inst.z_offset}",
                {"z_check": format_rational(result.z_check), "h_star": format_rational(result.h_star)},
            )
        )
    if opts.check_self_consistency:
        best = _best_response_value(inst, result.y_star)
        if best is None or best != result.z_check:
            result.discrepancies.append(
                Discrepancy(
                    X_NOT_OPTIMAL,
                    f"min over X at y* is {best}, z_check is {result.z_check}",
                    {"best_response": None if best is None else format_rational(best)},
                )
            )
    if result.mode == AFFINE:
        _check_vertex_minimum(inst, result)
    for d in result.discrepancies:
        logger.warning("%s: %s", d.kind, d.message)
    return result


def _solve_affine(inst: DbpInstance, x: Tuple[Fraction, ...], opts: SolveOptions) -> SolveResult:
    logger.info("C^T x = -e^T holds on X, the objective does not depend on y")
    result = SolveResult(mode=AFFINE)
    result.x_star = x
    result.y_star = enumerate_vertices(inst.D, inst.d)[0]
    result.h_star = dot(inst.g, x)
    return _finish(inst, result, opts)


def _trace_is_monotone(trace: Sequence[Probe]) -> bool:
    below = [p.h for p in trace if p.verdict == SUBSET]
    above = [p.h for p in trace if p.verdict == NOT_SUBSET]
    return not below or not above or max(below) < min(above)


def solve(inst: DbpInstance, opts: Optional[SolveOptions] = None) -> SolveResult:
    """Minimizes the instance objective for a perfect Y.

    :param opts: `SolveOptions`, defaults when None
    :returns: `SolveResult` with the trace of every probe; inspect
        `discrepancies` before trusting the values
    :raises ValidationError: when the instance fails the load-time or
        perfect polytope checks (unless `opts.skip_validation`)"""

    opts = opts or SolveOptions()
    if not opts.skip_validation:
        _validate(inst)

    x_affine = affine_case(inst)
    if x_affine is not None:
        return _solve_affine(inst, x_affine, opts)

    length = compute_length(inst)
    result = SolveResult(mode=BISECTION, length=length)
    bound = Fraction(2) ** length
    lo, hi = -bound, bound
    if opts.use_minimax_bounds:
        hi = min(hi, *minimax_bounds(inst))
    logger.info("L=%s, bisection over [%s, %s]", length, lo, hi)

    def probe(h) -> Optional[CheckOutcome]:
        try:
            outcome = check_subset(inst, h, check_affine=False)
        except (InternalInconsistencyError, PatternViolationError, PivotBudgetExceeded) as e:
            data = dict(getattr(e, "data", {}))
            data["h"] = format_rational(h)
            result.discrepancies.append(Discrepancy(INTERNAL_INCONSISTENCY, str(e), data))
            logger.warning("criterion failed at h=%s: %s", h, e)
            return None
        result.trace.append(Probe(Fraction(h), outcome.verdict))
        if outcome.repair is not None:
            data = dict(outcome.repair)
            data["h"] = format_rational(h)
            result.discrepancies.append(
                Discrepancy(CERTIFICATE_REPAIRED, f"certificate rebuilt on another row at h={h}", data)
            )
        return outcome

    low_end = probe(lo)
    if low_end is None:
        return result
    if low_end.verdict == NOT_SUBSET:
        result.discrepancies.append(
            Discrepancy(BOUND_VIOLATION, f"NotSubset at the lower end {lo}", {"h": format_rational(lo)})
        )
        logger.warning("bound violation at the lower end %s", lo)
        return result
    high_end = probe(hi)
    if high_end is None:
        return result
    if high_end.verdict == SUBSET:
        result.discrepancies.append(
            Discrepancy(BOUND_VIOLATION, f"Subset at the upper end {hi}", {"h": format_rational(hi)})
        )
        logger.warning("bound violation at the upper end %s", hi)
        return result

    epsilon = Fraction(1, 2 ** (2 * length + 2))
    while hi - lo > epsilon:
        mid = (lo + hi) / 2
        outcome = probe(mid)
        if outcome is None:
            return result
        result.iterations += 1
        if outcome.verdict == NOT_SUBSET:
            hi = mid
        else:
            lo = mid
    logger.debug("bisection stopped after %s steps with width %s", result.iterations, hi - lo)

    h_star = best_rational_in_interval(lo, hi, 2**length, open_lo=True)
    if h_star is None:
        result.discrepancies.append(
            Discrepancy(
                RECOVERY_FAILED,
                f"no rational with denominator <= 2^{length} in ({lo}, {hi}]",
                {"lo": format_rational(lo), "hi": format_rational(hi)},
            )
        )
        h_star = hi
    elif max(abs(h_star.numerator), h_star.denominator) > bound:
        result.discrepancies.append(
            Discrepancy(BIT_SIZE, f"h*={h_star} exceeds 2^{length}", {"h_star": format_rational(h_star)})
        )
    result.h_star = h_star

    final = probe(h_star)
    if final is None:
        return result
    if final.verdict != NOT_SUBSET:
        result.discrepancies.append(
            Discrepancy(RERUN_SUBSET, f"Subset at the recovered h*={h_star}", {"h_star": format_rational(h_star)})
        )
        logger.warning("criterion answers Subset at the recovered h*=%s", h_star)
        return result
    if not _trace_is_monotone(result.trace):
        result.discrepancies.append(Discrepancy(TRACE_NOT_MONOTONE, "Subset probe above a NotSubset probe"))

    result.x_star = final.x_part
    v_star = final.v_part
    if all(v == 0 for v in v_star):
        result.y_star = enumerate_vertices(inst.D, inst.d)[0]
    else:
        try:
            result.y_star = recover_y(inst, v_star)
        except RecoveryFailedError as e:
            result.discrepancies.append(
                Discrepancy(INFEASIBLE_RECOVERY, str(e), {"v_star": [format_rational(v) for v in v_star]})
            )
            logger.warning("%s", e)
            return result
    return _finish(inst, result, opts)
