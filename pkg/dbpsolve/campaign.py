"""Seeded falsification campaigns: the criterion against the oracle at
probes around the exact optimum, and the solver against the oracle
value.

Each instance is generated from its own `random.Random` seeded with the
string "<seed>/<index>", so results do not depend on worker count or
completion order. Campaigns measure agreement; they never assert it."""

import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from dbpsolve.criterion import NOT_SUBSET, SUBSET, affine_case, check_subset
from dbpsolve.exceptions import DbpError, ValidationError
from dbpsolve.files import Reproducer, load_json, write_reproducer
from dbpsolve.instance import DbpInstance, instance_hash, validate_instance
from dbpsolve.oracle import oracle_subset, oracle_value
from dbpsolve.polytope import check_perfect
from dbpsolve.rational import format_rational, identity
from dbpsolve.reductions import BooleanSystem, PlcpProblem, reduce_boolean_feasibility, reduce_plcp
from dbpsolve.scripts_commons import CampaignSchema
from dbpsolve.solver import CERTIFICATE_REPAIRED, SolveOptions, solve

logger = logging.getLogger(__name__)

MAX_SUBSYSTEMS = 10**4
BOUNDARY_OFFSETS = (Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1))


@dataclass(frozen=True)
class CampaignConfig:
    seed: int
    count: int
    dims: Dict[str, Tuple[int, int]]
    coefficient_bound: int
    family: str
    h_probes_per_instance: int
    workers: int = 1
    solve: bool = True

    @classmethod
    def from_data(cls, data: dict, *, source="config") -> "CampaignConfig":
        fields = CampaignSchema().validate_data(data, source=source)
        dims = {name: tuple(bounds) for name, bounds in fields.pop("dims").items()}
        if dims["n"][0] < 1 or dims["m"][0] < 1:
            raise ValidationError(f"{source}: n and m ranges have to start at 1 or above")
        return cls(dims=dims, **fields)

    @classmethod
    def from_file(cls, path) -> "CampaignConfig":
        return cls.from_data(load_json(path), source=str(path))

    def to_data(self) -> dict:
        data = asdict(self)
        data["dims"] = {name: list(bounds) for name, bounds in self.dims.items()}
        return data


@dataclass(frozen=True)
class VerdictRow:
    index: int
    instance_hash: str
    h: Fraction
    criterion_verdict: str
    oracle_verdict: str
    repair: Optional[dict] = None

    @property
    def agree(self) -> bool:
        return self.criterion_verdict == self.oracle_verdict

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "instance_hash": self.instance_hash,
            "h": format_rational(self.h),
            "criterion_verdict": self.criterion_verdict,
            "oracle_verdict": self.oracle_verdict,
            "agree": self.agree,
            "repair": self.repair,
        }


@dataclass(frozen=True)
class SolverRow:
    index: int
    instance_hash: str
    h_star: Optional[Fraction]
    z_check: Optional[Fraction]
    oracle_z: Fraction
    mode: str
    discrepancies: Tuple[str, ...] = ()

    @property
    def agree(self) -> bool:
        return self.z_check is not None and self.z_check == self.oracle_z

    def to_dict(self) -> dict:
        def text(value):
            return None if value is None else format_rational(value)

        return {
            "index": self.index,
            "instance_hash": self.instance_hash,
            "h_star": text(self.h_star),
            "z_check": text(self.z_check),
            "oracle_z": format_rational(self.oracle_z),
            "mode": self.mode,
            "discrepancies": list(self.discrepancies),
            "agree": self.agree,
        }


@dataclass
class InstanceRun:
    """Everything one worker produced for one generated instance."""

    index: int
    instance: DbpInstance
    skipped: Optional[str] = None
    affine: bool = False
    verdicts: List[VerdictRow] = field(default_factory=list)
    solver: Optional[SolverRow] = None


@dataclass
class CampaignReport:
    config: CampaignConfig
    verdict_rows: List[VerdictRow] = field(default_factory=list)
    solver_rows: List[SolverRow] = field(default_factory=list)
    skipped: List[Dict[str, object]] = field(default_factory=list)
    affine: List[int] = field(default_factory=list)
    reproducers: List[str] = field(default_factory=list)

    @property
    def soundness_violations(self) -> List[VerdictRow]:
        return [r for r in self.verdict_rows if r.criterion_verdict == NOT_SUBSET and r.oracle_verdict == SUBSET]

    @property
    def certificate_repairs(self) -> int:
        """Certificates the criterion had to rebuild on another row, in
        verdict rows and solver runs."""

        return sum(r.repair is not None for r in self.verdict_rows) + sum(
            r.discrepancies.count(CERTIFICATE_REPAIRED) for r in self.solver_rows
        )

    @property
    def summary(self) -> dict:
        return {
            "instances": self.config.count,
            "skipped": len(self.skipped),
            "affine_case": len(self.affine),
            "verdict_rows": len(self.verdict_rows),
            "verdict_agree": sum(r.agree for r in self.verdict_rows),
            "soundness_violations": len(self.soundness_violations),
            "solver_rows": len(self.solver_rows),
            "solver_agree": sum(r.agree for r in self.solver_rows),
            "solver_discrepancies": sum(bool(r.discrepancies) for r in self.solver_rows),
            "certificate_repairs": self.certificate_repairs,
            "reproducers": len(self.reproducers),
        }

    @property
    def disagreements(self) -> int:
        return sum(not r.agree for r in self.verdict_rows) + sum(not r.agree for r in self.solver_rows)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_data(),
            "summary": self.summary,
            "verdict_rows": [r.to_dict() for r in self.verdict_rows],
            "solver_rows": [r.to_dict() for r in self.solver_rows],
            "skipped": self.skipped,
            "affine_case": self.affine,
            "reproducers": self.reproducers,
        }


def _draw(rng: random.Random, bounds: Tuple[int, int]) -> int:
    return rng.randint(*bounds)


def _random_x_side(rng: random.Random, n: int, q: int, bound: int):
    """q random rows with nonnegative right hand sides, so x = 0 is
    feasible, plus x_j <= u_j rows keeping X bounded."""

    A = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(q)]
    a = [rng.randint(0, bound) for _ in range(q)]
    A += [list(row) for row in identity(n)]
    a += [rng.randint(1, bound) for _ in range(n)]
    return A, a


def _random_objective(rng: random.Random, n: int, m: int, bound: int):
    C = [[rng.randint(-bound, bound) for _ in range(m)] for _ in range(n)]
    g = [rng.randint(-bound, bound) for _ in range(n)]
    e = [rng.randint(-bound, bound) for _ in range(m)]
    return C, g, e


def _cube(rng, m, bound):
    D = [list(row) for row in identity(m)] + [[-v for v in row] for row in identity(m)]
    d = [rng.randint(1, bound) for _ in range(m)] + [0] * m
    return D, d


def _simplex_rows(size, scale):
    rows = [[-v for v in row] for row in identity(size)]
    return rows + [[Fraction(1)] * size], [0] * size + [scale]


def _simplex(rng, m, bound):
    return _simplex_rows(m, rng.randint(1, bound))


def _step_diagonal(rng, m, bound):
    """Product of simplices: m split into consecutive blocks."""

    blocks, left = [], m
    while left:
        size = rng.randint(1, left)
        blocks.append(size)
        left -= size
    D, d, start = [], [], 0
    for size in blocks:
        rows, rhs = _simplex_rows(size, rng.randint(1, bound))
        D += [[Fraction(0)] * start + list(row) + [Fraction(0)] * (m - start - size) for row in rows]
        d += rhs
        start += size
    return D, d


Y_FAMILIES = {"cube": _cube, "simplex": _simplex, "step_diagonal": _step_diagonal}


def generate_instance(cfg: CampaignConfig, rng: random.Random) -> DbpInstance:
    """Draws one instance of `cfg.family` with dimensions from `cfg.dims`
    and integer coefficients bounded by `cfg.coefficient_bound`."""

    bound = cfg.coefficient_bound
    n, q = _draw(rng, cfg.dims["n"]), _draw(rng, cfg.dims["q"])
    if cfg.family == "boolean":
        A = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(q)]
        a = [rng.randint(-bound, bound) for _ in range(q)]
        return reduce_boolean_feasibility(BooleanSystem.from_lists(n, A, a))
    A, a = _random_x_side(rng, n, q, bound)
    if cfg.family == "plcp":
        groups = rng.randint(1, max(1, _draw(rng, cfg.dims["m"])))
        pieces = [
            [([rng.randint(-bound, bound) for _ in range(n)], rng.randint(-bound, bound)) for _ in range(rng.randint(2, 3))]
            for _ in range(groups)
        ]
        return reduce_plcp(PlcpProblem.from_lists(n, pieces, A, a))
    m = _draw(rng, cfg.dims["m"])
    D, d = Y_FAMILIES[cfg.family](rng, m, bound)
    C, g, e = _random_objective(rng, n, m, bound)
    return DbpInstance.from_lists(C=C, A=A, a=a, g=g, e=e, D=D, d=d)


def _verdict(inst: DbpInstance, h: Fraction) -> Tuple[str, Optional[dict]]:
    try:
        outcome = check_subset(inst, h, check_affine=False)
    except DbpError as e:
        return f"error:{type(e).__name__}", None
    if outcome.repair is not None:
        logger.warning("h=%s: certificate repaired: %s", format_rational(h), outcome.repair)
    return outcome.verdict, outcome.repair


def probe_levels(z: Fraction, count: int, rng: random.Random) -> List[Fraction]:
    """The boundary probes around `z` followed by `count` random ones."""

    levels = [z + offset for offset in BOUNDARY_OFFSETS]
    for _ in range(count):
        levels.append(z + Fraction(rng.randint(-8, 8), rng.randint(1, 8)))
    return levels


def run_instance(cfg: CampaignConfig, index: int) -> InstanceRun:
    rng = random.Random(f"{cfg.seed}/{index}")
    inst = generate_instance(cfg, rng)
    run = InstanceRun(index=index, instance=inst)
    if math.comb(inst.p, inst.m) > MAX_SUBSYSTEMS:
        run.skipped = f"C({inst.p}, {inst.m}) exceeds {MAX_SUBSYSTEMS}"
        return run
    try:
        validate_instance(inst)
    except ValidationError as e:
        run.skipped = str(e)
        return run
    if not check_perfect(inst.D, inst.d).is_perfect:
        run.skipped = "Y is not perfect"
        return run

    key = instance_hash(inst)
    oracle = oracle_value(inst)
    z = oracle.z_star - inst.z_offset
    # the criterion does not apply when the affine case holds
    run.affine = affine_case(inst) is not None
    levels = [] if run.affine else probe_levels(z, cfg.h_probes_per_instance, rng)
    for h in levels:
        expected = SUBSET if oracle_subset(inst, h) else NOT_SUBSET
        verdict, repair = _verdict(inst, h)
        run.verdicts.append(VerdictRow(index, key, h, verdict, expected, repair=repair))

    if cfg.solve:
        result = solve(inst, SolveOptions(skip_validation=True))
        run.solver = SolverRow(
            index=index,
            instance_hash=key,
            h_star=result.h_star,
            z_check=result.z_check,
            oracle_z=oracle.z_star,
            mode=result.mode,
            discrepancies=tuple(d.kind for d in result.discrepancies),
        )
    logger.info("instance %s (%s): %s probes", index, key, len(run.verdicts))
    return run


def _run_instance_args(args):
    return run_instance(*args)


def _reproducers_for(run: InstanceRun) -> List[Reproducer]:
    found = []
    for row in run.verdicts:
        if not row.agree:
            found.append(
                Reproducer(
                    run.instance,
                    "check-subset",
                    {"h": format_rational(row.h)},
                    row.oracle_verdict,
                    row.criterion_verdict,
                )
            )
    if run.solver is not None and not run.solver.agree:
        actual = "none" if run.solver.z_check is None else format_rational(run.solver.z_check)
        found.append(Reproducer(run.instance, "solve", {}, format_rational(run.solver.oracle_z), actual))
    return found


def fuzz_campaign(cfg: CampaignConfig, out_dir: Optional[str] = None) -> CampaignReport:
    """Runs `cfg.count` instances, in a process pool when
    `cfg.workers > 1`. Rows keep instance order. With `out_dir` every
    disagreement is written there as a reproducer file."""

    jobs = [(cfg, index) for index in range(cfg.count)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            runs = list(executor.map(_run_instance_args, jobs))
    else:
        runs = [_run_instance_args(job) for job in jobs]

    report = CampaignReport(config=cfg)
    counter = 0
    for run in runs:
        if run.skipped:
            report.skipped.append({"index": run.index, "reason": run.skipped})
            continue
        if run.affine:
            report.affine.append(run.index)
        report.verdict_rows.extend(run.verdicts)
        if run.solver is not None:
            report.solver_rows.append(run.solver)
        for reproducer in _reproducers_for(run):
            if out_dir is not None:
                path = write_reproducer(out_dir, reproducer, counter)
                report.reproducers.append(str(path))
            counter += 1
    if report.soundness_violations:
        logger.warning("%s NotSubset verdicts contradicted by the oracle", len(report.soundness_violations))
    return report


def replay(reproducer: Reproducer) -> dict:
    """Reruns the recorded command on the recorded instance.

    :returns: report with the recorded answers, the answer now and
        whether the disagreement is still there"""

    inst = reproducer.instance
    if reproducer.command == "check-subset":
        now, _ = _verdict(inst, Fraction(reproducer.args["h"]))
    elif reproducer.command == "solve":
        z_check = solve(inst, SolveOptions(skip_validation=True)).z_check
        now = "none" if z_check is None else format_rational(z_check)
    else:
        raise ValidationError(f"unknown reproducer command {reproducer.command!r}")
    return {
        "command": reproducer.command,
        "args": reproducer.args,
        "instance_hash": instance_hash(inst),
        "expected": reproducer.expected,
        "recorded": reproducer.actual,
        "actual": now,
        "reproduced": now == reproducer.actual and now != reproducer.expected,
    }
