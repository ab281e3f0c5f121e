from typing import Optional

import typer

from cli.common import emit, finish, format_option, out_option, quiet_option, reports_errors, setup, verbose_option
from dbpsolve import solver
from dbpsolve.files import load_instance
from dbpsolve.instance import instance_hash, validate_instance
from dbpsolve.oracle import check_duality, oracle_value


@reports_errors
def solve(
    instance_file: str = typer.Argument(..., metavar="FILE", help="Instance file (JSON)."),
    skip_validation: bool = typer.Option(
        False, "--skip-validation", help="Do not run the load-time and perfect polytope checks."
    ),
    no_minimax_bounds: bool = typer.Option(
        False, "--no-minimax-bounds", help="Start bisection from 2^L instead of the min-max bounds."
    ),
    output_format: str = format_option(),
    out: Optional[str] = out_option(),
    verbose: bool = verbose_option(),
    quiet: bool = quiet_option(),
):
    """Minimize the bilinear objective of FILE.

    Runs bisection on h with the subset criterion, recovers h* exactly and
    rebuilds (x*, y*) from the last certificate. The report lists every
    probe; a run that records a discrepancy exits with code 3.

    Example:

        dbp solve instance.json --format github"""

    setup(verbose, quiet)
    inst = load_instance(instance_file)
    options = solver.SolveOptions(skip_validation=skip_validation, use_minimax_bounds=not no_minimax_bounds)
    result = solver.solve(inst, options)
    key = instance_hash(inst)
    emit({"instance_hash": key, **result.to_report()}, output_format, out, f"solve-{key}")
    finish(result.has_discrepancy)


@reports_errors
def oracle(
    instance_file: str = typer.Argument(..., metavar="FILE", help="Instance file (JSON)."),
    output_format: str = format_option(),
    out: Optional[str] = out_option(),
    verbose: bool = verbose_option(),
    quiet: bool = quiet_option(),
):
    """Exact optimum of FILE by enumerating the vertices of Y."""

    setup(verbose, quiet)
    inst = validate_instance(load_instance(instance_file))
    key = instance_hash(inst)
    emit({"instance_hash": key, **oracle_value(inst).to_dict()}, output_format, out, f"oracle-{key}")


@reports_errors
def duality(
    instance_file: str = typer.Argument(..., metavar="FILE", help="Instance file (JSON)."),
    output_format: str = format_option(),
    out: Optional[str] = out_option(),
    verbose: bool = verbose_option(),
    quiet: bool = quiet_option(),
):
    """Check the min-max and parametric duality identities on FILE."""

    setup(verbose, quiet)
    inst = validate_instance(load_instance(instance_file))
    report = check_duality(inst)
    key = instance_hash(inst)
    emit({"instance_hash": key, **report.to_dict()}, output_format, out, f"duality-{key}")
    finish(not report.passed)
