from typing import Optional

import typer

from cli.common import emit, finish, format_option, out_option, quiet_option, reports_errors, setup, verbose_option
from dbpsolve.criterion import check_subset as run_check_subset
from dbpsolve.exceptions import ValidationError
from dbpsolve.files import load_instance
from dbpsolve.instance import instance_hash, validate_instance
from dbpsolve.polytope import check_perfect as run_check_perfect
from dbpsolve.rational import parse_rational
from dbpsolve.scripts_commons import EXIT_VALIDATION


def rational_callback(value: str):
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError):
        raise typer.BadParameter("h has to be an integer or a fraction P/Q")


@reports_errors
def check_subset(
    instance_file: str = typer.Argument(..., metavar="FILE", help="Instance file (JSON)."),
    h: str = typer.Option(..., "--h", help="Level h as P/Q (bilinear part, offset excluded).", callback=rational_callback),
    skip_validation: bool = typer.Option(
        False, "--skip-validation", help="Do not run the load-time and perfect polytope checks."
    ),
    output_format: str = format_option(),
    out: Optional[str] = out_option(),
    verbose: bool = verbose_option(),
    quiet: bool = quiet_option(),
):
    """Decide whether Y lies inside Y_h for FILE.

    Prints NotSubset with a verified basic solution of the W-system, or
    Subset with the per-row evidence. A certificate rebuilt on another
    row is reported under "repair" and exits with code 3.

    Example:

        dbp check-subset cube.json --h 100/1"""

    setup(verbose, quiet)
    inst = load_instance(instance_file)
    if not skip_validation:
        validate_instance(inst)
        if not run_check_perfect(inst.D, inst.d).is_perfect:
            raise ValidationError("Y is not a perfect polytope; run `dbp check-perfect` for details")
    outcome = run_check_subset(inst, h)
    key = instance_hash(inst)
    emit({"instance_hash": key, **outcome.to_dict()}, output_format, out, f"check-subset-{key}")
    finish(outcome.repair is not None)


@reports_errors
def check_perfect(
    instance_file: str = typer.Argument(..., metavar="FILE", help="Instance file (JSON)."),
    output_format: str = format_option(),
    out: Optional[str] = out_option(),
    verbose: bool = verbose_option(),
    quiet: bool = quiet_option(),
):
    """Check that Dy <= d of FILE is a perfect polytope.

    Exits with code 2 when any condition fails."""

    setup(verbose, quiet)
    inst = load_instance(instance_file)
    report = run_check_perfect(inst.D, inst.d)
    key = instance_hash(inst)
    emit({"instance_hash": key, **report.to_dict()}, output_format, out, f"check-perfect-{key}")
    if not report.is_perfect:
        raise typer.Exit(code=EXIT_VALIDATION)
