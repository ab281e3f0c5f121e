"""Pieces shared by the dbp commands: option callbacks, logger setup,
report output and the mapping of library errors to exit codes."""

import functools
from pathlib import Path
from typing import Optional

import typer
from snakesay import snakesay

from dbpsolve.exceptions import DbpError, InstanceParseError, InternalInconsistencyError, PivotBudgetExceeded
from dbpsolve.files import dump_json
from dbpsolve.scripts_commons import (
    EXIT_DISCREPANCY,
    EXIT_USAGE,
    EXIT_VALIDATION,
    format_report,
    get_logger,
    output_formats,
)

OUT_DIR_ENVVAR = "DBP_OUT_DIR"


def format_callback(value: str):
    if value not in output_formats:
        raise typer.BadParameter(f"Output format has to be one of: {', '.join(output_formats)}")
    return value


def format_option():
    return typer.Option("json", "-f", "--format", help="json or a table format", callback=format_callback)


def out_option():
    return typer.Option(
        None, "-o", "--out", envvar=OUT_DIR_ENVVAR, help="Directory where reports are also written."
    )


def verbose_option():
    return typer.Option(False, "-v", "--verbose", help="Log progress to stderr.")


def quiet_option():
    return typer.Option(False, "-q", "--quiet", help="Disable additional logging.")


def setup(verbose: bool, quiet: bool):
    logger = get_logger(set_info=verbose)
    if quiet:
        logger.disabled = True
    return logger


def exit_code_for(error: Exception) -> int:
    if isinstance(error, InstanceParseError):
        return EXIT_USAGE
    if isinstance(error, (InternalInconsistencyError, PivotBudgetExceeded)):
        return EXIT_DISCREPANCY
    return EXIT_VALIDATION


def reports_errors(command):
    """Turns `DbpError`s raised by `command` into a snakesay warning and
    the matching exit code."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except DbpError as e:
            get_logger().warning(snakesay(str(e)))
            raise typer.Exit(code=exit_code_for(e))

    return wrapper


def emit(report: dict, output_format: str, out_dir: Optional[str] = None, name: str = "report") -> Optional[Path]:
    """Prints `report` and, with `out_dir`, also saves it as JSON."""

    typer.echo(format_report(report, output_format))
    if out_dir:
        return dump_json(Path(out_dir) / f"{name}.json", report)
    return None


def finish(has_discrepancy: bool):
    if has_discrepancy:
        raise typer.Exit(code=EXIT_DISCREPANCY)
