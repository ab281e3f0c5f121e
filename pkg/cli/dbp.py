#!/usr/bin/python3

import click
import typer
from snakesay import snakesay

from cli import check
from cli import fuzz
from cli import reduce
from cli import solve
from dbpsolve.scripts_commons import EXIT_OK, EXIT_USAGE, get_logger

help = """Exact solver for disjoint bilinear programs with a perfect polytope Y.

Reports are printed to stdout as JSON (or a table with --format); logs go
to stderr. Exit codes: 0 success, 1 usage or parse error, 2 validation
failure, 3 run completed with a discrepancy.
"""

app = typer.Typer(help=help, no_args_is_help=True, context_settings={"help_option_names": ["--help", "-h"]})
app.command("solve")(solve.solve)
app.command("oracle")(solve.oracle)
app.command("duality")(solve.duality)
app.command("check-subset")(check.check_subset)
app.command("check-perfect")(check.check_perfect)
app.command("fuzz")(fuzz.fuzz)
app.command("replay")(fuzz.replay)
app.add_typer(
    reduce.app,
    name="reduce",
    help="Build bilinear instances from boolean systems, boolean LPs and piecewise linear concave programs"
)


def main(argv=None) -> int:
    """Entry point of the `dbp` console script.

    Runs `app` without click's standalone handling so that usage errors
    map to exit code 1 instead of click's 2."""

    try:
        code = app(args=argv, prog_name="dbp", standalone_mode=False)
    except click.ClickException as e:
        get_logger().warning(snakesay(e.format_message()))
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    raise SystemExit(main())
