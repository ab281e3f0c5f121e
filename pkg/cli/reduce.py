from typing import Optional

import typer

from cli.common import emit, format_option, quiet_option, reports_errors, setup, verbose_option
from dbpsolve.files import dump_instance, load_boolean, load_boolean_lp, load_plcp
from dbpsolve.instance import DbpInstance, instance_hash
from dbpsolve.rational import format_rational
from dbpsolve.reductions import reduce_boolean_feasibility, reduce_boolean_lp_big_m, reduce_plcp

app = typer.Typer(no_args_is_help=True)


def output_option():
    return typer.Option(..., "-o", "--output", metavar="OUT", help="Path of the instance file to write.")


def _report(kind: str, inst: DbpInstance, output: str, output_format: str, **extra):
    path = dump_instance(output, inst)
    report = {
        "kind": kind,
        "output": str(path),
        "instance_hash": instance_hash(inst),
        "n": inst.n,
        "m": inst.m,
        "q": inst.q,
        "p": inst.p,
        "z_offset": format_rational(inst.z_offset),
        **extra,
    }
    emit(report, output_format)


@app.command()
@reports_errors
def boolean(
    source: str = typer.Argument(..., metavar="FILE", help="Boolean system file (kind boolean)."),
    output: str = output_option(),
    output_format: str = format_option(),
    verbose: bool = verbose_option(),
    quiet: bool = quiet_option(),
):
    """Reduce boolean feasibility of Ax <= a to a bilinear instance.

    The instance optimum is 0 exactly when the system has a 0/1 solution."""

    setup(verbose, quiet)
    _report("boolean", reduce_boolean_feasibility(load_boolean(source)), output, output_format)


@app.command("boolean-lp")
@reports_errors
def boolean_lp(
    source: str = typer.Argument(..., metavar="FILE", help="Boolean LP file (kind boolean-lp)."),
    output: str = output_option(),
    big_m: Optional[int] = typer.Option(
        None, "-m", "--big-m", min=1, help="Penalty M; defaults to the smallest power of two above n*2^(3L+1)."
    ),
    output_format: str = format_option(),
    verbose: bool = verbose_option(),
    quiet: bool = quiet_option(),
):
    """Reduce min cx over boolean solutions of Ax <= a with a big-M penalty."""

    setup(verbose, quiet)
    c, bs = load_boolean_lp(source)
    inst = reduce_boolean_lp_big_m(c, bs, big_m=big_m)
    _report("boolean-lp", inst, output, output_format, big_m=format_rational(inst.z_offset / bs.n))


@app.command()
@reports_errors
def plcp(
    source: str = typer.Argument(..., metavar="FILE", help="Piecewise linear concave program (kind plcp)."),
    output: str = output_option(),
    output_format: str = format_option(),
    verbose: bool = verbose_option(),
    quiet: bool = quiet_option(),
):
    """Reduce a piecewise linear concave program to a bilinear instance
    whose Y is a product of simplices."""

    setup(verbose, quiet)
    _report("plcp", reduce_plcp(load_plcp(source)), output, output_format)
