import dataclasses
from typing import Optional

import typer

from cli.common import emit, finish, format_option, out_option, quiet_option, reports_errors, setup, verbose_option
from dbpsolve.campaign import CampaignConfig, fuzz_campaign, replay as run_replay
from dbpsolve.files import load_reproducer


@reports_errors
def fuzz(
    config: str = typer.Option(..., "-c", "--config", help="Campaign configuration file (JSON)."),
    workers: Optional[int] = typer.Option(None, "-w", "--workers", min=1, help="Overrides the workers setting."),
    output_format: str = format_option(),
    out: Optional[str] = out_option(),
    verbose: bool = verbose_option(),
    quiet: bool = quiet_option(),
):
    """Run a seeded campaign comparing the criterion and the solver with
    the brute force oracle.

    The same configuration always gives the same report. With --out every
    disagreement is saved as a reproducer file next to the report. A
    campaign with disagreements or repaired certificates exits with code 3.

    Example:

        dbp fuzz --config cube.json --out runs/"""

    setup(verbose, quiet)
    cfg = CampaignConfig.from_file(config)
    if workers is not None:
        cfg = dataclasses.replace(cfg, workers=workers)
    report = fuzz_campaign(cfg, out_dir=out)
    emit(report.to_dict(), output_format, out, f"campaign-{cfg.family}-{cfg.seed}")
    finish(report.disagreements > 0 or report.certificate_repairs > 0)


@reports_errors
def replay(
    reproducer: str = typer.Argument(..., metavar="REPRODUCER", help="Reproducer file written by dbp fuzz."),
    output_format: str = format_option(),
    verbose: bool = verbose_option(),
    quiet: bool = quiet_option(),
):
    """Rerun a reproducer and report whether the disagreement is still there."""

    setup(verbose, quiet)
    result = run_replay(load_reproducer(reproducer))
    emit(result, output_format)
    finish(result["reproduced"])
