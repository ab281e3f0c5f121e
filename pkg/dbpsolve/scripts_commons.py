"""Helpers shared by the dbp command line tools: logging setup, schemata
for input files and report formatting."""

import json
import logging
import sys

from schema import And, Or, Schema, SchemaError, Use
from schema import Optional as OptionalKey
from tabulate import tabulate

from dbpsolve.exceptions import InstanceParseError
from dbpsolve.rational import parse_rational

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_DISCREPANCY = 3

FAMILIES = ("cube", "simplex", "step_diagonal", "boolean", "plcp")

# fmt: off
tabulate_formats = [
    "plain", "simple", "github", "grid", "fancy_grid", "pipe", "orgtbl", "jira",
    "presto", "psql", "rst", "mediawiki", "moinmoin", "youtrack", "html", "latex",
    "latex_raw", "latex_booktabs", "textile",
]
# fmt: on
output_formats = ["json"] + tabulate_formats


class DbpSchema(Schema):
    """Extends `Schema` with predefined validators for dbp input files.

    Class variables are meant to be combined into the per-file schemata
    below. Use :method:`DbpSchema.validate_data` to get converted data
    (rationals as `Fraction`) or an `InstanceParseError` naming the
    offending file."""

    rational = And(
        Or(int, str), Use(parse_rational), error="entries have to be integers or 'p/q' strings"
    )
    vector = [rational]
    matrix = [[rational]]
    dimension = And(int, lambda v: v >= 0, error="dimensions have to be nonnegative integers")
    positive = And(int, lambda v: v >= 1, error="counts have to be positive integers")
    int_range = And(
        [int], lambda r: len(r) == 2 and r[0] <= r[1], error="ranges are [low, high] with low <= high"
    )

    def validate_data(self, data, *, source="input"):
        """Calls `Schema.validate` on `data`.

        :param data: decoded JSON object
        :param source: name used in error messages (e.g. file path)
        :raises InstanceParseError: when validation fails"""

        # `Schema.validate` recurses via `self.__class__(sub, error=...)`,
        # which the zero-argument subclass constructors cannot accept.
        plain = Schema(self.schema, error=self._error, ignore_extra_keys=self.ignore_extra_keys)
        try:
            return plain.validate(data)
        except SchemaError as e:
            raise InstanceParseError(f"{source}: {e}") from e


class InstanceSchema(DbpSchema):
    def __init__(self):
        super().__init__(
            {
                OptionalKey("kind"): "dbp",
                OptionalKey("n"): self.dimension,
                OptionalKey("m"): self.dimension,
                OptionalKey("q"): self.dimension,
                OptionalKey("p"): self.dimension,
                "C": self.matrix,
                "A": self.matrix,
                "a": self.vector,
                "g": self.vector,
                "e": self.vector,
                "D": self.matrix,
                "d": self.vector,
                OptionalKey("z_offset"): self.rational,
            }
        )


class BooleanSchema(DbpSchema):
    def __init__(self, with_costs=False):
        spec = {"kind": "boolean-lp" if with_costs else "boolean", "n": self.positive, "A": self.matrix, "a": self.vector}
        if with_costs:
            spec["c"] = self.vector
        super().__init__(spec)


class PlcpSchema(DbpSchema):
    def __init__(self):
        piece = {"c": self.vector, "c0": self.rational}
        super().__init__(
            {"kind": "plcp", "n": self.positive, "pieces": [[piece]], "A": self.matrix, "a": self.vector}
        )


class CampaignSchema(DbpSchema):
    seed = And(int, lambda s: 0 <= s < 2**64, error="seed has to be a 64-bit unsigned integer")
    family = And(str, lambda f: f in FAMILIES, error=f"family should match one of: {', '.join(FAMILIES)}")

    def __init__(self):
        super().__init__(
            {
                "seed": self.seed,
                "count": self.positive,
                "dims": {"n": self.int_range, "m": self.int_range, "q": self.int_range},
                "coefficient_bound": self.positive,
                "family": self.family,
                "h_probes_per_instance": self.dimension,
                OptionalKey("workers"): self.positive,
                OptionalKey("solve"): bool,
            }
        )


def get_logger(set_info=False):
    """Sets logger for 'dbpsolve' package.

    Returns `logging.Logger` instance with no message formatting which
    will stream to stderr, so standard output only carries reports.
    With `set_info` :param: set to `True` logger defines `logging.INFO`
    level otherwise it leaves default `logging.WARNING`.

    :param set_info: boolean (defaults to False)"""

    logging.basicConfig(format="%(message)s", stream=sys.stderr)
    logger = logging.getLogger("dbpsolve")
    if set_info:
        logger.setLevel(logging.INFO)
    else:
        logger.setLevel(logging.WARNING)
    return logger


def format_report(report: dict, output_format: str = "json") -> str:
    """Renders a report object either as sorted, indented JSON or as a
    two column table in one of `tabulate_formats`. Nested values are
    shown as compact JSON in table cells."""

    if output_format == "json":
        return json.dumps(report, indent=2, sort_keys=True)

    def cell(value):
        if isinstance(value, (dict, list)):
            return json.dumps(value, sort_keys=True, separators=(",", ":"))
        return value

    table = sorted([key, cell(value)] for key, value in report.items())
    return tabulate(table, headers=["field", "value"], tablefmt=output_format)
