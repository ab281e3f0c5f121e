"""JSON file formats read and written by the dbp tools.

Every file is one JSON object with an optional (instances) or required
(everything else) "kind" key:

- "dbp": a `DbpInstance`, rationals as integers or "p/q" strings;
- "boolean" / "boolean-lp": a `BooleanSystem`, the latter with costs "c";
- "plcp": a `PlcpProblem` with "pieces" as lists of {"c", "c0"};
- "reproducer": an instance plus the command that disagreed with the
  oracle and both recorded answers.

Files are written with sorted keys so identical data gives identical
bytes."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

from dbpsolve.exceptions import InstanceParseError
from dbpsolve.instance import DbpInstance, instance_hash
from dbpsolve.rational import format_rational
from dbpsolve.reductions import BooleanSystem, PlcpProblem
from dbpsolve.scripts_commons import BooleanSchema, DbpSchema, InstanceSchema, PlcpSchema

logger = logging.getLogger(__name__)

KIND_DBP = "dbp"
KIND_BOOLEAN = "boolean"
KIND_BOOLEAN_LP = "boolean-lp"
KIND_PLCP = "plcp"
KIND_REPRODUCER = "reproducer"


def load_json(path) -> dict:
    """:raises InstanceParseError: with line and column of JSON syntax errors"""

    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InstanceParseError(f"{path}: {e.strerror}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"{path}: {e.msg}", e.lineno, e.colno) from e
    if not isinstance(data, dict):
        raise InstanceParseError(f"{path}: top level value has to be an object", 1, 1)
    return data


def dump_json(path, data: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    logger.debug("wrote %s", path)
    return path


DIMENSION_SOURCES = {"n": "g", "m": "e", "q": "a", "p": "d"}


def instance_from_data(data: dict, *, source="input") -> DbpInstance:
    """Builds an instance from a "dbp" object. The dimension keys n, m,
    q and p are optional: they are read off g, e, a and d, and when
    present have to agree with those lengths.

    :raises InstanceParseError: for schema errors and declared
        dimensions that disagree with the data"""

    fields = InstanceSchema().validate_data(data, source=source)
    fields.pop("kind", None)
    for key, vector in DIMENSION_SOURCES.items():
        declared = fields.pop(key, None)
        if declared is not None and declared != len(fields[vector]):
            raise InstanceParseError(f"{source}: {key}={declared} but {vector} has {len(fields[vector])} entries")
    return DbpInstance.from_lists(**fields)


def instance_to_data(inst: DbpInstance) -> dict:
    return {"kind": KIND_DBP, **inst.to_dict()}


def load_instance(path) -> DbpInstance:
    return instance_from_data(load_json(path), source=str(path))


def dump_instance(path, inst: DbpInstance) -> Path:
    return dump_json(path, instance_to_data(inst))


def _validated(data, schema: DbpSchema, source):
    fields = schema.validate_data(data, source=source)
    return {key: value for key, value in fields.items() if key != "kind"}


def load_boolean(path) -> BooleanSystem:
    fields = _validated(load_json(path), BooleanSchema(), str(path))
    return BooleanSystem.from_lists(fields["n"], fields["A"], fields["a"])


def load_boolean_lp(path) -> Tuple[Tuple, BooleanSystem]:
    fields = _validated(load_json(path), BooleanSchema(with_costs=True), str(path))
    return tuple(fields["c"]), BooleanSystem.from_lists(fields["n"], fields["A"], fields["a"])


def load_plcp(path) -> PlcpProblem:
    fields = _validated(load_json(path), PlcpSchema(), str(path))
    pieces = [[(piece["c"], piece["c0"]) for piece in group] for group in fields["pieces"]]
    return PlcpProblem.from_lists(fields["n"], pieces, fields["A"], fields["a"])


def boolean_to_data(bs: BooleanSystem, c=None) -> dict:
    data = {
        "kind": KIND_BOOLEAN if c is None else KIND_BOOLEAN_LP,
        "n": bs.n,
        "A": [[format_rational(v) for v in row] for row in bs.A],
        "a": [format_rational(v) for v in bs.a],
    }
    if c is not None:
        data["c"] = [format_rational(v) for v in c]
    return data


def plcp_to_data(pp: PlcpProblem) -> dict:
    return {
        "kind": KIND_PLCP,
        "n": pp.n,
        "pieces": [
            [{"c": [format_rational(v) for v in c], "c0": format_rational(c0)} for c, c0 in group]
            for group in pp.pieces
        ],
        "A": [[format_rational(v) for v in row] for row in pp.A],
        "a": [format_rational(v) for v in pp.a],
    }


@dataclass(frozen=True)
class Reproducer:
    """Standalone record of one disagreement with the oracle.

    `command` is "check-subset" (with `args["h"]`) or "solve";
    `expected` is the oracle answer and `actual` what the criterion or
    the solver answered when the record was written."""

    instance: DbpInstance
    command: str
    args: dict
    expected: str
    actual: str

    def to_data(self) -> dict:
        return {
            "kind": KIND_REPRODUCER,
            "instance": instance_to_data(self.instance),
            "command": self.command,
            "args": self.args,
            "expected": self.expected,
            "actual": self.actual,
        }

    def file_name(self, index: int) -> str:
        return f"reproducer-{index:05d}-{self.command}-{instance_hash(self.instance)}.json"


def load_reproducer(path) -> Reproducer:
    data = load_json(path)
    source = str(path)
    if data.get("kind") != KIND_REPRODUCER:
        raise InstanceParseError(f"{source}: not a reproducer file")
    missing = {"instance", "command", "args", "expected", "actual"} - set(data)
    if missing:
        raise InstanceParseError(f"{source}: missing key(s) {', '.join(sorted(missing))}")
    return Reproducer(
        instance=instance_from_data(data["instance"], source=source),
        command=data["command"],
        args=dict(data["args"]),
        expected=data["expected"],
        actual=data["actual"],
    )


def write_reproducer(out_dir, reproducer: Reproducer, index: int) -> Path:
    return dump_json(Path(out_dir) / reproducer.file_name(index), reproducer.to_data())
