import json
from fractions import Fraction

import pytest

from dbpsolve.exceptions import InstanceParseError
from dbpsolve.files import (
    Reproducer,
    boolean_to_data,
    dump_instance,
    instance_from_data,
    instance_to_data,
    load_boolean,
    load_boolean_lp,
    load_instance,
    load_json,
    load_plcp,
    load_reproducer,
    plcp_to_data,
    write_reproducer,
)
from dbpsolve.instance import instance_hash
from dbpsolve.reductions import BooleanSystem, PlcpProblem


@pytest.mark.files
class TestLoadJson:
    def test_reports_line_and_column_of_syntax_error(self, out_dir):
        path = out_dir / "broken.json"
        path.write_text('{\n  "C": [[1]],\n  "A": [[1]\n}')

        with pytest.raises(InstanceParseError) as e:
            load_json(path)

        assert e.value.lineno == 4
        assert e.value.colno == 1
        assert "line 4, column 1" in str(e.value)

    def test_reports_missing_file(self, out_dir):
        with pytest.raises(InstanceParseError, match="missing.json"):
            load_json(out_dir / "missing.json")

    def test_rejects_top_level_list(self, write_json):
        with pytest.raises(InstanceParseError, match="has to be an object"):
            load_json(write_json("list.json", [1, 2]))


@pytest.mark.files
class TestInstanceFiles:
    def test_loads_instance(self, write_json, tiny_data, tiny):
        assert load_instance(write_json("tiny.json", tiny_data)) == tiny

    def test_kind_is_optional(self, tiny_data, tiny):
        del tiny_data["kind"]

        assert instance_from_data(tiny_data) == tiny

    def test_reads_text_rationals(self, tiny_data):
        tiny_data["g"] = ["-3/4"]
        tiny_data["z_offset"] = "1/2"

        inst = instance_from_data(tiny_data)

        assert inst.g == (Fraction(-3, 4),)
        assert inst.z_offset == Fraction(1, 2)

    @pytest.mark.parametrize(
        "key, value",
        [("C", [[0.5]]), ("g", ["x"]), ("a", 1), ("n", -1), ("kind", "plcp")],
    )
    def test_rejects_invalid_values(self, tiny_data, key, value):
        tiny_data[key] = value

        with pytest.raises(InstanceParseError, match="tiny.json"):
            instance_from_data(tiny_data, source="tiny.json")

    def test_dimensions_are_derived_when_absent(self, tiny_data):
        inst = instance_from_data(tiny_data)

        assert (inst.n, inst.m, inst.q, inst.p) == (1, 1, 1, 2)

    def test_accepts_matching_dimensions(self, tiny_data, tiny):
        tiny_data.update(n=1, m=1, q=1, p=2)

        assert instance_from_data(tiny_data) == tiny

    @pytest.mark.parametrize("key, value, vector", [("n", 2, "g"), ("m", 3, "e"), ("q", 0, "a"), ("p", 1, "d")])
    def test_rejects_dimension_that_disagrees_with_data(self, tiny_data, key, value, vector):
        tiny_data[key] = value

        with pytest.raises(InstanceParseError, match=f"tiny.json: {key}={value} but {vector} has"):
            instance_from_data(tiny_data, source="tiny.json")

    def test_rejects_unknown_key(self, tiny_data):
        tiny_data["extra"] = 1

        with pytest.raises(InstanceParseError):
            instance_from_data(tiny_data)

    def test_rejects_missing_key(self, tiny_data):
        del tiny_data["D"]

        with pytest.raises(InstanceParseError):
            instance_from_data(tiny_data)

    def test_dumps_sorted_text_json(self, out_dir, tiny):
        path = dump_instance(out_dir / "nested" / "tiny.json", tiny)

        text = path.read_text()
        data = json.loads(text)
        assert data["kind"] == "dbp"
        assert list(data) == sorted(data)
        assert load_instance(path) == tiny
        assert text == json.dumps(instance_to_data(tiny), indent=2, sort_keys=True) + "\n"


@pytest.mark.files
class TestReductionFiles:
    def test_loads_boolean_system(self, write_json):
        path = write_json("bs.json", {"kind": "boolean", "n": 2, "A": [[1, 1]], "a": [1]})

        assert load_boolean(path) == BooleanSystem.from_lists(2, [[1, 1]], [1])

    def test_loads_boolean_lp(self, write_json):
        bs = BooleanSystem.from_lists(1, [[2]], [1])
        path = write_json("lp.json", boolean_to_data(bs, c=[Fraction(-1)]))

        c, loaded = load_boolean_lp(path)

        assert c == (-1,)
        assert loaded == bs

    def test_boolean_file_needs_its_kind(self, write_json):
        path = write_json("bs.json", {"kind": "boolean-lp", "n": 1, "A": [], "a": [], "c": [1]})

        with pytest.raises(InstanceParseError):
            load_boolean(path)

    def test_loads_plcp(self, write_json):
        pp = PlcpProblem.from_lists(1, [[([1], 0), ([-1], 1)]], [[1]], [1])

        assert load_plcp(write_json("pp.json", plcp_to_data(pp))) == pp


@pytest.mark.files
class TestReproducerFiles:
    def test_writes_and_loads_reproducer(self, out_dir, tiny):
        reproducer = Reproducer(tiny, "check-subset", {"h": "1/2"}, "NotSubset", "Subset")

        path = write_reproducer(out_dir, reproducer, 7)

        assert path.name == f"reproducer-00007-check-subset-{instance_hash(tiny)}.json"
        assert load_reproducer(path) == reproducer

    def test_rejects_other_kinds(self, write_json, tiny_data):
        with pytest.raises(InstanceParseError, match="not a reproducer"):
            load_reproducer(write_json("tiny.json", tiny_data))

    def test_rejects_missing_keys(self, write_json, tiny):
        data = Reproducer(tiny, "solve", {}, "0", "1").to_data()
        del data["expected"]

        with pytest.raises(InstanceParseError, match="expected"):
            load_reproducer(write_json("reproducer.json", data))
