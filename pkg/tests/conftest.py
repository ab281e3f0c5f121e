import json
import tempfile
import shutil
from pathlib import Path

import pytest

from dbpsolve.instance import DbpInstance


def _get_temp_dir():
    return Path(tempfile.mkdtemp())


@pytest.fixture
def out_dir():
    tempdir = _get_temp_dir()
    yield tempdir
    shutil.rmtree(str(tempdir), ignore_errors=True)


@pytest.fixture
def tiny_data():
    """x y + y over x in [0, 1], y in [0, 1]; optimum 0 at (0, 0)."""

    return {
        "kind": "dbp",
        "C": [[1]],
        "A": [[1]],
        "a": [1],
        "g": [0],
        "e": [1],
        "D": [[1], [-1]],
        "d": [1, 0],
    }


@pytest.fixture
def tiny(tiny_data):
    fields = {k: v for k, v in tiny_data.items() if k != "kind"}
    return DbpInstance.from_lists(**fields)


@pytest.fixture
def linear_x():
    """x + y with no bilinear term, optimum 0 at (0, 0)."""

    return DbpInstance.from_lists(C=[[0]], A=[[1]], a=[1], g=[1], e=[1], D=[[1], [-1]], d=[1, 0])


@pytest.fixture
def affine():
    """-x y + x + y over x in [0, 2]: C^T x = -e holds at x = 1."""

    return DbpInstance.from_lists(C=[[-1]], A=[[1]], a=[2], g=[1], e=[1], D=[[1], [-1]], d=[1, 0])


@pytest.fixture
def unit_square():
    D = [[1, 0], [0, 1], [-1, 0], [0, -1]]
    d = [1, 1, 0, 0]
    return D, d


@pytest.fixture
def write_json(out_dir):
    def _write(name, data):
        path = out_dir / name
        path.write_text(json.dumps(data))
        return path

    return _write
