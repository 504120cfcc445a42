"""Shared fixtures: the frozen reference values and the standard test point.

``tests/data/reference_values.json`` is produced by the independent oracle
script in ``tests/oracles`` and is never written by the package under test.
All rationals in it are "p/q" strings; ``rq`` converts them (recursively for
lists) into exact rationals.
"""

import json
import pathlib

import pytest

from parconn.rat import as_rat

DATA_DIR = pathlib.Path(__file__).parent / "data"


def rq(value):
    """Recursively convert "p/q" strings (in nested lists) to rationals."""
    if isinstance(value, str):
        return as_rat(value)
    if isinstance(value, list):
        return [rq(v) for v in value]
    return value


@pytest.fixture(scope="session")
def reference():
    with open(DATA_DIR / "reference_values.json") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def ref_values(reference):
    return reference["values"]


@pytest.fixture(scope="session")
def standard_point(reference):
    """The standard specialization: all seven coordinates as rationals."""
    params, point = reference["params"], reference["point"]
    return {
        "lam": as_rat(params["lambda"]),
        "t": as_rat(params["t"]),
        "nu": as_rat(params["nu"]),
        "ul": as_rat(point["u_lambda"]),
        "ut": as_rat(point["u_t"]),
        "c1": as_rat(point["c1"]),
        "c2": as_rat(point["c2"]),
    }
