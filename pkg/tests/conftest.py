"""Shared fixtures: committed instance files, loaded problems, golden values.

Loaded problems are session-scoped so the joint enumeration cache is shared
across test modules instead of being rebuilt per test.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from mcdep.fileio import LoadedInstance, load_instance
from mcdep.lrp import Client, Location, LrpInstanceData

FIXTURES = Path(__file__).parent.parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

#: gen seed committed for the isolated-vs-oracle gap fixture (lrp-t2.txt)
LRP_T2_SEED = 1


@pytest.fixture(scope="session")
def golden_values() -> dict:
    return json.loads((GOLDEN / "values.json").read_text())


@pytest.fixture(scope="session")
def lrp_t1_data() -> LrpInstanceData:
    return LrpInstanceData(
        locations=(
            Location(0, 0, 0, 10, 2),
            Location(1, 10, 0, 10, 2),
            Location(2, 0, 10, 10, 2),
            Location(3, 10, 10, 10, 2),
        ),
        clients=(
            Client(0, 1, 1),
            Client(1, 9, 1),
            Client(2, 1, 9),
            Client(3, 9, 9),
            Client(4, 5, 5),
        ),
        k=2,
    )


@pytest.fixture(scope="session")
def lrp_t1() -> LoadedInstance:
    return load_instance(FIXTURES / "lrp-t1.txt")


@pytest.fixture(scope="session")
def lrp_t2() -> LoadedInstance:
    return load_instance(FIXTURES / "lrp-t2.txt")


@pytest.fixture(scope="session")
def sp_t1() -> LoadedInstance:
    return load_instance(FIXTURES / "sp-t1.txt")


@pytest.fixture(scope="session")
def control() -> LoadedInstance:
    return load_instance(FIXTURES / "synthetic-control.txt")


@pytest.fixture(scope="session")
def path3() -> LoadedInstance:
    return load_instance(FIXTURES / "synthetic-path3.txt")


@pytest.fixture(scope="session")
def parity_pair() -> LoadedInstance:
    return load_instance(FIXTURES / "synthetic-parity.txt")
