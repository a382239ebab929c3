import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from selfsim import resolve_group
from selfsim.nucleus import compute_nucleus


@pytest.fixture(scope="session")
def adding():
    return resolve_group("adding")


@pytest.fixture(scope="session")
def basilica():
    return resolve_group("basilica")


@pytest.fixture(scope="session")
def grigorchuk():
    return resolve_group("grigorchuk")


@pytest.fixture(scope="session")
def trivial2():
    return resolve_group("trivial:2")


@pytest.fixture(scope="session")
def trivial3():
    return resolve_group("trivial:3")


@pytest.fixture(scope="session")
def adding_nucleus(adding):
    return compute_nucleus(adding)


@pytest.fixture(scope="session")
def basilica_nucleus(basilica):
    return compute_nucleus(basilica)


@pytest.fixture(scope="session")
def grigorchuk_nucleus(grigorchuk):
    return compute_nucleus(grigorchuk)
