import random

import pytest

from ibms import extract, get_backend, setup

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def toy():
    return get_backend("toy")


@pytest.fixture(scope="session")
def bls():
    return get_backend("bls12-381")


@pytest.fixture(scope="session")
def toy_system():
    return setup("toy", 16, random.Random(2024))


@pytest.fixture(scope="session")
def bls_system():
    return setup("bls12-381", 32, random.Random(2024))


@pytest.fixture(params=["toy", "bls12-381"])
def system(request, toy_system, bls_system):
    return toy_system if request.param == "toy" else bls_system


@pytest.fixture
def keys():
    """keys(system, names) -> list of private IdentityKey, cached per (backend, name)."""
    cache = {}

    def make(sys_, names):
        params, msk = sys_
        out = []
        for n in names:
            ident = n.encode() if isinstance(n, str) else n
            k = (params.backend.name, ident)
            if k not in cache:
                cache[k] = extract(params, msk, ident)
            out.append(cache[k])
        return out

    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
