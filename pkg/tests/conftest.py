import pathlib

import numpy as np
import pytest
from hypothesis import settings

from geogate.verification import decode_matrix, load_manifest

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

DATA = pathlib.Path(__file__).parent / "data"

# (criterion id, passed, detail), filled in by the acceptance tests
ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def oracles():
    return load_manifest(DATA / "oracles.json")


@pytest.fixture(scope="session")
def oracle_matrix(oracles):
    def get(name, *keys):
        value = oracles[name].expected
        for k in keys:
            value = value[k]
        return decode_matrix(value)

    return get


def equal_up_to_phase(a, b, atol=1e-9):
    a, b = np.asarray(a), np.asarray(b)
    return 1.0 - abs(np.trace(a.conj().T @ b)) / a.shape[0] < atol


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {detail}")
