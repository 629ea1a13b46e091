import importlib

import numpy as np
import pytest

from weightlab._kernels import _pykernels


def _backends():
    out = [pytest.param(_pykernels, id="python")]
    try:
        out.append(pytest.param(importlib.import_module("weightlab._kernels._ckernels"), id="cython"))
    except ImportError:
        out.append(pytest.param(None, id="cython", marks=pytest.mark.skip("extension not built")))
    return out


BACKENDS = _backends()


@pytest.fixture(params=BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    rows = []
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid and rep.when == "call":
                name = nodeid.split("test_criterion_")[1]
                rows.append((int(name[:2]), name[3:], "PASS" if status == "passed" else "FAIL"))
    if rows:
        terminalreporter.section("acceptance criteria")
        for num, name, verdict in sorted(rows):
            terminalreporter.write_line(f"criterion {num:2d} {name}: {verdict}")
