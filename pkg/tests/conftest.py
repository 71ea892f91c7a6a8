import numpy as np
import pytest

from seqdescent import _kernels
from seqdescent.core import BoxDomain, ObjectiveSpec


def make_objective(f, box, grad=None, name="test"):
    box = box if isinstance(box, BoxDomain) else BoxDomain(*box)
    return ObjectiveSpec(name=name, dimension=box.dimension, evaluate=f, domain=box, gradient=grad)


def sphere(box=((-1.0, -1.0), (1.0, 1.0))):
    return make_objective(lambda x: float(x @ x), box, lambda x: 2.0 * x, name="sphere")


def linear_x1(box=((-1.0, -1.0), (1.0, 1.0)), slope=1.0):
    return make_objective(lambda x: slope * float(x[0]), box,
                          lambda x: np.array([slope] + [0.0] * (len(x) - 1)), name="linear")


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    return request.param


# acceptance criteria append (criterion, ok, detail) here; printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
