import math

import pytest
from hypothesis import settings

from minlen_delta import PotentialSpec, make_deformation

settings.register_profile("repo", deadline=None, max_examples=40)
settings.load_profile("repo")

BUILTINS = {
    "undeformed": dict(kind="undeformed"),
    "cutoff": dict(kind="cutoff", b=10.0),
    "kempf": dict(kind="kempf", beta=1.0),
    "maxmomentum": dict(kind="maxmomentum", beta=1.0),
}


@pytest.fixture(params=sorted(BUILTINS))
def builtin(request):
    return make_deformation(**BUILTINS[request.param])


@pytest.fixture
def unit_potential():
    return PotentialSpec(1.0)


def momentum_bound(d):
    """Largest incident momentum used in sweeps: ``a`` when finite, else a fixed scale."""
    return d.a if math.isfinite(d.a) else 5.0


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
