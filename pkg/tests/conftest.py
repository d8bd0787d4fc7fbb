import time

import pytest

from wavelocate.fhn import FhnConfig, run_fhn


@pytest.fixture(scope="session")
def fhn_map():
    """The default spiral-wave activation map, shared by every test that
    needs real rotor data.  Generation time is stashed on the result so
    acceptance tests can include it in their runtime budgets."""
    start = time.perf_counter()
    amap = run_fhn(FhnConfig())
    elapsed = time.perf_counter() - start
    return amap, elapsed
