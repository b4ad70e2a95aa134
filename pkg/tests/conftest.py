import os

import pytest

from landau.primes import PrimeTable

EXTENDED = os.environ.get("LANDAU_EXTENDED") == "1"

extended = pytest.mark.skipif(
    not EXTENDED, reason="extended test; set LANDAU_EXTENDED=1 to run"
)


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return str(tmp_path_factory.mktemp("landau-cache"))


@pytest.fixture(scope="session")
def table1m():
    return PrimeTable.build(10**6)

