import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from laxcal import catalog


@pytest.fixture(scope="session")
def z2():
    return catalog.cyclic_group(2)


@pytest.fixture(scope="session")
def z3():
    return catalog.cyclic_group(3)


@pytest.fixture(scope="session")
def z4():
    return catalog.cyclic_group(4)


@pytest.fixture(scope="session")
def s3():
    return catalog.s3()


@pytest.fixture(scope="session")
def v4():
    return catalog.klein4()


@pytest.fixture(scope="session")
def sl2():
    return catalog.semilattice(2)


@pytest.fixture(scope="session")
def sl3():
    return catalog.semilattice(3)


@pytest.fixture(scope="session")
def l2():
    return catalog.lattice2()


@pytest.fixture(scope="session")
def nm3():
    return catalog.nm3()


@pytest.fixture(scope="session")
def curated():
    """The whole curated suite, name -> algebra."""
    return {name: catalog.get(name) for name in catalog.names()}
