import pytest

from choicescore.catalog import Attribute, AttributeCatalog, standin_catalog


@pytest.fixture(scope="session")
def standin():
    return standin_catalog()


@pytest.fixture
def binary3():
    return AttributeCatalog(tuple(Attribute(f"f{i}", ("no", "yes")) for i in range(3)))


@pytest.fixture
def small_catalog():
    """Six attributes, m = 7: large enough for n = 20 studies."""
    return AttributeCatalog(
        tuple(Attribute(f"flag{i}", ("no", "yes")) for i in range(6))
    )
