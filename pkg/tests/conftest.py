import pytest

from momentsieve import build_sieve


@pytest.fixture(scope="session")
def table4():
    return build_sieve(10**4)


@pytest.fixture(scope="session")
def table5():
    return build_sieve(10**5)


@pytest.fixture(scope="session")
def table6():
    return build_sieve(10**6)
