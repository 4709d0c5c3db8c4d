import random

import pytest

from polycert.ff import DEFAULT_MODULUS, PrimeField


@pytest.fixture(scope="session")
def f7():
    return PrimeField(7)


@pytest.fixture(scope="session")
def fbig():
    return PrimeField(DEFAULT_MODULUS)


@pytest.fixture()
def rng():
    return random.Random(0xC0FFEE)
