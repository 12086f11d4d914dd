import pytest

from alcbasis import Signature
from helpers import simpsons as build_simpsons


@pytest.fixture
def simpsons():
    return build_simpsons()


@pytest.fixture
def family_sig():
    return Signature(("Husband", "Wife", "Male", "Female"), ("marriedTo",))


@pytest.fixture
def small_sig():
    return Signature(("A", "B"), ("r",))
