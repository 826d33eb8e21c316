import sys

import pytest

from ctlab.core import Signature

sys.setrecursionlimit(100_000)


@pytest.fixture(scope="session")
def sig2():
    """Two binary variables: the main micro signature."""
    return Signature.of({"X": ["0", "1"], "Y": ["0", "1"]})


@pytest.fixture(scope="session")
def sig1t():
    """One ternary variable: the cheap exhaustive signature."""
    return Signature.of({"A": ["0", "1", "2"]})


@pytest.fixture(scope="session")
def chain_sig():
    """A four-variable chain: U, X binary, Y in {1,2}, Z in {2..6}."""
    return Signature.of({"U": ["0", "1"], "X": ["0", "1"],
                         "Y": ["1", "2"], "Z": ["2", "3", "4", "5", "6"]})
