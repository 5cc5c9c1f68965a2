import pytest

from erskit.base_system import simple_config

# One representative per affine family at its minimal rank.  Quantified
# checks (window closure, unfolding soundness, dimension witnesses) run over
# this list; doubled-class variants are exercised where the classification
# tables need them.
SUITE_NAMES = [
    "A2(1)",
    "B3(1)",
    "C2(1)",
    "D4(1)",
    "E6(1)",
    "E7(1)",
    "E8(1)",
    "F4(1)",
    "G2(1)",
    "A4(2)",
    "A5(2)",
    "D3(2)",
    "E6(2)",
    "D4(3)",
]

# Small-rank slice used where a graded algebra must actually be built.
SMALL_SUITE_NAMES = [
    "A2(1)",
    "C2(1)",
    "G2(1)",
    "A4(2)",
    "D3(2)",
    "D4(3)",
]


@pytest.fixture(scope="session")
def suite():
    return [simple_config(name) for name in SUITE_NAMES]


@pytest.fixture(scope="session")
def small_suite():
    return [simple_config(name) for name in SMALL_SUITE_NAMES]
