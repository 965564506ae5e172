import json

import pytest

from setpairs.search import SearchSpec, enumerate_systems
from setpairs.setsystem import SetFamily, disjoint_pair_family, k4_family, sp7_family

# Mechanics-mode family (not an (n,m)-system) whose pair selection fires both
# replacement rules: R2 at stage 0 and R1 at stage 1.
RULES_FAMILY = {
    "n": 15,
    "sets": [
        [3, 4, 6, 8, 9, 10, 11, 13, 14, 15],
        [2, 5, 7, 9, 10, 11, 12, 14, 15],
        [4, 6, 7, 8, 10, 11, 12, 13, 15],
        [1, 3, 7, 8, 9, 11, 12, 13, 14],
        [1, 2, 6, 7, 8, 9, 10],
    ],
}

COMPLEMENTS_4 = {
    "r": 2,
    "s": 2,
    "pairs": [
        {"a": [1, 2], "b": [3, 4]},
        {"a": [1, 3], "b": [2, 4]},
        {"a": [1, 4], "b": [2, 3]},
        {"a": [2, 3], "b": [1, 4]},
        {"a": [2, 4], "b": [1, 3]},
        {"a": [3, 4], "b": [1, 2]},
    ],
}


@pytest.fixture
def sp7():
    return sp7_family()


@pytest.fixture
def six_three():
    return disjoint_pair_family()


@pytest.fixture
def k4():
    return k4_family()


@pytest.fixture
def rules_family():
    return SetFamily.from_json(RULES_FAMILY)


@pytest.fixture(scope="session")
def searched_systems():
    """Every (n,m)-system with n <= 9 and ell >= 4, up to isomorphism."""
    out = []
    for n in range(4, 10):
        res = enumerate_systems(SearchSpec(n, None, (4, None)))
        assert res.exhausted
        out.extend(res.systems)
    return out


@pytest.fixture
def write_json(tmp_path):
    def write(obj, name="input.json"):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return write
