import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from thoughtcraft import (
    Game,
    default_catalog_path,
    default_profile_path,
    difficulty_table,
    load_profile,
    load_specs,
)


@pytest.fixture(scope="session")
def tree():
    return load_specs(default_catalog_path())


@pytest.fixture(scope="session")
def thought_profile():
    return load_profile(default_profile_path("thought"))


@pytest.fixture(scope="session")
def target_profile():
    return load_profile(default_profile_path("target"))


@pytest.fixture(scope="session")
def table():
    return difficulty_table(7)


@pytest.fixture(scope="session")
def thought_game(tree, thought_profile, table):
    return Game(tree, thought_profile, table)


@pytest.fixture(scope="session")
def target_game(tree, target_profile, table):
    return Game(tree, target_profile, table)
