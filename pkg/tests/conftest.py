from pathlib import Path

import numpy as np
import pytest

from repfreq.game import StageGame, load_game_file
from repfreq.stage import check_assumptions

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

GAME_FILES = {
    "product_choice": "product_choice.json",
    "product_choice_three": "product_choice_three.json",
    "entry_deterrence": "entry_deterrence.json",
    "fiscal_policy": "fiscal_policy.json",
    "matching_pennies_tilted": "matching_pennies_tilted.json",
    "nash_overlap_3x2": "nash_overlap_3x2.json",
    "battle_of_sexes": "battle_of_sexes.json",
    "chicken": "chicken.json",
}

# Fixtures satisfying the uniqueness assumption (all of them, as it happens).
UNIQUE_GAMES = list(GAME_FILES)
# Fixtures satisfying both assumptions; the simulator targets these.
APPLIED_GAMES = ["product_choice", "product_choice_three", "entry_deterrence", "fiscal_policy"]
TWO_BY_TWO = [
    "product_choice",
    "entry_deterrence",
    "fiscal_policy",
    "matching_pennies_tilted",
    "battle_of_sexes",
    "chicken",
]


def fixture_path(name: str) -> Path:
    return FIXTURES / GAME_FILES[name]


def load_fixture(name: str) -> StageGame:
    return load_game_file(fixture_path(name))


@pytest.fixture(scope="session")
def games() -> dict[str, StageGame]:
    return {name: load_fixture(name) for name in GAME_FILES}


@pytest.fixture(scope="session")
def product_choice(games):
    return games["product_choice"]


@pytest.fixture(scope="session")
def entry_deterrence(games):
    return games["entry_deterrence"]


@pytest.fixture(scope="session")
def fiscal_policy(games):
    return games["fiscal_policy"]


@pytest.fixture(scope="session")
def matching_pennies(games):
    return games["matching_pennies_tilted"]


@pytest.fixture(scope="session")
def nash_overlap(games):
    return games["nash_overlap_3x2"]


def random_assumption_games(count: int, seed: int, size: int = 3) -> list[StageGame]:
    """Random payoff games (uniform in [-1, 1]) filtered to pass both
    assumptions: unique commitment point, not a best reply, above minmax."""
    rng = np.random.default_rng(seed)
    labels1 = tuple(f"a{i}" for i in range(size))
    labels2 = tuple(f"b{j}" for j in range(size))
    out: list[StageGame] = []
    while len(out) < count:
        game = StageGame(
            labels1,
            labels2,
            rng.uniform(-1, 1, (size, size)),
            rng.uniform(-1, 1, (size, size)),
        )
        if check_assumptions(game).satisfied:
            out.append(game)
    return out
