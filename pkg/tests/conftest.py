import random

import pytest

from centaur.chess import apply_move, game_result, legal_moves, starting_position


def random_game_positions(seed, n_games=5, max_plies=60):
    """Positions sampled from seeded random playouts, for cross-checks."""
    rng = random.Random(seed)
    positions = []
    for _ in range(n_games):
        p = starting_position()
        for _ in range(max_plies):
            positions.append(p)
            if game_result(p) is not None:
                break
            moves = legal_moves(p)
            p = apply_move(p, rng.choice(moves))
    return positions


@pytest.fixture(scope="session")
def sampled_positions():
    return random_game_positions(seed=20240901, n_games=6, max_plies=50)
