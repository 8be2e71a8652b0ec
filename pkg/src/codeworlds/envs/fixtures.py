"""Two tiny reference environments with known dynamics.

Both expose the same contract candidate programs must implement (set_state /
step returning (observation, reward, done)) plus reset(), so they double as
ground-truth oracles for planning and evaluation tests. Their full transition
tables are written out by hand under fixtures/<name>/transition_table.json.
"""

from __future__ import annotations

from codeworlds.core.spaces import DiscreteSpace


class LineWorld:
    """A corridor of 10 cells. Walk right to the goal at cell 9.

    Actions: 0 moves left, 1 moves right; moves clamp at the ends. Reaching
    cell 9 pays +1 and ends the episode; every other step pays 0.
    """

    observation_space = DiscreteSpace(10)
    action_space = DiscreteSpace(2)
    start_state = 0
    size = 10
    goal = 9

    def __init__(self):
        self.position = self.start_state

    def reset(self) -> int:
        self.position = self.start_state
        return self.position

    def set_state(self, state) -> None:
        self.position = int(state)

    def step(self, action) -> tuple[int, float, bool]:
        move = 1 if action == 1 else -1
        nxt = min(max(self.position + move, 0), self.size - 1)
        self.position = nxt
        reward = 1.0 if nxt == self.goal else 0.0
        done = nxt == self.goal
        return nxt, reward, done


class MiniCliff:
    """A 3x4 gridworld with a cliff along the bottom row.

    Cells are indexed row * 4 + col with row 0 at the top. The agent starts at
    (2,0) and must reach the goal at (2,3); cells (2,1) and (2,2) are the
    cliff. Actions: 0 up, 1 right, 2 down, 3 left; moves clamp at the walls.
    Stepping onto the cliff costs -100 and teleports back to the start; every
    other move costs -1; reaching the goal ends the episode.
    """

    observation_space = DiscreteSpace(12)
    action_space = DiscreteSpace(4)
    rows = 3
    cols = 4
    start_state = 8
    goal_state = 11
    cliff_states = (9, 10)

    _MOVES = {0: (-1, 0), 1: (0, 1), 2: (1, 0), 3: (0, -1)}

    def __init__(self):
        self.state = self.start_state

    def reset(self) -> int:
        self.state = self.start_state
        return self.state

    def set_state(self, state) -> None:
        self.state = int(state)

    def step(self, action) -> tuple[int, float, bool]:
        row, col = divmod(self.state, self.cols)
        d_row, d_col = self._MOVES[int(action)]
        row = min(max(row + d_row, 0), self.rows - 1)
        col = min(max(col + d_col, 0), self.cols - 1)
        landing = row * self.cols + col
        if landing in self.cliff_states:
            self.state = self.start_state
            return self.state, -100.0, False
        self.state = landing
        done = landing == self.goal_state
        return landing, -1.0, done


FIXTURE_NAMES = ("lineworld", "minicliff")

_FIXTURES = {"lineworld": LineWorld, "minicliff": MiniCliff}


def make_fixture(name: str):
    """Instantiate a fixture environment by name; raises KeyError for unknown names."""
    try:
        return _FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture environment {name!r} (known: {', '.join(FIXTURE_NAMES)})") from None
