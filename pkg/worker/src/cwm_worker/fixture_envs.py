"""Reference environment programs shipped with the worker.

Both are small deterministic environments whose full transition tables are
checked in alongside the benchmark data, so an exhaustive equality sweep can
verify the execution path end to end.
"""

LINEWORLD_SOURCE = '''\
class Environment:
    """Corridor of 10 cells; action 1 walks right, 0 walks left, goal at 9."""

    def __init__(self):
        self.pos = 0

    def reset(self):
        self.pos = 0
        return self.pos

    def set_state(self, state):
        self.pos = int(state)
        return self.pos

    def step(self, action):
        if action == 1:
            self.pos = min(self.pos + 1, 9)
        else:
            self.pos = max(self.pos - 1, 0)
        reward = 1.0 if self.pos == 9 else 0.0
        done = self.pos == 9
        return self.pos, reward, done
'''

MINICLIFF_SOURCE = '''\
class Environment:
    """3x4 gridworld with a cliff: cells 9 and 10 reset to the start at -100,
    cell 11 is the goal, every move costs -1. Actions: 0 up, 1 right, 2 down,
    3 left, clamped at the edges."""

    def __init__(self):
        self.cell = 8

    def reset(self):
        self.cell = 8
        return self.cell

    def set_state(self, state):
        self.cell = int(state)
        return self.cell

    def step(self, action):
        row, col = divmod(self.cell, 4)
        if action == 0:
            row = max(row - 1, 0)
        elif action == 1:
            col = min(col + 1, 3)
        elif action == 2:
            row = min(row + 1, 2)
        else:
            col = max(col - 1, 0)
        dest = 4 * row + col
        if dest in (9, 10):
            self.cell = 8
            return self.cell, -100.0, False
        self.cell = dest
        if dest == 11:
            return self.cell, -1.0, True
        return self.cell, -1.0, False
'''

FIXTURE_SOURCES = {
    "lineworld": LINEWORLD_SOURCE,
    "minicliff": MINICLIFF_SOURCE,
}
