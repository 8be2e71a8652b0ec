class Environment:
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
