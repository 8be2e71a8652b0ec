class Environment:
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
