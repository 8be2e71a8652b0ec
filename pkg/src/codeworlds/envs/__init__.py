from codeworlds.envs.fixtures import FIXTURE_NAMES, LineWorld, MiniCliff, make_fixture

__all__ = ["FIXTURE_NAMES", "LineWorld", "MiniCliff", "make_fixture"]
