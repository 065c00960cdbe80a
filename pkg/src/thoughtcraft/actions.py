"""The fixed macro action vocabulary, shared verbatim by both game fidelities."""
from enum import IntEnum


class MacroAction(IntEnum):
    NOOP = 0
    BUILD_WORKER = 1
    BUILD_SUPPLY = 2
    BUILD_PRODUCER_1 = 3
    BUILD_PRODUCER_2 = 4
    BUILD_TECH = 5
    TRAIN_SOLDIER_1 = 6
    TRAIN_SOLDIER_2 = 7
    TRAIN_SOLDIER_3 = 8
    ATTACK = 9
    RETREAT = 10


N_ACTIONS = len(MacroAction)

AGENT, OPPONENT = 0, 1
