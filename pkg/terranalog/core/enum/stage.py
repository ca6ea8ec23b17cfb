from enum import Enum


class Stage(str, Enum):
    """The funnel stages, in execution order."""

    SSC = "ssc"
    TWC = "twc"
    MTM = "mtm"
    MSGNET = "msgnet"
