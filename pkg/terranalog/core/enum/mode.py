from enum import Enum


class Mode(str, Enum):
    """Forward-pass mode of the graph network."""

    TRAIN = "train"
    EVAL = "eval"
