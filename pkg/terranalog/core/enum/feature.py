from __future__ import annotations

from enum import Enum


class GeomorphFeature(str, Enum):
    """
    The node feature channels of a terrain graph, in channel order.

    Examples
    --------
    >>> GeomorphFeature.parse("cd").channel
    3
    """

    VRM = "VRM"
    ACR = "ACR"
    SLOPE = "Slope"
    CD = "CD"
    DSE = "DSE"

    @property
    def channel(self) -> int:
        return list(GeomorphFeature).index(self)

    @classmethod
    def parse(cls, name: str) -> GeomorphFeature:
        for feature in cls:
            if feature.value.lower() == str(name).strip().lower():
                return feature
        raise ValueError(f"Unknown feature: {name}")
