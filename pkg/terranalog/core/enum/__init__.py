from .feature import GeomorphFeature
from .mode import Mode
from .stage import Stage
