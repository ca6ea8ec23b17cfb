from .candidate import LineFit, ValleyCandidate
from .clipping import select_and_clip
from .ledb import ledb_binarize, local_mean
from .mask import BinaryMask
from .screening import screen_tile, screen_tiles
from .skeleton import Skeleton, connected_components, fit_skeleton_line
from .thinning import zhang_suen_thin
