from .comparator import TWC_COLUMNS, WaveformMatch, rank_by_waveform, twc_filter
from .ddtw import (
    DdtwScore,
    bidirectional_ddtw,
    ddtw_cost,
    slice_derivative,
    warping_cost,
)
from .slicing import SliceSequence, slice_decompose
