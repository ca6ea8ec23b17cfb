from .eigenshape import (
    Eigenshape,
    ShapeMatrix,
    shape_function,
    shape_matrix,
    shape_matrix_from_rows,
    svd_truncate,
)
from .resample import (
    ResampledProfile,
    choose_target_resolution,
    mae_resample,
    resample_profile,
    resample_sequence,
)
from .texture import (
    MTM_COLUMNS,
    LoadingMatrix,
    ReferenceTexture,
    TextureMatch,
    cosine_rank,
    cosine_similarity,
    fit_reference_texture,
    loading_matrix,
    mtm_filter,
    rank_by_texture,
)
