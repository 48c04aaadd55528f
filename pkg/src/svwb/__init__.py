"""Spatially varying white balancing for mixed and non-uniform illuminants."""

from .balance import (
    MultiColorFit,
    WhitePointAnchor,
    correct_image_multicolor,
    correct_image_svwb,
    correct_image_svwb_reference,
    correct_image_wb,
    correct_pixel,
    multicolor_matrix,
    per_anchor_matrix,
    svwb_matrix,
    wb_matrix,
    weights,
)
from .color import (
    BRADFORD,
    MODELS,
    VON_KRIES,
    XYZ_SCALING,
    AdaptationModel,
    cone_response,
    get_model,
    linear_xyz_to_srgb,
    srgb_to_linear_xyz,
)
from .estimation import RegionOfInterest, estimate_gray_world, estimate_max_rgb, region_mean
from .metrics import ChartLayout, ErrorReport, evaluate_chart, heatmap, reproduction_error

__version__ = "0.1.0"
