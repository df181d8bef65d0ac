"""shutterforge: cross-shutter imaging physics at desk scale.

Synthesizes aligned blur / rolling-shutter / ground-truth data from
high-speed frame sequences, plus the surrounding machinery: temporal
positional encodings, flow warping and prompts, region-adaptive
distillation masks and losses, robustness perturbations, quality and
alignment metrics, and a deterministic dataset pipeline.
"""

from .dataset import (
    DatasetManifest,
    IngestConfig,
    MaterializeReport,
    SceneRecord,
    TripleRecord,
    ingest,
    materialize,
    split_scenes,
)
from .distill import (
    MaskWeights,
    loss_charbonnier,
    loss_distill,
    loss_total,
    mask_boundary,
    mask_combine,
    mask_dynamic,
    mask_error,
)
from .encoding import tpe_latent, tpe_relative, tpe_rs
from .errors import (
    ArgumentError,
    BoundsError,
    DegenerateInputError,
    FormatError,
    IngestError,
    NumericError,
    PipelineError,
    ShapeError,
    ShutterForgeError,
    ValidationError,
    WriteError,
)
from .flowops import (
    aggregate_warped,
    backward_warp,
    block_flow,
    flow_diff,
    flow_magnitude,
)
from .metrics import (
    abs_rel,
    delta_accuracy,
    mse,
    psnr,
    ssim,
    temporal_profile,
    tof,
)
from .perturb import (
    PerturbSpec,
    low_light,
    spatial_shift,
    stereo_shift,
    temporal_shift_rs,
)
from .synthesis import (
    TripleSample,
    blur_synthesize,
    center_crop,
    latent_indices,
    rs_synthesize,
    sample_latent_targets,
    synthesize_triples,
    window_count,
)
from .tensors import (
    EncodingMap,
    ExposureSchedule,
    FlowField,
    FrameSequence,
    Image,
    MaskMap,
    png_export,
    png_import,
    tensor_bytes,
    tensor_read,
    tensor_write,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "BoundsError",
    "DatasetManifest",
    "DegenerateInputError",
    "EncodingMap",
    "ExposureSchedule",
    "FlowField",
    "FormatError",
    "FrameSequence",
    "Image",
    "IngestConfig",
    "IngestError",
    "MaskMap",
    "MaskWeights",
    "MaterializeReport",
    "NumericError",
    "PerturbSpec",
    "PipelineError",
    "SceneRecord",
    "ShapeError",
    "ShutterForgeError",
    "TripleRecord",
    "TripleSample",
    "ValidationError",
    "WriteError",
    "abs_rel",
    "aggregate_warped",
    "backward_warp",
    "block_flow",
    "blur_synthesize",
    "center_crop",
    "delta_accuracy",
    "flow_diff",
    "flow_magnitude",
    "ingest",
    "latent_indices",
    "loss_charbonnier",
    "loss_distill",
    "loss_total",
    "mask_boundary",
    "mask_combine",
    "mask_dynamic",
    "mask_error",
    "materialize",
    "mse",
    "png_export",
    "png_import",
    "psnr",
    "rs_synthesize",
    "sample_latent_targets",
    "spatial_shift",
    "split_scenes",
    "ssim",
    "stereo_shift",
    "synthesize_triples",
    "temporal_profile",
    "temporal_shift_rs",
    "tensor_bytes",
    "tensor_read",
    "tensor_write",
    "tof",
    "tpe_latent",
    "tpe_relative",
    "tpe_rs",
    "window_count",
    "low_light",
]
