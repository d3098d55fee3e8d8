"""ccbench: color constancy benchmarking.

Linear-space color machinery (von Kries application/correction, illuminant
recovery, angular error), the classical grey-world/white-patch/grey-edge
estimator family, manifest-driven dataset I/O with deterministic splits, a
synthetic Mondrian scene generator with exact ground truth, and evaluation
reports in the standard six-number summary.
"""

from .color import (
    Aggregator,
    ColorSpace,
    Illuminant,
    Image,
    angular_error,
    apply_illuminant,
    correct_von_kries,
    error_map,
    linear_to_srgb,
    recover_illuminant,
    srgb_decode,
    srgb_encode,
    srgb_to_linear,
)
from .dataset import (
    Encoding,
    Manifest,
    PredictionKind,
    PredictionSet,
    SampleRecord,
    SceneTag,
    Split,
    load_manifest,
    load_predictions,
    load_sample,
    save_manifest,
    split_manifest,
)
from .errors import (
    BridgeError,
    CCBenchError,
    DegenerateIlluminantError,
    DegenerateSceneError,
    IncompleteGridError,
    InputDomainError,
    InsufficientSupportError,
    ManifestError,
)
from .estimators import (
    GENERAL_GREY_WORLD,
    GREY_EDGE_1,
    GREY_EDGE_2,
    GREY_WORLD,
    PRESETS,
    SHADES_OF_GREY,
    WHITE_PATCH,
    EstimatorSpec,
    estimate,
    estimate_preset,
    gaussian_smooth,
)
from .evaluate import (
    CrossMatrix,
    ErrorStats,
    EvaluationRun,
    cross_evaluate,
    evaluate,
    evaluate_estimator,
    load_run,
    save_run,
    summarize,
)
from .pngio import read_png16, write_png16
from .report import ReportFormat, colorize_errors, parse_csv_run, render_report, write_error_map
from .synth import (
    AlbedoDistribution,
    Blend,
    BlendAxis,
    SynthConfig,
    SynthSample,
    emit_dataset,
    generate_scene,
    load_synth_config,
    make_sample,
    render,
    synth_config_from_dict,
)

__version__ = "0.1.0"
