"""Streaming domain-shift detection toolkit for multi-channel EMG-like signals."""

__version__ = "0.1.0"

from .detectors import (  # noqa: F401
    DETECTOR_KINDS,
    DetectorConfig,
    DetectorState,
    DriftEvent,
    Status,
    create_detector,
    detect_series,
)
from .errors import ToolkitError  # noqa: F401
from .evaluate import (  # noqa: F401
    MatchResult,
    ReportRow,
    SynthSegment,
    SynthSpec,
    add_seconds,
    f1_score,
    match_detections,
    run_experiment,
    synth_generate,
)
from .gaussian import GaussianModel, fit_gaussian, kl_gaussian, kl_profile  # noqa: F401
from .kpca import (  # noqa: F401
    center_kernel,
    cosine_kernel_matrix,
    kpca_fit_project,
    separability_score,
)
from .preprocess import (  # noqa: F401
    RmsFrame,
    SlopeVector,
    StreamingRms,
    StreamingSlope,
    rms_extract,
    slope_features,
)
from .scoring import RollingReference, ScorePoint, score_stream  # noqa: F401
from .stream import (  # noqa: F401
    GroundTruth,
    Sample,
    SignalStream,
    Timeline,
    concat_domains,
    drop_zero_channels,
    filter_grasp,
    load_signal_csv,
)
