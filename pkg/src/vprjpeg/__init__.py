"""Benchmark harness for place-recognition retrieval under JPEG compression.

Pipeline stages communicate through files: compressed corpora, VPRD
descriptor files, and CSV/JSON reports. See the README for the CLI walk
through; the public API mirrors the stages.
"""

__version__ = "0.1.0"

from .bandwidth import (
    ChannelModel,
    ParetoPoint,
    TransmissionPlan,
    accuracy_bytes_pareto,
    make_plan,
    min_compression_for_budget,
    transfer_time,
)
from .dataset import (
    DatasetManifest,
    GroundTruthEntry,
    ImageRecord,
    ValidationReport,
    accepted_refs,
    list_images,
    load_manifest,
    validate_dataset,
)
from .descriptor import (
    DescriptorSet,
    HogParams,
    compute_hog,
    hog_descriptor_set,
    hog_from_grayscale,
    normalize,
)
from .errors import (
    ConfigError,
    DataError,
    DecodeError,
    EncodeError,
    ManifestError,
    VPRDFormatError,
)
from .jpeg_codec import (
    DEFAULT_LEVELS,
    ENCODER_VERSION,
    CompressionLevel,
    CompressionSweepResult,
    compress_image,
    corpus_dir,
    decode_image,
    psnr,
    read_image,
    sweep_compress,
    to_grayscale,
)
from .matcher import (
    MatchRecord,
    ScoreList,
    best_match,
    cosine_similarity,
    match_all,
    score_list,
    similarity_matrix,
)
from .metrics import (
    DegradationCurve,
    EntropyReport,
    EvaluationResult,
    NonUniformGrid,
    accuracy,
    average_entropy,
    degradation_curve,
    evaluate_pair,
    image_entropy,
    nonuniform_grid,
)
from .vprd import load_descriptor_file, write_descriptor_file
