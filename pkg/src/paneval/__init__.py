"""paneval: evaluation metrics for generated comic panels and stories.

Three metric families, one CLI:

- story scores: gamma-blended cosine similarity of summary embeddings
  against a target and a reference corpus (storyscore),
- SSIM: Gaussian-window structural similarity over image batches (ssim),
- FID: Frechet distance between Gaussian fits of feature batches (fid),

plus file I/O for features (features_io), image decoding (image_io),
embedding providers with a content-addressed cache (embed_client), and
JSON/Markdown score reports (report).
"""

from .embed_client import ProviderConfig, embed_texts, text_hash
from .errors import (
    DecodeError,
    DegenerateInputError,
    DimensionMismatchError,
    EmbeddingNotFoundError,
    FormatError,
    InsufficientSamplesError,
    InvalidInputError,
    ManifestError,
    NotPsdError,
    NumericError,
    PanevalError,
    ProtocolError,
    ProviderError,
    ProviderUnreachableError,
    WriteError,
)
from .features_io import read_features, write_features
from .fid import FidOptions, GaussianStats, fid, frechet_distance, gaussian_stats
from .image_io import ImageBatch, load_batch, load_gray, resize_bilinear
from .linalg import cosine_similarity, covariance, mean_vector, sqrtm_psd
from .report import ReportRow, ScoreReport, load_report, merge_reports
from .ssim import (
    BatchSsimResult,
    PairScore,
    SsimParams,
    SsimResult,
    batch_ssim,
    gaussian_kernel,
    ssim,
)
from .storyscore import (
    StoryCorpusManifest,
    StoryDoc,
    StoryScoreRow,
    evaluate_manifest,
    load_manifest,
    plot_score,
    sim,
    story_score,
)
from .version import __version__

__all__ = [
    "__version__",
    "BatchSsimResult",
    "DecodeError",
    "DegenerateInputError",
    "DimensionMismatchError",
    "EmbeddingNotFoundError",
    "FidOptions",
    "FormatError",
    "GaussianStats",
    "ImageBatch",
    "InsufficientSamplesError",
    "InvalidInputError",
    "ManifestError",
    "NotPsdError",
    "NumericError",
    "PairScore",
    "PanevalError",
    "ProtocolError",
    "ProviderConfig",
    "ProviderError",
    "ProviderUnreachableError",
    "ReportRow",
    "ScoreReport",
    "SsimParams",
    "SsimResult",
    "StoryCorpusManifest",
    "StoryDoc",
    "StoryScoreRow",
    "WriteError",
    "batch_ssim",
    "cosine_similarity",
    "covariance",
    "embed_texts",
    "evaluate_manifest",
    "fid",
    "frechet_distance",
    "gaussian_kernel",
    "gaussian_stats",
    "load_batch",
    "load_gray",
    "load_manifest",
    "load_report",
    "mean_vector",
    "merge_reports",
    "plot_score",
    "read_features",
    "resize_bilinear",
    "sim",
    "sqrtm_psd",
    "ssim",
    "story_score",
    "text_hash",
    "write_features",
]
