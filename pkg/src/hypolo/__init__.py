"""Local outlier detection for point sets embedded in the Poincare disk."""

__version__ = "0.1.0"

from .datasets import Dataset, ToySpec, generate_toy, load_embedding, load_mammals, save_embedding
from .detectors import DetectorConfig, ScoreReport, hlof, hloop, lof_euclidean, loop_euclidean
from .evaluation import RocResult, auc_roc, sweep_k
from .geometry import DiskPoint, conformal_factor, rao_distance, validate_point
from .hgauss import HGaussModel, cdf, lambda_h, normalizer, pdf_radial, quantile
from .neighbors import NeighborhoodIndex, build_index

__all__ = [
    "Dataset", "ToySpec", "generate_toy", "load_embedding", "load_mammals", "save_embedding",
    "DetectorConfig", "ScoreReport", "hlof", "hloop", "lof_euclidean", "loop_euclidean",
    "RocResult", "auc_roc", "sweep_k",
    "DiskPoint", "conformal_factor", "rao_distance", "validate_point",
    "HGaussModel", "cdf", "lambda_h", "normalizer", "pdf_radial", "quantile",
    "NeighborhoodIndex", "build_index",
]
