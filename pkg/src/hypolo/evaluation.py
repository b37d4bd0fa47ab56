"""ROC analysis of outlier scores and AUC sweeps over the neighbourhood size."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .detectors import detect
from .errors import DegenerateLabels
from .neighbors import build_index, get_metric

METHOD_METRIC = {"hlof": "hyperbolic", "hloop": "hyperbolic", "lof": "euclidean", "loop": "euclidean"}


@dataclass(frozen=True)
class RocResult:
    auc: float
    fpr: np.ndarray
    tpr: np.ndarray
    n_pos: int
    n_neg: int

    @property
    def roc_points(self):
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def _as_mask(labels) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.dtype == bool:
        return labels
    if labels.dtype.kind in "iu":
        return labels.astype(bool)
    unknown = set(labels.tolist()) - {"inlier", "outlier"}
    if unknown:
        raise ValueError(f"labels must be 'inlier'/'outlier', got {sorted(unknown)[:3]}")
    return labels == "outlier"


def roc_curve(scores, labels):
    """ROC points with one threshold per distinct score, descending."""
    scores = np.asarray(scores, dtype=np.float64)
    pos = _as_mask(labels)
    order = np.argsort(-scores, kind="stable")
    s, p = scores[order], pos[order]
    tp = np.cumsum(p)
    fp = np.cumsum(~p)
    # last index of each run of equal scores
    last = np.r_[np.flatnonzero(s[1:] != s[:-1]), len(s) - 1]
    tpr = np.r_[0.0, tp[last] / max(tp[-1], 1)]
    fpr = np.r_[0.0, fp[last] / max(fp[-1], 1)]
    return fpr, tpr


def auc_roc(scores, labels) -> RocResult:
    """Area under the ROC curve via the Mann-Whitney rank statistic.

    Tied (outlier, inlier) pairs count one half, which equals the trapezoidal
    area under :func:`roc_curve`.

    Raises
    ------
    DegenerateLabels
        If the labels contain only one class.
    """
    scores = np.asarray(scores, dtype=np.float64)
    pos = _as_mask(labels)
    if scores.shape != pos.shape:
        raise ValueError(f"{len(scores)} scores for {len(pos)} labels")
    if np.isnan(scores).any():
        raise ValueError("scores contain NaN")
    n_pos = int(pos.sum())
    n_neg = len(pos) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels(f"need both classes, got {n_pos} outliers and {n_neg} inliers")
    ranks = rankdata(scores, method="average")
    u = float(np.sum(ranks[pos])) - n_pos * (n_pos + 1) / 2.0
    fpr, tpr = roc_curve(scores, pos)
    return RocResult(auc=u / (n_pos * n_neg), fpr=fpr, tpr=tpr, n_pos=n_pos, n_neg=n_neg)


def trapezoid_auc(fpr, tpr) -> float:
    fpr = np.asarray(fpr)
    tpr = np.asarray(tpr)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def sweep_k(data, method: str, k_values, phi: float | None = None, *,
            threads: int | None = None) -> list[tuple[int, float]]:
    """One detector run and one AUC per ``k``, in ascending ``k`` order.

    ``method`` is one of ``hlof``, ``hloop``, ``lof``, ``loop``. The pairwise
    distance matrix is computed once and shared by all runs.
    """
    if method not in METHOD_METRIC:
        raise ValueError(f"unknown method {method!r}")
    labels = data.outlier_mask
    metric = get_metric(METHOD_METRIC[method])
    dist = metric.pairwise(data.points)
    ks = sorted(int(k) for k in k_values)
    if method in ("hlof", "lof") and phi is not None:
        phi = None

    def one(k):
        index = build_index(data, k, metric, distances=dist)
        report = detect(data, method, k, phi, index=index)
        return k, auc_roc(report.scores, labels).auc

    if threads is None or threads <= 1:
        return [one(k) for k in ks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, ks))
