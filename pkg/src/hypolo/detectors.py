"""Density-based local outlier scores: LOF and LoOP, in hyperbolic or Euclidean form.

``hlof`` is the classical local outlier factor with the Rao distance in place
of the Euclidean one. ``hloop`` follows the local outlier probability recipe,
but turns the standard distance of a context set into a probabilistic
distance through the quantile of the hyperbolic Gaussian radius rather than
the half-normal one:

1. context set ``S = N_k(o)``
2. standard distance ``sigma_r = sqrt(mean_{s in S} d(o, s)^2)``
3. ``pdist(o) = G^{-1}(phi; sigma_r)``, i.e. ``lambda_H(sigma_r) * sigma_r``
4. ``PLOF(o) = pdist(o) / mean_{s in S} pdist(s) - 1``
5. ``score(o) = max(0, erf(PLOF(o) / (nPLOF sqrt 2)))`` with
   ``nPLOF = mean(lambda) * sqrt(mean(PLOF^2))``

Passing ``metric="euclidean"`` together with :func:`gaussian_quantile`
reproduces the Euclidean method exactly; :func:`loop_euclidean` does that.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import erf, erfinv

from . import hgauss
from .neighbors import NeighborhoodIndex, build_index, get_metric

DEFAULT_PHI = 0.95
PLOF_FLOOR = 1e-12
METHODS = ("hlof", "hloop")

# erf rounds to exactly 1.0 once its argument passes ~5.9; scores are reported
# rounded toward zero so that they stay inside the open interval.
_MAX_PROBABILITY = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class DetectorConfig:
    k: int
    method: str = "hloop"
    metric: str = "hyperbolic"
    phi: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        object.__setattr__(self, "metric", get_metric(self.metric).name)
        if self.method == "hloop":
            phi = DEFAULT_PHI if self.phi is None else float(self.phi)
            if not 0.0 < phi < 1.0:
                raise ValueError(f"phi must lie strictly between 0 and 1, got {phi!r}")
            object.__setattr__(self, "phi", phi)
        elif self.phi is not None:
            raise ValueError("phi only applies to method 'hloop'")

    def as_dict(self) -> dict:
        return {"k": self.k, "method": self.method, "metric": self.metric, "phi": self.phi}


@dataclass(eq=False)
class ScoreReport:
    """Per-point scores, aligned with the dataset ids ``0..n-1``.

    For LoOP-type runs ``sigma_r``, ``lam``, ``pdist`` and ``plof`` hold the
    per-point intermediates and ``nplof`` the dataset normaliser. For LOF-type
    runs ``lrd`` holds the local reachability densities. ``degenerate`` flags
    points whose neighbourhood collapses onto the point itself (infinite lrd,
    or zero standard distance).
    """

    scores: np.ndarray
    config: DetectorConfig
    degenerate: np.ndarray
    quantile: str = "hyperbolic"
    lrd: np.ndarray | None = None
    sigma_r: np.ndarray | None = None
    lam: np.ndarray | None = None
    pdist: np.ndarray | None = None
    plof: np.ndarray | None = None
    nplof: float | None = None
    extra: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.scores)


def hyperbolic_quantile(phi: float, sigma: np.ndarray) -> np.ndarray:
    """Radius within which the hyperbolic Gaussian puts mass ``phi``."""
    return hgauss.quantile_radii(phi, sigma)


def gaussian_quantile(phi: float, sigma: np.ndarray) -> np.ndarray:
    """Half-normal quantile ``sqrt(2) erfinv(phi) * sigma``."""
    return euclidean_lambda(phi) * np.asarray(sigma, dtype=np.float64)


def euclidean_lambda(phi: float) -> float:
    return math.sqrt(2.0) * float(erfinv(phi))


QUANTILES = {"hyperbolic": hyperbolic_quantile, "gaussian": gaussian_quantile}


def _index_for(data, config: DetectorConfig, index, strategy, threads):
    if index is not None:
        if index.k != config.k or index.metric.name != config.metric:
            raise ValueError("supplied index does not match the configuration")
        return index
    return build_index(data, config.k, config.metric, strategy, threads=threads)


def local_reachability_density(index: NeighborhoodIndex) -> np.ndarray:
    """``|N_k(p)| / sum_{o in N_k(p)} max(k_distance(o), d(p, o))``; ``inf`` if the sum is 0."""
    kd = index.k_distance
    lrd = np.empty(len(index))
    for p, (ids, d) in enumerate(zip(index.neighbor_ids, index.neighbor_dists)):
        total = math.fsum(np.maximum(kd[ids], d))
        lrd[p] = len(ids) / total if total > 0 else math.inf
    return lrd


def hlof(data, config: DetectorConfig, *, index: NeighborhoodIndex | None = None,
         strategy: str = "brute", threads: int | None = None) -> ScoreReport:
    """Local outlier factor under the configured metric.

    Points with infinite lrd (all neighbours coincide with them) are flagged
    ``degenerate`` and scored 1. A point with finite lrd whose neighbours all
    have infinite lrd scores ``inf``.
    """
    if config.method != "hlof":
        config = DetectorConfig(config.k, "hlof", config.metric)
    index = _index_for(data, config, index, strategy, threads)
    lrd = local_reachability_density(index)
    degenerate = np.isinf(lrd)
    scores = np.empty(len(index))
    for p, ids in enumerate(index.neighbor_ids):
        if degenerate[p]:
            scores[p] = 1.0
            continue
        scores[p] = math.fsum(lrd[ids]) / len(ids) / lrd[p]
    return ScoreReport(scores=scores, config=config, degenerate=degenerate, quantile="none", lrd=lrd)


def lof_euclidean(data, k: int, **kwargs) -> ScoreReport:
    return hlof(data, DetectorConfig(k, "hlof", "euclidean"), **kwargs)


def hloop(data, config: DetectorConfig, *, index: NeighborhoodIndex | None = None,
          quantile: str | Callable = "hyperbolic", strategy: str = "brute",
          threads: int | None = None) -> ScoreReport:
    """Local outlier probability with a pluggable radius quantile.

    Parameters
    ----------
    data : Dataset or (n, 2) array
    config : DetectorConfig
        ``method`` must be ``"hloop"``.
    index : NeighborhoodIndex, optional
        Reuse a prebuilt index (must match ``config.k`` and ``config.metric``).
    quantile : {"hyperbolic", "gaussian"} or callable
        ``quantile(phi, sigma_array) -> radius_array``.

    Notes
    -----
    Sums use ``math.fsum`` so they do not depend on summation order, and
    ``|PLOF| <= 1e-12`` is treated as rounding noise and set to 0.
    A point whose standard distance is 0 gets ``pdist = 0`` and is left out of
    the mean lambda. If the expected neighbour pdist is 0 the PLOF is 0 when
    the point's own pdist is 0 too, and ``inf`` otherwise; infinite PLOFs do
    not enter ``nPLOF`` and score the largest double below 1.
    """
    if config.method != "hloop":
        raise ValueError("hloop needs a config with method='hloop'")
    qname = quantile if isinstance(quantile, str) else getattr(quantile, "__name__", "custom")
    qfun = QUANTILES[quantile] if isinstance(quantile, str) else quantile
    index = _index_for(data, config, index, strategy, threads)
    n = len(index)
    phi = config.phi

    sigma_r = index.standard_distances()
    degenerate = sigma_r == 0.0
    pdist = np.zeros(n)
    lam = np.full(n, np.nan)
    live = ~degenerate
    if live.any():
        pdist[live] = qfun(phi, sigma_r[live])
        lam[live] = pdist[live] / sigma_r[live]

    expected = np.array([math.fsum(pdist[ids]) / len(ids) for ids in index.neighbor_ids])
    plof = np.zeros(n)
    pos = expected > 0
    plof[pos] = pdist[pos] / expected[pos] - 1.0
    plof[np.abs(plof) <= PLOF_FLOOR] = 0.0
    plof[~pos & (pdist > 0)] = math.inf

    finite = np.isfinite(plof)
    lam_bar = math.fsum(lam[live]) / int(live.sum()) if live.any() else 0.0
    n_fin = int(finite.sum())
    nplof = lam_bar * math.sqrt(math.fsum(plof[finite] ** 2) / n_fin) if n_fin else 0.0

    scores = np.zeros(n)
    if nplof > 0:
        scores[finite] = np.maximum(0.0, erf(plof[finite] / (nplof * math.sqrt(2.0))))
    scores[~finite] = 1.0
    scores = np.minimum(scores, _MAX_PROBABILITY)
    return ScoreReport(scores=scores, config=config, degenerate=degenerate, quantile=qname,
                       sigma_r=sigma_r, lam=lam, pdist=pdist, plof=plof, nplof=nplof)


def loop_euclidean(data, k: int, phi: float = DEFAULT_PHI, **kwargs) -> ScoreReport:
    """Classical LoOP: Euclidean distances and ``lambda = sqrt(2) erfinv(phi)``."""
    config = DetectorConfig(k, "hloop", "euclidean", phi)
    return hloop(data, config, quantile="gaussian", **kwargs)


def detect(data, method: str, k: int, phi: float | None = None, **kwargs) -> ScoreReport:
    """Dispatch on the four method names used by the command line.

    ``hlof``/``hloop`` run in the hyperbolic metric, ``lof``/``loop`` are their
    Euclidean counterparts.
    """
    if method == "hlof":
        if phi is not None:
            raise ValueError("phi only applies to LoOP-type methods")
        return hlof(data, DetectorConfig(k, "hlof", "hyperbolic"), **kwargs)
    if method == "lof":
        if phi is not None:
            raise ValueError("phi only applies to LoOP-type methods")
        return lof_euclidean(data, k, **kwargs)
    if method == "hloop":
        return hloop(data, DetectorConfig(k, "hloop", "hyperbolic", phi), **kwargs)
    if method == "loop":
        return loop_euclidean(data, k, DEFAULT_PHI if phi is None else phi, **kwargs)
    raise ValueError(f"unknown method {method!r}; expected hlof, hloop, lof or loop")
