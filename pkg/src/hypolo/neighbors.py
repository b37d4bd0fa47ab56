"""k-nearest-neighbour neighbourhoods under a pluggable metric.

A neighbourhood is the closed k-distance ball
``N_k(p) = {q != p : d(p, q) <= d_k(p)}``, so it holds more than ``k`` points
whenever there are ties at the k-th distance. Neighbour lists are ordered by
``(distance, id)`` and every downstream sum follows that order, which makes
results reproducible across strategies and thread counts.
"""
from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import geometry
from .errors import EmptyDataset, KTooLarge, UnknownId


@dataclass(frozen=True)
class Metric:
    """A named distance on disk points.

    ``elementwise(xa, ya, xb, yb)`` must evaluate every pair by the same
    operation sequence, whether it is called on scalars or on arrays.
    """

    name: str
    elementwise: Callable

    def distance(self, a, b) -> float:
        return float(self.elementwise(np.float64(a[0]), np.float64(a[1]),
                                      np.float64(b[0]), np.float64(b[1])))

    def to_many(self, points: np.ndarray, i: int, ids: np.ndarray) -> np.ndarray:
        """Distances from point ``i`` to the points ``ids``."""
        return self.elementwise(points[i, 0], points[i, 1], points[ids, 0], points[ids, 1])

    def pairwise(self, points: np.ndarray) -> np.ndarray:
        p = np.asarray(points, dtype=np.float64)
        return self.elementwise(p[:, 0, None], p[:, 1, None], p[None, :, 0], p[None, :, 1])


HYPERBOLIC = Metric("hyperbolic", geometry._rao)
EUCLIDEAN = Metric("euclidean", geometry._euclid)
METRICS = {m.name: m for m in (HYPERBOLIC, EUCLIDEAN)}


def get_metric(metric) -> Metric:
    if isinstance(metric, Metric):
        return metric
    try:
        return METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; expected one of {sorted(METRICS)}") from None


@dataclass(frozen=True, eq=False)
class NeighborhoodIndex:
    """Per-point neighbour lists over a fixed point set.

    Attributes
    ----------
    points : ndarray, shape (n, 2)
    k : int
    metric : Metric
    neighbor_ids, neighbor_dists : tuple of ndarray
        One array per point, sorted by ``(distance, id)``, never containing
        the point itself, length ``>= k``.
    k_distance : ndarray, shape (n,)
        Distance to the k-th nearest other point.
    """

    points: np.ndarray
    k: int
    metric: Metric
    neighbor_ids: tuple
    neighbor_dists: tuple
    k_distance: np.ndarray

    def __len__(self):
        return len(self.points)

    def _check(self, i):
        if not (isinstance(i, (int, np.integer)) and 0 <= i < len(self.points)):
            raise UnknownId(i)
        return int(i)

    def distance(self, p: int, o: int) -> float:
        p, o = self._check(p), self._check(o)
        return float(self.metric.to_many(self.points, p, np.array([o]))[0])

    def reach_dist(self, p: int, o: int) -> float:
        """``max(k_distance(p), d(p, o))``."""
        p, o = self._check(p), self._check(o)
        return max(float(self.k_distance[p]), self.distance(p, o))

    def standard_distance(self, o: int) -> float:
        """Root-mean-square distance from ``o`` to its neighbourhood."""
        o = self._check(o)
        d = self.neighbor_dists[o]
        return math.sqrt(math.fsum(d * d) / len(d))

    def standard_distances(self) -> np.ndarray:
        return np.array([self.standard_distance(i) for i in range(len(self))])


def _neighborhood(ids: np.ndarray, dists: np.ndarray, k: int):
    order = np.lexsort((ids, dists))
    ids, dists = ids[order], dists[order]
    kd = dists[k - 1]
    m = int(np.searchsorted(dists, kd, side="right"))
    return ids[:m], dists[:m], kd


def _run(fn, n, threads):
    if threads is None or threads <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n), chunksize=max(1, n // (4 * threads))))


def build_index(data, k: int, metric="hyperbolic", strategy: str = "brute", *,
                distances: np.ndarray | None = None, threads: int | None = None) -> NeighborhoodIndex:
    """Build the k-neighbourhoods of every point.

    Parameters
    ----------
    data : Dataset or array of shape (n, 2)
    k : int
        ``1 <= k <= n - 1``.
    metric : {"hyperbolic", "euclidean"} or Metric
    strategy : {"brute", "vptree"}
        Both produce identical results; brute force is the reference.
    distances : ndarray, optional
        Precomputed pairwise matrix for the brute strategy, e.g. shared across
        several values of ``k``.
    threads : int, optional
        Worker threads for the per-point queries. Output does not depend on it.
    """
    points = np.asarray(getattr(data, "points", data), dtype=np.float64).reshape(-1, 2)
    n = len(points)
    if n == 0:
        raise EmptyDataset("cannot index an empty dataset")
    points = geometry.validate_points(points)
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= n - 1):
        raise KTooLarge(f"k must be in [1, {n - 1}] for {n} points, got {k!r}")
    k = int(k)
    metric = get_metric(metric)
    all_ids = np.arange(n)

    if strategy == "brute":
        if distances is None:
            distances = metric.pairwise(points)

        def query(i):
            others = np.delete(all_ids, i)
            return _neighborhood(others, distances[i, others], k)

    elif strategy == "vptree":
        tree = VPTree(points, metric)

        def query(i):
            kd = tree.kth_distance(i, k)
            ids, dists = tree.within(i, kd)
            return _neighborhood(ids, dists, k)

    else:
        raise ValueError(f"unknown strategy {strategy!r}; expected 'brute' or 'vptree'")

    results = _run(query, n, threads)
    return NeighborhoodIndex(
        points=points,
        k=k,
        metric=metric,
        neighbor_ids=tuple(r[0] for r in results),
        neighbor_dists=tuple(r[1] for r in results),
        k_distance=np.array([r[2] for r in results], dtype=np.float64),
    )


class _Node:
    __slots__ = ("vantage", "mu", "inside", "outside", "bucket")

    def __init__(self, vantage=-1, mu=0.0, inside=None, outside=None, bucket=None):
        self.vantage = vantage
        self.mu = mu
        self.inside = inside
        self.outside = outside
        self.bucket = bucket


class VPTree:
    """Vantage-point tree over the rows of ``points``.

    The first id of each subset is its vantage point; the remaining ids are
    split at the median distance to it (``<= mu`` inside, ``> mu`` outside).
    Small subsets become leaf buckets scanned in one vectorised call.

    Pruning uses the triangle inequality with a small slack so that rounding
    never discards a point exactly at the search radius; candidates are then
    filtered on their computed distances, so the slack costs speed only.
    """

    LEAF_SIZE = 32

    def __init__(self, points: np.ndarray, metric="hyperbolic"):
        self.points = np.asarray(points, dtype=np.float64)
        self.metric = get_metric(metric)
        self.root = self._build(np.arange(len(self.points)))

    def _build(self, ids: np.ndarray):
        if len(ids) == 0:
            return None
        if len(ids) <= self.LEAF_SIZE:
            return _Node(bucket=ids)
        v, rest = ids[0], ids[1:]
        d = self.metric.to_many(self.points, v, rest)
        mu = float(np.median(d))
        inner = d <= mu
        return _Node(vantage=int(v), mu=mu,
                     inside=self._build(rest[inner]), outside=self._build(rest[~inner]))

    @staticmethod
    def _slack(radius):
        return 1e-9 * (1.0 + radius)

    def kth_distance(self, q: int, k: int) -> float:
        """Distance from point ``q`` to its k-th nearest other point."""
        heap: list[float] = []  # negated distances, size <= k

        def tau():
            return -heap[0] if len(heap) == k else math.inf

        def offer(d):
            if len(heap) < k:
                heapq.heappush(heap, -d)
            elif d < -heap[0]:
                heapq.heapreplace(heap, -d)

        stack = [(self.root, 0.0)]
        while stack:
            node, bound = stack.pop()
            if node is None:
                continue
            t = tau()
            if bound > t + self._slack(t):
                continue
            if node.bucket is not None:
                ids = node.bucket[node.bucket != q]
                for d in self.metric.to_many(self.points, q, ids):
                    offer(float(d))
                continue
            dv = float(self.metric.to_many(self.points, q, np.array([node.vantage]))[0])
            if node.vantage != q:
                offer(dv)
            # lower bounds on d(q, x) for x on each side of the split
            inside = (node.inside, max(bound, dv - node.mu))
            outside = (node.outside, max(bound, node.mu - dv))
            # the nearer side goes on top of the stack
            stack += [outside, inside] if dv <= node.mu else [inside, outside]
        if len(heap) < k:
            raise KTooLarge(f"fewer than {k} other points in the tree")
        return -heap[0]

    def within(self, q: int, radius: float):
        """Ids and distances of all points ``!= q`` with ``d(q, .) <= radius``."""
        out_ids, out_d = [], []
        slack = self._slack(radius)
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node is None:
                continue
            if node.bucket is not None:
                ids = node.bucket[node.bucket != q]
                d = self.metric.to_many(self.points, q, ids)
                keep = d <= radius
                out_ids.append(ids[keep])
                out_d.append(d[keep])
                continue
            dv = float(self.metric.to_many(self.points, q, np.array([node.vantage]))[0])
            if node.vantage != q and dv <= radius:
                out_ids.append(np.array([node.vantage]))
                out_d.append(np.array([dv]))
            if dv - node.mu <= radius + slack:
                stack.append(node.inside)
            if node.mu - dv <= radius + slack:
                stack.append(node.outside)
        if not out_ids:
            return np.empty(0, dtype=np.int64), np.empty(0)
        return np.concatenate(out_ids).astype(np.int64), np.concatenate(out_d)
