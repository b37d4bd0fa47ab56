"""Points of the Poincare disk and the Rao (geodesic) distance between them.

All distance routines funnel through :func:`_rao`, which works elementwise on
scalars and arrays alike. Because every pair is evaluated by the same sequence
of IEEE operations, a distance computed inside a full pairwise matrix is
bit-identical to the same distance computed on its own. The neighbor search
relies on this to make its two strategies agree exactly.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import NonFinite, OutsideDisk

BOUNDARY_MARGIN = 1e-9


class DiskPoint(NamedTuple):
    x: float
    y: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y)


def validate_point(p, margin: float = BOUNDARY_MARGIN) -> DiskPoint:
    """Return ``p`` as a :class:`DiskPoint` or raise.

    Parameters
    ----------
    p : pair of numbers
        Raw ``(x, y)`` coordinates.
    margin : float
        Points with Euclidean norm ``>= 1 - margin`` are rejected.

    Raises
    ------
    NonFinite
        If a coordinate is NaN or infinite.
    OutsideDisk
        If the point is not strictly inside the shrunk disk.
    """
    try:
        x, y = (float(c) for c in p)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"expected a coordinate pair, got {p!r}") from exc
    if not (math.isfinite(x) and math.isfinite(y)):
        raise NonFinite(f"non-finite coordinate in ({x}, {y})")
    norm = math.sqrt(x * x + y * y)
    if norm >= 1.0 - margin:
        raise OutsideDisk(f"point ({x}, {y}) has norm {norm!r} >= 1 - {margin}")
    return DiskPoint(x, y)


def validate_points(coords, margin: float = BOUNDARY_MARGIN) -> np.ndarray:
    """Vectorised :func:`validate_point` for an ``(n, 2)`` array.

    The error message names the first offending row (0-based).
    """
    arr = np.asarray(coords, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) array, got shape {arr.shape}")
    finite = np.isfinite(arr).all(axis=1)
    if not finite.all():
        row = int(np.flatnonzero(~finite)[0])
        raise NonFinite(f"row {row}: non-finite coordinate {tuple(arr[row])}")
    norms = np.sqrt(arr[:, 0] * arr[:, 0] + arr[:, 1] * arr[:, 1])
    bad = norms >= 1.0 - margin
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise OutsideDisk(f"row {row}: point {tuple(arr[row])} has norm {norms[row]!r}")
    return arr


def _one_minus_sq_norm(x, y):
    return 1.0 - (x * x + y * y)


def _rao(xa, ya, xb, yb):
    # cosh(d) = 1 + 2u with u = |a-b|^2 / ((1-|a|^2)(1-|b|^2)), and
    # cosh(d) = 1 + 2 sinh^2(d/2), hence d = 2 asinh(sqrt(u)). This form keeps
    # full relative precision for nearby points where arccosh(1 + 2u) loses it.
    # hypot avoids underflow of |a-b|^2 for tiny separations.
    den = _one_minus_sq_norm(xa, ya) * _one_minus_sq_norm(xb, yb)
    return 2.0 * np.arcsinh(np.hypot(xa - xb, ya - yb) / np.sqrt(den))


def _euclid(xa, ya, xb, yb):
    return np.hypot(xa - xb, ya - yb)


def rao_distance(a, b) -> float:
    """Geodesic distance between two disk points.

    ``arcosh(1 + 2|a-b|^2 / ((1-|a|^2)(1-|b|^2)))``, evaluated through the
    algebraically equivalent ``2 asinh`` form. Inputs are assumed valid.
    """
    return float(_rao(np.float64(a[0]), np.float64(a[1]), np.float64(b[0]), np.float64(b[1])))


def conformal_factor(p) -> float:
    """``2 / (1 - |p|^2)``, the scale of the hyperbolic metric at ``p``."""
    x, y = float(p[0]), float(p[1])
    return 2.0 / (1.0 - (x * x + y * y))


def rao_distance_from_origin(r):
    """Closed form ``2 artanh(r)`` for a point at Euclidean radius ``r``."""
    return 2.0 * np.arctanh(r)


def pairwise_rao(points: np.ndarray, others: np.ndarray | None = None) -> np.ndarray:
    """Matrix of Rao distances between rows of ``points`` and ``others``."""
    p = np.asarray(points, dtype=np.float64)
    q = p if others is None else np.asarray(others, dtype=np.float64)
    return _rao(p[:, 0, None], p[:, 1, None], q[None, :, 0], q[None, :, 1])


def pairwise_euclidean(points: np.ndarray, others: np.ndarray | None = None) -> np.ndarray:
    p = np.asarray(points, dtype=np.float64)
    q = p if others is None else np.asarray(others, dtype=np.float64)
    return _euclid(p[:, 0, None], p[:, 1, None], q[None, :, 0], q[None, :, 1])


def rotate(points: np.ndarray, angle: float) -> np.ndarray:
    """Rotate disk points about the origin, an isometry of the Rao metric."""
    c, s = math.cos(angle), math.sin(angle)
    p = np.asarray(points, dtype=np.float64)
    return np.column_stack((c * p[:, 0] - s * p[:, 1], s * p[:, 0] + c * p[:, 1]))
