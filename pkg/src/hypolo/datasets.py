"""Labelled point sets in the Poincare disk: a synthetic toy set and TSV embeddings.

Embedding TSV format (UTF-8, ``\\t`` separated, ``\\n`` line ends)::

    id  x  y  [label]  [name]

``label`` is ``inlier``, ``outlier`` or empty. A first line whose first field
is ``id`` is treated as a header. Ids must be unique and cover ``0..n-1``;
rows are reordered by id.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (DegenerateLabels, DuplicateId, InvalidSpec, NonFinite,
                     OutsideDisk, ParseError)
from .geometry import BOUNDARY_MARGIN, validate_point, validate_points

INLIER = "inlier"
OUTLIER = "outlier"
LABELS = (INLIER, OUTLIER, "")
HEADER = ("id", "x", "y", "label", "name")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered disk points with ids ``0..n-1`` and optional labels and names."""

    points: np.ndarray
    labels: tuple | None = None
    names: tuple | None = None

    def __post_init__(self):
        pts = validate_points(self.points)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        for attr in ("labels", "names"):
            val = getattr(self, attr)
            if val is None:
                continue
            val = tuple(val)
            if len(val) != len(pts):
                raise ValueError(f"{attr} has {len(val)} entries for {len(pts)} points")
            object.__setattr__(self, attr, val)
        if self.labels is not None:
            bad = [lab for lab in self.labels if lab not in LABELS]
            if bad:
                raise ValueError(f"unknown label {bad[0]!r}")

    def __len__(self):
        return len(self.points)

    @property
    def ids(self) -> np.ndarray:
        return np.arange(len(self.points))

    @property
    def outlier_mask(self) -> np.ndarray:
        """Boolean mask of outliers; every point must be labelled."""
        if self.labels is None or any(lab == "" for lab in self.labels):
            raise DegenerateLabels("dataset is not fully labelled")
        return np.array([lab == OUTLIER for lab in self.labels])

    def take(self, order) -> "Dataset":
        """Dataset with rows permuted (or subset) by ``order``; ids are renumbered."""
        order = np.asarray(order)
        pick = (lambda seq: None if seq is None else tuple(seq[i] for i in order))
        return Dataset(self.points[order], pick(self.labels), pick(self.names))


# -- toy data -----------------------------------------------------------------

DEFAULT_CENTERS = ((-0.45, 0.0), (0.45, 0.0))
DEFAULT_OUTLIERS = ((0.0, 0.0), (0.0, 0.35), (0.05, -0.4), (0.6, 0.6), (-0.7, -0.5))


@dataclass(frozen=True)
class ToySpec:
    """Two Gaussian clusters plus fixed outliers.

    ``spread`` is the per-coordinate standard deviation of each cluster, in
    disk (Euclidean) units.
    """

    centers: tuple = DEFAULT_CENTERS
    spread: float = 0.08
    points_per_cluster: int = 40
    outliers: tuple = DEFAULT_OUTLIERS
    seed: int = 0

    def validate(self):
        if len(self.centers) != 2:
            raise InvalidSpec("exactly two cluster centres are required")
        try:
            for p in (*self.centers, *self.outliers):
                validate_point(p)
        except (OutsideDisk, NonFinite, ValueError) as exc:
            raise InvalidSpec(str(exc)) from exc
        if not (math.isfinite(self.spread) and self.spread >= 0):
            raise InvalidSpec(f"spread must be finite and >= 0, got {self.spread!r}")
        if int(self.points_per_cluster) != self.points_per_cluster or self.points_per_cluster < 0:
            raise InvalidSpec("points_per_cluster must be a non-negative integer")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSpec("seed must fit in 64 unsigned bits")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator (numpy's bit generator of that name) seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def standard_normal_pair(rng: np.random.Generator) -> tuple[float, float]:
    """Box-Muller on two uniforms from ``rng.random()``."""
    u1 = rng.random()
    u2 = rng.random()
    rad = math.sqrt(-2.0 * math.log1p(-u1))
    return rad * math.cos(2.0 * math.pi * u2), rad * math.sin(2.0 * math.pi * u2)


def generate_toy(spec: ToySpec | None = None) -> Dataset:
    """Sample the two clusters, then append the outliers.

    Draws landing at norm ``>= 1 - BOUNDARY_MARGIN`` are redrawn.
    """
    spec = ToySpec() if spec is None else spec
    spec.validate()
    rng = make_rng(spec.seed)
    pts = []
    for cx, cy in spec.centers:
        for _ in range(int(spec.points_per_cluster)):
            while True:
                zx, zy = standard_normal_pair(rng)
                x, y = cx + spec.spread * zx, cy + spec.spread * zy
                if math.sqrt(x * x + y * y) < 1.0 - BOUNDARY_MARGIN:
                    break
            pts.append((x, y))
    n_in = len(pts)
    pts.extend(tuple(map(float, p)) for p in spec.outliers)
    labels = (INLIER,) * n_in + (OUTLIER,) * len(spec.outliers)
    names = tuple(f"A{i}" for i in range(spec.points_per_cluster)) \
        + tuple(f"B{i}" for i in range(spec.points_per_cluster)) \
        + tuple(f"C{i}" for i in range(len(spec.outliers)))
    return Dataset(np.array(pts, dtype=np.float64).reshape(-1, 2), labels, names)


# -- TSV ----------------------------------------------------------------------

def _parse_float(text, lineno, what):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"bad {what} value {text!r}", lineno) from None


def parse_embedding(text: str) -> Dataset:
    """Parse embedding TSV content; see the module docstring for the format."""
    rows = {}
    any_label = False
    any_name = False
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.endswith("\r"):
            line = line[:-1]
        if not line.strip():
            continue
        fields = line.split("\t")
        if lineno == 1 and fields[0].strip() == "id":
            continue
        if not 3 <= len(fields) <= 5:
            raise ParseError(f"expected 3 to 5 tab-separated fields, got {len(fields)}", lineno)
        try:
            pid = int(fields[0])
        except ValueError:
            raise ParseError(f"bad id {fields[0]!r}", lineno) from None
        if pid < 0:
            raise ParseError(f"negative id {pid}", lineno)
        x = _parse_float(fields[1], lineno, "x")
        y = _parse_float(fields[2], lineno, "y")
        try:
            validate_point((x, y))
        except OutsideDisk as exc:
            raise OutsideDisk(f"line {lineno}: {exc}") from None
        except NonFinite as exc:
            raise NonFinite(f"line {lineno}: {exc}") from None
        label = fields[3].strip() if len(fields) > 3 else ""
        if label not in LABELS:
            raise ParseError(f"unknown label {label!r}", lineno)
        name = fields[4] if len(fields) > 4 else ""
        if pid in rows:
            raise DuplicateId(f"id {pid} already defined on line {rows[pid][0]}", lineno)
        rows[pid] = (lineno, x, y, label, name)
        any_label |= bool(label)
        any_name |= bool(name)
    if sorted(rows) != list(range(len(rows))):
        missing = sorted(set(range(len(rows))) - set(rows))
        raise ParseError(f"ids must cover 0..{len(rows) - 1}; missing {missing[:5]}")
    ordered = [rows[i] for i in range(len(rows))]
    points = np.array([(r[1], r[2]) for r in ordered], dtype=np.float64).reshape(-1, 2)
    labels = tuple(r[3] for r in ordered) if any_label else None
    names = tuple(r[4] for r in ordered) if any_name else None
    return Dataset(points, labels, names)


def load_embedding(path, format: str = "tsv") -> Dataset:
    """Read a labelled embedding file."""
    if format != "tsv":
        raise ValueError(f"unsupported format {format!r}")
    return parse_embedding(Path(path).read_text(encoding="utf-8"))


def format_embedding(data: Dataset) -> str:
    lines = ["\t".join(HEADER)]
    for i, (x, y) in enumerate(data.points):
        label = data.labels[i] if data.labels is not None else ""
        name = data.names[i] if data.names is not None else ""
        lines.append(f"{i}\t{x:.17g}\t{y:.17g}\t{label}\t{name}")
    return "\n".join(lines) + "\n"


def save_embedding(data: Dataset, path) -> None:
    """Write ``data`` as TSV with a header and 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_embedding(data))


def load_mammals() -> Dataset:
    """The bundled WordNet mammal-closure embedding with 11 non-mammal outliers."""
    text = resources.files("hypolo").joinpath("data/mammals_poincare.tsv").read_text(encoding="utf-8")
    return parse_embedding(text)
