"""Points on the unit sphere, uniform random directions, and the geodesic metric.

The normalized geodesic distance between unit vectors x and y is
arccos(x.y)/pi, so antipodal points are at distance 1.  A direction theta
"separates" x and y when sgn(x.theta) != sgn(y.theta); for theta uniform on
the sphere the probability of separation equals the geodesic distance, which
is what makes one-bit sign maps approximate the metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Union

import numpy as np

#: Tolerance on |norm - 1| for vectors claimed to lie on the sphere.
UNIT_NORM_TOL = 1e-9


class DimensionMismatchError(ValueError):
    """Operands live on spheres of different ambient dimension."""


class PointSetParseError(ValueError):
    """A points CSV file is malformed; the message names the offending row."""


@dataclass(frozen=True, eq=False)
class UnitVector:
    """A point on S^{N-1}, stored as a read-only float64 array of length N."""

    components: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.components, dtype=np.float64, copy=True).reshape(-1)
        if arr.size < 2:
            raise ValueError(f"ambient dimension must be >= 2, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vector components must be finite")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"vector norm {norm!r} deviates from 1 by more than {UNIT_NORM_TOL}")
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def dim(self) -> int:
        return self.components.size

    def dot(self, other: "UnitVector") -> float:
        if self.dim != other.dim:
            raise DimensionMismatchError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return float(self.components @ other.components)

    def __neg__(self) -> "UnitVector":
        return UnitVector(-self.components)


@dataclass(frozen=True, eq=False)
class PointSet:
    """An ordered set of points on a common sphere, stored as an (n, dim) matrix."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=np.float64, copy=True)
        if mat.ndim != 2:
            raise ValueError("point set must be a 2-D array of shape (n, dim)")
        if mat.shape[1] < 2:
            raise ValueError(f"ambient dimension must be >= 2, got {mat.shape[1]}")
        if mat.shape[0] < 1:
            raise ValueError("point set must contain at least one point")
        if not np.all(np.isfinite(mat)):
            raise ValueError("point components must be finite")
        norms = np.linalg.norm(mat, axis=1)
        bad = np.nonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)[0]
        if bad.size:
            raise ValueError(f"point {bad[0]} has norm {norms[bad[0]]!r}, not unit within {UNIT_NORM_TOL}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_vectors(cls, vectors: Iterable[UnitVector]) -> "PointSet":
        rows = [v.components for v in vectors]
        if not rows:
            raise ValueError("point set must contain at least one point")
        dims = {r.size for r in rows}
        if len(dims) != 1:
            raise DimensionMismatchError(f"points have mixed dimensions {sorted(dims)}")
        return cls(np.stack(rows))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def point(self, i: int) -> UnitVector:
        return UnitVector(self.matrix[i])

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        for i in range(self.n):
            yield self.point(i)


def sample_direction(dim: int, rng: np.random.Generator) -> UnitVector:
    """Draw one direction uniformly on S^{dim-1}.

    Realized by normalizing a vector of independent standard normals, the
    standard rotation-invariant construction.
    """
    if dim < 2:
        raise ValueError(f"dimension must be >= 2, got {dim}")
    while True:
        raw = rng.standard_normal(dim)
        norm = float(np.linalg.norm(raw))
        if norm > 1e-12:
            return UnitVector(raw / norm)


def geodesic_distance(x: UnitVector, y: UnitVector) -> float:
    """Normalized great-circle distance arccos(x.y)/pi, in [0, 1].

    The dot product is clamped to [-1, 1] to guard floating-point overshoot
    at near-parallel vectors.
    """
    d = x.dot(y)
    return math.acos(min(1.0, max(-1.0, d))) / math.pi


def in_wedge(x: UnitVector, y: UnitVector, theta: UnitVector) -> bool:
    """True iff theta's hyperplane separates x from y, i.e. sgn(x.theta) != sgn(y.theta).

    Sign convention: sgn(t) = +1 for t >= 0.  The tie t == 0 has probability
    zero for random directions; fixing it makes the predicate deterministic.
    """
    return (x.dot(theta) >= 0.0) != (y.dot(theta) >= 0.0)


def orthonormal_set(n: int, dim: int) -> PointSet:
    """The first n standard basis vectors of R^dim as a PointSet."""
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if n > dim:
        raise ValueError(f"cannot fit {n} pairwise orthogonal unit vectors in dimension {dim}")
    return PointSet(np.eye(n, dim))


def read_point_set(
    source: Union[str, Path, IO[bytes], IO[str]],
    normalize: bool = False,
) -> PointSet:
    """Parse a points CSV: one vector per line, comma-separated decimals, no header.

    With ``normalize`` each row is rescaled to unit norm (zero rows are
    rejected); without it, rows whose norm deviates from 1 by more than
    ``UNIT_NORM_TOL`` are rejected.  Errors name the offending 1-based row.
    """
    if hasattr(source, "read"):
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    else:
        text = Path(source).read_text(encoding="utf-8")

    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()

    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        parts = line.split(",")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise PointSetParseError(f"row {lineno}: cannot parse components {line!r}") from None
        if len(values) < 2:
            raise PointSetParseError(f"row {lineno}: need at least 2 components, got {len(values)}")
        if not all(math.isfinite(v) for v in values):
            raise PointSetParseError(f"row {lineno}: components must be finite")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise PointSetParseError(f"row {lineno}: ragged row, expected {width} components, got {len(values)}")
        rows.append(values)

    if not rows:
        raise PointSetParseError("empty points file")

    mat = np.array(rows, dtype=np.float64)
    norms = np.linalg.norm(mat, axis=1)
    if normalize:
        zero = np.nonzero(norms < 1e-12)[0]
        if zero.size:
            raise PointSetParseError(f"row {int(zero[0]) + 1}: zero-norm vector cannot be normalized")
        mat = mat / norms[:, None]
    else:
        bad = np.nonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)[0]
        if bad.size:
            i = int(bad[0])
            raise PointSetParseError(f"row {i + 1}: norm {norms[i]!r} is not 1 within {UNIT_NORM_TOL} (pass normalize to rescale)")
    return PointSet(mat)


def write_point_set(points: PointSet, dest: Union[str, Path, IO[str]]) -> None:
    """Write a points CSV in the same format ``read_point_set`` accepts."""
    body = "\n".join(",".join(repr(float(v)) for v in row) for row in points.matrix) + "\n"
    if hasattr(dest, "write"):
        dest.write(body)
    else:
        Path(dest).write_text(body, encoding="utf-8")
