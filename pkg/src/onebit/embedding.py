"""The random m-dimensional one-bit map, bit-packed Hamming codes, and pair checkers.

A map is a list of m uniform directions theta_1..theta_m; a sphere point x is
sent to the m-bit code with bit j = 1 iff x.theta_j >= 0.  The normalized
Hamming distance between two codes is popcount(xor)/m, a multiple of 1/m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, NamedTuple, Union

import numpy as np

from .geometry import DimensionMismatchError, PointSet, UnitVector, geodesic_distance

WORD_BITS = 64
_WORD_MASK = (1 << WORD_BITS) - 1

#: Header of the binary code-set format: magic, version byte, then n and m as
#: 8-byte little-endian integers, then each code's words little-endian.
CODESET_MAGIC = b"OB1J"
CODESET_VERSION = 1


class CodeLengthMismatchError(ValueError):
    """Hamming-space operands have different bit lengths."""


class CodeSetFormatError(ValueError):
    """A serialized code set is malformed or truncated."""


def words_needed(m: int) -> int:
    return (m + WORD_BITS - 1) // WORD_BITS


def _tail_mask(m: int) -> int:
    r = m % WORD_BITS
    return _WORD_MASK if r == 0 else (1 << r) - 1


@dataclass(frozen=True)
class BitCode:
    """An element of the Hamming cube {0,1}^m, packed into 64-bit words.

    Bit j lives in word j // 64 at position j % 64 (little-endian within the
    word); padding bits past m in the final word are zero, so equal codes are
    equal tuples.
    """

    words: tuple[int, ...]
    m: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"code length must be >= 1, got {self.m}")
        expect = words_needed(self.m)
        if len(self.words) != expect:
            raise ValueError(f"expected {expect} words for m={self.m}, got {len(self.words)}")
        for w in self.words:
            if not (0 <= w <= _WORD_MASK):
                raise ValueError("word out of 64-bit range")
        if self.words[-1] & ~_tail_mask(self.m):
            raise ValueError("padding bits past m must be zero")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitCode":
        blist = [1 if b else 0 for b in bits]
        if not blist:
            raise ValueError("code length must be >= 1")
        value = 0
        for j, b in enumerate(blist):
            if b:
                value |= 1 << j
        return cls.from_int(value, len(blist))

    @classmethod
    def from_int(cls, value: int, m: int) -> "BitCode":
        if value < 0 or value >> m:
            raise ValueError(f"value does not fit in {m} bits")
        nw = words_needed(m)
        words = tuple((value >> (WORD_BITS * w)) & _WORD_MASK for w in range(nw))
        return cls(words, m)

    def to_int(self) -> int:
        value = 0
        for w, word in enumerate(self.words):
            value |= word << (WORD_BITS * w)
        return value

    def bit(self, j: int) -> int:
        if not 0 <= j < self.m:
            raise IndexError(f"bit index {j} out of range for m={self.m}")
        return (self.words[j // WORD_BITS] >> (j % WORD_BITS)) & 1

    def bits(self) -> list[int]:
        return [self.bit(j) for j in range(self.m)]

    def complement(self) -> "BitCode":
        return BitCode.from_int(self.to_int() ^ ((1 << self.m) - 1), self.m)

    def to_bytes(self) -> bytes:
        return b"".join(w.to_bytes(8, "little") for w in self.words)

    @classmethod
    def from_bytes(cls, data: bytes, m: int) -> "BitCode":
        nw = words_needed(m)
        if len(data) != 8 * nw:
            raise CodeSetFormatError(f"expected {8 * nw} bytes for m={m}, got {len(data)}")
        words = tuple(int.from_bytes(data[8 * w : 8 * w + 8], "little") for w in range(nw))
        return cls(words, m)


@dataclass(frozen=True, eq=False)
class CodeSet:
    """An ordered sequence of codes sharing one length m."""

    codes: tuple[BitCode, ...]

    def __post_init__(self) -> None:
        if not self.codes:
            raise ValueError("code set must contain at least one code")
        m = self.codes[0].m
        for i, c in enumerate(self.codes):
            if c.m != m:
                raise CodeLengthMismatchError(f"code {i} has m={c.m}, expected {m}")
        object.__setattr__(self, "codes", tuple(self.codes))

    @property
    def n(self) -> int:
        return len(self.codes)

    @property
    def m(self) -> int:
        return self.codes[0].m

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> BitCode:
        return self.codes[i]


@dataclass(frozen=True, eq=False)
class EmbeddingMap:
    """m random unit directions defining a one-bit map, reconstructible from (seed, m, dim)."""

    directions: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        mat = np.array(self.directions, dtype=np.float64, copy=True)
        if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 2:
            raise ValueError("directions must form an (m, dim) matrix with m >= 1, dim >= 2")
        norms = np.linalg.norm(mat, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("every direction must be a unit vector")
        mat.setflags(write=False)
        object.__setattr__(self, "directions", mat)

    @property
    def m(self) -> int:
        return self.directions.shape[0]

    @property
    def dim(self) -> int:
        return self.directions.shape[1]


def sample_map(m: int, dim: int, seed: int) -> EmbeddingMap:
    """Draw m iid uniform directions from a stream deterministically derived from ``seed``.

    Calling twice with equal (m, dim, seed) reproduces the map bit-exactly.
    """
    if m < 1:
        raise ValueError(f"target dimension m must be >= 1, got {m}")
    if dim < 2:
        raise ValueError(f"ambient dimension must be >= 2, got {dim}")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((m, dim))
    norms = np.linalg.norm(raw, axis=1)
    while np.any(norms < 1e-12):  # pragma: no cover - probability ~0
        redo = norms < 1e-12
        raw[redo] = rng.standard_normal((int(redo.sum()), dim))
        norms = np.linalg.norm(raw, axis=1)
    return EmbeddingMap(raw / norms[:, None], seed)


def _pack_bit_rows(bits: np.ndarray) -> list[BitCode]:
    """Pack an (n, m) 0/1 array into BitCodes, bit j little-endian in word j//64."""
    n, m = bits.shape
    packed = np.packbits(bits.astype(np.uint8), axis=1, bitorder="little")
    nw = words_needed(m)
    pad = nw * 8 - packed.shape[1]
    if pad:
        packed = np.hstack([packed, np.zeros((n, pad), dtype=np.uint8)])
    wordmat = packed.reshape(n, nw, 8)
    out = []
    for row in wordmat:
        words = tuple(int.from_bytes(row[w].tobytes(), "little") for w in range(nw))
        out.append(BitCode(words, m))
    return out


def embed(emap: EmbeddingMap, x: UnitVector) -> BitCode:
    """Apply the one-bit map: bit j = 1 iff x.theta_j >= 0."""
    if x.dim != emap.dim:
        raise DimensionMismatchError(f"point dimension {x.dim} != map dimension {emap.dim}")
    dots = emap.directions @ x.components
    return _pack_bit_rows((dots >= 0.0).reshape(1, -1))[0]


def embed_points(emap: EmbeddingMap, points: PointSet) -> CodeSet:
    """Embed every point of a set through one map (order preserved)."""
    if points.dim != emap.dim:
        raise DimensionMismatchError(f"point dimension {points.dim} != map dimension {emap.dim}")
    dots = points.matrix @ emap.directions.T
    return CodeSet(tuple(_pack_bit_rows(dots >= 0.0)))


def hamming_distance(a: BitCode, b: BitCode) -> float:
    """Normalized Hamming distance popcount(a xor b)/m, via packed words."""
    if a.m != b.m:
        raise CodeLengthMismatchError(f"code lengths differ: {a.m} vs {b.m}")
    diff = sum((wa ^ wb).bit_count() for wa, wb in zip(a.words, b.words))
    return diff / a.m


def hamming_distance_bitloop(a: BitCode, b: BitCode) -> float:
    """Reference implementation: per-bit loop, no word tricks.  Kept slow on purpose."""
    if a.m != b.m:
        raise CodeLengthMismatchError(f"code lengths differ: {a.m} vs {b.m}")
    diff = 0
    for j in range(a.m):
        if a.bit(j) != b.bit(j):
            diff += 1
    return diff / a.m


def metric_deviation(emap: EmbeddingMap, x: UnitVector, y: UnitVector) -> float:
    """Signed difference (Hamming distance of the images) - (geodesic distance).

    Equals the mean of the m separation indicators minus the separation
    probability, so it concentrates near 0 at rate 1/sqrt(m).
    """
    return hamming_distance(embed(emap, x), embed(emap, y)) - geodesic_distance(x, y)


def check_one_to_one(codes: CodeSet) -> tuple[bool, list[tuple[int, int]]]:
    """Are all codes pairwise distinct?  Returns the complete, lexicographically sorted collision list."""
    if codes.n < 2:
        raise ValueError("one-to-one check needs at least 2 codes")
    groups: dict[tuple[int, ...], list[int]] = {}
    for i, c in enumerate(codes.codes):
        groups.setdefault(c.words, []).append(i)
    collisions = []
    for members in groups.values():
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                collisions.append((members[a], members[b]))
    collisions.sort()
    return (not collisions, collisions)


class RipViolation(NamedTuple):
    pair: tuple[int, int]
    hamming: float
    geodesic: float
    deviation: float


@dataclass(frozen=True)
class RipReport:
    """Outcome of checking |d_Hamming - d_geodesic| <= delta over all pairs."""

    delta: float
    violations: tuple[RipViolation, ...]
    max_deviation: float
    passed: bool


def check_rip(
    codes: CodeSet,
    points: PointSet,
    delta: float,
    boundary: str = "strict",
) -> RipReport:
    """Check the distance-preservation property pair by pair.

    A pair violates when |d_H - d_geo| > delta under the default ``strict``
    boundary (equality at delta passes); under ``inclusive`` a deviation equal
    to delta already counts as a failure.  The two conventions differ only on
    the lattice event where the deviation lands exactly on delta.
    """
    if codes.n != points.n:
        raise ValueError(f"codes ({codes.n}) and points ({points.n}) are misaligned")
    if points.n < 2:
        raise ValueError("need at least 2 points")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if boundary not in ("strict", "inclusive"):
        raise ValueError(f"unknown boundary convention {boundary!r}")

    gram = np.clip(points.matrix @ points.matrix.T, -1.0, 1.0)
    geo = np.arccos(gram) / math.pi

    violations = []
    max_dev = 0.0
    for i in range(codes.n):
        for j in range(i + 1, codes.n):
            dh = hamming_distance(codes[i], codes[j])
            dg = float(geo[i, j])
            dev = dh - dg
            if abs(dev) > max_dev:
                max_dev = abs(dev)
            fails = abs(dev) > delta if boundary == "strict" else abs(dev) >= delta
            if fails:
                violations.append(RipViolation((i, j), dh, dg, dev))
    return RipReport(delta=delta, violations=tuple(violations), max_deviation=max_dev, passed=not violations)


def embed_orthogonal(n: int, m: int, rng: np.random.Generator) -> CodeSet:
    """Codes of n pairwise orthogonal points through a fresh random map.

    For orthogonal points the sign bits are independent fair coins, so the
    codes are n iid uniform m-bit strings; drawing them directly skips all
    floating-point work and is what makes large-n simulation cheap.
    """
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    if m < 1:
        raise ValueError(f"code length must be >= 1, got {m}")
    nw = words_needed(m)
    raw = rng.integers(0, 2**WORD_BITS, size=(n, nw), dtype=np.uint64)
    raw[:, -1] &= np.uint64(_tail_mask(m))
    codes = tuple(BitCode(tuple(int(w) for w in row), m) for row in raw)
    return CodeSet(codes)


def hamming_band_limit(m: int, delta: float, boundary: str) -> int:
    """Largest integer s = |2*count - m| for which a pair still passes the delta band.

    A pair of codes of orthogonal points passes iff its differing-bit count H
    satisfies |H/m - 1/2| <= delta (``strict``: failure needs a strictly larger
    deviation) or |H/m - 1/2| < delta (``inclusive``: deviation equal to delta
    fails).  Stated on the integer s = |2H - m| this is s <= 2*m*delta,
    respectively s < 2*m*delta.  Centralizing the float-to-integer rounding
    here keeps the simulator and the exact oracles decision-identical.
    """
    if boundary not in ("strict", "inclusive"):
        raise ValueError(f"unknown boundary convention {boundary!r}")
    t = 2.0 * m * delta
    if boundary == "strict":
        return math.floor(t)
    return math.ceil(t) - 1


def write_code_set(codes: CodeSet, dest: Union[str, Path, IO[bytes]]) -> None:
    """Serialize a code set in the binary format (see CODESET_MAGIC)."""
    blob = bytearray()
    blob += CODESET_MAGIC
    blob.append(CODESET_VERSION)
    blob += codes.n.to_bytes(8, "little")
    blob += codes.m.to_bytes(8, "little")
    for c in codes.codes:
        blob += c.to_bytes()
    data = bytes(blob)
    if hasattr(dest, "write"):
        dest.write(data)
    else:
        Path(dest).write_bytes(data)


def read_code_set(source: Union[str, Path, IO[bytes]]) -> CodeSet:
    """Parse the binary code-set format, validating header and padding bits."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = Path(source).read_bytes()
    if len(data) < 21:
        raise CodeSetFormatError("truncated header")
    if data[:4] != CODESET_MAGIC:
        raise CodeSetFormatError(f"bad magic {data[:4]!r}")
    if data[4] != CODESET_VERSION:
        raise CodeSetFormatError(f"unsupported version {data[4]}")
    n = int.from_bytes(data[5:13], "little")
    m = int.from_bytes(data[13:21], "little")
    if n < 1 or m < 1:
        raise CodeSetFormatError(f"invalid counts n={n}, m={m}")
    nw = words_needed(m)
    expect = 21 + 8 * nw * n
    if len(data) != expect:
        raise CodeSetFormatError(f"expected {expect} bytes for n={n}, m={m}, got {len(data)}")
    codes = []
    for i in range(n):
        chunk = data[21 + 8 * nw * i : 21 + 8 * nw * (i + 1)]
        try:
            codes.append(BitCode.from_bytes(chunk, m))
        except ValueError as exc:
            raise CodeSetFormatError(f"code {i}: {exc}") from None
    return CodeSet(tuple(codes))


def code_set_hexdump(codes: CodeSet) -> str:
    """Human-readable dump: one line per code, index then hex bytes (little-endian words)."""
    width = len(str(codes.n - 1))
    lines = [f"{i:>{width}}: {c.to_bytes().hex()}" for i, c in enumerate(codes.codes)]
    return "\n".join(lines) + "\n"
