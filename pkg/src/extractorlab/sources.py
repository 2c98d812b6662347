"""Min-entropy sources on F_p^n, bounded weight functions, and the dyadic
level-set decomposition of a mass function."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, EmptySupport, InputError, NoIsotropicDirection, NotADistribution
from .field import (
    PrimeField,
    FieldVector,
    as_points,
    all_points,
    check_universe,
    decode,
    direction_points,
    encode,
    sqrt_minus_one,
    to_vectors,
)

WEIGHT_SUM_TOL = 1e-9
UNIT_DISC_TOL = 1e-12


def _check_distinct(points: np.ndarray, p: int) -> None:
    keys = encode(points, p)
    if np.unique(keys).shape[0] != keys.shape[0]:
        raise InputError("support contains repeated points")


@dataclass(frozen=True, eq=False)
class Source:
    """A probability mass function on F_p^n.

    Flat sources are uniform on their support and expose exact rational
    weights through ``exact_weights``; general sources carry float weights
    summing to 1 within 1e-9.
    """

    field: PrimeField
    n: int
    points: np.ndarray
    weights: np.ndarray
    kind: str = "general"
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.points.shape[0] == 0:
            raise EmptySupport("a source needs at least one support point")
        if self.points.shape[1] != self.n:
            raise DimensionMismatch(f"support points must lie in F^{self.n}")
        if self.weights.shape != (self.points.shape[0],):
            raise InputError("one weight per support point is required")
        if self.kind not in ("flat", "general"):
            raise InputError(f"unknown source kind {self.kind!r}")
        if np.any(self.weights <= 0):
            raise NotADistribution("source weights must be positive")
        if abs(float(self.weights.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise NotADistribution(f"weights sum to {self.weights.sum()!r}, not 1")
        _check_distinct(self.points, self.field.p)

    @property
    def universe(self) -> tuple[PrimeField, int]:
        return self.field, self.n

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def exact_weights(self) -> list[Fraction] | None:
        if self.kind == "flat":
            return [Fraction(1, self.size)] * self.size
        return None

    def as_dict(self) -> dict[FieldVector, float | Fraction]:
        probs = self.exact_weights or self.weights.tolist()
        return dict(zip(to_vectors(self.field, self.points), probs))

    def min_entropy(self) -> float:
        if self.kind == "flat":
            return math.log2(self.size)
        return -math.log2(float(self.weights.max()))


def flat_source(f: PrimeField, n: int, support, seed: int | None = None) -> Source:
    pts = as_points(f, support, n)
    if pts.shape[0] == 0:
        raise EmptySupport("a flat source needs a nonempty support")
    weights = np.full(pts.shape[0], 1.0 / pts.shape[0])
    return Source(f, n, pts, weights, "flat", seed)


def general_source(f: PrimeField, n: int, support, weights, seed: int | None = None) -> Source:
    pts = as_points(f, support, n)
    return Source(f, n, pts, np.asarray(weights, dtype=np.float64), "general", seed)


def uniform_source(f: PrimeField, n: int) -> Source:
    return flat_source(f, n, all_points(f, n))


def point_mass(f: PrimeField, point) -> Source:
    pts = as_points(f, [point])
    return flat_source(f, pts.shape[1], pts)


def random_flat_source(f: PrimeField, n: int, size: int, rng: np.random.Generator) -> Source:
    total = check_universe(f.p, n)
    if not 1 <= size <= total:
        raise InputError(f"size must lie in [1, {total}]")
    keys = rng.choice(total, size=size, replace=False)
    return flat_source(f, n, _keys_to_points(f, n, np.sort(keys)))


def random_general_source(f: PrimeField, n: int, size: int, rng: np.random.Generator) -> Source:
    """Random support with weights spread over several dyadic scales."""
    total = check_universe(f.p, n)
    if not 1 <= size <= total:
        raise InputError(f"size must lie in [1, {total}]")
    keys = np.sort(rng.choice(total, size=size, replace=False))
    raw = 2.0 ** rng.uniform(-10.0, 0.0, size=size)
    return general_source(f, n, _keys_to_points(f, n, keys), raw / raw.sum())


def _keys_to_points(f: PrimeField, n: int, keys: np.ndarray) -> np.ndarray:
    return decode(keys, f.p, n).astype(f.dtype)


def min_entropy_rate(s: Source) -> float:
    """Min-entropy divided by log2 of the universe size p^n."""
    if s.kind == "flat":
        # Exact when the support size is a power of p, e.g. lines and planes.
        j, k = 0, s.size
        while k % s.field.p == 0:
            k //= s.field.p
            j += 1
        if k == 1:
            return j / s.n
    return s.min_entropy() / (s.n * math.log2(s.field.p))


def sample(s: Source, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` support points i.i.d. from the source."""
    idx = rng.choice(s.size, size=count, p=s.weights / s.weights.sum())
    return s.points[idx]


# ---- isotropic lines --------------------------------------------------------


def isotropic_direction(f: PrimeField, n: int) -> tuple[int, ...]:
    """Lexicographically first nonzero v in F^n with v . v = 0 (n in {2, 3})."""
    p = f.p
    i = sqrt_minus_one(f)
    if n == 2:
        if i is None:
            raise NoIsotropicDirection(f"-1 is not a square mod {p}; F^2 has no isotropic line")
        return (1, i)
    if n == 3:
        if i is not None:
            return (0, 1, i)
        # p = 3 mod 4: square roots are single powers.
        for a in range(p):
            r = (-1 - a * a) % p
            if pow(r, (p - 1) // 2, p) == 1 or r == 0:
                b = pow(r, (p + 1) // 4, p)
                return (1, a, min(b, p - b))
        raise NoIsotropicDirection(f"no isotropic vector in F_{p}^3")  # unreachable by Chevalley-Warning
    raise DimensionMismatch("isotropic lines are provided for n in {2, 3}")


def adversarial_line_source(f: PrimeField, n: int) -> Source:
    """Flat source on an isotropic line through the origin."""
    v = isotropic_direction(f, n)
    return flat_source(f, n, direction_points(f, v))


# ---- bounded weight functions -------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeightedSet:
    """A support A in F^n with complex weights a(x), |a(x)| <= 1."""

    field: PrimeField
    n: int
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.points.shape[1] != self.n:
            raise DimensionMismatch(f"support points must lie in F^{self.n}")
        if self.weights.shape != (self.points.shape[0],):
            raise InputError("one weight per support point is required")
        if np.any(np.abs(self.weights) > 1 + UNIT_DISC_TOL):
            raise InputError("weights must lie in the closed unit disc")
        _check_distinct(self.points, self.field.p)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def is_indicator(self) -> bool:
        return bool(np.all(self.weights == 1))

    @classmethod
    def indicator(cls, f: PrimeField, n: int, support) -> "WeightedSet":
        pts = as_points(f, support, n)
        return cls(f, n, pts, np.ones(pts.shape[0], dtype=np.complex128))

    @classmethod
    def weighted(cls, f: PrimeField, n: int, support, weights) -> "WeightedSet":
        pts = as_points(f, support, n)
        return cls(f, n, pts, np.asarray(weights, dtype=np.complex128))


def weighted_from_source(s: Source) -> tuple[WeightedSet, float]:
    """Rescale source masses to sup norm 1; returns the set and the scale factor."""
    scale = float(s.weights.max())
    ws = WeightedSet(s.field, s.n, s.points, (s.weights / scale).astype(np.complex128))
    return ws, scale


def random_unit_disc(rng: np.random.Generator, size: int) -> np.ndarray:
    radius = np.sqrt(rng.uniform(0.0, 1.0, size))
    return radius * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size))


# ---- dyadic level sets --------------------------------------------------------


def dyadic_index(w: float | Fraction) -> int:
    """floor(-log2 w): the layer l with 2^-(l+1) < w <= 2^-l."""
    if isinstance(w, Fraction):
        num, den = w.numerator, w.denominator
        # largest l with num * 2^l <= den
        l = den.bit_length() - num.bit_length()
        if num << l > den:
            l -= 1
        return l
    m, e = math.frexp(w)  # w = m 2^e, 0.5 <= m < 1
    return 1 - e if m == 0.5 else -e


@dataclass(frozen=True, eq=False)
class LevelSet:
    ell: int
    indices: np.ndarray
    points: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True, eq=False)
class LevelSetDecomposition:
    source: Source
    layers: list[LevelSet] = dc_field(default_factory=list)

    def restriction(self, layer: LevelSet) -> np.ndarray:
        """Source weights restricted to one layer, as a full-length vector."""
        out = np.zeros(self.source.size)
        out[layer.indices] = layer.weights
        return out


def level_sets(s: Source) -> LevelSetDecomposition:
    """Split a mass function into layers on which w ~ 2^-l.

    A weight exactly 2^-l lands in layer l, so every layer satisfies
    2^-(l+1) < w <= 2^-l, inside the two-sided band 2^-(l+1) < w <= 2^-(l-1).
    """
    exact = s.exact_weights
    ells = np.array([dyadic_index(w) for w in (exact or s.weights.tolist())], dtype=np.int64)
    layers = []
    for ell in np.unique(ells).tolist():
        idx = np.flatnonzero(ells == ell)
        layers.append(LevelSet(ell, idx, s.points[idx], s.weights[idx]))
    return LevelSetDecomposition(s, layers)


# ---- JSON fixtures -------------------------------------------------------------


def source_to_json(s: Source) -> dict:
    doc = {"p": s.field.p, "n": s.n, "kind": s.kind, "support": s.points.astype(np.int64).tolist()}
    if s.kind == "general":
        doc["weights"] = s.weights.tolist()
    if s.seed is not None:
        doc["seed"] = s.seed
    return doc


def source_from_json(doc: dict) -> Source:
    try:
        f = PrimeField(doc["p"])
        n = int(doc["n"])
        kind = doc["kind"]
        support = doc["support"]
    except KeyError as exc:
        raise InputError(f"fixture is missing field {exc}") from None
    seed = doc.get("seed")
    if kind == "flat":
        return flat_source(f, n, support, seed)
    if kind == "general":
        if "weights" not in doc:
            raise InputError("general fixtures need a weights list")
        return general_source(f, n, support, doc["weights"], seed)
    raise InputError(f"unknown source kind {kind!r}")


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def source_digest(s: Source) -> str:
    return hashlib.sha256(canonical_json(source_to_json(s)).encode()).hexdigest()


def save_source(s: Source, path: str | Path) -> None:
    Path(path).write_text(canonical_json(source_to_json(s)) + "\n")


def load_source(path: str | Path) -> Source:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read fixture {path}: {exc}") from None
    return source_from_json(doc)
