"""Prime fields, vectors over F_p^n, additive characters and the paraboloid."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CompositeModulus,
    DimensionMismatch,
    EvenModulus,
    FieldMismatch,
    InvalidModulus,
    UniverseTooLarge,
)

MAX_DIM = 8
UNIVERSE_CAP = 2**34
# Largest p^n for which a dense array over F_p^n is materialized.
DENSE_CAP = 2**26
# Largest p for which the character table is precomputed.
TABLE_CAP = 2**24

# The first twelve prime bases are deterministic below 3.18 * 10**23, far past 2**64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for 64-bit integers."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p for an odd prime p below 2**64."""

    p: int

    def __post_init__(self) -> None:
        p = self.p
        if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
            raise InvalidModulus(f"modulus must be an integer, got {p!r}")
        p = int(p)
        object.__setattr__(self, "p", p)
        if p == 2:
            raise EvenModulus("p = 2 is not supported; an odd prime is required")
        if p < 2:
            raise InvalidModulus(f"modulus must be an odd prime, got {p}")
        if p >= 2**64:
            raise InvalidModulus(f"modulus {p} exceeds 64 bits")
        if not is_prime(p):
            raise CompositeModulus(f"{p} is not prime")

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    @property
    def half(self) -> int:
        """(p - 1) / 2, the largest residue with a positive sine."""
        return (self.p - 1) // 2

    @property
    def dtype(self):
        # int64 is exact while every product of two residues fits in 63 bits.
        return np.int64 if self.p < 2**31 else object

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(int(value) % self.p, self)

    def vector(self, coords: Iterable[int]) -> "FieldVector":
        return FieldVector(tuple(int(c) for c in coords), self)

    def zero(self, n: int) -> "FieldVector":
        return FieldVector((0,) * n, self)

    @cached_property
    def chars(self) -> np.ndarray:
        """Table of e(k) = exp(2 pi i k / p) for k = 0..p-1."""
        if self.p > TABLE_CAP:
            raise UniverseTooLarge(f"character table for p = {self.p} exceeds {TABLE_CAP} entries")
        return np.exp(2j * np.pi * np.arange(self.p) / self.p)

    def char_matrix(self) -> np.ndarray:
        """p x p matrix with entry [x, xi] = e(x * xi)."""
        k = np.arange(self.p, dtype=np.int64)
        return self.chars[np.outer(k, k) % self.p]


def make_field(p: int) -> PrimeField:
    return PrimeField(p)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", int(self.value) % self.field.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return o if o is NotImplemented else FieldElement(self.value + o, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return o if o is NotImplemented else FieldElement(self.value - o, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        return o if o is NotImplemented else FieldElement(o - self.value, self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        return o if o is NotImplemented else FieldElement(self.value * o, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.field)

    def __pow__(self, e: int):
        return FieldElement(pow(self.value, e, self.field.p), self.field)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FieldElement(pow(self.value, -1, self.field.p), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * FieldElement(o, self.field).inverse()

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"


@dataclass(frozen=True)
class FieldVector:
    """A point of F_p^n stored as reduced integer coordinates."""

    values: tuple[int, ...]
    field: PrimeField

    def __post_init__(self) -> None:
        vals = tuple(int(v) % self.field.p for v in self.values)
        if not 1 <= len(vals) <= MAX_DIM:
            raise DimensionMismatch(f"dimension must be in [1, {MAX_DIM}], got {len(vals)}")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def coords(self) -> tuple[FieldElement, ...]:
        return tuple(FieldElement(v, self.field) for v in self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def _check(self, other: "FieldVector") -> None:
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        if other.n != self.n:
            raise DimensionMismatch(f"dimensions {self.n} and {other.n} differ")

    def __add__(self, other: "FieldVector") -> "FieldVector":
        self._check(other)
        return FieldVector(tuple(a + b for a, b in zip(self.values, other.values)), self.field)

    def __sub__(self, other: "FieldVector") -> "FieldVector":
        self._check(other)
        return FieldVector(tuple(a - b for a, b in zip(self.values, other.values)), self.field)

    def scale(self, c: int) -> "FieldVector":
        return FieldVector(tuple(int(c) * a for a in self.values), self.field)

    def dot(self, other: "FieldVector") -> FieldElement:
        return dot(self, other)

    def __repr__(self) -> str:
        return f"FieldVector({self.values}, p={self.field.p})"


def dot(x: FieldVector, y: FieldVector) -> FieldElement:
    """x . y = sum x_i y_i in F_p."""
    x._check(y)
    return FieldElement(sum(a * b for a, b in zip(x.values, y.values)), x.field)


def character(x: FieldElement) -> complex:
    """The additive character e(x) = exp(2 pi i x / p)."""
    p = x.field.p
    if p <= TABLE_CAP:
        return complex(x.field.chars[x.value])
    return cmath.exp(2j * math.pi * (x.value / p))


def minus_one_is_square(f: PrimeField) -> bool:
    # Euler's criterion for -1.
    return f.p % 4 == 1


def sqrt_minus_one(f: PrimeField) -> int | None:
    """The smaller square root of -1 in F_p, or None when -1 is a non-residue."""
    if not minus_one_is_square(f):
        return None
    p = f.p
    c = 2
    while pow(c, (p - 1) // 2, p) != p - 1:
        c += 1
    i = pow(c, (p - 1) // 4, p)
    return min(i, p - i)


def check_universe(p: int, n: int, cap: int = UNIVERSE_CAP) -> int:
    if not 1 <= n <= MAX_DIM:
        raise DimensionMismatch(f"dimension must be in [1, {MAX_DIM}], got {n}")
    size = p**n
    if size > cap:
        raise UniverseTooLarge(f"p^n = {p}^{n} = {size} exceeds the cap {cap}")
    return size


def paraboloid_array(f: PrimeField, d: int, cap: int = UNIVERSE_CAP) -> np.ndarray:
    """Rows (x, x.x) for x in F^{d-1} in lexicographic order of x."""
    if not 2 <= d <= 4:
        raise DimensionMismatch(f"paraboloid dimension must be in [2, 4], got {d}")
    check_universe(f.p, d - 1, cap)
    base = np.array(list(itertools.product(range(f.p), repeat=d - 1)), dtype=f.dtype)
    base = base.reshape(-1, d - 1)
    return np.concatenate([base, squared_norms(base, f.p)[:, None]], axis=1)


def paraboloid_points(f: PrimeField, d: int, cap: int = UNIVERSE_CAP) -> tuple[FieldVector, ...]:
    return tuple(FieldVector(tuple(row), f) for row in paraboloid_array(f, d, cap).tolist())


def paraboloid_lift(x: FieldVector) -> FieldVector:
    """x -> (x, x.x), landing on the paraboloid one dimension up."""
    return FieldVector(x.values + (dot(x, x).value,), x.field)


# ---- vectorized kernels over (k, n) integer arrays -------------------------


def as_points(f: PrimeField, points, n: int | None = None) -> np.ndarray:
    """Normalize FieldVectors, tuples or arrays into a reduced (k, n) array."""
    if isinstance(points, np.ndarray):
        arr = points
    else:
        rows = [pt.values if isinstance(pt, FieldVector) else tuple(pt) for pt in points]
        if not rows:
            return np.zeros((0, n or 1), dtype=f.dtype)
        arr = np.array(rows, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if n == 1 else arr.reshape(1, -1)
    if n is not None and arr.shape[1] != n:
        raise DimensionMismatch(f"expected points in F^{n}, got width {arr.shape[1]}")
    if not 1 <= arr.shape[1] <= MAX_DIM:
        raise DimensionMismatch(f"dimension must be in [1, {MAX_DIM}]")
    out = np.mod(arr.astype(object), f.p).astype(f.dtype)
    return out


def squared_norms(X: np.ndarray, p: int) -> np.ndarray:
    acc = np.zeros(X.shape[0], dtype=X.dtype)
    for i in range(X.shape[1]):
        acc = (acc + X[:, i] * X[:, i]) % p
    return acc


def pairwise_dots(X: np.ndarray, Y: np.ndarray, p: int) -> np.ndarray:
    """Matrix of x . y mod p for rows x of X and y of Y."""
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch(f"dimensions {X.shape[1]} and {Y.shape[1]} differ")
    acc = np.zeros((X.shape[0], Y.shape[0]), dtype=X.dtype)
    for i in range(X.shape[1]):
        acc = (acc + np.multiply.outer(X[:, i], Y[:, i])) % p
    return acc


def encode(X: np.ndarray, p: int) -> np.ndarray:
    """Mixed-radix integer key of each row (requires p^n < 2**63)."""
    key = np.zeros(X.shape[0], dtype=np.int64)
    for i in range(X.shape[1]):
        key = key * p + X[:, i].astype(np.int64)
    return key


def decode(keys: np.ndarray, p: int, n: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    out = np.empty((keys.shape[0], n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        out[:, i] = keys % p
        keys = keys // p
    return out


def unique_rows(X: np.ndarray, p: int) -> np.ndarray:
    """Deduplicate rows, returning them sorted lexicographically."""
    if X.shape[0] == 0:
        return X
    keys = np.unique(encode(X, p))
    return decode(keys, p, X.shape[1]).astype(X.dtype)


def to_vectors(f: PrimeField, X: np.ndarray) -> list[FieldVector]:
    return [FieldVector(tuple(row), f) for row in X.tolist()]


def all_points(f: PrimeField, n: int, cap: int = DENSE_CAP) -> np.ndarray:
    check_universe(f.p, n, cap)
    return decode(np.arange(f.p**n, dtype=np.int64), f.p, n).astype(f.dtype)


def direction_points(f: PrimeField, v: Sequence[int]) -> np.ndarray:
    """The line {t v : t in F_p} through the origin."""
    t = np.arange(f.p, dtype=object)
    return (np.multiply.outer(t, np.array([int(c) for c in v], dtype=object)) % f.p).astype(f.dtype)
