"""The extractor maps (x, y) -> rho(x.y + (x.x)(y.y)) on F^n x F^n and the
value-histogram kernel behind every twisted exponential sum.

Twisted sums sum_{x,y} a(x) b(y) e(lam f(x, y)) are evaluated for all lam at
once: one pass over the pairs bins the weights by the value t = f(x, y), and
a length-p DFT of the bins gives sum_t h[t] e(lam t) for every lam.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, FieldMismatch, InputError, InadmissibleFieldWarning, UniverseTooLarge
from .field import (
    MAX_DIM,
    FieldElement,
    FieldVector,
    PrimeField,
    dot,
    minus_one_is_square,
    pairwise_dots,
    squared_norms,
)
from .quantizer import rho_bit
from .sources import WeightedSet

PAIR_CAP = 2**31
# Pairs per work unit; fixed so the merge order never depends on thread count.
CHUNK_PAIRS = 2**18

FORMS = ("extractor", "bilinear")


@dataclass(frozen=True)
class ExtractorSpec:
    field: PrimeField
    n: int
    admissible: bool


def make_extractor(f: PrimeField, n: int) -> ExtractorSpec:
    """Spec for Ext on F^n x F^n; for n = 2 the field must have -1 a non-residue."""
    if not 1 <= n <= MAX_DIM:
        raise DimensionMismatch(f"dimension must be in [1, {MAX_DIM}], got {n}")
    admissible = not minus_one_is_square(f) if n == 2 else True
    return ExtractorSpec(f, n, admissible)


def inner_form(x: FieldVector, y: FieldVector) -> FieldElement:
    """x.y + (x.x)(y.y), the paraboloid-lift inner product."""
    return dot(x, y) + dot(x, x) * dot(y, y)


def extract(spec: ExtractorSpec, x: FieldVector, y: FieldVector) -> int:
    if x.field != spec.field or y.field != spec.field:
        raise FieldMismatch("vectors must live over the extractor's field")
    if x.n != spec.n or y.n != spec.n:
        raise DimensionMismatch(f"extractor expects vectors in F^{spec.n}")
    if not spec.admissible:
        warnings.warn(
            f"-1 is a square mod {spec.field.p}; Ext on F^2 has no extraction guarantee",
            InadmissibleFieldWarning,
            stacklevel=2,
        )
    return rho_bit(inner_form(x, y))


def form_matrix(X: np.ndarray, Y: np.ndarray, p: int, form: str = "extractor") -> np.ndarray:
    """All values f(x, y) for rows x of X and y of Y."""
    if form not in FORMS:
        raise InputError(f"form must be one of {FORMS}, got {form!r}")
    vals = pairwise_dots(X, Y, p)
    if form == "extractor":
        vals = (vals + np.multiply.outer(squared_norms(X, p), squared_norms(Y, p)) % p) % p
    return vals


@dataclass(frozen=True, eq=False)
class ValueHistogram:
    """buckets[t] = sum of a(x) b(y) over pairs with f(x, y) = t."""

    field: PrimeField
    buckets: np.ndarray

    def twisted_sums(self) -> np.ndarray:
        """S[lam] = sum_t buckets[t] e(lam t) for lam = 0..p-1."""
        return self.field.p * np.fft.ifft(self.buckets)

    def total(self):
        return self.buckets.sum()


def _chunks(rows: int, cols: int) -> list[slice]:
    step = max(1, CHUNK_PAIRS // max(cols, 1))
    return [slice(i, min(i + step, rows)) for i in range(0, rows, step)]


def histogram(
    f: PrimeField,
    X: np.ndarray,
    Y: np.ndarray,
    wx: np.ndarray | None = None,
    wy: np.ndarray | None = None,
    form: str = "extractor",
    threads: int = 1,
    pair_cap: int = PAIR_CAP,
) -> np.ndarray:
    """Bin pair weights by form value.

    With ``wx``/``wy`` omitted the result counts pairs exactly (int64);
    real weights give float64 bins, complex weights complex128 bins.
    """
    p = f.p
    pairs = X.shape[0] * Y.shape[0]
    if pairs > pair_cap:
        raise UniverseTooLarge(f"{pairs} pairs exceed the pair cap {pair_cap}")
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch(f"dimensions {X.shape[1]} and {Y.shape[1]} differ")
    counting = wx is None and wy is None
    if not counting:
        wx = np.ones(X.shape[0]) if wx is None else np.asarray(wx)
        wy = np.ones(Y.shape[0]) if wy is None else np.asarray(wy)
    is_complex = not counting and (np.iscomplexobj(wx) or np.iscomplexobj(wy))

    def work(sl: slice) -> np.ndarray:
        vals = form_matrix(X[sl], Y, p, form).astype(np.int64).ravel()
        if counting:
            return np.bincount(vals, minlength=p)
        w = np.multiply.outer(wx[sl], wy).ravel()
        if is_complex:
            return np.bincount(vals, weights=w.real, minlength=p) + 1j * np.bincount(
                vals, weights=w.imag, minlength=p
            )
        return np.bincount(vals, weights=w, minlength=p)

    chunks = _chunks(X.shape[0], Y.shape[0])
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(sl) for sl in chunks]
    dtype = np.int64 if counting else (np.complex128 if is_complex else np.float64)
    out = np.zeros(p, dtype=dtype)
    for part in parts:
        out += part
    return out


def value_histogram(
    spec: ExtractorSpec,
    A: WeightedSet,
    B: WeightedSet,
    form: str = "extractor",
    threads: int = 1,
    pair_cap: int = PAIR_CAP,
) -> ValueHistogram:
    for ws in (A, B):
        if ws.field != spec.field:
            raise FieldMismatch("weighted sets must live over the extractor's field")
        if ws.n != spec.n:
            raise DimensionMismatch(f"weighted sets must lie in F^{spec.n}")
    buckets = histogram(
        spec.field, A.points, B.points, A.weights, B.weights, form=form, threads=threads, pair_cap=pair_cap
    )
    return ValueHistogram(spec.field, buckets.astype(np.complex128))
