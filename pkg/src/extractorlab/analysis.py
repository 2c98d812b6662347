"""Statistical distance, extractor bias, maximal twisted exponential sums,
additive energy and the Parseval identity on F_p^n."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import InputError, InvariantViolation, NotADistribution, RoundingUnstable, SetTooLarge
from .extractor import PAIR_CAP, ExtractorSpec, histogram, make_extractor
from .field import DENSE_CAP, FieldVector, PrimeField, as_points, check_universe, encode, unique_rows
from .quantizer import coefficient_sum, rho_fourier, rho_table
from .sources import (
    Source,
    WeightedSet,
    random_unit_disc,
    source_digest,
    weighted_from_source,
)

BRUTE_CAP = 512
REL_TOL = 1e-6


# ---- statistical distance ------------------------------------------------------


def statistical_distance(dist: Mapping[int, float | Fraction]):
    """SD of a distribution on {0, 1} from the uniform bit.

    Exact (Fraction) in, exact out.
    """
    if set(dist) - {0, 1}:
        raise NotADistribution(f"outcomes must be bits, got {sorted(dist)}")
    probs = [dist.get(0, 0), dist.get(1, 0)]
    if any(q < 0 for q in probs) or abs(float(sum(probs)) - 1.0) > 1e-9:
        raise NotADistribution(f"not a probability distribution: {dict(dist)}")
    half = Fraction(1, 2) if all(isinstance(q, (int, Fraction)) for q in probs) else 0.5
    return sum(abs(q - half) for q in probs) / 2


def extractor_output_distribution(
    spec: ExtractorSpec, X: Source, Y: Source, threads: int = 1, pair_cap: int = PAIR_CAP
) -> dict[int, float | Fraction]:
    """Law of Ext(X, Y) for independent X, Y, computed over the support product.

    Two flat sources give exact rational probabilities.
    """
    for s in (X, Y):
        if s.field != spec.field or s.n != spec.n:
            raise InputError(f"sources must live on F_{spec.field.p}^{spec.n}")
    bits = rho_table(spec.field).bits.astype(bool)
    if X.kind == "flat" and Y.kind == "flat":
        counts = histogram(spec.field, X.points, Y.points, threads=threads, pair_cap=pair_cap)
        ones = int(counts[bits].sum())
        total = X.size * Y.size
        return {0: Fraction(total - ones, total), 1: Fraction(ones, total)}
    h = histogram(spec.field, X.points, Y.points, X.weights, Y.weights, threads=threads, pair_cap=pair_cap)
    one = float(h[bits].sum())
    return {0: float(h[~bits].sum()), 1: one}


# ---- additive energy -----------------------------------------------------------


def _support(A, field: PrimeField | None) -> tuple[PrimeField, np.ndarray]:
    if isinstance(A, (WeightedSet, Source)):
        return A.field, A.points
    if field is None:
        first = next(iter(A), None)
        if not isinstance(first, FieldVector):
            raise InputError("pass field= when the set is not given as FieldVectors")
        field = first.field
    pts = as_points(field, A)
    return field, unique_rows(pts, field.p)


def additive_energy_brute(A, field: PrimeField | None = None, cap: int = BRUTE_CAP) -> int:
    """#{(a, b, c, d) in A^4 : a + b = c + d} as sum_x r(x)^2."""
    f, pts = _support(A, field)
    k = pts.shape[0]
    if k > cap:
        raise SetTooLarge(f"|A| = {k} exceeds the brute-force cap {cap}")
    if k == 0:
        return 0
    check_universe(f.p, pts.shape[1])
    P = pts.astype(np.int64)
    sums = (P[:, None, :] + P[None, :, :]) % f.p
    _, r = np.unique(encode(sums.reshape(-1, P.shape[1]), f.p), return_counts=True)
    return int(np.dot(r, r))


def indicator_transform_moment4(f: PrimeField, pts: np.ndarray, cap: int = DENSE_CAP) -> float:
    """p^-n sum_xi |sum_{a in A} e(a . xi)|^4 in floating point."""
    n = pts.shape[1]
    check_universe(f.p, n, cap)
    ind = np.zeros((f.p,) * n)
    ind[tuple(pts.astype(np.int64).T)] = 1.0
    mag2 = np.abs(np.fft.fftn(ind)) ** 2
    return float(np.sum(mag2 * mag2)) / f.p**n


def additive_energy_spectral(A, field: PrimeField | None = None, cap: int = DENSE_CAP) -> int:
    f, pts = _support(A, field)
    if pts.shape[0] == 0:
        return 0
    value = indicator_transform_moment4(f, pts, cap)
    rounded = round(value)
    if abs(value - rounded) > 0.25:
        raise RoundingUnstable(f"spectral energy {value!r} is not near an integer")
    return int(rounded)


@dataclass
class EnergyReport:
    descriptor: str
    p: int
    n: int
    size: int
    energy: int
    exponent: float
    method: str


def check_energy_bounds(size: int, energy: int) -> None:
    """2|A|^2 - |A| <= energy <= |A|^3, with no tolerance."""
    if not 2 * size * size - size <= energy <= size**3:
        raise InvariantViolation(f"energy {energy} outside the trivial range for |A| = {size}")


def energy_exponent(size: int, energy: int) -> float:
    return math.log(energy) / math.log(size) if size > 1 else float("nan")


def additive_energy(A, field: PrimeField | None = None, method: str = "auto", descriptor: str = "") -> EnergyReport:
    f, pts = _support(A, field)
    size = pts.shape[0]
    if method == "auto":
        method = "brute" if size <= BRUTE_CAP else "spectral"
    if method == "brute":
        energy = additive_energy_brute(pts, f)
    elif method == "spectral":
        energy = additive_energy_spectral(pts, f)
    else:
        raise InputError(f"unknown energy method {method!r}")
    check_energy_bounds(size, energy)
    return EnergyReport(descriptor, f.p, pts.shape[1], size, energy, energy_exponent(size, energy), method)


# ---- twisted exponential sums ---------------------------------------------------


@dataclass
class ExpSumReport:
    p: int
    n: int
    form: str
    size_a: int
    size_b: int
    lhs: float
    argmax_lambda: int
    rhs_bound: float
    energy_a: int
    energy_b: int
    indicator: bool

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs_bound * (1 + REL_TOL)


def energy_bound(size_a: int, size_b: int, p: int, n: int, energy_a: int, energy_b: int) -> float:
    """|A|^1/2 |B|^1/2 p^(n/8) (Lambda(A) Lambda(B))^(1/8)."""
    log = (
        0.5 * math.log(size_a)
        + 0.5 * math.log(size_b)
        + n / 8 * math.log(p)
        + (math.log(energy_a) + math.log(energy_b)) / 8
    )
    return math.exp(log)


def twisted_sums(A: WeightedSet, B: WeightedSet, form: str = "bilinear", threads: int = 1, pair_cap: int = PAIR_CAP):
    """sum_{x,y} a(x) b(y) e(lam f(x, y)) for every lam in F_p."""
    if A.field != B.field or A.n != B.n:
        raise InputError("both weighted sets must live on the same F_p^n")
    f = A.field
    h = histogram(f, A.points, B.points, A.weights, B.weights, form=form, threads=threads, pair_cap=pair_cap)
    return f.p * np.fft.ifft(h.astype(np.complex128))


def max_exponential_sum(
    A: WeightedSet,
    B: WeightedSet,
    form: str = "bilinear",
    threads: int = 1,
    pair_cap: int = PAIR_CAP,
) -> ExpSumReport:
    """max over lam != 0 of |sum a(x) b(y) e(lam f(x, y))|, with the energy bound.

    The bound uses the energies of the supports; it dominates the sum for
    any weights in the unit disc when f is the bilinear form.
    """
    S = twisted_sums(A, B, form, threads, pair_cap)
    mags = np.abs(S[1:])
    lam = int(np.argmax(mags)) + 1
    f = A.field
    ea = additive_energy(A).energy
    eb = additive_energy(B).energy
    rhs = energy_bound(A.size, B.size, f.p, A.n, ea, eb)
    return ExpSumReport(
        f.p, A.n, form, A.size, B.size, float(mags[lam - 1]), lam, rhs, ea, eb, A.is_indicator and B.is_indicator
    )


def random_lemma_instance(
    f: PrimeField, n: int, rng: np.random.Generator, max_size: int = 64, weights: str = "indicator"
) -> tuple[WeightedSet, WeightedSet]:
    """Random supports of size <= max_size with indicator or unit-disc weights."""
    total = check_universe(f.p, n)
    top = min(max_size, total)
    out = []
    for _ in range(2):
        k = int(rng.integers(1, top + 1))
        keys = np.sort(rng.choice(total, size=k, replace=False))
        pts = np.stack([(keys // f.p**i) % f.p for i in range(n - 1, -1, -1)], axis=1)
        if weights == "indicator":
            w = np.ones(k, dtype=np.complex128)
        elif weights == "disc":
            w = random_unit_disc(rng, k)
        else:
            raise InputError(f"weights must be 'indicator' or 'disc', got {weights!r}")
        out.append(WeightedSet(f, n, pts.astype(f.dtype), w))
    return out[0], out[1]


# ---- Parseval ---------------------------------------------------------------------


def character_transform(values: np.ndarray, f: PrimeField) -> np.ndarray:
    """F(x) = sum_xi values(xi) e(x . xi), one axis at a time with the character matrix."""
    E = f.char_matrix()
    out = np.asarray(values, dtype=np.complex128)
    for axis in range(out.ndim):
        out = np.moveaxis(np.tensordot(E, out, axes=([1], [axis])), 0, axis)
    return out


def parseval_check(f_values, field: PrimeField, n: int | None = None) -> tuple[float, float]:
    """Both sides of sum_x |sum_xi f(xi) e(x . xi)|^2 = p^n sum_xi |f(xi)|^2.

    ``f_values`` is a dense array of shape (p,) * n or a mapping from points
    to values (missing points are zero).
    """
    if isinstance(f_values, Mapping):
        if n is None:
            n = len(next(iter(f_values)))
        check_universe(field.p, n, DENSE_CAP)
        dense = np.zeros((field.p,) * n, dtype=np.complex128)
        for pt, v in f_values.items():
            dense[tuple(int(c) % field.p for c in pt)] += v
    else:
        dense = np.asarray(f_values, dtype=np.complex128)
        if any(s != field.p for s in dense.shape):
            raise InputError(f"dense values must have shape (p,)*n with p = {field.p}")
        n = dense.ndim
        check_universe(field.p, n, DENSE_CAP)
    lhs = float(np.sum(np.abs(character_transform(dense, field)) ** 2))
    rhs = float(field.p**n * np.sum(np.abs(dense) ** 2))
    return lhs, rhs


# ---- extractor bias ----------------------------------------------------------------


@dataclass
class BiasReport:
    p: int
    n: int
    source_x: str
    source_y: str
    size_x: int
    size_y: int
    admissible: bool
    prob_one: str
    sd: float
    sd_exact: str
    max_exp_sum: float
    argmax_lambda: int
    coefficient_sum: float
    chain_bound: float
    chain_holds: bool
    wall_time: float


def _fmt(q) -> str:
    if isinstance(q, Fraction):
        return f"{q.numerator}/{q.denominator}"
    return repr(float(q))


def bias_report(X: Source, Y: Source, threads: int = 1, pair_cap: int = PAIR_CAP) -> BiasReport:
    """SD of Ext(X, Y) from uniform next to coefficient_sum * max_{lam != 0} |S(lam)|.

    S carries the actual source masses; they are rescaled to sup norm 1 for the
    kernel and the scale is multiplied back in, so the chain reads
    SD <= coefficient_sum(p) * max |sum X(x) Y(y) e(lam f(x, y))|.
    """
    start = time.perf_counter()
    if X.field != Y.field or X.n != Y.n:
        raise InputError("both sources must live on the same F_p^n")
    spec = make_extractor(X.field, X.n)
    dist = extractor_output_distribution(spec, X, Y, threads, pair_cap)
    sd = statistical_distance(dist)
    a, sa = weighted_from_source(X)
    b, sb = weighted_from_source(Y)
    S = twisted_sums(a, b, "extractor", threads, pair_cap)
    mags = np.abs(S[1:]) * sa * sb
    lam = int(np.argmax(mags)) + 1
    csum = coefficient_sum(rho_fourier(X.field))
    bound = csum * float(mags[lam - 1])
    return BiasReport(
        p=X.field.p,
        n=X.n,
        source_x=source_digest(X),
        source_y=source_digest(Y),
        size_x=X.size,
        size_y=Y.size,
        admissible=spec.admissible,
        prob_one=_fmt(dist[1]),
        sd=float(sd),
        sd_exact=_fmt(sd),
        max_exp_sum=float(mags[lam - 1]),
        argmax_lambda=lam,
        coefficient_sum=csum,
        chain_bound=bound,
        chain_holds=float(sd) <= bound + REL_TOL,
        wall_time=time.perf_counter() - start,
    )
