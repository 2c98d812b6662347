"""Energy-exponent to min-entropy-rate calculus and the paraboloid energy scanner.

An energy estimate Lambda(M(A)) <~ |A|^alpha for subsets A of F^d lifted into
F^n turns into extraction at min-entropy rate near n / (d (8 - 2 alpha)), for
sets at the scale |A| ~ p^(n / (8 - 2 alpha)).
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .analysis import additive_energy_brute, check_energy_bounds, energy_exponent, BRUTE_CAP
from .errors import InadmissibleField, InadmissibleFieldWarning, InputError, InvalidExponent, SetTooLarge
from .field import PrimeField, check_universe, decode, minus_one_is_square, squared_norms

FAMILIES = ("random", "cartesian", "line-biased")


def parse_rational(text) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InputError(f"not a rational number: {text!r}") from None


@dataclass(frozen=True)
class RateParams:
    n: int
    d: int
    alpha: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", parse_rational(self.alpha))
        if not self.n > self.d >= 1:
            raise InputError(f"need n > d >= 1, got n={self.n}, d={self.d}")
        if 8 - 2 * self.alpha <= 0:
            raise InvalidExponent(f"8 - 2 alpha must be positive, alpha = {self.alpha}")
        if not 2 <= self.alpha < 3:
            raise InvalidExponent(f"energy exponent must lie in [2, 3), got {self.alpha}")


def rate_from_energy(params: RateParams) -> Fraction:
    """n / (d (8 - 2 alpha)), exactly."""
    return Fraction(params.n) / (params.d * (8 - 2 * params.alpha))


def printed_rate_formula(params: RateParams) -> Fraction | None:
    """The variant n / (d (8 - d alpha)), kept for comparison; None when undefined."""
    denom = params.d * (8 - params.d * params.alpha)
    return Fraction(params.n) / denom if denom != 0 else None


def rate_report(params: RateParams) -> dict:
    rate = rate_from_energy(params)
    alt = printed_rate_formula(params)
    return {
        "n": params.n,
        "d": params.d,
        "alpha": f"{params.alpha.numerator}/{params.alpha.denominator}",
        "rate": f"{rate.numerator}/{rate.denominator}",
        "formula": "n/(d*(8-2*alpha))",
        "alternative_formula": "n/(d*(8-d*alpha))",
        "alternative_value": None if alt is None else f"{alt.numerator}/{alt.denominator}",
        "set_size_exponent": str(critical_exponent(params)),
    }


def critical_exponent(params: RateParams) -> Fraction:
    return Fraction(params.n) / (8 - 2 * params.alpha)


def critical_set_size(params: RateParams, p: int) -> float:
    """p^(n / (8 - 2 alpha)), the scale where the energy hypothesis is used."""
    return float(p) ** float(critical_exponent(params))


# ---- exponent scanner ------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    p: int
    d: int
    family: str
    size: int
    trial: int
    energy: int
    fitted_exponent: float
    seed: int


@dataclass
class ExponentScan:
    rows: list[ScanRow] = dc_field(default_factory=list)

    def slope(self) -> float:
        """Least-squares slope of log energy against log size over rows with |A| > 1."""
        pts = [(math.log(r.size), math.log(r.energy)) for r in self.rows if r.size > 1]
        if len({x for x, _ in pts}) < 2:
            return float("nan")
        x, y = np.array(pts).T
        return float(np.polyfit(x, y, 1)[0])

    def max_exponent(self) -> float:
        vals = [r.fitted_exponent for r in self.rows if not math.isnan(r.fitted_exponent)]
        return max(vals) if vals else float("nan")


def trial_seed(master: int, counter: int) -> int:
    """Independent 63-bit seed for the counter-th work unit of a run."""
    state = np.random.SeedSequence([master, counter]).generate_state(2, np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


def _base_points(p: int, m: int, keys: np.ndarray) -> np.ndarray:
    return decode(keys, p, m)


def paraboloid_subset(f: PrimeField, d: int, size: int, family: str, rng: np.random.Generator) -> np.ndarray:
    """A subset of P_d of the given size, as a (size, d) array.

    random: uniform without replacement; cartesian: lift of the grid
    {0..k-1}^(d-1) truncated lexicographically; line-biased: lifts of parallel
    lines a_j + t v (random v, a_j) filled line by line.
    """
    p, m = f.p, d - 1
    total = check_universe(p, m)
    if not 1 <= size <= total:
        raise InputError(f"size must lie in [1, {total}] for P_{d} over F_{p}")
    if family == "random":
        keys = np.sort(rng.choice(total, size=size, replace=False))
        base = _base_points(p, m, keys)
    elif family == "cartesian":
        k = 1
        while k**m < size:
            k += 1
        if k > p:
            raise InputError("cartesian family needs size <= p^(d-1)")
        grid = decode(np.arange(k**m), k, m)
        base = grid[:size]
    elif family == "line-biased":
        v = decode(np.array([rng.integers(1, total)]), p, m)[0]
        chosen: list[int] = []
        seen: set[int] = set()
        t = np.arange(p)[:, None]
        while len(chosen) < size:
            a = decode(np.array([rng.integers(0, total)]), p, m)[0]
            line = (a[None, :] + t * v[None, :]) % p
            for key in (line @ (p ** np.arange(m - 1, -1, -1))).tolist():
                if key not in seen:
                    seen.add(key)
                    chosen.append(key)
                    if len(chosen) == size:
                        break
        base = _base_points(p, m, np.array(sorted(chosen)))
    else:
        raise InputError(f"family must be one of {FAMILIES}, got {family!r}")
    base = base.astype(np.int64)
    return np.concatenate([base, squared_norms(base, p)[:, None]], axis=1)


def scan_paraboloid_energies(
    f: PrimeField,
    d: int,
    family: str,
    sizes: list[int],
    seed: int,
    trials: int = 1,
    threads: int = 1,
    allow_inadmissible: bool = False,
) -> ExponentScan:
    """Exact energies of paraboloid subsets with per-instance exponents log E / log |A|.

    Rows come out ordered by (size, trial) whatever the thread count; trial
    seeds are derived from ``seed`` and the row counter.
    """
    if d not in (3, 4):
        raise InputError(f"the scanner covers P_3 and P_4, got d = {d}")
    if family not in FAMILIES:
        raise InputError(f"family must be one of {FAMILIES}, got {family!r}")
    if d == 3 and family == "random" and minus_one_is_square(f):
        msg = f"-1 is a square mod {f.p}; the P_3 energy estimate assumes it is not"
        if not allow_inadmissible:
            raise InadmissibleField(msg)
        warnings.warn(msg, InadmissibleFieldWarning, stacklevel=2)
    for s in sizes:
        if s > BRUTE_CAP:
            raise SetTooLarge(f"size {s} exceeds the energy cap {BRUTE_CAP}")

    jobs = [(size, trial, trial_seed(seed, i * trials + trial)) for i, size in enumerate(sizes) for trial in range(trials)]

    def run(job) -> ScanRow:
        size, trial, s = job
        pts = paraboloid_subset(f, d, size, family, np.random.default_rng(s))
        energy = additive_energy_brute(pts, f)
        check_energy_bounds(size, energy)
        return ScanRow(f.p, d, family, size, trial, energy, energy_exponent(size, energy), s)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(j) for j in jobs]
    return ExponentScan(rows)
