"""Command-line driver for extractor experiments.

Exit codes: 0 success, 1 mathematical invariant violated, 2 bad input,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    additive_energy,
    bias_report,
    max_exponential_sum,
    random_lemma_instance,
)
from .bounds import FAMILIES, RateParams, critical_set_size, parse_rational, rate_from_energy, rate_report
from .bounds import paraboloid_subset, scan_paraboloid_energies, trial_seed
from .errors import CapExceeded, InadmissibleFieldWarning, InputError, InvariantViolation
from .extractor import PAIR_CAP, extract, inner_form, make_extractor
from .field import PrimeField
from .quantizer import coefficient_sum, rho_fourier, sigma
from .reports import SWEEP_HEADER, build_document, dumps_csv, dumps_json, scan_csv
from .sources import (
    adversarial_line_source,
    canonical_json,
    load_source,
    point_mass,
    random_flat_source,
    random_general_source,
    save_source,
    source_from_json,
    source_to_json,
    uniform_source,
)

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3

# Flags that never change results and stay out of the config hash.
_UNHASHED = {"threads", "out", "verbose", "func"}


def _default_seed() -> int:
    raw = os.environ.get("EXTRACTORLAB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"EXTRACTORLAB_SEED must be an integer, got {raw!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _UNHASHED}


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---- commands ------------------------------------------------------------------


def cmd_extract(args) -> int:
    f = PrimeField(args.p)
    if len(args.x) != args.n or len(args.y) != args.n:
        raise InputError(f"--x and --y need {args.n} coordinates")
    spec = make_extractor(f, args.n)
    x, y = f.vector(args.x), f.vector(args.y)
    if not spec.admissible:
        print(f"warning: -1 is a square mod {f.p}", file=sys.stderr)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InadmissibleFieldWarning)
        bit = extract(spec, x, y)
    print(bit)
    if args.verbose:
        t = inner_form(x, y)
        s = sigma(t)
        print(f"f = {t.value}")
        print(f"sigma = {s.numerator}/{s.denominator}")
    return EXIT_OK


def _bias_sources(args, f: PrimeField):
    if args.fixture:
        X = load_source(args.fixture[0])
        Y = load_source(args.fixture[1]) if len(args.fixture) > 1 else X
        return X, Y
    if args.source == "uniform":
        X = uniform_source(f, args.n)
    elif args.source == "point":
        X = point_mass(f, [0] * args.n)
    elif args.source == "line":
        X = adversarial_line_source(f, args.n)
    elif args.source == "random":
        rng = np.random.default_rng(trial_seed(args.seed, f.p))
        X = random_general_source(f, args.n, args.size, rng)
    else:
        raise InputError(f"unknown source {args.source!r}")
    return X, X


def cmd_bias(args) -> int:
    primes = args.p if args.p else [None]
    if args.fixture and len(primes) > 1:
        raise InputError("a fixture fixes p; do not sweep --p with --fixture")
    reports = []
    for p in primes:
        if p is None and not args.fixture:
            raise InputError("give --p or --fixture")
        f = PrimeField(p) if p is not None else None
        X, Y = _bias_sources(args, f)
        reports.append(bias_report(X, Y, threads=args.threads, pair_cap=args.cap_pairs))
    if args.format == "csv":
        rows = []
        for r in reports:
            millis = int(round(r.wall_time * 1000))
            for metric in ("sd", "max_exp_sum", "coefficient_sum", "chain_bound"):
                rows.append([r.p, r.n, r.size_x, r.size_y, metric, getattr(r, metric), args.seed, millis])
        _emit(args, dumps_csv(SWEEP_HEADER, rows))
    else:
        _emit(args, dumps_json(build_document("bias", reports, _config(args), args.seed)))
    return EXIT_OK if all(r.chain_holds for r in reports) else EXIT_INVARIANT


def cmd_energy(args) -> int:
    if args.fixture:
        X = load_source(args.fixture[0])
        f, pts, desc = X.field, X.points, f"fixture:{args.fixture[0]}"
    else:
        if args.p is None or len(args.p) != 1:
            raise InputError("give exactly one --p or a --fixture")
        f = PrimeField(args.p[0])
        rng = np.random.default_rng(args.seed)
        if args.family == "paraboloid":
            pts = paraboloid_subset(f, args.n, args.size, "random", rng)
        else:
            pts = random_flat_source(f, args.n, args.size, rng).points
        desc = f"{args.family}:p={f.p}:n={args.n}:size={args.size}"
    methods = ["brute", "spectral"] if args.method == "both" else [args.method]
    reports = [additive_energy(pts, f, method=m, descriptor=desc) for m in methods]
    _emit(args, dumps_json(build_document("energy", reports, _config(args), args.seed)))
    if len({r.energy for r in reports}) > 1:
        print("error: brute-force and spectral energies disagree", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.p is None or len(args.p) != 1:
        raise InputError("give exactly one --p")
    f = PrimeField(args.p[0])
    sizes = args.sizes
    if not sizes:
        # default: the p^(4/3) scale for P_4, p^(21/22) for P_3
        expo = 4 / 3 if args.d == 4 else 21 / 22
        sizes = [max(2, int(round(f.p**expo)))]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InadmissibleFieldWarning)
        scan = scan_paraboloid_energies(
            f, args.d, args.family, sizes, args.seed, args.trials, args.threads, args.allow_inadmissible
        )
    if args.format == "csv":
        _emit(args, scan_csv(scan))
    else:
        summary = {"slope": scan.slope(), "max_exponent": scan.max_exponent()}
        _emit(args, dumps_json(build_document("scan", scan.rows, _config(args), args.seed, summary)))
    return EXIT_OK


def cmd_rate(args) -> int:
    params = RateParams(args.n, args.d, parse_rational(args.alpha))
    rate = rate_from_energy(params)
    if args.format == "json":
        _emit(args, dumps_json(build_document("rate", [rate_report(params)], _config(args), None)))
        return EXIT_OK
    lines = [f"{rate.numerator}/{rate.denominator}"]
    if args.verbose:
        info = rate_report(params)
        lines.append(f"formula: {info['formula']}")
        lines.append(f"{info['alternative_formula']} would give: {info['alternative_value']}")
        lines.append(f"set-size exponent: {info['set_size_exponent']}")
        for p in args.p or []:
            lines.append(f"critical set size at p={p}: {critical_set_size(params, p)!r}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_fourier(args) -> int:
    if not args.p:
        raise InputError("give --p")
    reports = []
    for p in args.p:
        f = PrimeField(p)
        s = coefficient_sum(rho_fourier(f))
        reports.append({"p": p, "coefficient_sum": s, "log_p": math.log(p), "ratio": s / math.log(p)})
    if args.format == "json":
        _emit(args, dumps_json(build_document("fourier", reports, _config(args), None)))
    else:
        text = "".join(f"p={r['p']} coefficient_sum={r['coefficient_sum']!r} ratio_to_ln_p={r['ratio']!r}\n" for r in reports)
        _emit(args, text)
    return EXIT_OK


def cmd_checklemma(args) -> int:
    weight_kinds = ["indicator", "disc"] if args.weights == "both" else [args.weights]
    primes = args.p or [11]
    summaries = []
    violations = 0
    counter = 0
    for p in primes:
        f = PrimeField(p)
        for n in range(1, args.nmax + 1):
            for kind in weight_kinds:
                bad, worst = 0, 0.0
                for _ in range(args.trials):
                    rng = np.random.default_rng(trial_seed(args.seed, counter))
                    counter += 1
                    A, B = random_lemma_instance(f, n, rng, args.max_size, kind)
                    rep = max_exponential_sum(A, B, "bilinear", pair_cap=args.cap_pairs)
                    worst = max(worst, rep.lhs / rep.rhs_bound)
                    if not rep.holds:
                        bad += 1
                summaries.append(
                    {"p": p, "n": n, "weights": kind, "trials": args.trials, "violations": bad, "max_ratio": worst}
                )
                violations += bad
    if args.format == "json":
        _emit(args, dumps_json(build_document("checklemma", summaries, _config(args), args.seed)))
    else:
        text = "".join(
            f"p={s['p']} n={s['n']} weights={s['weights']} trials={s['trials']} "
            f"violations={s['violations']} max_ratio={s['max_ratio']:.6f}\n"
            for s in summaries
        )
        _emit(args, text)
    return EXIT_INVARIANT if violations else EXIT_OK


def cmd_fixture(args) -> int:
    if args.p is None or len(args.p) != 1:
        raise InputError("give exactly one --p")
    f = PrimeField(args.p[0])
    rng = np.random.default_rng(args.seed)
    if args.kind == "uniform":
        s = uniform_source(f, args.n)
    elif args.kind == "point":
        s = point_mass(f, [0] * args.n)
    elif args.kind == "line":
        s = adversarial_line_source(f, args.n)
    elif args.kind == "random-flat":
        s = random_flat_source(f, args.n, args.size, rng)
    else:
        s = random_general_source(f, args.n, args.size, rng)
    doc = source_to_json(s)
    if args.kind.startswith("random"):
        doc["seed"] = args.seed
    s = source_from_json(doc)
    if args.out:
        save_source(s, args.out)
    else:
        sys.stdout.write(canonical_json(doc) + "\n")
    return EXIT_OK


# ---- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="extractorlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "csv"), default="json"):
        sp.add_argument("--p", type=_ints, help="prime modulus (comma-separated list where sweeps apply)")
        sp.add_argument("--seed", type=int, default=None, help="master seed (default: $EXTRACTORLAB_SEED or 0)")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--format", choices=formats, default=default)
        sp.add_argument("--cap-pairs", type=int, default=PAIR_CAP, dest="cap_pairs")
        sp.add_argument("--verbose", action="store_true")

    sp = sub.add_parser("extract", help="evaluate Ext(x, y)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--x", type=_ints, required=True)
    sp.add_argument("--y", type=_ints, required=True)
    sp.add_argument("--verbose", action="store_true")
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("bias", help="exact SD of Ext(X, Y) and the Fourier chain bound")
    common(sp)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--source", choices=["uniform", "point", "line", "random"], default="uniform")
    sp.add_argument("--size", type=int, default=16, help="support size for --source random")
    sp.add_argument("--fixture", action="append", help="source fixture JSON (give twice for X and Y)")
    sp.set_defaults(func=cmd_bias)

    sp = sub.add_parser("energy", help="additive energy by brute force and by Fourier transform")
    common(sp, formats=("json",))
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--family", choices=["paraboloid", "random"], default="paraboloid")
    sp.add_argument("--size", type=int, default=16)
    sp.add_argument("--method", choices=["brute", "spectral", "both"], default="both")
    sp.add_argument("--fixture", action="append")
    sp.set_defaults(func=cmd_energy)

    sp = sub.add_parser("scan", help="energy exponents of paraboloid subsets")
    common(sp)
    sp.add_argument("--d", type=int, default=4)
    sp.add_argument("--family", choices=FAMILIES, default="random")
    sp.add_argument("--sizes", type=_ints, default=None)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--allow-inadmissible", action="store_true", dest="allow_inadmissible")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("rate", help="min-entropy rate from an energy exponent")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--alpha", required=True, help="energy exponent as a rational, e.g. 17/7")
    sp.add_argument("--p", type=_ints, default=None, help="also report the critical set size at these p")
    sp.add_argument("--format", choices=["text", "json"], default="text")
    sp.add_argument("--out", default=None)
    sp.add_argument("--verbose", action="store_true")
    sp.set_defaults(func=cmd_rate)

    sp = sub.add_parser("fourier", help="sum of |Fourier coefficients| of rho")
    common(sp, formats=("text", "json"), default="text")
    sp.set_defaults(func=cmd_fourier)

    sp = sub.add_parser("checklemma", help="test the energy bound on random exponential sums")
    common(sp, formats=("text", "json"), default="text")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--nmax", type=int, default=2)
    sp.add_argument("--max-size", type=int, default=64, dest="max_size")
    sp.add_argument("--weights", choices=["indicator", "disc", "both"], default="both")
    sp.set_defaults(func=cmd_checklemma)

    sp = sub.add_parser("fixture", help="write a source fixture")
    common(sp, formats=("json",))
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--kind", choices=["uniform", "point", "line", "random-flat", "random-general"], default="uniform")
    sp.add_argument("--size", type=int, default=16)
    sp.set_defaults(func=cmd_fixture)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        if getattr(args, "threads", 1) < 1:
            raise InputError("--threads must be at least 1")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InvariantViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
