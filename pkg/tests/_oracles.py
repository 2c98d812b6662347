"""Slow, independent reference computations used as test oracles.

Nothing here imports the package's kernels; everything is plain Python
loops over the definitions.
"""

import cmath
import itertools
import math
from collections import Counter
from fractions import Fraction


def is_prime_trial(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def minus_one_square_brute(p):
    return any((i * i) % p == p - 1 for i in range(p))


def e(p, t):
    return cmath.exp(2j * math.pi * (t % p) / p)


def sign_sin(p, v):
    s = math.sin(2 * math.pi * v / p)
    return 1 if v % p == 0 or s > 0 else -1


def dot(x, y, p):
    return sum(a * b for a, b in zip(x, y)) % p


def inner_form(x, y, p):
    return (dot(x, y, p) + dot(x, x, p) * dot(y, y, p)) % p


def fourier_coeffs(p):
    return [sum(sign_sin(p, x) * e(p, -xi * x) for x in range(p)) / p for xi in range(p)]


def energy_quadruples(A, p):
    """Count (a, b, c, d) in A^4 with a + b = c + d, one quadruple at a time."""
    A = [tuple(a) for a in A]
    count = 0
    for a, b, c, d in itertools.product(A, repeat=4):
        if all((ai + bi - ci - di) % p == 0 for ai, bi, ci, di in zip(a, b, c, d)):
            count += 1
    return count


def energy_counter(A, p):
    r = Counter(tuple((ai + bi) % p for ai, bi in zip(a, b)) for a in A for b in A)
    return sum(v * v for v in r.values())


def twisted_sum(A, wa, B, wb, p, lam, form="bilinear"):
    f = dot if form == "bilinear" else inner_form
    return sum(a_w * b_w * e(p, lam * f(x, y, p)) for x, a_w in zip(A, wa) for y, b_w in zip(B, wb))


def max_twisted_sum(A, wa, B, wb, p, form="bilinear"):
    return max(abs(twisted_sum(A, wa, B, wb, p, lam, form)) for lam in range(1, p))


def output_distribution(X, wx, Y, wy, p):
    """Law of rho_bit(inner_form(x, y)) with exact weights when given Fractions."""
    one = sum(
        (a * b for x, a in zip(X, wx) for y, b in zip(Y, wy) if sign_sin(p, inner_form(x, y, p)) == 1),
        Fraction(0),
    )
    total = sum(wx) * sum(wy)
    return {0: total - one, 1: one}


def parseval_sides(values, p, n):
    """values: dict point -> complex over all of F_p^n."""
    pts = list(itertools.product(range(p), repeat=n))
    lhs = 0.0
    for x in pts:
        s = sum(values.get(xi, 0) * e(p, dot(x, xi, p)) for xi in pts)
        lhs += abs(s) ** 2
    rhs = p**n * sum(abs(v) ** 2 for v in values.values())
    return lhs, rhs


def isotropic_vectors(p, n):
    return [v for v in itertools.product(range(p), repeat=n) if any(v) and dot(v, v, p) == 0]
