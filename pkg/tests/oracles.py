"""Independent reference implementations used as test oracles.

Everything here is written from the defining sums with explicit loops in
exact rational arithmetic (rounded once at the end), sharing no code with
the package.
"""

import math
from fractions import Fraction


def partial_sums(x):
    out = [0.0]
    for k in range(1, len(x) + 1):
        out.append(math.fsum(x[:k]))
    return out


def normalizer(block):
    v = [Fraction(float(t)) for t in block]
    b = len(v)
    total = sum(v)
    terms = [(sum(v[:k]) - Fraction(k, b) * total) ** 2 for k in range(1, b + 1)]
    return math.sqrt(sum(terms) / b)


def is_constant(block):
    return all(v == block[0] for v in block)


def block_stats(x, b, center):
    """List of block statistics; None marks a constant (undefined) block.

    ``center`` may be a float or an exact ``Fraction``.
    """
    c = Fraction(center)
    out = []
    for i in range(len(x) - b + 1):
        block = [float(t) for t in x[i:i + b]]
        if is_constant(block):
            out.append(None)
            continue
        num = sum(Fraction(t) for t in block) - b * c
        out.append(float(num) / normalizer(block))
    return out


def exact_mean(x):
    return sum(Fraction(float(t)) for t in x) / len(x)


def sample_mean(x):
    return float(exact_mean(x))


def ecdf_at(values, t):
    return sum(1 for v in values if v <= t) / len(values)


def order_quantile(values, p):
    """Order statistic of rank ceil(p*m), with p read as the decimal it prints as."""
    v = sorted(values)
    m = len(v)
    rank = math.ceil(Fraction(repr(round(p, 12))) * m)
    return v[min(max(rank, 1), m) - 1]


def interval(x, b, level, side):
    n = len(x)
    exact = exact_mean(x)
    xbar = float(exact)
    t = [v for v in block_stats(x, b, exact) if v is not None]
    d_n = normalizer(list(x))
    alpha = round(1.0 - level, 12)
    lo, hi = -math.inf, math.inf
    if side == "lower":
        hi = xbar - order_quantile(t, alpha) * d_n / n
    elif side == "upper":
        lo = xbar - order_quantile(t, level) * d_n / n
    else:
        lo = xbar - order_quantile(t, 1.0 - alpha / 2) * d_n / n
        hi = xbar - order_quantile(t, alpha / 2) * d_n / n
    return lo, hi


def direct_convolution(a, eps, n):
    """Z_i = sum_j a_j eps_{i-j}, with eps[t] holding eps_{t+2-M}."""
    M = len(a)
    return [math.fsum(a[j] * eps[i + M - 1 - j] for j in range(M)) for i in range(n)]
