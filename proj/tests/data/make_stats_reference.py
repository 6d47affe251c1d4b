#!/usr/bin/env python3
"""Generate the frozen high-precision reference values for the statistics tests.

Run from the repo root:

    python3 tests/data/make_stats_reference.py > tests/data/stats_reference.json

The expected values are computed with mpmath at 50 decimal digits, from the
exact binary64 inputs that end up in the JSON file, so the C++ tests compare
against a reference that is independent of the library implementation.
"""

import json
import random

import mpmath as mp

mp.mp.dps = 50

SEED = 20240917
N_CASES = 100


def two_tailed_p_from_t(t, df):
    t = mp.mpf(t)
    df = mp.mpf(df)
    if t == 0:
        return mp.mpf(1)
    x = df / (df + t * t)
    return mp.betainc(df / 2, mp.mpf(1) / 2, 0, x, regularized=True)


def mean(v):
    return mp.fsum(v) / len(v)


def sample_var(v):
    m = mean(v)
    return mp.fsum((x - m) ** 2 for x in v) / (len(v) - 1)


def pooled_t_test(a, b):
    na, nb = len(a), len(b)
    va, vb = sample_var(a), sample_var(b)
    sp2 = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2)
    t = (mean(a) - mean(b)) / mp.sqrt(sp2 * (mp.mpf(1) / na + mp.mpf(1) / nb))
    p = two_tailed_p_from_t(t, na + nb - 2)
    d = (mean(b) - mean(a)) / mp.sqrt(sp2)  # positive = higher in b
    return t, p, d


def pearson(x, y):
    n = len(x)
    mx, my = mean(x), mean(y)
    sxy = mp.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = mp.fsum((a - mx) ** 2 for a in x)
    syy = mp.fsum((b - my) ** 2 for b in y)
    r = sxy / mp.sqrt(sxx * syy)
    if abs(r) >= 1:
        return r, mp.mpf(0)
    t = r * mp.sqrt((n - 2) / (1 - r * r))
    return r, two_tailed_p_from_t(t, n - 2)


def rounded(rng, n, scale, ties=False):
    vals = []
    for _ in range(n):
        v = round(rng.gauss(0.0, 1.0) * scale + rng.uniform(-2, 2) * scale, 4)
        vals.append(v)
    if ties and n >= 4:
        vals[1] = vals[0]
        vals[-1] = vals[-2]
    return [float(v) for v in vals]


def main():
    rng = random.Random(SEED)
    out = {"ttest": [], "pearson": []}

    for i in range(N_CASES):
        scale = rng.choice([1e-3, 0.1, 1.0, 10.0, 1e4])
        na = rng.randint(3, 40)
        nb = rng.randint(3, 40)
        a = rounded(rng, na, scale, ties=(i % 7 == 0))
        b = rounded(rng, nb, scale, ties=(i % 11 == 0))
        shift = rng.uniform(-1.5, 1.5) * scale
        b = [round(v + shift, 4) for v in b]
        t, p, d = pooled_t_test([mp.mpf(v) for v in a], [mp.mpf(v) for v in b])
        out["ttest"].append(
            {"a": a, "b": b, "t": float(t), "p": float(p), "d": float(d)}
        )

    for i in range(N_CASES):
        n = rng.randint(3, 50)
        x = rounded(rng, n, 1.0)
        slope = rng.uniform(-2.0, 2.0)
        noise = rng.choice([0.05, 0.5, 2.0])
        y = [round(slope * v + rng.gauss(0.0, noise), 4) for v in x]
        if len(set(y)) < 2:  # degenerate draw; nudge
            y[0] = round(y[0] + 1.0, 4)
        r, p = pearson([mp.mpf(v) for v in x], [mp.mpf(v) for v in y])
        out["pearson"].append({"x": x, "y": [float(v) for v in y],
                               "r": float(r), "p": float(p)})

    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
