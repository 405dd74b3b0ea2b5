"""Compare the numba kernels with the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 1000000]
"""
from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from learnsupport._kernels import get_backend
from learnsupport.chebyshev import shifted_polynomial
from learnsupport.distributions import zipf_distribution
from learnsupport.estimators import _LOG_FACT, interval_index, top_interval
from learnsupport.predictors import oracle_predictor
from learnsupport.sampling import draw_fixed, make_rng


def cases(size: int):
    rng = make_rng(0)
    d = zipf_distribution(max(1000, size // 10), 0.5)
    probs = np.array(d.probs)
    m = probs.size
    thresh, alias = get_backend("numpy").alias_build(probs)
    cols = rng.integers(0, m, size=size)
    u = rng.random(size)
    small = rng.random(size) * 9.9
    big = 10 + rng.random(size // 20) * 1e3
    poly = shifted_polynomial(20, 4.0)
    ys = np.linspace(1.0, 4.0, size) * 2.0 ** -poly.scale_exp
    s = draw_fixed(d, size // 4, rng)
    pred = oracle_predictor(d).predict(s.ids)
    n, b, N = d.n, 2.0, s.total
    top = top_interval(n, b)
    j = interval_index(pred, n, b)
    powers = b ** np.arange(top + 1.0)
    cheb = powers / n <= 0.5 * math.log(n) / N
    log_scale = math.log(n) - np.arange(top + 1) * math.log(b)
    sums_poly = shifted_polynomial(5, b * b)
    return {
        "alias_build": lambda k: k.alias_build(probs),
        "alias_counts": lambda k: k.alias_counts(thresh, alias, cols, u, m),
        "poisson_inversion": lambda k: k.poisson_inversion(small, np.exp(-small), u),
        "poisson_ptrs": lambda k: k.poisson_ptrs(big, make_rng(1)),
        "horner3": lambda k: k.horner3(*poly._triple, ys),
        "interval_sums": lambda k: k.interval_sums(s.counts, j, cheb, sums_poly.log_abs,
                                                   sums_poly.sign, _LOG_FACT, log_scale,
                                                   math.log(N), top + 1),
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = {"numpy": get_backend("numpy"), "numba": get_backend("numba")}
    print(f"{'kernel':<18}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, fn in cases(args.size).items():
        times = {}
        for label, k in backends.items():
            fn(k)   # warm-up / compile
            times[label] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<18}{times['numpy']:>12.2f}{times['numba']:>12.2f}"
              f"{times['numpy'] / times['numba']:>9.1f}x")


if __name__ == "__main__":
    main()
