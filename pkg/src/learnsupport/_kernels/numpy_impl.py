"""Pure-numpy implementations of the hot loops.

Every function here has a twin in ``numba_impl`` with the same signature and,
except where noted, the same floating-point operation order.
"""
import math

import numpy as np

from .eft import td_horner_step

LOG_MAX = math.log(np.finfo(np.float64).max)


def horner3(c0, c1, c2, ys):
    ys = np.asarray(ys, dtype=np.float64)
    deg = c0.shape[0] - 1
    r0 = np.full_like(ys, c0[deg])
    r1 = np.full_like(ys, c1[deg])
    r2 = np.full_like(ys, c2[deg])
    for k in range(deg - 1, -1, -1):
        r0, r1, r2 = td_horner_step(r0, r1, r2, ys, c0[k], c1[k], c2[k])
    return r0 + (r1 + r2)


def alias_build(probs):
    m = probs.shape[0]
    scaled = probs * m
    thresh = np.ones(m)
    alias = np.arange(m, dtype=np.int64)
    small = [i for i in range(m) if scaled[i] < 1.0]
    large = [i for i in range(m) if scaled[i] >= 1.0]
    scaled = scaled.tolist()
    while small and large:
        lo = small.pop()
        hi = large.pop()
        thresh[lo] = scaled[lo]
        alias[lo] = hi
        scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0
        if scaled[hi] < 1.0:
            small.append(hi)
        else:
            large.append(hi)
    return thresh, alias


def alias_counts(thresh, alias, cols, u, m):
    picked = np.where(u < thresh[cols], cols, alias[cols])
    return np.bincount(picked, minlength=m).astype(np.int64)


def poisson_inversion(means, expneg, u):
    k = np.zeros(means.shape[0], dtype=np.int64)
    p = expneg.copy()
    cdf = p.copy()
    active = np.nonzero(u > cdf)[0]
    while active.size:
        k[active] += 1
        p[active] = p[active] * (means[active] / k[active])
        cdf[active] = cdf[active] + p[active]
        keep = (u[active] > cdf[active]) & (p[active] > 0.0)
        active = active[keep]
    return k


def _ptrs_one(lam, rng):
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = rng.random() - 0.5
        v = rng.random()
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return k
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                <= -lam + k * loglam - math.lgamma(k + 1.0)):
            return k


def poisson_ptrs(means, rng):
    out = np.empty(means.shape[0], dtype=np.int64)
    for i in range(means.shape[0]):
        out[i] = _ptrs_one(float(means[i]), rng)
    return out


def interval_sums(k, j, cheb, log_abs, sign, log_fact, log_scale, log_n, n_intervals):
    deg = log_abs.shape[0] - 1
    occupancy = np.bincount(j, minlength=n_intervals).astype(np.int64)
    contrib = np.ones(k.shape[0])
    kc = np.minimum(k, deg)
    use = cheb[j] & (k <= deg) & (sign[kc] != 0.0)
    if use.any():
        kk = k[use]
        expo = log_abs[kk] + kk * log_scale[j[use]] + log_fact[kk] - kk * log_n
        if expo.max() > LOG_MAX:
            raise OverflowError("correction term overflows; polynomial degree or scale is mis-tuned")
        contrib[use] += sign[kk] * np.exp(expo)
    sums = np.bincount(j, weights=contrib, minlength=n_intervals)
    return sums, occupancy
