"""numba-compiled twins of ``numpy_impl``."""
import math
import types

import numpy as np
from numba import njit

from . import eft
from .numpy_impl import LOG_MAX

_jit = njit(cache=True, nogil=True)


def _compile_eft():
    # re-bind each helper against compiled globals so nested calls stay in nopython mode
    scope = {"_SPLITTER": eft._SPLITTER}
    for name in ("two_sum", "split", "two_prod", "td_horner_step"):
        fn = getattr(eft, name)
        clone = types.FunctionType(fn.__code__, scope, name)
        scope[name] = njit(inline="always")(clone)
    return scope


_eft = _compile_eft()
td_horner_step = _eft["td_horner_step"]


@_jit
def _horner3(c0, c1, c2, ys):
    deg = c0.shape[0] - 1
    out = np.empty(ys.shape[0])
    for i in range(ys.shape[0]):
        y = ys[i]
        r0 = c0[deg]
        r1 = c1[deg]
        r2 = c2[deg]
        for k in range(deg - 1, -1, -1):
            r0, r1, r2 = td_horner_step(r0, r1, r2, y, c0[k], c1[k], c2[k])
        out[i] = r0 + (r1 + r2)
    return out


def horner3(c0, c1, c2, ys):
    ys = np.asarray(ys, dtype=np.float64)
    return _horner3(c0, c1, c2, ys.ravel()).reshape(ys.shape)


@_jit
def alias_build(probs):
    m = probs.shape[0]
    scaled = probs * m
    thresh = np.ones(m)
    alias = np.arange(m)
    small = np.empty(m, dtype=np.int64)
    large = np.empty(m, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(m):
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
    for i in range(m):
        if scaled[i] >= 1.0:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        lo = small[ns]
        nl -= 1
        hi = large[nl]
        thresh[lo] = scaled[lo]
        alias[lo] = hi
        scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0
        if scaled[hi] < 1.0:
            small[ns] = hi
            ns += 1
        else:
            large[nl] = hi
            nl += 1
    return thresh, alias


@_jit
def alias_counts(thresh, alias, cols, u, m):
    counts = np.zeros(m, dtype=np.int64)
    for i in range(cols.shape[0]):
        c = cols[i]
        if u[i] < thresh[c]:
            counts[c] += 1
        else:
            counts[alias[c]] += 1
    return counts


@_jit
def poisson_inversion(means, expneg, u):
    out = np.zeros(means.shape[0], dtype=np.int64)
    for i in range(means.shape[0]):
        mu = means[i]
        p = expneg[i]
        cdf = p
        k = 0
        while u[i] > cdf and p > 0.0:
            k += 1
            p = p * (mu / k)
            cdf = cdf + p
        out[i] = k
    return out


@njit(cache=True)
def poisson_ptrs(means, rng):
    out = np.empty(means.shape[0], dtype=np.int64)
    for i in range(means.shape[0]):
        lam = means[i]
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
                break
            if k < 0 or (us < 0.013 and v > us):
                continue
            if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                    <= -lam + k * loglam - math.lgamma(k + 1.0)):
                break
        out[i] = k
    return out


@_jit
def interval_sums(k, j, cheb, log_abs, sign, log_fact, log_scale, log_n, n_intervals):
    deg = log_abs.shape[0] - 1
    sums = np.zeros(n_intervals)
    occupancy = np.zeros(n_intervals, dtype=np.int64)
    for i in range(k.shape[0]):
        ji = j[i]
        ki = k[i]
        occupancy[ji] += 1
        c = 1.0
        if cheb[ji] and ki <= deg and sign[ki] != 0.0:
            expo = log_abs[ki] + ki * log_scale[ji] + log_fact[ki] - ki * log_n
            if expo > LOG_MAX:
                raise OverflowError("correction term overflows; polynomial degree or scale is mis-tuned")
            c += sign[ki] * math.exp(expo)
        sums[ji] += c
    return sums, occupancy
