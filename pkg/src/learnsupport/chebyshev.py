"""Chebyshev polynomials in the monomial basis and their shifted/scaled forms.

The estimators consume the monomial coefficients ``a_k`` one at a time, so the
polynomials are kept in the monomial basis.  That basis is badly conditioned:
at degree 25 on ``[1, 2]`` the Horner terms are ~1e9 while the polynomial is
~1e-19 in size.  Coefficients are therefore built exactly with integer
arithmetic, stored as triple-double expansions for evaluation and as
(sign, log-magnitude) pairs for the log-space correction terms.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

from ._kernels import backend

MAX_DEGREE = 64
LOG_MAX = math.log(np.finfo(np.float64).max)


@dataclass(frozen=True)
class MonomialPoly:
    """Polynomial with exact integer coefficients, ``coeffs[k]`` multiplying x**k."""

    degree: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise ValueError("coeffs must have length degree + 1")

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])


def chebyshev_coeffs(L: int) -> MonomialPoly:
    """Monomial coefficients of the Chebyshev polynomial ``cos(L * arccos(x))``."""
    if L < 0:
        raise ValueError("degree must be non-negative")
    if L > MAX_DEGREE:
        raise OverflowError(f"degree {L} exceeds the supported maximum {MAX_DEGREE}")
    prev, cur = [1], [0, 1]
    if L == 0:
        return MonomialPoly(0, (1,))
    for _ in range(L - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return MonomialPoly(L, tuple(cur))


def _to_triple(x: Fraction) -> tuple[float, float, float]:
    hi = float(x)
    rest = x - Fraction(hi)
    mid = float(rest)
    lo = float(rest - Fraction(mid))
    return hi, mid, lo


def _log_abs_fraction(x: Fraction) -> float:
    return math.log(abs(x.numerator)) - math.log(x.denominator)


@dataclass(frozen=True, eq=False)
class ShiftedPolynomial:
    """``P_L(x) = -Q_L((2x - (R+1)) / (R-1)) / Q_L(-(R+1)/(R-1))``.

    ``P_L(0) = -1`` and ``|P_L| <= eps`` on ``[1, R]``.

    Calling the object runs Horner in triple-double arithmetic.  The absolute
    error stays below ``1e-6 * eps`` on ``[1, R]`` for ``L <= 25`` when
    ``R >= 1.25``; narrower intervals at higher degree lose that margin
    because ``eps`` shrinks faster than the Horner partial sums.

    Attributes
    ----------
    degree, ratio : int, float
        ``L`` and ``R``.
    exact : tuple of Fraction
        Exact coefficients ``a_0 .. a_L`` (``R`` is taken as the exact binary
        value of the given float).
    eps : float
        ``1 / |Q_L(-(R+1)/(R-1))|``.
    sign, log_abs : ndarray
        Sign and natural log of ``|a_k|``.
    """

    degree: int
    ratio: float
    exact: tuple[Fraction, ...]
    eps: float
    eps_exact: Fraction
    sign: np.ndarray
    log_abs: np.ndarray
    scale_exp: int
    _triple: tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def coeffs(self) -> np.ndarray:
        """Coefficients as doubles (may under/overflow for extreme ``R``)."""
        with np.errstate(over="ignore", under="ignore"):
            return self.sign * np.exp(self.log_abs)

    def __call__(self, x):
        return eval_poly(self, x)


@functools.lru_cache(maxsize=256)
def _build_shifted(L: int, R: float) -> ShiftedPolynomial:
    cheb = chebyshev_coeffs(L).coeffs
    rq = Fraction(R)
    num, den = rq.numerator, rq.denominator
    d = num - den          # R - 1, scaled by den
    t = num + den          # R + 1, scaled by den
    # D^L Q_L(y - T/D) as a polynomial in z = D*y: sum_m c_m D^(L-m) (z - T)^m,
    # expanded by an integer Taylor shift.
    g = [cheb[m] * d ** (L - m) for m in range(L + 1)]
    for i in range(L):
        for jj in range(L - 1, i - 1, -1):
            g[jj] -= t * g[jj + 1]
    # z = D * alpha * x = 2*den*x
    h0 = g[0]
    two_q = 2 * den
    exact = tuple(Fraction(-g[k] * two_q ** k, h0) for k in range(L + 1))
    eps_exact = Fraction(d ** L, abs(h0))

    scale_exp = round(math.log2((R + 1.0) / 2.0))
    triples = np.empty((3, L + 1))
    for k, a in enumerate(exact):
        scaled = a * (Fraction(2) ** (scale_exp * k))
        triples[:, k] = _to_triple(scaled)
    sign = np.array([float((a > 0) - (a < 0)) for a in exact])
    log_abs = np.array([_log_abs_fraction(a) if a != 0 else -math.inf for a in exact])
    for arr in (sign, log_abs, triples):
        arr.setflags(write=False)
    return ShiftedPolynomial(
        degree=L, ratio=R, exact=exact, eps=float(eps_exact), eps_exact=eps_exact,
        sign=sign, log_abs=log_abs, scale_exp=scale_exp,
        _triple=(triples[0], triples[1], triples[2]),
    )


def shifted_polynomial(L: int, R: float) -> ShiftedPolynomial:
    """Shifted and scaled Chebyshev polynomial on ``[1, R]`` with ``P(0) = -1``."""
    if not isinstance(L, (int, np.integer)) or L < 1:
        raise ValueError("degree L must be an integer >= 1")
    if L > MAX_DEGREE:
        raise OverflowError(f"degree {L} exceeds the supported maximum {MAX_DEGREE}")
    R = float(R)
    if not math.isfinite(R) or R <= 1.0:
        raise ValueError("ratio R must be finite and > 1")
    return _build_shifted(int(L), R)


def epsilon_bound(L: int, R: float) -> float:
    """Sup-norm guarantee ``eps`` of the degree-``L`` polynomial on ``[1, R]``."""
    return shifted_polynomial(L, R).eps


def eval_poly(p, x):
    """Evaluate a polynomial at ``x`` (scalar or array) by Horner's scheme.

    ``p`` may be a plain coefficient sequence (lowest degree first) or a
    :class:`MonomialPoly`, both evaluated in double precision, or a
    :class:`ShiftedPolynomial`, evaluated in triple-double arithmetic.
    """
    scalar = np.ndim(x) == 0
    xs = np.asarray(x, dtype=np.float64)
    if isinstance(p, ShiftedPolynomial):
        c0, c1, c2 = p._triple
        ys = np.ldexp(xs, -p.scale_exp)
        out = backend.horner3(c0, c1, c2, np.atleast_1d(ys))
    else:
        coeffs = p.coeffs if isinstance(p, MonomialPoly) else p
        coeffs = [float(c) for c in coeffs]
        out = np.zeros_like(np.atleast_1d(xs))
        for c in reversed(coeffs):
            out = out * np.atleast_1d(xs) + c
    return float(out[0]) if scalar else out.reshape(xs.shape)


def correction_term(poly: ShiftedPolynomial, k: int, scale: Real, N: Real) -> float:
    """``a_k * scale**k * k! / N**k`` computed in log space (zero for ``k > L``)."""
    if k < 0:
        raise ValueError("count k must be non-negative")
    if scale <= 0 or N <= 0:
        raise ValueError("scale and N must be positive")
    if k > poly.degree or poly.sign[k] == 0.0:
        return 0.0
    expo = poly.log_abs[k] + k * math.log(scale) + math.lgamma(k + 1) - k * math.log(N)
    if expo > LOG_MAX:
        raise OverflowError(
            f"correction term a_{k} * scale^{k} * {k}!/N^{k} overflows (log magnitude {expo:.1f})"
        )
    return float(poly.sign[k]) * math.exp(expo)
