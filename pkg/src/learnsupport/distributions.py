"""Discrete distributions with a minimum-mass promise, and their generators."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping

import numpy as np


class FormatError(ValueError):
    """Malformed input file; the message carries ``path:line``."""


def _tight_n(p_min: float) -> int:
    inv = 1.0 / p_min
    near = round(inv)
    if abs(inv - near) <= 1e-9 * inv:
        return int(near)
    return int(math.ceil(inv))


@dataclass(frozen=True, eq=False)
class Distribution:
    """Sparse distribution over non-negative integer ids.

    Every stored probability is positive and at least ``1/n``.  ``ids`` and
    ``probs`` are parallel read-only arrays.
    """

    n: int
    ids: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        ids = np.ascontiguousarray(self.ids, dtype=np.int64)
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if ids.ndim != 1 or ids.shape != probs.shape:
            raise ValueError("ids and probs must be 1-d arrays of equal length")
        if ids.size == 0:
            raise ValueError("distribution has empty support")
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if (ids < 0).any():
            raise ValueError("ids must be non-negative")
        if np.unique(ids).size != ids.size:
            raise ValueError("duplicate ids")
        if not np.isfinite(probs).all() or (probs <= 0).any() or (probs > 1.0).any():
            raise ValueError("probabilities must lie in (0, 1]")
        total = math.fsum(probs)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        if probs.min() < 1.0 / self.n - 1e-12:
            raise ValueError(f"probability {probs.min()!r} violates the 1/n promise (n={self.n})")
        ids.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "n", int(self.n))

    @property
    def support_size(self) -> int:
        return int(self.ids.size)

    def prob_of(self, ids) -> np.ndarray:
        """Probabilities of ``ids``; raises ``KeyError`` for ids outside the support."""
        ids = np.atleast_1d(np.asarray(ids, dtype=np.int64))
        order = np.argsort(self.ids, kind="stable")
        sorted_ids = self.ids[order]
        pos = np.searchsorted(sorted_ids, ids)
        pos_c = np.minimum(pos, sorted_ids.size - 1)
        found = sorted_ids[pos_c] == ids
        if not found.all():
            raise KeyError(f"id {int(ids[~found][0])} is outside the support")
        return self.probs[order[pos_c]]

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.ids.tolist(), self.probs.tolist()))

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.ids, other.ids)
                and np.array_equal(self.probs, other.probs))

    __hash__ = None


def support_size(d: Distribution) -> int:
    return d.support_size


def power_sum(d: Distribution, r: int) -> float:
    """``sum_i p_i**r`` over the support."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return math.fsum(d.probs ** r)


def zipf_distribution(domain_size: int, exponent: float) -> Distribution:
    """Zipf law ``p_i ~ i**-exponent`` on ids ``1..domain_size``.

    ``n`` is the tightest integer with every probability ``>= 1/n``.
    """
    if domain_size < 1:
        raise ValueError("domain_size must be >= 1")
    if exponent < 0:
        raise ValueError("exponent must be >= 0")
    ranks = np.arange(1, domain_size + 1, dtype=np.float64)
    w = ranks ** (-float(exponent))
    probs = w / math.fsum(w)
    return Distribution(_tight_n(probs.min()), np.arange(1, domain_size + 1), probs)


def empirical_distribution(counts: Mapping[int, int]) -> Distribution:
    """Normalised counts; ``n`` is the total count."""
    items = [(int(i), int(c)) for i, c in counts.items() if c > 0]
    if not items:
        raise ValueError("empirical distribution needs at least one positive count")
    if any(c < 0 for c in counts.values()):
        raise ValueError("counts must be non-negative")
    ids = np.array([i for i, _ in items], dtype=np.int64)
    c = np.array([c for _, c in items], dtype=np.int64)
    total = int(c.sum())
    return Distribution(total, ids, c / total)


# -- lower-bound instances ----------------------------------------------------

def lower_bound_coeffs(k: int) -> tuple[Fraction, ...]:
    """``(-1)^i C(k,i) / (2^(k-1) (k+i))`` for ``i = 0..k``, exactly."""
    return tuple(Fraction((-1) ** i * math.comb(k, i), 2 ** (k - 1) * (k + i))
                 for i in range(k + 1))


def lower_bound_eps(k: int) -> Fraction:
    return Fraction(1, k * 2 ** (k - 1) * math.comb(2 * k, k))


def lcm_modulus(k: int) -> int:
    """``lcm(2^(k-1), k, ..., 2k)``, the modulus named alongside the construction.

    For ``k >= 2`` it does not make every ``a_i * n`` integral; see
    :func:`integral_modulus`.
    """
    return math.lcm(2 ** (k - 1), *range(k, 2 * k + 1))


def integral_modulus(k: int) -> int:
    """Smallest ``m`` such that ``a_i * n`` is integral for every multiple ``n`` of ``m``."""
    return math.lcm(*(a.denominator for a in lower_bound_coeffs(k)))


def round_to_multiple(n: int, m: int) -> int:
    return max(1, round(n / m)) * m


@dataclass(frozen=True, eq=False)
class HardInstancePair:
    """Two distributions with equal power sums of order ``1..k`` and support gap ``~eps*n``."""

    k: int
    n: int
    P: Distribution
    Q: Distribution
    eps: float
    eps_exact: Fraction
    coeffs: tuple[Fraction, ...]
    main_support: tuple[int, int]   # (P, Q) before padding
    padding: tuple[int, int]

    @property
    def a_lb(self) -> np.ndarray:
        return np.array([float(a) for a in self.coeffs])


def _half(coeffs, k, n, positive):
    sizes, units = [], []
    for i, a in enumerate(coeffs):
        if (a > 0) != positive or a == 0:
            continue
        count = math.floor(abs(a) * n)
        sizes.append(count)
        units.append(k + i)
    assigned = sum(c * u for c, u in zip(sizes, units))
    pad = n - assigned
    if pad < 0:
        raise ArithmeticError("assigned mass exceeds one")
    mass_units = np.repeat(np.array(units + [1], dtype=np.int64), sizes + [pad])
    return mass_units, sum(sizes), pad


def build_hard_instance(k: int, n: int) -> HardInstancePair:
    """Moment-matched pair from the sample-complexity lower bound.

    For each ``i`` with ``a_i > 0`` P holds ``floor(a_i n)`` elements of mass
    ``(k+i)/n``; Q likewise for ``a_i < 0``.  Leftover mass is padded with
    elements of mass ``1/n``.  Masses are integers in units of ``1/n``, so the
    padding is exact.
    """
    if not 1 <= k <= 12:
        raise ValueError("k must lie in 1..12")
    if n < 10 * k * 2 ** k:
        raise ValueError(f"n must be >= 10*k*2^k = {10 * k * 2 ** k}")
    coeffs = lower_bound_coeffs(k)
    p_units, p_main, p_pad = _half(coeffs, k, n, positive=True)
    q_units, q_main, q_pad = _half(coeffs, k, n, positive=False)
    P = Distribution(n, np.arange(p_units.size), p_units / n)
    Q = Distribution(n, np.arange(q_units.size), q_units / n)
    eps = lower_bound_eps(k)
    return HardInstancePair(k, n, P, Q, float(eps), eps, coeffs,
                            (p_main, q_main), (p_pad, q_pad))


# -- files --------------------------------------------------------------------

def save_distribution(d: Distribution, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("id,prob\n")
        for i, p in zip(d.ids.tolist(), d.probs.tolist()):
            fh.write(f"{i},{p:.16e}\n")


def load_distribution(path, n: int | None = None) -> Distribution:
    """Read an ``id,prob`` file.

    ``n`` defaults to the tightest value allowed by the smallest probability.
    """
    path = Path(path)
    ids, probs = [], []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError(f"{path}:1: empty file")
    if lines[0].strip() != "id,prob":
        raise FormatError(f"{path}:1: expected header 'id,prob'")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError(f"{path}:{lineno}: expected 2 fields, got {len(parts)}")
        try:
            i = int(parts[0])
            p = float(parts[1])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: cannot parse {line!r}") from None
        if i < 0 or i in seen:
            raise FormatError(f"{path}:{lineno}: invalid or duplicate id {i}")
        if not (math.isfinite(p) and 0.0 < p <= 1.0):
            raise FormatError(f"{path}:{lineno}: probability {p!r} outside (0, 1]")
        seen.add(i)
        ids.append(i)
        probs.append(p)
    if not ids:
        raise FormatError(f"{path}:2: no rows")
    total = math.fsum(probs)
    if abs(total - 1.0) > 1e-6:
        raise FormatError(f"{path}:{len(lines)}: probabilities sum to {total!r}")
    probs = np.array(probs)
    if abs(total - 1.0) > 1e-12:
        probs = probs / total
    if n is None:
        n = _tight_n(probs.min())
    return Distribution(n, np.array(ids, dtype=np.int64), probs)


def load_token_counts(path, sidecar=None) -> tuple[dict[int, int], dict[int, str]]:
    """Count tokens (one per line) under dense ids in first-seen order.

    When ``sidecar`` is given the ``id,token`` map is written there.  An
    existing sidecar is read first and extended, so ids stay stable across
    several token files.
    """
    index: dict[str, int] = {}
    if sidecar is not None and Path(sidecar).exists():
        with open(sidecar, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or rows[0] != ["id", "token"]:
            raise FormatError(f"{sidecar}:1: expected header 'id,token'")
        for lineno, row in enumerate(rows[1:], start=2):
            if len(row) != 2 or not row[0].isdigit() or int(row[0]) != len(index):
                raise FormatError(f"{sidecar}:{lineno}: expected dense '<id>,<token>'")
            index[row[1]] = int(row[0])
    counts: dict[int, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            tok = line.rstrip("\n").rstrip("\r")
            if tok == "":
                continue
            i = index.setdefault(tok, len(index))
            counts[i] = counts.get(i, 0) + 1
    if not counts:
        raise FormatError(f"{path}:1: no tokens")
    names = {i: t for t, i in index.items()}
    seen_names = {i: names[i] for i in counts}
    if sidecar is not None:
        with open(sidecar, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "token"])
            for i in range(len(names)):
                w.writerow([i, names[i]])
    return counts, seen_names
