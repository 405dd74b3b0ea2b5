"""Fixed-size and Poissonized sampling from a :class:`Distribution`."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._kernels import backend
from .distributions import Distribution, FormatError

_CHUNK = 1 << 20
_INVERSION_LIMIT = 10.0


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for the substream ``key`` of ``seed``.

    Distinct keys give statistically independent streams; equal
    ``(seed, key)`` pairs give identical streams.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *key: int) -> int:
    """64-bit seed of substream ``key``; ``make_rng(derive_seed(s, *key))`` is reproducible."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True, eq=False)
class SampleCounts:
    """Per-element counts ``N_i`` of a sample.

    ``rate`` is the Poisson mean when the sample was Poissonized; estimators
    then use it in place of the realised total.
    """

    ids: np.ndarray
    counts: np.ndarray
    rate: float | None = None

    def __post_init__(self):
        ids = np.ascontiguousarray(self.ids, dtype=np.int64)
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        if ids.shape != counts.shape or ids.ndim != 1:
            raise ValueError("ids and counts must be 1-d arrays of equal length")
        if (counts <= 0).any():
            raise ValueError("counts must be positive")
        ids.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def distinct(self) -> int:
        return int(self.ids.size)

    @property
    def effective_size(self) -> float:
        return float(self.rate) if self.rate is not None else float(self.total)

    @classmethod
    def from_mapping(cls, counts, rate=None) -> "SampleCounts":
        items = [(int(i), int(c)) for i, c in counts.items() if c > 0]
        return cls(np.array([i for i, _ in items], dtype=np.int64),
                   np.array([c for _, c in items], dtype=np.int64), rate)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.ids.tolist(), self.counts.tolist()))

    def __eq__(self, other):
        if not isinstance(other, SampleCounts):
            return NotImplemented
        return (np.array_equal(self.ids, other.ids) and np.array_equal(self.counts, other.counts)
                and self.rate == other.rate)

    __hash__ = None


def _from_dense(support_ids: np.ndarray, dense: np.ndarray, rate=None) -> SampleCounts:
    nz = np.flatnonzero(dense)
    return SampleCounts(support_ids[nz], dense[nz], rate)


class AliasSampler:
    """Walker/Vose alias table: O(support) setup, O(1) per draw."""

    def __init__(self, d: Distribution):
        self.distribution = d
        self.thresh, self.alias = backend.alias_build(np.array(d.probs))
        self.thresh.setflags(write=False)
        self.alias.setflags(write=False)

    def dense_counts(self, N: int, rng: np.random.Generator) -> np.ndarray:
        m = self.thresh.size
        dense = np.zeros(m, dtype=np.int64)
        left = int(N)
        while left > 0:
            step = min(left, _CHUNK)
            cols = rng.integers(0, m, size=step)
            u = rng.random(step)
            dense += backend.alias_counts(self.thresh, self.alias, cols, u, m)
            left -= step
        return dense

    def draw(self, N: int, rng: np.random.Generator) -> SampleCounts:
        if N < 0:
            raise ValueError("sample size must be non-negative")
        return _from_dense(self.distribution.ids, self.dense_counts(N, rng))


def build_alias_sampler(d: Distribution) -> AliasSampler:
    return AliasSampler(d)


def draw_fixed(d: Distribution | AliasSampler, N: int, rng: np.random.Generator) -> SampleCounts:
    """``N`` iid draws with replacement, aggregated to counts."""
    sampler = d if isinstance(d, AliasSampler) else AliasSampler(d)
    return sampler.draw(N, rng)


def poisson_variates(means, rng: np.random.Generator) -> np.ndarray:
    """Independent Poisson variates, one per entry of ``means``.

    Means below 10 use inversion by sequential search (one uniform each);
    larger means use transformed rejection (PTRS).
    """
    means = np.ascontiguousarray(means, dtype=np.float64)
    if (means < 0).any() or not np.isfinite(means).all():
        raise ValueError("Poisson means must be finite and non-negative")
    out = np.zeros(means.shape[0], dtype=np.int64)
    small = np.flatnonzero((means > 0) & (means < _INVERSION_LIMIT))
    big = np.flatnonzero(means >= _INVERSION_LIMIT)
    if small.size:
        mu = means[small]
        u = rng.random(small.size)
        out[small] = backend.poisson_inversion(mu, np.exp(-mu), u)
    if big.size:
        out[big] = backend.poisson_ptrs(means[big], rng)
    return out


def draw_poissonized(d: Distribution | AliasSampler, lam: float, rng: np.random.Generator,
                     method: str = "per-element") -> SampleCounts:
    """Sample of ``Poisson(lam)`` size; per-element counts are independent ``Poisson(lam p_i)``.

    ``method="per-element"`` draws each ``N_i`` directly (work proportional to
    the support).  ``method="mixture"`` draws the total first and then samples
    that many elements.
    """
    if not math.isfinite(lam) or lam < 0:
        raise ValueError("lambda must be finite and non-negative")
    sampler = d if isinstance(d, AliasSampler) else None
    dist = sampler.distribution if sampler is not None else d
    if method == "per-element":
        dense = poisson_variates(lam * dist.probs, rng)
        return _from_dense(dist.ids, dense, rate=float(lam))
    if method == "mixture":
        total = int(poisson_variates(np.array([lam]), rng)[0])
        sampler = sampler or AliasSampler(dist)
        return _from_dense(dist.ids, sampler.dense_counts(total, rng), rate=float(lam))
    raise ValueError(f"unknown Poissonization method {method!r}")


def save_counts(sample: SampleCounts, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("id,count\n")
        for i, c in zip(sample.ids.tolist(), sample.counts.tolist()):
            fh.write(f"{i},{c}\n")


def load_counts(path) -> SampleCounts:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "id,count":
        raise FormatError(f"{path}:1: expected header 'id,count'")
    ids, counts, seen = [], [], set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            if len(parts) != 2:
                raise ValueError
            i, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: cannot parse {line!r}") from None
        if i < 0 or c <= 0 or i in seen:
            raise FormatError(f"{path}:{lineno}: invalid id/count {line!r}")
        seen.add(i)
        ids.append(i)
        counts.append(c)
    return SampleCounts(np.array(ids, dtype=np.int64), np.array(counts, dtype=np.int64))
