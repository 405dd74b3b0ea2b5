"""Frequency predictors ``id -> predicted probability``, clamped to ``[1/n, 1]``."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping

import numpy as np

from .distributions import Distribution, FormatError
from .sampling import draw_fixed


class Predictor:
    """Deterministic lookup table over sorted ids.

    Subclasses differ only in how the table is filled and in what happens on
    a miss: ``strict`` predictors raise ``KeyError``, the others return the
    floor ``1/n``.
    """

    kind = "table"
    strict = False

    def __init__(self, ids, values, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        ids = np.asarray(ids, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        order = np.argsort(ids, kind="stable")
        self._ids = ids[order]
        if self._ids.size and np.any(np.diff(self._ids) == 0):
            raise ValueError("duplicate ids in predictor table")
        self.n = int(n)
        self.floor = 1.0 / self.n
        self._values = np.clip(values[order], self.floor, 1.0)
        self._ids.setflags(write=False)
        self._values.setflags(write=False)

    def predict(self, ids) -> np.ndarray:
        ids = np.atleast_1d(np.asarray(ids, dtype=np.int64))
        out = np.full(ids.shape, self.floor)
        if self._ids.size == 0:
            hit = np.zeros(ids.shape, dtype=bool)
            pos = np.zeros(ids.shape, dtype=np.int64)
        else:
            pos = np.minimum(np.searchsorted(self._ids, ids), self._ids.size - 1)
            hit = self._ids[pos] == ids
        if self.strict and not hit.all():
            raise KeyError(f"id {int(ids[~hit][0])} is unknown to the {self.kind} predictor")
        out[hit] = self._values[pos[hit]]
        return out

    def __call__(self, i: int) -> float:
        return float(self.predict([i])[0])

    def items(self):
        return zip(self._ids.tolist(), self._values.tolist())

    def __repr__(self):
        return f"<{type(self).__name__} kind={self.kind} entries={self._ids.size} n={self.n}>"


class OraclePredictor(Predictor):
    kind = "oracle"
    strict = True

    def __init__(self, d: Distribution):
        super().__init__(d.ids, d.probs, d.n)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def id_uniforms(seed: int, ids) -> np.ndarray:
    """Uniforms in ``[0, 1)``, each a pure function of ``(seed, id)``."""
    ids = np.asarray(ids, dtype=np.int64).astype(np.uint64)
    key = _splitmix64(np.array([seed % 2 ** 64], dtype=np.uint64))[0]
    bits = _splitmix64(ids ^ key)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / 2 ** 53)


class NoisyOraclePredictor(Predictor):
    """``p_i / u_i`` with ``u_i`` uniform on ``[1, b_noise]``, fixed per id.

    Satisfies ``predict(i) <= p_i <= b_noise * predict(i)``.
    """

    kind = "noisy-oracle"
    strict = True

    def __init__(self, d: Distribution, b_noise: float, seed: int = 0):
        if not b_noise >= 1.0:
            raise ValueError("b_noise must be >= 1")
        self.b_noise = float(b_noise)
        self.seed = int(seed)
        u = 1.0 + (self.b_noise - 1.0) * id_uniforms(self.seed, d.ids)
        vals = d.probs / u
        # guard the upper side of the sandwich against the division's rounding
        low = self.b_noise * vals < d.probs
        while low.any():
            vals[low] = np.nextafter(vals[low], np.inf)
            low = self.b_noise * vals < d.probs
        super().__init__(d.ids, vals, d.n)


class EmpiricalPredictor(Predictor):
    """Empirical frequencies of one fixed sample of ``floor(fraction * n)`` draws."""

    kind = "empirical"

    def __init__(self, d: Distribution, fraction: float, rng: np.random.Generator):
        if not 0.0 < fraction <= 1.0:
            raise ValueError("fraction must lie in (0, 1]")
        size = math.floor(fraction * d.n)
        if size < 1:
            raise ValueError("fraction * n must be at least one draw")
        sample = draw_fixed(d, size, rng)
        self.sample_size = size
        super().__init__(sample.ids, sample.counts / size, d.n)


class TablePredictor(Predictor):
    kind = "table"


def oracle_predictor(d: Distribution) -> OraclePredictor:
    return OraclePredictor(d)


def noisy_oracle_predictor(d: Distribution, b_noise: float, seed: int = 0) -> NoisyOraclePredictor:
    return NoisyOraclePredictor(d, b_noise, seed)


def empirical_predictor(d: Distribution, fraction: float, rng: np.random.Generator) -> EmpiricalPredictor:
    return EmpiricalPredictor(d, fraction, rng)


def table_predictor(source: Mapping[int, float] | str | Path, n: int) -> TablePredictor:
    """Predictor backed by a mapping or an ``id,predicted_prob`` CSV file."""
    if isinstance(source, Mapping):
        ids = list(source.keys())
        vals = [float(v) for v in source.values()]
        return TablePredictor(ids, vals, n)
    return TablePredictor(*_read_table(Path(source)), n)


def _read_table(path: Path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "id,predicted_prob":
        raise FormatError(f"{path}:1: expected header 'id,predicted_prob'")
    ids, vals, seen = [], [], set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            if len(parts) != 2:
                raise ValueError
            i, v = int(parts[0]), float(parts[1])
        except ValueError:
            raise FormatError(f"{path}:{lineno}: cannot parse {line!r}") from None
        if i < 0 or i in seen or not math.isfinite(v) or v < 0:
            raise FormatError(f"{path}:{lineno}: invalid row {line!r}")
        seen.add(i)
        ids.append(i)
        vals.append(v)
    return ids, vals


def save_predictor_table(pred: Predictor, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("id,predicted_prob\n")
        for i, v in pred.items():
            fh.write(f"{i},{v:.16e}\n")
