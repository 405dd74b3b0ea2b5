"""Multi-trial experiments and base sweeps with deterministic CSV output."""
from __future__ import annotations

import configparser
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import estimators as est
from .distributions import (Distribution, build_hard_instance, empirical_distribution,
                            load_distribution, load_token_counts, zipf_distribution)
from .predictors import (Predictor, empirical_predictor, noisy_oracle_predictor,
                         oracle_predictor, table_predictor)
from .sampling import AliasSampler, derive_seed, draw_poissonized, make_rng

ESTIMATORS = ("learned", "wy", "cr", "naive")
ROW_HEADER = "estimator,sample_size,trial,estimate_raw,estimate_clamped,true_support,rel_error,base,seed"
SUMMARY_HEADER = "estimator,sample_size,median_rel_error,std_rel_error,trials"
SWEEP_HEADER = "base,median_rel_error,failing_fraction"
PREDICTOR_STREAM = 2 ** 31 - 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    distribution: str
    predictor: str = "none"
    estimators: tuple[str, ...] = ESTIMATORS
    sample_sizes: tuple[str, ...] = ("0.05",)
    trials: int = 50
    master_seed: int = 0
    l_constant: float = est.DEFAULT_DEGREE_CONSTANT
    threshold_constant: float = est.DEFAULT_THRESHOLD_CONSTANT
    sampling: str = "fixed"
    workers: int = 1
    n: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials: must be >= 1")
        if not self.estimators:
            raise ConfigError("estimators: at least one estimator is required")
        for name in self.estimators:
            if name not in ESTIMATORS:
                raise ConfigError(f"estimators: unknown estimator {name!r}")
        if self.sampling not in ("fixed", "poisson"):
            raise ConfigError("sampling: must be 'fixed' or 'poisson'")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if not self.sample_sizes:
            raise ConfigError("sample_sizes: at least one size is required")
        for s in self.sample_sizes:
            _parse_size(s, 10)
        needs_pred = {"learned", "cr"} & set(self.estimators)
        if needs_pred and self.predictor == "none":
            raise ConfigError("predictor: required by the learned and cr estimators")


_FIELDS = {
    "distribution": str, "predictor": str, "estimators": "list", "sample_sizes": "list",
    "trials": int, "master_seed": int, "l_constant": float, "threshold_constant": float,
    "sampling": str, "workers": int, "n": int,
}


def parse_config(text: str, **overrides) -> ExperimentConfig:
    """Flat ``key = value`` text (no sections) to an :class:`ExperimentConfig`."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string("[experiment]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"config: {exc}") from None
    values = {}
    for raw_key, raw in cp["experiment"].items():
        key = raw_key.strip().lower().replace("-", "_").replace(" ", "_")
        kind = _FIELDS.get(key)
        if kind is None:
            raise ConfigError(f"{raw_key}: unknown field")
        try:
            if kind == "list":
                values[key] = tuple(p.strip() for p in raw.split(",") if p.strip())
            else:
                values[key] = kind(raw.strip())
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "distribution" not in values:
        raise ConfigError("distribution: required")
    return ExperimentConfig(**values)


def load_config(path, **overrides) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), **overrides)


def _parse_size(spec: str, n: int) -> int:
    s = str(spec).strip()
    try:
        if s.endswith("%"):
            frac = float(s[:-1]) / 100.0
        elif "." in s or "e" in s.lower():
            frac = float(s)
        else:
            size = int(s)
            if size < 1:
                raise ConfigError(f"sample_sizes: {s!r} must be positive")
            return size
    except ValueError:
        raise ConfigError(f"sample_sizes: cannot parse {s!r}") from None
    if not 0.0 < frac <= 1.0:
        raise ConfigError(f"sample_sizes: fraction {s!r} outside (0, 1]")
    return max(1, math.floor(frac * n))


def resolve_distribution(spec: str, n: int | None = None) -> Distribution:
    """``zipf:<domain>:<exponent>``, ``hard:<k>:<n>:<P|Q>``, ``tokens:<path>`` or ``[file:]<path>``."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "zipf":
            domain, exponent = rest.split(":")
            return zipf_distribution(int(domain), float(exponent))
        if kind == "hard":
            k, hn, side = rest.split(":")
            pair = build_hard_instance(int(k), int(hn))
            return {"P": pair.P, "Q": pair.Q}[side.upper()]
        if kind == "tokens":
            return empirical_distribution(load_token_counts(rest)[0])
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"distribution: bad spec {spec!r} ({exc})") from None
    path = rest if kind == "file" else spec
    return load_distribution(path, n=n)


def resolve_predictor(spec: str, d: Distribution | None, seed: int,
                      n: int | None = None) -> Predictor | None:
    """``oracle``, ``noisy:<b>``, ``empirical:<fraction>``, ``table:<path>`` or ``none``."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "none":
            return None
        if kind == "oracle":
            return oracle_predictor(d)
        if kind == "noisy":
            return noisy_oracle_predictor(d, float(arg), derive_seed(seed, PREDICTOR_STREAM))
        if kind == "empirical":
            return empirical_predictor(d, float(arg), make_rng(seed, PREDICTOR_STREAM))
        if kind == "table":
            return table_predictor(arg, n if n is not None else d.n)
    except ValueError as exc:
        raise ConfigError(f"predictor: bad spec {spec!r} ({exc})") from None
    raise ConfigError(f"predictor: unknown kind {kind!r}")


@dataclass(frozen=True)
class ResultRow:
    estimator: str
    sample_size: int
    trial: int
    estimate_raw: float
    estimate_clamped: float
    true_support: int
    rel_error: float
    base: float | None
    seed: int

    def to_csv(self) -> str:
        base = "" if self.base is None else repr(float(self.base))
        return (f"{self.estimator},{self.sample_size},{self.trial},{self.estimate_raw!r},"
                f"{self.estimate_clamped!r},{self.true_support},{self.rel_error!r},{base},{self.seed}")


@dataclass(frozen=True)
class SummaryRow:
    estimator: str
    sample_size: int
    median_rel_error: float
    std_rel_error: float
    trials: int

    def to_csv(self) -> str:
        return (f"{self.estimator},{self.sample_size},{self.median_rel_error!r},"
                f"{self.std_rel_error!r},{self.trials}")


def lower_median(values: Sequence[float]) -> float:
    s = sorted(values)
    return float(s[(len(s) - 1) // 2])


def relative_error(estimate: float, support: int) -> float:
    return abs(1.0 - estimate / support)


@dataclass
class Setup:
    """Everything a trial needs, built once per experiment and shared read-only."""

    cfg: ExperimentConfig
    dist: Distribution
    sampler: AliasSampler
    predictor: Predictor | None
    n: int
    degree: int
    sizes: tuple[int, ...] = field(default=())

    @classmethod
    def build(cls, cfg: ExperimentConfig) -> "Setup":
        d = resolve_distribution(cfg.distribution, cfg.n)
        n = cfg.n or d.n
        pred = resolve_predictor(cfg.predictor, d, cfg.master_seed, n)
        sizes = tuple(_parse_size(s, n) for s in cfg.sample_sizes)
        return cls(cfg, d, AliasSampler(d), pred, n, est.default_degree(n, cfg.l_constant), sizes)

    def sample(self, size: int, seed: int):
        rng = make_rng(seed)
        if self.cfg.sampling == "poisson":
            return draw_poissonized(self.sampler, float(size), rng)
        return self.sampler.draw(size, rng)


def _run_trial(setup: Setup, size_idx: int, trial: int) -> list[ResultRow]:
    cfg, n = setup.cfg, setup.n
    size = setup.sizes[size_idx]
    seed = derive_seed(cfg.master_seed, size_idx, trial)
    counts = setup.sample(size, seed)
    S = setup.dist.support_size
    th = cfg.threshold_constant
    rows = []
    for name in cfg.estimators:
        base = None
        if name == "learned":
            values = setup.predictor.predict(counts.ids)
            sel = est.select_base(counts, values, n, setup.degree, threshold=th)
            rep = est.learned_estimate(counts, values, n, sel.b_final, setup.degree, th)
            raw, clamped, base = rep.estimate, rep.clamped_estimate, sel.b_final
        elif name == "wy":
            rep = est.wy_estimate(counts, n, setup.degree, th)
            raw, clamped = rep.estimate, rep.clamped_estimate
        elif name == "cr":
            raw = est.cr_estimate(counts, setup.predictor, n)
            clamped = est.clamp_estimate(raw, counts.distinct, n)
        else:
            raw = float(est.naive_estimate(counts))
            clamped = est.clamp_estimate(raw, counts.distinct, n)
        rows.append(ResultRow(name, size, trial, float(raw), float(clamped), S,
                              relative_error(clamped, S), base, seed))
    return rows


def _map_ordered(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: fn(*t), tasks))


def run_experiment(cfg: ExperimentConfig, setup: Setup | None = None
                   ) -> tuple[list[ResultRow], list[SummaryRow]]:
    """All (sample size, trial) runs; rows ordered by (estimator, size, trial).

    Every estimator in a trial sees the same sample, drawn from the substream
    ``(master_seed, size index, trial)``.
    """
    setup = setup or Setup.build(cfg)
    tasks = [(setup, si, t) for si in range(len(setup.sizes)) for t in range(cfg.trials)]
    per_trial = _map_ordered(_run_trial, tasks, cfg.workers)
    by_key = {(r.estimator, r.sample_size, r.trial): r for rows in per_trial for r in rows}
    rows, summary = [], []
    for name in cfg.estimators:
        for size in dict.fromkeys(setup.sizes):
            errs = []
            for t in range(cfg.trials):
                r = by_key[(name, size, t)]
                rows.append(r)
                errs.append(r.rel_error)
            summary.append(SummaryRow(name, size, lower_median(errs), float(np.std(errs)), cfg.trials))
    return rows, summary


@dataclass(frozen=True)
class SweepRow:
    base: float | str
    median_rel_error: float
    failing_fraction: float | None

    def to_csv(self) -> str:
        base = self.base if isinstance(self.base, str) else repr(float(self.base))
        frac = "" if self.failing_fraction is None else repr(self.failing_fraction)
        return f"{base},{self.median_rel_error!r},{frac}"


def _sweep_trial(setup: Setup, trial: int, bases: tuple[float, ...]):
    cfg, n, S = setup.cfg, setup.n, setup.dist.support_size
    counts = setup.sample(setup.sizes[0], derive_seed(cfg.master_seed, 0, trial))
    values = setup.predictor.predict(counts.ids)
    out = []
    for b in bases:
        rep = est.learned_estimate(counts, values, n, b, setup.degree, cfg.threshold_constant)
        val = est.clamp_estimate(rep.substituted_estimate(), counts.distinct, n)
        out.append((relative_error(val, S), rep.failing_fraction))
    wy = est.wy_estimate(counts, n, setup.degree, cfg.threshold_constant)
    return out, relative_error(wy.clamped_estimate, S)


def base_sweep(cfg: ExperimentConfig, bases: Iterable[float], setup: Setup | None = None
               ) -> list[SweepRow]:
    """Median error and mean failing fraction per base, at the first configured sample size.

    Failing intervals are replaced by their distinct count, for display only.
    A final row with base ``wy`` carries the predictor-free reference error.
    """
    bases = tuple(float(b) for b in bases)
    if not bases:
        raise ConfigError("bases: at least one base is required")
    setup = setup or Setup.build(cfg)
    if setup.predictor is None:
        raise ConfigError("predictor: required for a base sweep")
    results = _map_ordered(_sweep_trial, [(setup, t, bases) for t in range(cfg.trials)], cfg.workers)
    rows = []
    for q, b in enumerate(bases):
        errs = [res[0][q][0] for res in results]
        fails = [res[0][q][1] for res in results]
        rows.append(SweepRow(b, lower_median(errs), math.fsum(fails) / len(fails)))
    rows.append(SweepRow("wy", lower_median([res[1] for res in results]), None))
    return rows


def format_csv(header: str, rows) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for r in rows:
        buf.write(r.to_csv() + "\n")
    return buf.getvalue()


def write_csv(path, header: str, rows) -> None:
    Path(path).write_text(format_csv(header, rows), encoding="utf-8")


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
