"""Support-size estimation from samples, with and without a learned frequency predictor."""
from __future__ import annotations

from .chebyshev import (MonomialPoly, ShiftedPolynomial, chebyshev_coeffs, correction_term,
                        epsilon_bound, eval_poly, shifted_polynomial)
from .distributions import (Distribution, FormatError, HardInstancePair, build_hard_instance,
                            empirical_distribution, load_distribution, load_token_counts,
                            power_sum, save_distribution, support_size, zipf_distribution)
from .estimators import (BaseSelection, EstimateReport, IntervalEstimate, clamp_estimate,
                         cr_estimate, default_degree, learned_estimate, naive_estimate,
                         sanity_check, select_base, wy_estimate)
from .harness import (ConfigError, ExperimentConfig, base_sweep, load_config, parse_config,
                      run_experiment)
from .predictors import (Predictor, empirical_predictor, noisy_oracle_predictor,
                         oracle_predictor, table_predictor)
from .sampling import (AliasSampler, SampleCounts, derive_seed, draw_fixed, draw_poissonized,
                       load_counts, make_rng, save_counts)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
