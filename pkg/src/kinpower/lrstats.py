"""Likelihood-ratio statistics for one profile pair over a frequency table.

Seven statistics are computed, all in log scale:

* ``LAF``  - LR under the proportion-weighted local-average frequencies
* ``AVG``  - proportion-weighted mean of the per-subpop LRs
* ``MAX`` / ``MIN`` - extreme per-subpop LR
* ``RMAX`` / ``RMIN`` - ratio of the extreme likelihoods taken separately
  under the alternative and the null
* ``CB``   - LR under frequencies pooled into one homogeneous group

All arithmetic is in log space; 15-locus products of genotype
probabilities underflow linear doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Tuple

import numpy as np

from .errors import PanelMismatch
from .ibd import ThetaIBD, log_pair_probability
from .tables import FrequencyTable, Profile, local_average, pooled_frequencies

STATISTICS = ("LAF", "AVG", "MAX", "MIN", "RMAX", "RMIN", "CB")


def loglik(
    pair: Tuple[Profile, Profile],
    theta: ThetaIBD,
    locus_freqs: Mapping[str, Mapping[str, float]],
) -> float:
    """Sum of per-locus log pair probabilities; -inf propagates."""
    p1, p2 = pair
    total = 0.0
    for locus, f in locus_freqs.items():
        total += log_pair_probability(p1.genotype(locus), p2.genotype(locus), theta, f)
    return total


def _sub_inf(num: float, den: float) -> float:
    """num - den with the sentinel convention for zero-probability cells.

    -inf numerator dominates (reject-relatedness signal); finite numerator
    over a -inf denominator is +inf.
    """
    if math.isinf(num) and num < 0:
        return -math.inf
    if math.isinf(den) and den < 0:
        return math.inf
    return num - den


def _logsumexp_weighted(logw: np.ndarray, x: np.ndarray) -> float:
    terms = logw + x
    m = np.max(terms)
    if not np.isfinite(m):
        return float(m)
    return float(m + np.log(np.exp(terms - m).sum()))


@dataclass(frozen=True)
class LrBreakdown:
    """Per-subpopulation log-likelihoods and all derived statistics."""

    subpops: tuple[str, ...]
    proportions: tuple[float, ...]
    loglik0: tuple[float, ...]        # per-subpop, null relationship
    loglik1: tuple[float, ...]        # per-subpop, alternative relationship
    loglik0_local: float
    loglik1_local: float
    loglik0_pooled: float
    loglik1_pooled: float
    stats: Mapping[str, float]        # log-scale statistic values

    @property
    def per_subpop_log_lr(self) -> tuple[float, ...]:
        return tuple(_sub_inf(l1, l0) for l0, l1 in zip(self.loglik0, self.loglik1))


def derive_statistics(
    loglik0: np.ndarray,
    loglik1: np.ndarray,
    loglik_local: Tuple[float, float],
    loglik_pooled: Tuple[float, float],
    proportions: np.ndarray,
) -> dict[str, float]:
    """Derive the seven statistics from per-subpop log-likelihoods."""
    llr = np.array([_sub_inf(l1, l0) for l0, l1 in zip(loglik0, loglik1)])
    logp = np.log(proportions)
    return {
        "LAF": _sub_inf(loglik_local[1], loglik_local[0]),
        "AVG": _logsumexp_weighted(logp, llr),
        "MAX": float(np.max(llr)),
        "MIN": float(np.min(llr)),
        "RMAX": _sub_inf(float(np.max(loglik1)), float(np.max(loglik0))),
        "RMIN": _sub_inf(float(np.min(loglik1)), float(np.min(loglik0))),
        "CB": _sub_inf(loglik_pooled[1], loglik_pooled[0]),
    }


def lr_all(
    pair: Tuple[Profile, Profile],
    theta0: ThetaIBD,
    theta1: ThetaIBD,
    table: FrequencyTable,
    cb_weights: str = "auto",
) -> LrBreakdown:
    """Compute all seven statistics for one profile pair."""
    p1, p2 = pair
    for profile in pair:
        if set(profile.loci) != set(table.panel):
            raise PanelMismatch(
                f"profile loci {sorted(profile.loci)} do not cover panel {sorted(table.panel)}")

    lf_local = local_average(table).locus_freqs("local")
    lf_pooled = pooled_frequencies(table, cb_weights).locus_freqs("pooled")

    ll0 = np.array([loglik(pair, theta0, table.locus_freqs(s.name)) for s in table.subpops])
    ll1 = np.array([loglik(pair, theta1, table.locus_freqs(s.name)) for s in table.subpops])
    local0, local1 = loglik(pair, theta0, lf_local), loglik(pair, theta1, lf_local)
    pooled0, pooled1 = loglik(pair, theta0, lf_pooled), loglik(pair, theta1, lf_pooled)

    stats = derive_statistics(
        ll0, ll1, (local0, local1), (pooled0, pooled1), np.array(table.proportions)
    )
    return LrBreakdown(
        subpops=tuple(s.name for s in table.subpops),
        proportions=table.proportions,
        loglik0=tuple(ll0),
        loglik1=tuple(ll1),
        loglik0_local=local0,
        loglik1_local=local1,
        loglik0_pooled=pooled0,
        loglik1_pooled=pooled1,
        stats=stats,
    )
