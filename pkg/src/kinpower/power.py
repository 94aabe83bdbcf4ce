"""Null thresholds, power estimates, exact CIs, power curves, and
subpopulation bias analysis over simulated log-LR samples.

Threshold convention: rejection uses the strict inequality ``LR > c``.
The threshold for a false positive rate alpha is the ceil(B*(1-alpha))-th
order statistic of the null sample, so the realized FPR on the null
sample never exceeds alpha (ties count as non-rejections).
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, TextIO, Union

import numpy as np
from scipy import stats as sps

from .engine import SampleMatrix
from .errors import AlphaTooSmallForB, EmptySubpopSample, SmallSampleWarning

DEFAULT_CURVE_GRID = tuple(np.geomspace(1e-6, 4e-5, 30))
DEFAULT_TEST_ALPHAS = {
    "parent-child": 2e-5,
    "full-sib": 2e-4,
    "half-sib-paper": 2e-3,
    "half-sib-standard": 2e-3,
}


@dataclass(frozen=True)
class PowerReport:
    statistic: str
    alpha: float
    threshold_log: float
    power: float
    ci_low: float
    ci_high: float
    per_subpop: dict[str, tuple[float, int, tuple[float, float]]]

    @property
    def threshold(self) -> float:
        """Linear-scale threshold (matches published table conventions)."""
        return math.exp(self.threshold_log)


@dataclass(frozen=True)
class PowerCurve:
    statistic: str
    points: tuple[tuple[float, float], ...]  # (alpha, power)


@dataclass(frozen=True)
class DiffCI:
    subpop_i: str
    subpop_j: str
    estimate: float
    ci_low: float
    ci_high: float


def null_threshold(null_samples: np.ndarray, alpha: float) -> float:
    """Empirical threshold c with realized P(x > c) <= alpha on the sample."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    x = np.asarray(null_samples, dtype=np.float64)
    if x.size == 0:
        raise ValueError("null sample is empty")
    if alpha * x.size < 10:
        warnings.warn(
            f"alpha*B = {alpha * x.size:.3g} < 10; threshold estimate is unstable",
            AlphaTooSmallForB,
        )
    k = math.ceil(x.size * (1.0 - alpha))
    if k <= 0:
        return -math.inf
    return float(np.partition(x, k - 1)[k - 1])


def clopper_pearson(successes: int, trials: int, level: float = 0.95):
    """Exact binomial confidence interval from beta quantiles."""
    if not (0 <= successes <= trials) or trials <= 0:
        raise ValueError(f"bad counts ({successes}, {trials})")
    a = 1.0 - level
    lo = 0.0 if successes == 0 else float(
        sps.beta.ppf(a / 2, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(
        sps.beta.ppf(1 - a / 2, successes + 1, trials - successes))
    return lo, hi


def power(alt_samples: np.ndarray, threshold_log: float, level: float = 0.95):
    """Exceedance proportion over the threshold plus its exact 95% CI."""
    x = np.asarray(alt_samples, dtype=np.float64)
    if x.size == 0:
        raise ValueError("alternative sample is empty")
    hits = int(np.count_nonzero(x > threshold_log))
    est = hits / x.size
    return est, clopper_pearson(hits, x.size, level)


def power_curve(
    null_samples: np.ndarray,
    alt_samples: np.ndarray,
    alpha_grid: Sequence[float],
    statistic: str = "",
) -> PowerCurve:
    """One (alpha, power) point per grid entry; reuses the sorted null sample."""
    grid = list(alpha_grid)
    if grid != sorted(grid):
        raise ValueError("alpha grid must be sorted ascending")
    x = np.sort(np.asarray(null_samples, dtype=np.float64))
    alt = np.asarray(alt_samples, dtype=np.float64)
    points = []
    for alpha in grid:
        if alpha >= 1.0:
            c = -math.inf
        else:
            if alpha * x.size < 10:
                warnings.warn(
                    f"alpha*B = {alpha * x.size:.3g} < 10; threshold estimate is unstable",
                    AlphaTooSmallForB,
                )
            k = math.ceil(x.size * (1.0 - alpha))
            c = -math.inf if k <= 0 else float(x[k - 1])
        points.append((alpha, float(np.count_nonzero(alt > c)) / alt.size))
    return PowerCurve(statistic=statistic, points=tuple(points))


def subpop_power(alt: SampleMatrix, statistic: str, threshold_log: float, k: int,
                 level: float = 0.95):
    """Power restricted to alternative pairs tagged with subpopulation k."""
    mask = alt.subpop_tags == k
    n = int(mask.sum())
    if n == 0:
        raise EmptySubpopSample(f"no alternative replicates tagged subpop {k}")
    est, ci = power(alt.statistics[statistic][mask], threshold_log, level)
    return est, n, ci


def power_diff_ci(power_i: float, n_i: int, power_j: float, n_j: int,
                  level: float = 0.95,
                  subpop_i: str = "", subpop_j: str = "") -> DiffCI:
    """Wald interval for a difference of two power estimates."""
    if min(n_i, n_j) < 30:
        warnings.warn(
            f"sample sizes ({n_i}, {n_j}) too small for the normal approximation",
            SmallSampleWarning,
        )
    est = power_i - power_j
    z = sps.norm.ppf(1 - (1 - level) / 2)
    half = z * math.sqrt(power_i * (1 - power_i) / n_i + power_j * (1 - power_j) / n_j)
    return DiffCI(
        subpop_i=subpop_i,
        subpop_j=subpop_j,
        estimate=est,
        ci_low=max(-1.0, est - half),
        ci_high=min(1.0, est + half),
    )


def power_report(
    null: SampleMatrix,
    alt: SampleMatrix,
    statistic: str,
    alpha: float,
    level: float = 0.95,
    per_subpop: bool = True,
) -> PowerReport:
    """Threshold + power + exact CI for one (statistic, alpha) cell."""
    c = null_threshold(null.statistics[statistic], alpha)
    est, ci = power(alt.statistics[statistic], c, level)
    by_subpop = {}
    if per_subpop:
        for k, name in enumerate(alt.subpop_names):
            try:
                by_subpop[name] = subpop_power(alt, statistic, c, k, level)
            except EmptySubpopSample:
                continue
    return PowerReport(
        statistic=statistic,
        alpha=alpha,
        threshold_log=c,
        power=est,
        ci_low=ci[0],
        ci_high=ci[1],
        per_subpop=by_subpop,
    )


# ---------------------------------------------------------------------------
# plot-ready emitters and their readers

def write_power_reports_csv(reports: Sequence[PowerReport],
                            sink: Union[TextIO, None] = None) -> Optional[str]:
    buf = sink if sink is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["statistic", "alpha", "threshold", "power", "ci_low", "ci_high"])
    for r in reports:
        writer.writerow([r.statistic, repr(float(r.alpha)), repr(float(r.threshold_log)),
                         repr(float(r.power)), repr(float(r.ci_low)),
                         repr(float(r.ci_high))])
    return None if sink is not None else buf.getvalue()


def read_power_reports_csv(source: Union[str, TextIO]) -> list[dict]:
    stream = io.StringIO(source) if isinstance(source, str) else source
    return [
        {k: (v if k == "statistic" else float(v)) for k, v in row.items()}
        for row in csv.DictReader(stream)
    ]


def power_reports_json(reports: Sequence[PowerReport]) -> str:
    return json.dumps([asdict(r) for r in reports], indent=2, sort_keys=True)


def write_power_curves_csv(curves: Sequence[PowerCurve],
                           sink: Union[TextIO, None] = None) -> Optional[str]:
    buf = sink if sink is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["statistic", "alpha", "power"])
    for curve in curves:
        for alpha, est in curve.points:
            writer.writerow([curve.statistic, repr(float(alpha)), repr(float(est))])
    return None if sink is not None else buf.getvalue()


def read_power_curves_csv(source: Union[str, TextIO]) -> list[dict]:
    stream = io.StringIO(source) if isinstance(source, str) else source
    return [
        {k: (v if k == "statistic" else float(v)) for k, v in row.items()}
        for row in csv.DictReader(stream)
    ]


def write_diff_cis_csv(diffs: Sequence[DiffCI],
                       sink: Union[TextIO, None] = None) -> Optional[str]:
    buf = sink if sink is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["subpop_i", "subpop_j", "estimate", "ci_low", "ci_high"])
    for d in diffs:
        writer.writerow([d.subpop_i, d.subpop_j, repr(float(d.estimate)),
                         repr(float(d.ci_low)), repr(float(d.ci_high))])
    return None if sink is not None else buf.getvalue()


def read_diff_cis_csv(source: Union[str, TextIO]) -> list[dict]:
    stream = io.StringIO(source) if isinstance(source, str) else source
    return [
        {k: (v if k.startswith("subpop") else float(v)) for k, v in row.items()}
        for row in csv.DictReader(stream)
    ]
