"""Reference laws for |X_d| and the standard Rayleigh, plus one-sample KS."""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Sequence

import numpy as np
from scipy.special import kolmogi

from .errors import TooFewSamples

# asymptotic Kolmogorov constants c(alpha), P{sqrt(n) D_n > c} = alpha
KS_CONSTANTS = {0.01: 1.628, 0.05: 1.358}
MIN_KS_SAMPLES = 50
# a failed statistical gate is re-run once at seed + RETRY_SEED_OFFSET
RETRY_SEED_OFFSET = 1
GRID = np.round(np.arange(301) * 0.01, 2)


def entry_law_tail(d: int, x):
    """P{|X_d| >= x} = (1 - x^2)^(d-1), with x clamped to [0, 1]."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore"):
        return np.exp((d - 1) * np.log1p(-x * x))


def entry_law_cdf(d: int, x):
    if d < 2:
        raise ValueError(f"entry law needs d >= 2, got {d}")
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    # log1p(-1) = -inf gives exactly 1 at x = 1
    with np.errstate(divide="ignore"):
        out = -np.expm1((d - 1) * np.log1p(-x * x))
    return float(out) if out.ndim == 0 else out


def entry_law_pdf(d: int, x):
    """Density of |X_d| on [0, 1]: 2 (d-1) x (1 - x^2)^(d-2)."""
    x = np.asarray(x, dtype=float)
    inside = (x >= 0) & (x <= 1)
    xc = np.clip(x, 0.0, 1.0)
    return np.where(inside, 2 * (d - 1) * xc * (1 - xc * xc) ** (d - 2), 0.0)


def rayleigh_tail(x):
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = np.exp(-x * x)
    return float(out) if out.ndim == 0 else out


def rayleigh_cdf(x):
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = -np.expm1(-x * x)
    return float(out) if out.ndim == 0 else out


def rayleigh_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0, 2 * x * np.exp(-x * x), 0.0)


def rayleigh_quantile(p):
    return np.sqrt(-np.log1p(-np.asarray(p, dtype=float)))


RAYLEIGH_MEAN = math.sqrt(math.pi) / 2


@dataclass(frozen=True)
class AnalyticLaw:
    """A law on [0, inf) with CDF F(x / scale).

    ``kind`` is ``"entry"`` (|X_d|, needs ``dim``), ``"rayleigh"`` (tail
    exp(-x^2), mean sqrt(pi)/2) or ``"complex_gaussian_modulus"``, which is
    the same law as ``"rayleigh"`` under this normalization.
    """

    kind: str
    dim: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("entry", "rayleigh", "complex_gaussian_modulus"):
            raise ValueError(f"unknown law {self.kind!r}")
        if self.kind == "entry" and (self.dim is None or self.dim < 2):
            raise ValueError("entry law needs dim >= 2")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @classmethod
    def entry(cls, d: int, scale: float = 1.0) -> "AnalyticLaw":
        return cls("entry", d, scale)

    @classmethod
    def rayleigh(cls) -> "AnalyticLaw":
        return cls("rayleigh")

    def cdf(self, x):
        y = np.asarray(x, dtype=float) / self.scale
        if self.kind == "entry":
            return entry_law_cdf(self.dim, y)
        return rayleigh_cdf(y)

    def tail(self, x):
        return 1.0 - self.cdf(x)

    def pdf(self, x):
        y = np.asarray(x, dtype=float) / self.scale
        if self.kind == "entry":
            return entry_law_pdf(self.dim, y) / self.scale
        return rayleigh_pdf(y) / self.scale

    def describe(self) -> dict:
        return asdict(self)


class EmpiricalDistribution:
    """Sorted sample with a right-continuous step CDF."""

    def __init__(self, samples: Sequence[float]):
        arr = np.sort(np.asarray(samples, dtype=float).ravel())
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        self.sorted_samples = arr

    @property
    def n(self) -> int:
        return self.sorted_samples.size

    def cdf(self, x):
        return np.searchsorted(self.sorted_samples, x, side="right") / self.n

    def __len__(self) -> int:
        return self.n


def critical_value(alpha: float, n: int) -> float:
    c = KS_CONSTANTS.get(alpha)
    if c is None:
        c = float(kolmogi(alpha))
    return c / math.sqrt(n)


@dataclass(frozen=True)
class KSReport:
    statistic: float
    n: int
    alpha: float
    critical_value: float
    passed: bool
    law: dict

    def to_dict(self) -> dict:
        return asdict(self)


def ks_statistic(emp: EmpiricalDistribution, law: AnalyticLaw) -> float:
    """sup |F_n - F| evaluated on both sides of every jump."""
    n = emp.n
    f = np.asarray(law.cdf(emp.sorted_samples), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(max(d_plus, d_minus))


def ks_test(emp: EmpiricalDistribution, law: AnalyticLaw, alpha: float = 0.01) -> KSReport:
    if emp.n < MIN_KS_SAMPLES:
        raise TooFewSamples(f"KS test needs at least {MIN_KS_SAMPLES} samples, got {emp.n}")
    stat = ks_statistic(emp, law)
    crit = critical_value(alpha, emp.n)
    return KSReport(stat, emp.n, alpha, crit, stat < crit, law.describe())


@dataclass(frozen=True)
class GateResult:
    """Outcome of a KS gate with at most one documented retry."""

    report: KSReport
    seed: int
    first: KSReport

    @property
    def passed(self) -> bool:
        return self.report.passed

    @property
    def retried(self) -> bool:
        return self.report is not self.first


def ks_gate(draw, law: AnalyticLaw, seed: int, alpha: float = 0.01) -> GateResult:
    """KS-test ``draw(seed)``; on failure, re-test once at the retry seed.

    A level-alpha test rejects a correct sampler with probability alpha, so a
    pinned seed can fail for no reason. One retry at a fixed second seed keeps
    the run deterministic; a broken sampler still fails both.
    """
    first = ks_test(EmpiricalDistribution(draw(seed)), law, alpha)
    if first.passed:
        return GateResult(first, seed, first)
    second = seed + RETRY_SEED_OFFSET
    return GateResult(ks_test(EmpiricalDistribution(draw(second)), law, alpha), second, first)


def ks_distance_two_sample(x, y) -> float:
    """Two-sample KS distance sup |F_x - F_y|."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    pts = np.concatenate([x, y])
    fx = np.searchsorted(x, pts, side="right") / x.size
    fy = np.searchsorted(y, pts, side="right") / y.size
    return float(np.max(np.abs(fx - fy)))


def scaled_entry_tail(d: int, scale: float, x):
    """(1 - x^2/scale^2)^(d-1) on [0, scale], zero beyond."""
    x = np.asarray(x, dtype=float)
    return np.where(x < scale, entry_law_tail(d, x / scale), 0.0)


def convergence_of_entry_law(dims: Sequence[int], scales: Sequence[float], grid=GRID) -> list[dict]:
    """Grid sup-distance between each scaled entry tail and exp(-x^2)."""
    if len(dims) != len(scales):
        raise ValueError("dims and scales must pair up")
    target = rayleigh_tail(grid)
    rows = []
    for d, s in zip(dims, scales):
        diff = np.abs(scaled_entry_tail(d, s, grid) - target)
        k = int(np.argmax(diff))
        rows.append({"dim": int(d), "scale": float(s), "distance": float(diff[k]), "argmax": float(grid[k])})
    return rows


def cdf_curve_csv(law: AnalyticLaw, xs=GRID, emp: EmpiricalDistribution | None = None) -> str:
    """Two-column ``x,cdf`` text (a third ``empirical`` column when emp is given)."""
    f = np.atleast_1d(law.cdf(xs))
    head = "x,cdf,empirical" if emp is not None else "x,cdf"
    lines = [head]
    e = emp.cdf(xs) if emp is not None else None
    for i, x in enumerate(np.atleast_1d(xs)):
        row = [repr(float(x)), repr(float(f[i]))]
        if e is not None:
            row.append(repr(float(e[i])))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
