"""Closed-form genus-bound probabilities and the surface-bundle audit."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .errors import InvalidGenus, NonPrimeLevel
from .tqft import Level, dim_mu_ratio, verlinde_dimension

DPS = 50
DEFAULT_LEVELS = (5, 7, 11, 13)
DEFAULT_GENERA = (2, 3, 4, 5)


@dataclass(frozen=True)
class LogProbability:
    """A probability held as its base-10 logarithm."""

    log10: mpmath.mpf

    @property
    def exponent(self) -> int:
        return int(mpmath.floor(self.log10))

    @property
    def mantissa(self) -> float:
        return float(mpmath.power(10, self.log10 - self.exponent))

    def sci(self, digits: int = 2) -> tuple[float, int]:
        m, e = round(self.mantissa, digits - 1), self.exponent
        if m >= 10:
            m, e = round(m / 10, digits - 1), e + 1
        return m, e

    def as_float(self) -> float:
        return float(mpmath.power(10, self.log10))

    def render(self, style: str = "e") -> str:
        """Table-style text: 3 decimals down to 0.001, else 2 significant figures."""
        if self.log10 >= -3:
            return f"{self.as_float():.3f}"
        m, e = self.sci(2)
        if style == "pretty":
            return f"{m:.1f} x 10^{e}"
        return f"{m:.1f}e{e}"


@dataclass(frozen=True)
class SharpBoundReport:
    r: int
    genus: int
    mu: float
    d: int
    probability: LogProbability
    within_hypotheses: bool = True

    @property
    def log10_probability(self) -> float:
        return float(self.probability.log10)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "genus": self.genus,
            "mu": self.mu,
            "d": self.d,
            "log10_probability": self.log10_probability,
            "probability": self.probability.render(),
            "within_hypotheses": self.within_hypotheses,
        }


def sharp_bound_probability(level: Level, genus: int, allow_nonprime: bool = False) -> SharpBoundReport:
    """(1 - mu^2)^(d_g - 1), carried in log space."""
    if genus < 2:
        raise InvalidGenus(f"sharp-bound probability needs genus >= 2, got {genus}")
    if not level.is_prime and not allow_nonprime:
        raise NonPrimeLevel(f"r={level.r} is not prime; density results need a prime level")
    d = verlinde_dimension(level, genus)
    with mpmath.workdps(DPS):
        mu = level.mu_mp(DPS)
        lp = (d - 1) * mpmath.log10(1 - mu * mu)
    return SharpBoundReport(level.r, genus, float(mu), d, LogProbability(lp), level.is_prime)


@dataclass(frozen=True)
class HomologyColumn:
    genus: int
    probability: Fraction

    @property
    def log_probability(self) -> LogProbability:
        p = self.probability
        with mpmath.workdps(DPS):
            return LogProbability(mpmath.log10(p.numerator) - mpmath.log10(p.denominator))

    def render(self, style: str = "e") -> str:
        return self.log_probability.render(style)

    def to_dict(self) -> dict:
        return {"genus": self.genus, "probability": str(self.probability), "decimal": self.render()}


def homology_probability(genus: int) -> HomologyColumn:
    """prod_{k=1}^g 1 / (2^k + 1)."""
    if genus < 1:
        raise InvalidGenus(f"genus must be >= 1, got {genus}")
    p = Fraction(1)
    for k in range(1, genus + 1):
        p /= 2**k + 1
    return HomologyColumn(genus, p)


@dataclass(frozen=True)
class BundleCertificate:
    r: int
    genus: int
    d: int
    mu_pow_2_2g: float
    mu_pow_1_2g: float
    ratio: float
    d_le_mu_2_2g: bool
    d_lt_mu_1_2g: bool

    @property
    def certified(self) -> bool:
        """|tr| <= d_g < mu^(1-2g), so the genus-(2g+1) bound is never sharp."""
        return self.d_lt_mu_1_2g

    @property
    def discrepancy(self) -> bool:
        """True when d_g > mu^(2-2g), contrary to the intermediate inequality."""
        return not self.d_le_mu_2_2g

    def message(self) -> str:
        rel = "<=" if self.d_le_mu_2_2g else ">"
        rel2 = "<" if self.d_lt_mu_1_2g else ">="
        msg = f"r={self.r} g={self.genus}: d_g={self.d} {rel} mu^(2-2g)={self.mu_pow_2_2g:.6g}; d_g {rel2} mu^(1-2g)={self.mu_pow_1_2g:.6g}"
        if self.discrepancy:
            msg += " [NOTE: d_g <= mu^(2-2g) fails; d_g/mu^(2-2g) = %.9g > 1]" % self.ratio
        return msg

    def to_dict(self) -> dict:
        return {
            "r": self.r, "genus": self.genus, "d": self.d,
            "mu^(2-2g)": self.mu_pow_2_2g, "mu^(1-2g)": self.mu_pow_1_2g,
            "ratio": self.ratio, "d_le_mu^(2-2g)": self.d_le_mu_2_2g,
            "d_lt_mu^(1-2g)": self.d_lt_mu_1_2g, "certified": self.certified,
            "discrepancy": self.discrepancy,
        }


def bundle_sharpness_certificate(level: Level, genus: int) -> BundleCertificate:
    if genus < 2:
        raise InvalidGenus(f"fiber genus must be >= 2, got {genus}")
    d = verlinde_dimension(level, genus)
    with mpmath.workdps(DPS):
        mu = level.mu_mp(DPS)
        b2 = mu ** (2 - 2 * genus)
        b1 = mu ** (1 - 2 * genus)
        return BundleCertificate(
            level.r, genus, d, float(b2), float(b1), dim_mu_ratio(level, genus),
            d_le_mu_2_2g=bool(d <= b2), d_lt_mu_1_2g=bool(d < b1),
        )


@dataclass
class Table1:
    levels: tuple[int, ...]
    genera: tuple[int, ...]
    cells: dict
    homology: dict

    def rows(self) -> list[dict]:
        out = []
        for g in self.genera:
            row = {"genus": g}
            for r in self.levels:
                row[f"r={r}"] = self.cells[g, r].probability.render()
            row["H1(F2)"] = self.homology[g].render()
            out.append(row)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["genus", *(f"r={r}" for r in self.levels), "homology"])
        for g in self.genera:
            w.writerow([g, *(self.cells[g, r].probability.render() for r in self.levels),
                        self.homology[g].render()])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "levels": list(self.levels),
            "genera": list(self.genera),
            "cells": [self.cells[g, r].to_dict() for g in self.genera for r in self.levels],
            "homology": [self.homology[g].to_dict() for g in self.genera],
        }

    def to_pretty(self) -> str:
        heads = ["", *(f"r = {r}" for r in self.levels), "|H1(M;F2)|"]
        body = [[f"g = {g}", *(self.cells[g, r].probability.render("pretty") for r in self.levels),
                 self.homology[g].render("pretty")] for g in self.genera]
        widths = [max(len(str(x)) for x in col) for col in zip(heads, *body)]
        lines = [" | ".join(h.rjust(w) for h, w in zip(heads, widths))]
        lines.append("-+-".join("-" * w for w in widths))
        lines += [" | ".join(c.rjust(w) for c, w in zip(row, widths)) for row in body]
        return "\n".join(lines)


def table1(levels: Sequence[int] = DEFAULT_LEVELS, genera: Sequence[int] = DEFAULT_GENERA,
           allow_nonprime: bool = False) -> Table1:
    levels, genera = tuple(sorted(levels)), tuple(sorted(genera))
    cells = {(g, r): sharp_bound_probability(Level(r), g, allow_nonprime) for g in genera for r in levels}
    homology = {g: homology_probability(g) for g in genera}
    return Table1(levels, genera, cells, homology)

