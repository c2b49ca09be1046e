"""Exact combinatorics of the SO(3) WRT theory at an odd level r.

Roots of unity are never evaluated numerically here. A 4r-th root of unity
is stored as an integer exponent of zeta = exp(2 pi i / 4r); in particular
A = i * exp(2 pi i / 4r) = zeta ** (r + 1).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional

import mpmath
import networkx as nx

from .errors import (
    GenusUnsupported,
    InvalidGenus,
    InvalidLevel,
    LabelOutOfRange,
    NonIntegerVerlinde,
)

VERLINDE_DPS = 50
VERLINDE_TOL = 1e-6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class Level:
    """An odd level r >= 5 and the constants derived from it."""

    r: int

    def __post_init__(self):
        if not isinstance(self.r, int) or isinstance(self.r, bool):
            raise InvalidLevel(f"level must be an integer, got {self.r!r}")
        if self.r < 5 or self.r % 2 == 0:
            raise InvalidLevel(f"level must be odd and >= 5, got {self.r}")

    @property
    def is_prime(self) -> bool:
        return is_prime(self.r)

    @property
    def root_order(self) -> int:
        """Order 4r of the reference root zeta."""
        return 4 * self.r

    @property
    def a_exponent(self) -> int:
        """Exponent k with A = zeta**k (mod 4r)."""
        return (self.r + 1) % self.root_order

    def a_power(self, n: int) -> int:
        """Exponent of zeta representing A**n, reduced mod 4r."""
        return (self.a_exponent * n) % self.root_order

    def mu_mp(self, dps: int = VERLINDE_DPS) -> mpmath.mpf:
        with mpmath.workdps(dps):
            return +(2 / mpmath.sqrt(self.r) * mpmath.sin(mpmath.pi / self.r))

    @cached_property
    def mu(self) -> float:
        return float(self.mu_mp())

    @cached_property
    def labels(self) -> "LabelSet":
        return LabelSet.for_level(self)


@dataclass(frozen=True)
class LabelSet:
    labels: tuple[int, ...]

    @classmethod
    def for_level(cls, level: Level) -> "LabelSet":
        return cls(tuple(range(0, level.r - 2, 2)))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, a) -> bool:
        return a in self.labels


def _check_label(level: Level, a: int) -> None:
    if a not in level.labels:
        raise LabelOutOfRange(
            f"label {a!r} not in {{0, 2, ..., {level.r - 3}}} for r={level.r}"
        )


def is_admissible_triple(level: Level, a: int, b: int, c: int) -> bool:
    return (
        a + b + c <= 2 * (level.r - 2)
        and b + c >= a
        and a + c >= b
        and a + b >= c
    )


# --------------------------------------------------------------------------
# spines

FREE_LOOP = (-1, -1)


@dataclass(frozen=True)
class TrivalentSpine:
    """A trivalent graph with first Betti number equal to the genus.

    ``edges`` holds vertex pairs; a loop is ``(v, v)``. The genus-1 spine is a
    single free loop with no vertices, written ``FREE_LOOP``.
    """

    genus: int
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    kind: str = "custom"

    def __post_init__(self):
        self.validate()

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def incident(self, v: int) -> list[int]:
        """Edge indices at v, repeated for loops."""
        out = []
        for k, (x, y) in enumerate(self.edges):
            if x == v:
                out.append(k)
            if y == v:
                out.append(k)
        return out

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.num_vertices))
        g.add_edges_from(e for e in self.edges if e != FREE_LOOP)
        return g

    @property
    def betti_number(self) -> int:
        if self.genus == 1 and self.edges == (FREE_LOOP,):
            return 1
        g = self.to_networkx()
        return self.num_edges - self.num_vertices + nx.number_connected_components(g)

    def validate(self) -> None:
        if self.genus < 1:
            raise InvalidGenus(f"genus must be >= 1, got {self.genus}")
        if self.genus == 1:
            if self.num_vertices != 0 or self.edges != (FREE_LOOP,):
                raise ValueError("genus-1 spine must be a single free loop")
            return
        if self.num_vertices != 2 * self.genus - 2:
            raise ValueError("trivalent spine needs 2g-2 vertices")
        if self.num_edges != 3 * self.genus - 3:
            raise ValueError("trivalent spine needs 3g-3 edges")
        for x, y in self.edges:
            if not (0 <= x < self.num_vertices and 0 <= y < self.num_vertices):
                raise ValueError(f"edge ({x}, {y}) has an endpoint out of range")
        for v in range(self.num_vertices):
            if len(self.incident(v)) != 3:
                raise ValueError(f"vertex {v} is not trivalent")
        if self.betti_number != self.genus:
            raise ValueError("spine is disconnected or has the wrong Betti number")


def theta_spine() -> TrivalentSpine:
    return TrivalentSpine(2, 2, ((0, 1), (0, 1), (0, 1)), kind="theta")


def caterpillar_spine(genus: int) -> TrivalentSpine:
    """Path of 2g-2 vertices with a loop at each end and g-2 interior bigons.

    Edges are ordered along the path so every vertex closes as soon as
    possible; this keeps the frontier in :func:`count_admissible` at <= 2.
    """
    if genus < 2:
        raise InvalidGenus(f"caterpillar spine needs genus >= 2, got {genus}")
    n = 2 * genus - 2
    edges = [(0, 0)]
    for i in range(n - 1):
        edges.append((i, i + 1))
        if i % 2 == 1:
            edges.append((i, i + 1))
    edges.append((n - 1, n - 1))
    return TrivalentSpine(genus, n, tuple(edges), kind="caterpillar")


def tetrahedral_spine() -> TrivalentSpine:
    """The complete graph K4, a loop-free genus-3 spine."""
    edges = ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3))
    return TrivalentSpine(3, 4, edges, kind="tetrahedral")


def canonical_spine(genus: int) -> TrivalentSpine:
    if genus < 1:
        raise InvalidGenus(f"genus must be >= 1, got {genus}")
    if genus == 1:
        return TrivalentSpine(1, 0, (FREE_LOOP,), kind="loop")
    if genus == 2:
        return theta_spine()
    return caterpillar_spine(genus)


# --------------------------------------------------------------------------
# labelings


@dataclass(frozen=True)
class AdmissibleLabeling:
    spine: TrivalentSpine = field(repr=False)
    labels: tuple[int, ...]

    def to_json(self) -> str:
        return json.dumps(list(self.labels))

    def at_vertex(self, v: int) -> tuple[int, ...]:
        return tuple(self.labels[k] for k in self.spine.incident(v))


def _closing_schedule(spine: TrivalentSpine) -> list[list[tuple[int, tuple[int, ...]]]]:
    """For each edge index k, the vertices whose last incident edge is k."""
    sched: list[list] = [[] for _ in spine.edges]
    for v in range(spine.num_vertices):
        inc = tuple(spine.incident(v))
        sched[max(inc)].append((v, inc))
    return sched


def iter_admissible(level: Level, spine: TrivalentSpine) -> Iterator[tuple[int, ...]]:
    """Admissible label tuples in lexicographic edge order (backtracking)."""
    labels = level.labels.labels
    sched = _closing_schedule(spine)
    m = spine.num_edges
    cur = [0] * m

    def rec(k):
        if k == m:
            yield tuple(cur)
            return
        for a in labels:
            cur[k] = a
            ok = True
            for _, inc in sched[k]:
                x, y, z = (cur[i] for i in inc)
                if not is_admissible_triple(level, x, y, z):
                    ok = False
                    break
            if ok:
                yield from rec(k + 1)

    yield from rec(0)


def enumerate_admissible(level: Level, spine: TrivalentSpine) -> list[AdmissibleLabeling]:
    return [AdmissibleLabeling(spine, t) for t in iter_admissible(level, spine)]


def count_admissible(level: Level, spine: TrivalentSpine) -> int:
    """Exact number of admissible labelings by frontier dynamic programming.

    Edges are processed in order; the state is the tuple of labels on edges
    that still touch an unclosed vertex. On the caterpillar this is a
    transfer-matrix computation along the path.
    """
    labels = level.labels.labels
    sched = _closing_schedule(spine)
    close_at = {}
    for k, vs in enumerate(sched):
        for v, _ in vs:
            close_at[v] = k
    m = spine.num_edges

    def still_open(e: int, k: int) -> bool:
        return any(
            v != -1 and close_at[v] > k for v in spine.edges[e]
        )

    frontier: tuple[int, ...] = ()
    states: dict[tuple[int, ...], int] = {(): 1}
    for k in range(m):
        ext = frontier + (k,)
        pos = {e: i for i, e in enumerate(ext)}
        keep = tuple(e for e in ext if still_open(e, k))
        keep_idx = [pos[e] for e in keep]
        checks = [tuple(pos[i] for i in inc) for _, inc in sched[k]]
        new: dict[tuple[int, ...], int] = {}
        for st, cnt in states.items():
            for a in labels:
                full = st + (a,)
                if all(
                    is_admissible_triple(level, full[i], full[j], full[l])
                    for i, j, l in checks
                ):
                    key = tuple(full[i] for i in keep_idx)
                    new[key] = new.get(key, 0) + cnt
        states, frontier = new, keep
    return sum(states.values())


# --------------------------------------------------------------------------
# dimensions


def verlinde_value(level: Level, genus: int, dps: int = VERLINDE_DPS) -> mpmath.mpf:
    """Unrounded Verlinde sum, evaluated at ``dps`` decimal digits."""
    if genus < 1:
        raise InvalidGenus(f"genus must be >= 1, got {genus}")
    r = level.r
    with mpmath.workdps(dps):
        s = mpmath.fsum(
            mpmath.sin(mpmath.pi * j / r) ** (2 - 2 * genus) for j in range(1, r)
        )
        return +(s * (mpmath.mpf(r) / 2) ** (genus - 1) / mpmath.mpf(2) ** genus)


def verlinde_dimension(level: Level, genus: int, dps: int = VERLINDE_DPS) -> int:
    val = verlinde_value(level, genus, dps)
    d = int(mpmath.nint(val))
    if abs(val - d) > VERLINDE_TOL:
        raise NonIntegerVerlinde(
            f"Verlinde sum {mpmath.nstr(val, 20)} is not within {VERLINDE_TOL} "
            f"of an integer (r={level.r}, g={genus}, dps={dps})"
        )
    return d


def dim_mu_ratio(level: Level, genus: int) -> float:
    """d_g / mu**(2-2g), computed from the sine ratios a_j = sin(pi/r)/sin(pi j/r)."""
    if genus < 1:
        raise InvalidGenus(f"genus must be >= 1, got {genus}")
    r = level.r
    with mpmath.workdps(VERLINDE_DPS):
        s1 = mpmath.sin(mpmath.pi / r)
        tail = mpmath.fsum(
            (s1 / mpmath.sin(mpmath.pi * j / r)) ** (2 * genus - 2) for j in range(2, r - 1)
        )
        return float((2 + tail) / 2)


# --------------------------------------------------------------------------
# Dehn twist spectra and determinants


def admissible_triples_containing(level: Level, a: int) -> int:
    """Ordered admissible theta triples (a, b, c) with first entry a."""
    _check_label(level, a)
    return (a + 1) * (level.r - 1 - a) // 2


def twist_eigenvalue_exponent(a: int, level: Optional[Level] = None) -> int:
    """Exponent of A for the twist eigenvalue on a basis vector with dual label a."""
    if level is not None:
        _check_label(level, a)
    elif not isinstance(a, int) or a < 0 or a % 2:
        raise LabelOutOfRange(f"label must be a nonnegative even integer, got {a!r}")
    return a * a + 2 * a


def det_exponent_closed_form(level: Level, genus: int) -> int:
    r = level.r
    if genus == 1:
        return (r - 3) * (r - 1) * (r + 1) // 6
    if genus == 2:
        # (r/5) * prod((r+k)/2 for k in -3,-1,1,3), kept integral
        return r * (r - 3) * (r - 1) * (r + 1) * (r + 3) // 80
    raise GenusUnsupported(f"no closed form for genus {genus}")


def det_exponent_brute_force(level: Level, genus: int) -> int:
    if genus == 1:
        return sum(twist_eigenvalue_exponent(a) for a in level.labels)
    if genus == 2:
        return sum(
            twist_eigenvalue_exponent(t[0])
            for t in iter_admissible(level, theta_spine())
        )
    raise GenusUnsupported(f"brute force is only defined for genus 1 and 2, got {genus}")


@dataclass(frozen=True)
class DetExponentReport:
    genus: int
    level: Level
    e: Optional[int]
    divisible_by_4r: Optional[bool]
    det_is_one: bool
    in_a4_subgroup: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "r": self.level.r,
            "genus": self.genus,
            "e": self.e,
            "divisible_by_4r": self.divisible_by_4r,
            "det_is_one": self.det_is_one,
            "in_A4_subgroup": self.in_a4_subgroup,
            "note": self.note,
        }


def det_exponent(level: Level, genus: int) -> DetExponentReport:
    """det of the twist image as a power A**e, computed two ways for g <= 2.

    For g >= 3 the first homology of the relevant central extension vanishes,
    so det is identically 1 and no exponent is reported.
    """
    if genus < 1:
        raise InvalidGenus(f"genus must be >= 1, got {genus}")
    if genus >= 3:
        return DetExponentReport(
            genus, level, None, None, True, True,
            note="trivial abelianization for genus >= 3; not computed",
        )
    brute = det_exponent_brute_force(level, genus)
    closed = det_exponent_closed_form(level, genus)
    if brute != closed:
        raise AssertionError(
            f"det exponent mismatch at r={level.r}, g={genus}: {brute} != {closed}"
        )
    e = brute
    det_one = level.a_power(e) == 0
    if genus == 2 and level.r % 5 != 0 and not det_one:
        raise AssertionError(f"expected det = 1 for g=2, r={level.r}")
    return DetExponentReport(
        genus, level, e,
        divisible_by_4r=e % level.root_order == 0,
        det_is_one=det_one,
        in_a4_subgroup=e % 4 == 0 or det_one,
    )


def twist_spectrum(level: Level, genus: int) -> list[dict]:
    """Twist eigenvalue data on the distinguished edge, per label.

    Multiplicity is 1 at genus 1 and the number of admissible theta triples
    with that first entry at genus 2.
    """
    if genus not in (1, 2):
        raise GenusUnsupported(f"spectrum is tabulated for genus 1 and 2, got {genus}")
    rows = []
    for a in level.labels:
        ex = twist_eigenvalue_exponent(a, level)
        mult = 1 if genus == 1 else admissible_triples_containing(level, a)
        rows.append(
            {
                "label": a,
                "a_exponent": ex,
                "zeta_exponent": level.a_power(ex),
                "multiplicity": mult,
            }
        )
    return rows

