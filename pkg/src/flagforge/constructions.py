"""The extremal side: recursive semi-bipartite constructions, partition
diagnostics, desk-scale extremal search, and exact certification of the
scalar inequalities behind the density bound.

The recursion b(n) = max{ C(n1,2)*n2 + b(n2) } (split the vertex set,
take every triple with two vertices in the top part, recurse into the
bottom part) produces the extremal candidates; its density tends to
alpha = 2*sqrt(3) - 3 with top-part ratio gamma = (3 - sqrt(3))/2.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .hypergraph import (
    ForbiddenFamily,
    ThreeGraph,
    degrees,
    find_subgraph_embedding,
    is_free,
)
from .rational import ALPHA, GAMMA, QSqrt3


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class Partition:
    """A bipartition of {0..n-1}; parts[v] is 1 or 2."""

    parts: tuple

    def __post_init__(self):
        if any(p not in (1, 2) for p in self.parts):
            raise ValueError("parts must be 1 or 2")

    @property
    def n(self) -> int:
        return len(self.parts)

    @classmethod
    def from_v1(cls, n: int, v1) -> "Partition":
        v1 = set(v1)
        return cls(tuple(1 if v in v1 else 2 for v in range(n)))

    def v1(self) -> list:
        return [v for v, p in enumerate(self.parts) if p == 1]

    def v2(self) -> list:
        return [v for v, p in enumerate(self.parts) if p == 2]

    def move(self, v: int) -> "Partition":
        parts = list(self.parts)
        parts[v] = 3 - parts[v]
        return Partition(tuple(parts))


@dataclass
class PartitionDiagnostics:
    partition: Partition
    cut_count: int
    mu: Fraction
    bad: list  # edges with 1 or 3 vertices in part 1
    missing: list  # non-edges with exactly 2 vertices in part 1
    b111: list
    b122: list
    b122_heavy: list
    b122_light: list
    heavy_pairs: list
    heavy_threshold: Fraction
    type1_paths: tuple  # per-vertex counts in each link graph
    type2_paths: tuple

    @property
    def bad_count(self) -> int:
        return len(self.bad)

    @property
    def missing_count(self) -> int:
        return len(self.missing)


def _edge_class(e, parts) -> int:
    """Number of vertices of the edge in part 1."""
    return sum(1 for v in e if parts[v] == 1)


def cut_count(h: ThreeGraph, part: Partition) -> int:
    return sum(1 for e in h.edges() if _edge_class(e, part.parts) == 2)


def semibipartite(n1: int, n2: int) -> ThreeGraph:
    """Complete semi-bipartite graph: all triples with exactly two
    vertices among the first n1."""
    if n1 < 0 or n2 < 0:
        raise ValueError("part sizes must be nonnegative")
    edges = [
        (a, b, c)
        for a, b in itertools.combinations(range(n1), 2)
        for c in range(n1, n1 + n2)
    ]
    return ThreeGraph(n1 + n2, edges)


# ---------------------------------------------------------------------------
# the recursion


@dataclass(frozen=True)
class BrecPlan:
    """Top part sizes of the recursive construction, outermost first."""

    n: int
    splits: tuple
    total: int

    def __post_init__(self):
        rem = self.n
        total = 0
        for n1 in self.splits:
            if n1 < 1 or n1 > rem:
                raise ValueError("invalid split sequence")
            total += comb(n1, 2) * (rem - n1)
            rem -= n1
        if rem > 2 and self.splits:
            raise ValueError("plan stops before the remainder is trivial")
        if total != self.total:
            raise ValueError(f"plan total {self.total} != recomputed {total}")


def brec(n: int) -> tuple[int, BrecPlan]:
    """Maximum edge count of the recursive construction, with a witness
    plan; ties between splits break toward the larger top part."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    value = [0] * (n + 1)
    choice = [0] * (n + 1)
    for t in range(3, n + 1):
        best = -1
        arg = 0
        for n1 in range(1, t + 1):
            v = n1 * (n1 - 1) // 2 * (t - n1) + value[t - n1]
            if v > best or (v == best and n1 > arg):
                best, arg = v, n1
        value[t] = best
        choice[t] = arg
    splits = []
    t = n
    while t >= 3:
        splits.append(choice[t])
        t -= choice[t]
    return value[n], BrecPlan(n, tuple(splits), value[n])


def brec_graph(plan: BrecPlan) -> ThreeGraph:
    """Materialise a plan: nested complete semi-bipartite layers."""
    edges = []
    offset = 0
    rem = plan.n
    for n1 in plan.splits:
        top = range(offset, offset + n1)
        bottom = range(offset + n1, offset + rem)
        for a, b in itertools.combinations(top, 2):
            for c in bottom:
                edges.append((a, b, c))
        offset += n1
        rem -= n1
    g = ThreeGraph(plan.n, edges)
    if g.edge_count() != plan.total:
        raise AssertionError("construction does not match the plan total")
    return g


def brec_partition(plan: BrecPlan) -> Partition:
    """The top-level partition of the plan's graph."""
    return Partition.from_v1(plan.n, range(plan.splits[0] if plan.splits else 0))


# ---------------------------------------------------------------------------
# local search and max-cut


def local_max_partition(h: ThreeGraph, init: Partition) -> Partition:
    """Hill-climb single-vertex moves while they strictly increase the
    number of edges with exactly two vertices in part 1.

    The result is locally maximal: for every vertex, the link has at
    least as many cross pairs as part-1 pairs (part-1 vertices) or the
    mirrored inequality (part-2 vertices).
    """
    if init.n != h.n:
        raise ValueError("partition size mismatch")
    parts = list(init.parts)
    incident = [[] for _ in range(h.n)]
    for e in h.edges():
        for v in e:
            incident[v].append(e)

    def move_gain(v: int) -> int:
        gain = 0
        parts[v] = 3 - parts[v]
        for e in incident[v]:
            gain += 1 if _edge_class(e, parts) == 2 else 0
        parts[v] = 3 - parts[v]
        for e in incident[v]:
            gain -= 1 if _edge_class(e, parts) == 2 else 0
        return gain

    improved = True
    while improved:
        improved = False
        for v in range(h.n):
            if move_gain(v) > 0:
                parts[v] = 3 - parts[v]
                improved = True
    return Partition(tuple(parts))


def local_max_inequalities_hold(h: ThreeGraph, part: Partition) -> bool:
    """Check the two link inequalities of a locally maximal partition
    vertexwise, exactly as stated."""
    for v in range(h.n):
        in_v1_pairs = 0
        cross_pairs = 0
        for e in h.edges():
            if v not in e:
                continue
            a, b = (x for x in e if x != v)
            k = (part.parts[a] == 1) + (part.parts[b] == 1)
            if k == 2:
                in_v1_pairs += 1
            elif k == 1:
                cross_pairs += 1
        if part.parts[v] == 1 and cross_pairs < in_v1_pairs:
            return False
        if part.parts[v] == 2 and in_v1_pairs < cross_pairs:
            return False
    return True


MAX_EXACT_CUT_VERTICES = 22


def max_cut_ratio(
    h: ThreeGraph, mode: str = "exact", starts: int = 32, seed: int = 0
) -> tuple[Fraction, Partition]:
    """The semi-bipartite max-cut ratio mu = 6*max_cut/n^3.

    exact mode enumerates all bipartitions (n <= 22, vectorised with
    incremental masks); heuristic mode is multi-start hill climbing and
    never exceeds the exact value.
    """
    n = h.n
    if n == 0:
        return Fraction(0), Partition(())
    if mode == "exact":
        if n > MAX_EXACT_CUT_VERTICES:
            raise ValueError(f"exact mode needs n <= {MAX_EXACT_CUT_VERTICES}")
        masks = np.arange(1 << n, dtype=np.uint32)
        cuts = np.zeros(1 << n, dtype=np.int32)
        for a, b, c in h.edges():
            inside = (
                ((masks >> np.uint32(a)) & 1)
                + ((masks >> np.uint32(b)) & 1)
                + ((masks >> np.uint32(c)) & 1)
            )
            cuts += inside == 2
        best = int(cuts.argmax())
        part = Partition.from_v1(n, [v for v in range(n) if (best >> v) & 1])
        return Fraction(6 * int(cuts[best]), n**3), part
    if mode == "heuristic":
        rng = random.Random(seed)
        best_cut = -1
        best_part = None
        inits = [Partition.from_v1(n, range(n // 2))]
        for _ in range(max(0, starts - 1)):
            inits.append(
                Partition(tuple(rng.choice((1, 2)) for _ in range(n)))
            )
        for init in inits:
            part = local_max_partition(h, init)
            c = cut_count(h, part)
            if c > best_cut:
                best_cut, best_part = c, part
        return Fraction(6 * best_cut, n**3), best_part
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# diagnostics


def diagnostics(
    h: ThreeGraph, part: Partition, heavy_threshold: Fraction = Fraction(1, 20)
) -> PartitionDiagnostics:
    """Exact edge classification for a partition: cut, bad and missing
    triples, the heavy/light split of the bad edges, and per-vertex
    counts of the two marked 4-vertex path patterns in each link.
    """
    if part.n != h.n:
        raise ValueError("partition size mismatch")
    heavy_threshold = Fraction(heavy_threshold)
    parts = part.parts
    n = h.n
    cut = []
    bad = []
    b111 = []
    b122 = []
    for e in h.edges():
        k = _edge_class(e, parts)
        if k == 2:
            cut.append(e)
        elif k == 3:
            bad.append(e)
            b111.append(e)
        else:
            bad.append(e)
            if k == 1:
                b122.append(e)
    v1 = part.v1()
    v2 = part.v2()
    missing = [
        (a, b, c)
        for a, b in itertools.combinations(v1, 2)
        for c in v2
        if not h.has_edge(*sorted((a, b, c)))
    ]
    missing = [tuple(sorted(t)) for t in missing]

    bad_codeg: dict = {}
    for e in bad:
        for u, v in itertools.combinations(e, 2):
            bad_codeg[(u, v)] = bad_codeg.get((u, v), 0) + 1
    heavy = []
    for u in v1:
        for v in v2:
            p = (u, v) if u < v else (v, u)
            d = bad_codeg.get(p, 0)
            # heavy when d >= threshold * n, compared exactly
            if d * heavy_threshold.denominator >= heavy_threshold.numerator * n:
                heavy.append((u, v))
    heavy_set = set(heavy)
    b122_heavy = []
    b122_light = []
    for e in b122:
        u = next(x for x in e if parts[x] == 1)
        rest = [x for x in e if x != u]
        if any((u, w) in heavy_set for w in rest):
            b122_heavy.append(e)
        else:
            b122_light.append(e)

    t1 = [0] * n
    t2 = [0] * n
    for v in range(n):
        adj = [set() for _ in range(n)]
        for e in h.edges():
            if v in e:
                a, b = (x for x in e if x != v)
                adj[a].add(b)
                adj[b].add(a)
        c1 = 0
        c2 = 0
        for b in range(n):
            for c in adj[b]:
                for a in adj[b]:
                    if a == c:
                        continue
                    for d in adj[c]:
                        if d == a or d == b:
                            continue
                        if (parts[a], parts[b], parts[c], parts[d]) == (1, 1, 1, 2):
                            c1 += 1
                        if (parts[a], parts[b], parts[c], parts[d]) == (1, 2, 2, 1):
                            c2 += 1
        # ordered (a,b,c,d) tuples double-count each path (reversal);
        # type-1's pattern is asymmetric so reversals never re-match it,
        # by contrast each type-2 path matches in both directions
        t1[v] = c1
        t2[v] = c2 // 2

    cut_n = len(cut)
    return PartitionDiagnostics(
        partition=part,
        cut_count=cut_n,
        mu=Fraction(6 * cut_n, n**3) if n else Fraction(0),
        bad=bad,
        missing=missing,
        b111=b111,
        b122=b122,
        b122_heavy=b122_heavy,
        b122_light=b122_light,
        heavy_pairs=heavy,
        heavy_threshold=heavy_threshold,
        type1_paths=tuple(t1),
        type2_paths=tuple(t2),
    )


def z_delta(h: ThreeGraph, delta: Fraction, family_density) -> list:
    """Vertices of degree at most (pi/2 - 4*sqrt(delta)) n^2, where pi is
    the supplied family density (rational or in Q(sqrt 3)).

    The irrational threshold is decided exactly by comparing squares.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    pi_hat = family_density if isinstance(family_density, QSqrt3) else QSqrt3(Fraction(family_density))
    n = h.n
    st = degrees(h)
    out = []
    nn = Fraction(n * n)
    for v in range(h.n):
        # d <= (pi/2) n^2 - 4 sqrt(delta) n^2  <=>  A >= 4 sqrt(delta) n^2
        a = pi_hat * (nn / 2) - Fraction(st.degrees[v])
        if a.sign() < 0:
            continue
        lhs = a * a
        rhs = QSqrt3(16 * delta * nn * nn)
        if (lhs - rhs).sign() >= 0:
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# extremal search


MAX_EXHAUSTIVE_SEARCH = 6


def _creates_forbidden(h: ThreeGraph, new_edge, family: ForbiddenFamily) -> bool:
    """Would adding new_edge make the (currently free) graph non-free?"""
    h2 = h.add_edges([new_edge])
    for f in family.members:
        if f.n <= h2.n and find_subgraph_embedding(f, h2) is not None:
            return True
    return False


def extremal_search(
    n: int,
    family: ForbiddenFamily,
    mode: str = "exhaustive",
    seed: int = 0,
    steps: int = 20000,
) -> tuple[ThreeGraph, int]:
    """Best family-free graph on n vertices.

    exhaustive (n <= 6): exact maximum via orderly enumeration of all
    free graphs. anneal: simulated annealing seeded with the optimal
    recursive construction, so the result is never below brec(n).
    """
    if mode == "exhaustive":
        if n > MAX_EXHAUSTIVE_SEARCH:
            raise ValueError(f"exhaustive search needs n <= {MAX_EXHAUSTIVE_SEARCH}")
        from .flags import enumerate_free_graphs

        best = None
        for g in enumerate_free_graphs(family, n):
            if best is None or g.edge_count() > best.edge_count():
                best = g
        return best, best.edge_count()
    if mode == "anneal":
        rng = random.Random(seed)
        value, plan = brec(n)
        current = brec_graph(plan)
        if not is_free(current, family):
            raise ValueError("the recursive construction is not free for this family")
        best = current
        all_triples = list(itertools.combinations(range(n), 3))
        temp = 1.0
        for step in range(steps):
            temp = max(0.02, temp * 0.9995)
            t = all_triples[rng.randrange(len(all_triples))]
            if current.has_edge(*t):
                # removing an edge costs 1; annealing acceptance
                if rng.random() < math.exp(-1.0 / temp):
                    current = current.remove_edges([t])
            else:
                if not _creates_forbidden(current, t, family):
                    current = current.add_edges([t])
            if current.edge_count() > best.edge_count():
                best = current
        return best, best.edge_count()
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# exact inequality certification


@dataclass
class InequalityReport:
    name: str
    resolution: int
    certified: bool
    method: str
    grid_min_slack: QSqrt3
    grid_min_location: tuple
    zero_points: list
    cells_total: int
    cells_lipschitz_certified: int
    lipschitz_bound: Fraction
    notes: list = field(default_factory=list)
    grid_slacks: list | None = None  # optional (point, slack) samples


def _poly_eval(coeffs, x):
    """Horner evaluation; coeffs[i] multiplies x^i, all exact scalars."""
    out = QSqrt3(0)
    for c in reversed(coeffs):
        out = out * x + (c if isinstance(c, QSqrt3) else QSqrt3(Fraction(c)))
    return out


def _poly_mul(a, b):
    out = [QSqrt3(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] = out[i + j] + QSqrt3._coerce(ca) * QSqrt3._coerce(cb)
    return out


def _poly_sub(a, b):
    la = list(a) + [0] * max(0, len(b) - len(a))
    lb = list(b) + [0] * max(0, len(a) - len(b))
    return [QSqrt3._coerce(x) - QSqrt3._coerce(y) for x, y in zip(la, lb)]


def _poly_is_zero(p) -> bool:
    return all(QSqrt3._coerce(c) == QSqrt3(0) for c in p)


def _grid_points(resolution: int):
    return [Fraction(i, resolution) for i in range(resolution + 1)]


def _lipschitz_cells_1d(slacks, resolution: int, lbound: Fraction):
    """Cells [t_i, t_i+1] where both endpoint slacks exceed L*h/2."""
    margin = QSqrt3(lbound / (2 * resolution))
    ok = 0
    for i in range(resolution):
        if (slacks[i] - margin).sign() > 0 and (slacks[i + 1] - margin).sign() > 0:
            ok += 1
    return ok


def _simplex_boundary_slack(resolution: int):
    """Exact slacks of alpha/6 - t(1-t) / (2(1+t+t^2)) on a rational grid
    of [0,1] (the simplex inequality after substituting x1 = 1-t)."""
    pts = _grid_points(resolution)
    out = []
    for t in pts:
        tt = QSqrt3(t)
        num = ALPHA * (1 + t + t * t)  # alpha (1+t+t^2)
        val = (num - QSqrt3(3 * t * (1 - t))) / QSqrt3(6 * (1 + t + t * t))
        out.append(val)
        _ = tt
    return pts, out


def check_fact_simplex_bound(resolution: int = 1000) -> InequalityReport:
    """x1^2 x2 / (2 (1 - x2^3)) <= alpha/6 on the simplex (x2 < 1).

    After clearing the positive denominator the slack is a quadratic
    with an exact double root at t = (sqrt(3)-1)/2, so the certificate
    is the factorisation (alpha+3)(t - t0)^2 >= 0; the grid reports
    slack values (all positive at rational points).
    """
    # numerator polynomial of the slack: alpha + (alpha-3) t + (alpha+3) t^2
    p = [ALPHA, ALPHA - 3, ALPHA + 3]
    t0 = QSqrt3(Fraction(-1, 2), Fraction(1, 2))  # (sqrt3 - 1)/2
    factored = _poly_mul([ALPHA + 3], _poly_mul([-t0, QSqrt3(1)], [-t0, QSqrt3(1)]))
    certified = _poly_is_zero(_poly_sub(p, factored)) and (ALPHA + 3).sign() > 0
    notes = []
    if not certified:
        notes.append("exact factorisation failed; falling back to grid evidence only")
    pts, slacks = _simplex_boundary_slack(resolution)
    min_i = min(range(len(slacks)), key=lambda i: (float(slacks[i]), i))
    zero_points = [(pts[i],) for i in range(len(slacks)) if slacks[i] == QSqrt3(0)]
    lbound = Fraction(1)  # |d/dt of t(1-t)/(2(1+t+t^2))| <= 1 on [0,1]
    return InequalityReport(
        name="fact_simplex_bound",
        resolution=resolution,
        certified=certified,
        method="sos-factorisation",
        grid_min_slack=slacks[min_i],
        grid_min_location=(pts[min_i],),
        zero_points=zero_points,
        cells_total=resolution,
        cells_lipschitz_certified=_lipschitz_cells_1d(slacks, resolution, lbound),
        lipschitz_bound=lbound,
        notes=notes
        + ["equality holds only at the irrational point t = (sqrt(3)-1)/2"],
    )


def check_fact_quadratic_gap(resolution: int = 1000) -> InequalityReport:
    """x1^2 x2 / 2 + (alpha/6) x2^3 <= alpha/6 - (x1-gamma)^2/4 on
    x1 in [1/2, 1].

    The slack is a cubic with an exact double root at gamma; dividing it
    out leaves a positive linear factor, checked at the endpoints.
    """
    # slack(x) = alpha/6 - (x-gamma)^2/4 - x^2 (1-x)/2 - alpha/6 (1-x)^3
    a6 = ALPHA * Fraction(1, 6)
    slack = [
        a6 - GAMMA * GAMMA * Fraction(1, 4) - a6,  # constant
        GAMMA * Fraction(1, 2) + a6 * 3,
        QSqrt3(Fraction(-1, 4)) - QSqrt3(Fraction(1, 2)) - a6 * 3,
        QSqrt3(Fraction(1, 2)) + a6,
    ]
    lead = slack[3]
    # divide by (x - gamma)^2 = gamma^2 - 2 gamma x + x^2
    # slack = (x - gamma)^2 (lead*x + b) requires matching coefficients
    b = slack[2] + 2 * GAMMA * lead
    reconstructed = _poly_mul([GAMMA * GAMMA, -2 * GAMMA, QSqrt3(1)], [b, lead])
    exact = _poly_is_zero(_poly_sub(slack, reconstructed))
    half = QSqrt3(Fraction(1, 2))
    pos = (lead * half + b).sign() > 0 and (lead + b).sign() > 0
    certified = exact and pos
    pts = [Fraction(1, 2) + Fraction(i, 2 * resolution) for i in range(resolution + 1)]
    slacks = [_poly_eval(slack, QSqrt3(t)) for t in pts]
    min_i = min(range(len(slacks)), key=lambda i: (float(slacks[i]), i))
    zero_points = [(pts[i],) for i in range(len(slacks)) if slacks[i] == QSqrt3(0)]
    lbound = Fraction(3)
    notes = ["equality holds only at the irrational point x1 = gamma"]
    if not exact:
        notes.append("exact division left a nonzero remainder")
    if not pos:
        notes.append("linear cofactor is not positive on [1/2, 1]")
    return InequalityReport(
        name="fact_quadratic_gap",
        resolution=resolution,
        certified=certified,
        method="double-root-division",
        grid_min_slack=slacks[min_i],
        grid_min_location=(pts[min_i],),
        zero_points=zero_points,
        cells_total=resolution,
        cells_lipschitz_certified=_lipschitz_cells_1d(slacks, resolution, lbound),
        lipschitz_bound=lbound,
        notes=notes,
    )


def _boundary_profile_terms():
    """Shared exact pieces of the two-variable boundary inequality."""
    one_minus_gamma = QSqrt3(1) - GAMMA
    cap = ALPHA * Fraction(1, 2) * one_minus_gamma * one_minus_gamma
    return one_minus_gamma, cap


def boundary_profile(x, y):
    """g(x,y): the boundary edge-count profile whose maximum is alpha/2.

    x, y may be Fractions or QSqrt3 values; everything stays exact.
    """
    x = QSqrt3._coerce(x)
    y = QSqrt3._coerce(y)
    one_minus_gamma, cap = _boundary_profile_terms()
    base = (
        x * x * Fraction(1, 2)
        + (GAMMA - x) * (one_minus_gamma - y)
        + (GAMMA - x) * (x + y) * Fraction(1, 10)
    )
    a_branch = y * y * Fraction(1, 2) + y * (one_minus_gamma - y)
    m = a_branch if (a_branch - cap).sign() <= 0 else cap
    return base + m


def check_boundary_profile(resolution: int = 1000, keep_grid: bool = False) -> InequalityReport:
    """g(x,y) <= alpha/2 on [0,gamma] x [0,1-gamma].

    Exact certification follows the quadratic-in-x endpoint reduction:
    for fixed y the profile is a quadratic in x with positive leading
    coefficient 2/5, so it peaks at x=0 or x=gamma; the x=0 boundary
    value is strictly decreasing in y from alpha/2, and the x=gamma
    boundary value is non-decreasing with terminal value exactly
    alpha/2. Each monotonicity/terminal step is verified exactly in
    Q(sqrt 3). The grid evaluates g exactly at rational points plus the
    exact corners.
    """
    one_minus_gamma, cap = _boundary_profile_terms()
    half_alpha = ALPHA * Fraction(1, 2)
    notes = []
    ok = True

    # (1) leading coefficient in x is 1/2 - 1/10 = 2/5 > 0
    ok &= Fraction(1, 2) - Fraction(1, 10) == Fraction(2, 5)

    # (2) x = 0 boundary: slope <= -(9/10)gamma + (1-gamma) < 0 on both
    # min-branches (A' ranges over [0, 1-gamma])
    worst_slope = GAMMA * Fraction(-9, 10) + one_minus_gamma
    ok &= worst_slope.sign() < 0
    # value at y=0: gamma(1-gamma) + min(0, cap) = alpha/2 exactly
    ok &= (GAMMA * one_minus_gamma - half_alpha) == QSqrt3(0)
    ok &= cap.sign() > 0

    # (3) x = gamma boundary: A(y) has slope 1-gamma-y >= 0 on the domain,
    # so min(A, cap) is non-decreasing; terminal value is exact:
    terminal = GAMMA * GAMMA * Fraction(1, 2) + cap
    ok &= (terminal - half_alpha) == QSqrt3(0)
    # cap really is the smaller branch at y = 1-gamma (alpha < 1)
    a_end = one_minus_gamma * one_minus_gamma * Fraction(1, 2)
    ok &= (a_end - cap).sign() > 0

    if not ok:
        notes.append("an exact reduction step failed")
    notes.append(
        "equality locus: the corner (0,0) and the boundary segment "
        "x=gamma, y in [(1-gamma)(2-sqrt3), 1-gamma]"
    )

    # grid: rational points inside the domain plus the exact corners
    xs: list = [Fraction(i, resolution) for i in range(resolution + 1)]
    xs = [x for x in xs if (GAMMA - x).sign() >= 0] + [GAMMA]
    ys: list = [Fraction(j, resolution) for j in range(resolution + 1)]
    ys = [y for y in ys if (one_minus_gamma - y).sign() >= 0] + [one_minus_gamma]
    slack_grid = _boundary_profile_grid(xs, ys)
    min_val = None
    min_loc = None
    zeros = []
    kept = []
    for (x, y), s in slack_grid:
        if s == QSqrt3(0):
            zeros.append((x, y))
        if min_val is None or (s - min_val).sign() < 0:
            min_val, min_loc = s, (x, y)
        if keep_grid:
            kept.append(((x, y), s))
    cells = (len(xs) - 1) * (len(ys) - 1)
    lbound = Fraction(3)
    return InequalityReport(
        name="boundary_profile",
        resolution=resolution,
        certified=bool(ok),
        method="monotone-boundary-reduction",
        grid_min_slack=min_val,
        grid_min_location=min_loc,
        zero_points=zeros,
        cells_total=cells,
        cells_lipschitz_certified=_lipschitz_cells_2d_count(slack_grid, xs, ys, lbound, resolution),
        lipschitz_bound=lbound,
        notes=notes,
        grid_slacks=kept if keep_grid else None,
    )


def _boundary_profile_grid(xs, ys):
    """Exact slacks alpha/2 - g on the grid.

    For fixed x the base part is linear in y, so the double loop costs
    one multiply-add per point plus the branch comparison.
    """
    one_minus_gamma, cap = _boundary_profile_terms()
    half_alpha = ALPHA * Fraction(1, 2)
    y_cols = []
    for y in ys:
        yq = QSqrt3._coerce(y)
        a_branch = yq * yq * Fraction(1, 2) + yq * (one_minus_gamma - yq)
        m = a_branch if (a_branch - cap).sign() <= 0 else cap
        y_cols.append((yq, m))
    out = []
    for x in xs:
        xq = QSqrt3._coerce(x)
        gx = GAMMA - xq
        # base(x, y) = p0(x) + p1(x) * y
        p0 = xq * xq * Fraction(1, 2) + gx * one_minus_gamma + gx * xq * Fraction(1, 10)
        p1 = gx * Fraction(-9, 10)
        for (yq, m), y in zip(y_cols, ys):
            s = half_alpha - (p0 + p1 * yq + m)
            out.append(((x, y), s))
    return out


def _lipschitz_cells_2d_count(slack_grid, xs, ys, lbound: Fraction, resolution: int):
    margin = QSqrt3(2 * lbound / resolution)
    values = {loc: s for loc, s in slack_grid}
    ok = 0
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            corners = [
                values[(xs[i], ys[j])],
                values[(xs[i + 1], ys[j])],
                values[(xs[i], ys[j + 1])],
                values[(xs[i + 1], ys[j + 1])],
            ]
            if all((c - margin).sign() > 0 for c in corners):
                ok += 1
    return ok


INEQUALITY_CHECKS = {
    "fact2_8_i": check_fact_simplex_bound,
    "fact2_8_ii": check_fact_quadratic_gap,
    "prop6_2": check_boundary_profile,
}


def check_inequalities(which: str, resolution: int = 1000, **kw) -> InequalityReport:
    """Certify one of the named scalar inequalities at a grid resolution.

    Certification is exact (Q(sqrt 3) identities and sign checks); the
    grid supplies the slack report demanded alongside.
    """
    if resolution < 10:
        raise ValueError("resolution must be at least 10")
    if which not in INEQUALITY_CHECKS:
        raise KeyError(f"unknown inequality {which!r}; choose from {sorted(INEQUALITY_CHECKS)}")
    return INEQUALITY_CHECKS[which](resolution, **kw)
