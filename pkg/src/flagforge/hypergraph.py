"""Labelled 3-uniform hypergraphs and their core algorithms.

Vertices are the integers 0..n-1 (the literature that motivated the named
constructions is 1-based; every constructor here shifts down by one).
Edges are 3-element subsets, stored as a bit mask indexed by the
combinatorial rank of the sorted triple, so membership tests and
relabelling reduce to integer arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb


def triple_rank(a: int, b: int, c: int) -> int:
    """Colex rank of a sorted triple a < b < c (n-independent)."""
    return a + comb(b, 2) + comb(c, 3)


def triple_unrank(r: int) -> tuple[int, int, int]:
    """Inverse of :func:`triple_rank`."""
    c = 2
    while comb(c + 1, 3) <= r:
        c += 1
    r -= comb(c, 3)
    b = 1
    while comb(b + 1, 2) <= r:
        b += 1
    a = r - comb(b, 2)
    return (a, b, c)


def _normalize_edge(e) -> tuple[int, int, int]:
    t = tuple(sorted(e))
    if len(t) != 3 or len(set(t)) != 3:
        raise ValueError(f"edge {e!r} is not a set of 3 distinct vertices")
    return t


class ThreeGraph:
    """An immutable 3-graph on vertex set {0, ..., n-1}."""

    __slots__ = ("n", "mask", "_hash")

    def __init__(self, n: int, edges=()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        mask = 0
        for e in edges:
            a, b, c = _normalize_edge(e)
            if c >= n:
                raise ValueError(f"edge {e!r} has a vertex >= n={n}")
            mask |= 1 << triple_rank(a, b, c)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "_hash", hash((n, mask)))

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "ThreeGraph":
        g = cls.__new__(cls)
        object.__setattr__(g, "n", n)
        object.__setattr__(g, "mask", mask)
        object.__setattr__(g, "_hash", hash((n, mask)))
        if mask < 0 or mask >> comb(n, 3):
            raise ValueError("edge mask has bits outside the rank range")
        return g

    def __setattr__(self, *a):
        raise AttributeError("ThreeGraph is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, ThreeGraph)
            and self.n == other.n
            and self.mask == other.mask
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"ThreeGraph(n={self.n}, m={self.edge_count()})"

    def edges(self) -> list[tuple[int, int, int]]:
        """Sorted list of edges as sorted triples."""
        out = []
        m = self.mask
        r = 0
        while m:
            low = m & -m
            r = low.bit_length() - 1
            out.append(triple_unrank(r))
            m ^= low
        out.sort()
        return out

    def edge_count(self) -> int:
        return self.mask.bit_count()

    def has_edge(self, a: int, b: int, c: int) -> bool:
        a, b, c = sorted((a, b, c))
        return bool(self.mask >> triple_rank(a, b, c) & 1)

    def add_edges(self, edges) -> "ThreeGraph":
        g = ThreeGraph(self.n, edges)
        return ThreeGraph.from_mask(self.n, self.mask | g.mask)

    def remove_edges(self, edges) -> "ThreeGraph":
        g = ThreeGraph(self.n, edges)
        return ThreeGraph.from_mask(self.n, self.mask & ~g.mask)

    def relabel(self, perm) -> "ThreeGraph":
        """Apply the vertex permutation perm (old label -> new label)."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm is not a permutation of 0..n-1")
        edges = [(perm[a], perm[b], perm[c]) for a, b, c in self.edges()]
        return ThreeGraph(self.n, edges)

    def induced(self, vertices) -> "ThreeGraph":
        """Induced subgraph on the given vertices, relabelled 0..k-1 in order."""
        vs = list(vertices)
        pos = {v: i for i, v in enumerate(vs)}
        if len(pos) != len(vs):
            raise ValueError("repeated vertex")
        edges = [
            tuple(sorted((pos[a], pos[b], pos[c])))
            for a, b, c in itertools.combinations(sorted(vs), 3)
            if self.has_edge(a, b, c)
        ]
        return ThreeGraph(len(vs), edges)


@dataclass(frozen=True)
class LinkGraph:
    """A simple 2-graph; used for vertex links inside a 3-graph."""

    n: int
    edges: frozenset
    center: int | None = None

    def __post_init__(self):
        for e in self.edges:
            a, b = e
            if not (0 <= a < self.n and 0 <= b < self.n and a != b):
                raise ValueError(f"bad pair {e!r}")
            if self.center is not None and self.center in e:
                raise ValueError("a link edge may not touch the center")

    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.edges


@dataclass(frozen=True)
class VertexWeights:
    """Per-vertex positive multiplicities for blowups."""

    weights: tuple

    def __post_init__(self):
        if any(w < 1 for w in self.weights):
            raise ValueError("all blowup weights must be >= 1")

    @classmethod
    def uniform(cls, n: int, k: int) -> "VertexWeights":
        return cls(tuple([k] * n))


@dataclass(frozen=True)
class ForbiddenFamily:
    name: str
    members: tuple

    def __post_init__(self):
        for g in self.members:
            if g.edge_count() < 1:
                raise ValueError("forbidden graphs must have at least one edge")


# ---------------------------------------------------------------------------
# named graphs


def empty_graph(n: int) -> ThreeGraph:
    return ThreeGraph(n)


def complete_graph(n: int) -> ThreeGraph:
    return ThreeGraph(n, itertools.combinations(range(n), 3))


def tight_cycle(length: int) -> ThreeGraph:
    """The tight cycle on `length` cyclically ordered vertices.

    Edges are all consecutive triples {i, i+1, i+2} mod length.
    """
    if length < 4:
        raise ValueError("tight cycles need at least 4 vertices")
    return ThreeGraph(
        length, [((i) % length, (i + 1) % length, (i + 2) % length) for i in range(length)]
    )


def tight_cycle_minus(length: int) -> ThreeGraph:
    """Tight cycle with the edge {0,1,2} removed.

    All single-edge deletions give isomorphic graphs (the cycle is
    vertex-transitive), so fixing {0,1,2} loses no generality.
    """
    return tight_cycle(length).remove_edges([(0, 1, 2)])


def f1() -> ThreeGraph:
    """5-vertex, 5-edge homomorphic image of the tight 7-cycle."""
    return ThreeGraph(5, [(0, 1, 2), (0, 2, 3), (0, 3, 1), (0, 3, 4), (1, 2, 3)])


def f2() -> ThreeGraph:
    """6-vertex, 6-edge homomorphic image of the tight 7-cycle."""
    return ThreeGraph(
        6, [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1), (1, 2, 3)]
    )


def family_c4c5() -> ForbiddenFamily:
    return ForbiddenFamily("C4C5", (tight_cycle(4), tight_cycle(5)))


def family_c4f1f2() -> ForbiddenFamily:
    return ForbiddenFamily("C4F1F2", (tight_cycle(4), f1(), f2()))


def family_c5() -> ForbiddenFamily:
    return ForbiddenFamily("C5", (tight_cycle(5),))


def family_single_cycle(length: int) -> ForbiddenFamily:
    return ForbiddenFamily(f"Cl{length}", (tight_cycle(length),))


FAMILY_REGISTRY = {
    "C4C5": family_c4c5,
    "C4F1F2": family_c4f1f2,
    "C5": family_c5,
    "NONE": lambda: ForbiddenFamily("NONE", ()),
}


def family_by_name(name: str) -> ForbiddenFamily:
    """Look up a family: registry names, or Cl<length> for one tight cycle."""
    key = name.upper()
    if key in FAMILY_REGISTRY:
        return FAMILY_REGISTRY[key]()
    if key.startswith("CL"):
        return family_single_cycle(int(key[2:]))
    raise KeyError(f"unknown family {name!r}")


# ---------------------------------------------------------------------------
# local structure


def link(h: ThreeGraph, v: int) -> LinkGraph:
    """The link of v: pairs e with e + {v} an edge of h."""
    if not 0 <= v < h.n:
        raise ValueError(f"vertex {v} out of range for n={h.n}")
    pairs = set()
    for a, b, c in h.edges():
        if v == a:
            pairs.add(frozenset((b, c)))
        elif v == b:
            pairs.add(frozenset((a, c)))
        elif v == c:
            pairs.add(frozenset((a, b)))
    return LinkGraph(h.n, frozenset(pairs), center=v)


@dataclass(frozen=True)
class DegreeStats:
    min_degree: int
    max_degree: int
    max_codegree: int
    degrees: tuple
    codegrees: dict  # (u, v) with u < v -> codegree


def degrees(h: ThreeGraph) -> DegreeStats:
    deg = [0] * h.n
    codeg = {p: 0 for p in itertools.combinations(range(h.n), 2)}
    for a, b, c in h.edges():
        deg[a] += 1
        deg[b] += 1
        deg[c] += 1
        codeg[(a, b)] += 1
        codeg[(a, c)] += 1
        codeg[(b, c)] += 1
    if h.n == 0:
        return DegreeStats(0, 0, 0, (), {})
    return DegreeStats(
        min(deg),
        max(deg),
        max(codeg.values()) if codeg else 0,
        tuple(deg),
        codeg,
    )


def blowup(h: ThreeGraph, w: VertexWeights) -> ThreeGraph:
    """Replace vertex v by a class of w[v] clones; edges become complete
    3-partite triples over the original edges."""
    if len(w.weights) != h.n:
        raise ValueError("need one weight per vertex")
    offsets = [0] * h.n
    total = 0
    for v in range(h.n):
        offsets[v] = total
        total += w.weights[v]
    classes = [range(offsets[v], offsets[v] + w.weights[v]) for v in range(h.n)]
    edges = []
    for a, b, c in h.edges():
        for x in classes[a]:
            for y in classes[b]:
                for z in classes[c]:
                    edges.append((x, y, z))
    return ThreeGraph(total, edges)


def duplicate_max_delete_min(h: ThreeGraph) -> tuple[ThreeGraph, int]:
    """Delete a minimum-degree vertex and duplicate a maximum-degree one.

    Keeps the vertex count; for blowup-invariant families the result stays
    free. Returns the new graph and the exact edge-count change, which is
    max_degree - min_degree - codegree(max_vertex, min_vertex).
    """
    if h.n < 2:
        raise ValueError("need at least two vertices")
    st = degrees(h)
    u = min(range(h.n), key=lambda v: st.degrees[v])  # deleted
    v = max(
        (x for x in range(h.n) if x != u), key=lambda x: st.degrees[x]
    )  # duplicated
    pair = (min(u, v), max(u, v))
    delta = st.degrees[v] - st.degrees[u] - st.codegrees[pair]
    edges = []
    for a, b, c in h.edges():
        if u in (a, b, c):
            continue
        edges.append((a, b, c))
        if v in (a, b, c):
            edges.append(tuple(u if x == v else x for x in (a, b, c)))
    out = ThreeGraph(h.n, edges)
    assert out.edge_count() - h.edge_count() == delta
    return out, delta


# ---------------------------------------------------------------------------
# canonical labelling

# Individualization-refinement search. The refinement invariant is the
# (degree, codegree-to-each-class) profile, iterated to a fixed point;
# branches individualize one vertex of the first non-singleton cell, with
# orbit pruning from automorphisms discovered at equal-encoding leaves.


def _codegree_matrix(h: ThreeGraph):
    cd = [[0] * h.n for _ in range(h.n)]
    for a, b, c in h.edges():
        cd[a][b] += 1
        cd[b][a] += 1
        cd[a][c] += 1
        cd[c][a] += 1
        cd[b][c] += 1
        cd[c][b] += 1
    return cd


def _refine(cells, cd, n):
    """Refine an ordered partition until stable; returns list of lists."""
    while True:
        cls = [0] * n
        for i, cell in enumerate(cells):
            for v in cell:
                cls[v] = i
        new_cells = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            sig = {}
            for v in cell:
                prof = [0] * len(cells)
                for u in range(n):
                    if u != v and cd[v][u]:
                        prof[cls[u]] += cd[v][u]
                key = tuple(prof)
                sig.setdefault(key, []).append(v)
            if len(sig) > 1:
                changed = True
            for key in sorted(sig):
                new_cells.append(sig[key])
        cells = new_cells
        if not changed:
            return cells


def _encode_with_labels(h: ThreeGraph, label):
    mask = 0
    for a, b, c in h.edges():
        x, y, z = sorted((label[a], label[b], label[c]))
        mask |= 1 << triple_rank(x, y, z)
    return mask


def _orbit_of(v, gens, n):
    orb = {v}
    frontier = [v]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = g[x]
            if y not in orb:
                orb.add(y)
                frontier.append(y)
    return orb


def canonical_form(h: ThreeGraph) -> tuple[ThreeGraph, tuple]:
    """Canonical relabelling of h.

    Returns (canonical graph, perm) where perm[v] is the new label of v and
    the canonical graph is invariant under any relabelling of h.
    """
    n = h.n
    if n <= 1:
        return h, tuple(range(n))
    cd = _codegree_matrix(h)
    deg = [0] * n
    for a, b, c in h.edges():
        deg[a] += 1
        deg[b] += 1
        deg[c] += 1
    by_deg = {}
    for v in range(n):
        by_deg.setdefault(deg[v], []).append(v)
    cells = [by_deg[d] for d in sorted(by_deg)]
    cells = _refine(cells, cd, n)

    best = {"mask": None, "label": None, "first": None}
    autos = []

    def search(cells):
        target = None
        for i, cell in enumerate(cells):
            if len(cell) > 1:
                target = i
                break
        if target is None:
            label = [0] * n
            for pos, cell in enumerate(cells):
                label[cell[0]] = pos
            mask = _encode_with_labels(h, label)
            if best["mask"] is None or mask < best["mask"]:
                best["mask"] = mask
                best["label"] = tuple(label)
                best["first"] = tuple(label)
            elif mask == best["mask"]:
                # label and best["first"] both map h onto the same graph:
                # their composition is an automorphism of h
                inv_first = [0] * n
                for v in range(n):
                    inv_first[best["first"][v]] = v
                auto = tuple(inv_first[label[v]] for v in range(n))
                if any(auto[v] != v for v in range(n)):
                    autos.append(auto)
            return
        cell = cells[target]
        tried = []
        for v in cell:
            if autos and any(
                v in _orbit_of(u, autos, n) for u in tried
            ):
                continue
            tried.append(v)
            rest = [u for u in cell if u != v]
            next_cells = cells[:target] + [[v], rest] + cells[target + 1 :]
            search(_refine(next_cells, cd, n))

    search(cells)
    perm = best["label"]
    return ThreeGraph.from_mask(n, best["mask"]), perm


def is_isomorphic(h1: ThreeGraph, h2: ThreeGraph) -> bool:
    if h1.n != h2.n or h1.edge_count() != h2.edge_count():
        return False
    return canonical_form(h1)[0].mask == canonical_form(h2)[0].mask


# ---------------------------------------------------------------------------
# homomorphisms and subgraph containment


def _search_order(f: ThreeGraph):
    """Vertex order for backtracking: greedy, most edges into placed set."""
    edges = f.edges()
    deg = [0] * f.n
    for e in edges:
        for v in e:
            deg[v] += 1
    if f.n == 0:
        return []
    order = [max(range(f.n), key=lambda v: deg[v])]
    placed = set(order)
    while len(order) < f.n:
        def gain(v):
            return sum(1 for e in edges if v in e and len(set(e) - placed - {v}) == 0)
        v = max((u for u in range(f.n) if u not in placed), key=lambda u: (gain(u), deg[u]))
        order.append(v)
        placed.add(v)
    return order


def find_homomorphism(f: ThreeGraph, t: ThreeGraph):
    """An edge-preserving (not necessarily injective) map V(f) -> V(t).

    Returns the map as a tuple, or None if exhaustive search finds none.
    An edge must land on 3 distinct vertices spanning an edge of t.
    """
    if f.edge_count() == 0:
        return tuple([0] * f.n) if (f.n == 0 or t.n > 0) else None
    if t.n == 0:
        return None
    order = _search_order(f)
    pos_in_order = {v: i for i, v in enumerate(order)}
    edges = f.edges()
    # edges grouped by the order-step at which they become fully mapped
    ready = [[] for _ in range(f.n)]
    for e in edges:
        step = max(pos_in_order[v] for v in e)
        ready[step].append(e)
    image = [-1] * f.n

    def ok(step):
        for a, b, c in ready[step]:
            x, y, z = image[a], image[b], image[c]
            if x == y or x == z or y == z or not t.has_edge(x, y, z):
                return False
        return True

    def extend(step):
        if step == len(order):
            return True
        v = order[step]
        for w in range(t.n):
            image[v] = w
            if ok(step) and extend(step + 1):
                return True
        image[v] = -1
        return False

    return tuple(image) if extend(0) else None


def is_homomorphism(f: ThreeGraph, t: ThreeGraph, image) -> bool:
    for a, b, c in f.edges():
        x, y, z = image[a], image[b], image[c]
        if x == y or x == z or y == z or not t.has_edge(x, y, z):
            return False
    return True


def find_subgraph_embedding(f: ThreeGraph, h: ThreeGraph):
    """An injective map sending every edge of f to an edge of h, or None.

    Non-induced containment; candidates are pruned by degree and by
    codegree lists for pair-completing steps.
    """
    if f.edge_count() == 0:
        raise ValueError("searching for an edgeless subgraph is not meaningful")
    if f.n > h.n or f.edge_count() > h.edge_count():
        return None
    order = _search_order(f)
    pos_in_order = {v: i for i, v in enumerate(order)}
    f_edges = f.edges()
    ready = [[] for _ in range(f.n)]
    for e in f_edges:
        step = max(pos_in_order[v] for v in e)
        ready[step].append(e)
    fdeg = [0] * f.n
    for e in f_edges:
        for v in e:
            fdeg[v] += 1
    hstats = degrees(h)
    # codegree neighbourhoods of h for candidate narrowing
    nbrs = {}
    for a, b, c in h.edges():
        nbrs.setdefault((a, b), []).append(c)
        nbrs.setdefault((a, c), []).append(b)
        nbrs.setdefault((b, c), []).append(a)
    image = [-1] * f.n
    used = set()

    def candidates(step):
        v = order[step]
        # if some edge of f gets completed at this step, its other two
        # vertices are already placed: restrict to their codegree list
        for a, b, c in ready[step]:
            others = [x for x in (a, b, c) if x != v]
            if len(others) == 2:
                p = tuple(sorted((image[others[0]], image[others[1]])))
                return nbrs.get(p, [])
        return range(h.n)

    def ok(step):
        for a, b, c in ready[step]:
            x, y, z = sorted((image[a], image[b], image[c]))
            if not h.has_edge(x, y, z):
                return False
        return True

    def extend(step):
        if step == len(order):
            return True
        v = order[step]
        for w in candidates(step):
            if w in used or hstats.degrees[w] < fdeg[v]:
                continue
            image[v] = w
            used.add(w)
            if ok(step) and extend(step + 1):
                return True
            used.discard(w)
        image[v] = -1
        return False

    return tuple(image) if extend(0) else None


def is_free(h: ThreeGraph, family: ForbiddenFamily) -> bool:
    """True iff no member of the family appears as a (not necessarily
    induced) subgraph of h."""
    for f in family.members:
        if f.n <= h.n and find_subgraph_embedding(f, h) is not None:
            return False
    return True


def _pair_identifications(g: ThreeGraph):
    """Images of g under identifying one zero-codegree vertex pair.

    Identifying u and v is a homomorphism exactly when no edge contains
    both, and every homomorphic image arises from a chain of such steps.
    """
    st = degrees(g)
    for (u, v), cd in st.codegrees.items():
        if cd:
            continue
        # map v onto u, relabel to close the gap
        def shift(x):
            x = u if x == v else x
            return x - 1 if x > v else x

        yield ThreeGraph(
            g.n - 1, [tuple(shift(x) for x in e) for e in g.edges()]
        )


_CLOSURE_CACHE: dict = {}


def homomorphic_closure(family: ForbiddenFamily) -> ForbiddenFamily:
    """Close a family under homomorphic images, keeping subgraph-minimal
    representatives.

    A graph admits a homomorphism from some member iff it contains a
    member of the closure as a subgraph, and freeness for the closure is
    preserved by blowups (the raw subgraph notion need not be: a family
    member with a zero-codegree pair has strictly smaller images, which
    can sit inside an otherwise free graph whose blowup then contains
    the member).
    """
    if family in _CLOSURE_CACHE:
        return _CLOSURE_CACHE[family]
    seen: list[ThreeGraph] = []
    queue = list(family.members)
    while queue:
        g = queue.pop()
        if any(x.n == g.n and is_isomorphic(x, g) for x in seen):
            continue
        seen.append(g)
        queue.extend(_pair_identifications(g))
    # drop any image containing another image as a subgraph
    seen.sort(key=lambda g: (g.n, g.edge_count()))
    minimal: list[ThreeGraph] = []
    for g in seen:
        if is_free(g, ForbiddenFamily("partial", tuple(minimal))):
            minimal.append(g)
    out = ForbiddenFamily(family.name, tuple(minimal))
    _CLOSURE_CACHE[family] = out
    return out


def admits_family_homomorphism(h: ThreeGraph, family: ForbiddenFamily) -> bool:
    """True iff some member of the family has a homomorphism into h."""
    return not is_free(h, homomorphic_closure(family))
