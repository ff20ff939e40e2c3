"""Flags of forbidden-family-free (coloured) 3-graphs.

A flag is a 3-graph with an ordered tuple of root vertices spanning a
fully-labelled type; a theory fixes the forbidden family and whether
vertices carry one of two colours. Everything here is exact: densities,
products and averages are rationals, and flags are identified by a
canonical integer key (minimal colour/edge encoding over all
relabellings of the non-root vertices).

Encodings: an m-vertex flag with k roots is a pair of bit masks. Edge
mask bit r corresponds to the triple of colex rank r (see
``hypergraph.triple_rank``); colour mask bit v is set when vertex v has
colour 2. Roots are always the vertices 0..k-1, in root order.

Enumeration proceeds by augmentation: every (s+1)-vertex flag arises
from an s-vertex flag by attaching one new last vertex, so extending
each canonical s-vertex flag in all ways, filtering by freeness on the
new vertex, and deduplicating by canonical key yields a complete,
duplicate-free basis level by level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .hypergraph import (
    ForbiddenFamily,
    ThreeGraph,
    homomorphic_closure,
    is_free,
    triple_rank,
    triple_unrank,
)

# uint64 keys hold C(m,3) edge bits plus m colour bits, so m is capped
MAX_FLAG_VERTICES = 7

_TRIPLES = {m: list(itertools.combinations(range(m), 3)) for m in range(MAX_FLAG_VERTICES + 1)}


def _nb3(m: int) -> int:
    return comb(m, 3)


@dataclass(frozen=True)
class Theory:
    """A forbidden family plus the number of vertex colours (1 or 2).

    Theory membership forbids *homomorphic images* of the family members
    (equivalently, the family's identification closure as subgraphs).
    This is the blowup-closed class that density limits live in; for
    families whose members have all codegrees positive it coincides with
    plain subgraph-freeness.
    """

    family: ForbiddenFamily
    colour_count: int = 1

    def __post_init__(self):
        if self.colour_count not in (1, 2):
            raise ValueError("colour_count must be 1 or 2")

    @property
    def coloured(self) -> bool:
        return self.colour_count == 2

    def closed_family(self) -> ForbiddenFamily:
        return homomorphic_closure(self.family)

    def admits(self, base: ThreeGraph) -> bool:
        return is_free(base, self.closed_family())

    def describe(self) -> str:
        return f"{self.family.name}/{self.colour_count}col"


# ---------------------------------------------------------------------------
# encoding and canonical keys


def encode_edges(m: int, edges) -> int:
    mask = 0
    for e in edges:
        a, b, c = sorted(e)
        if not 0 <= a < b < c < m:
            raise ValueError(f"bad edge {e!r} for m={m}")
        mask |= 1 << triple_rank(a, b, c)
    return mask


def encode_colours(colours) -> int:
    mask = 0
    for v, col in enumerate(colours):
        if col not in (1, 2):
            raise ValueError("colours must be 1 or 2")
        if col == 2:
            mask |= 1 << v
    return mask


def decode_colours(m: int, cmask: int) -> tuple:
    return tuple(2 if (cmask >> v) & 1 else 1 for v in range(m))


def decode_edges(m: int, emask: int) -> list:
    out = []
    while emask:
        low = emask & -emask
        out.append(triple_unrank(low.bit_length() - 1))
        emask ^= low
    return sorted(out)


@lru_cache(maxsize=None)
def _perm_tables(m: int, k: int):
    """Index tables for all vertex permutations fixing 0..k-1 pointwise.

    Row p interpreted as a scatter: edge bit r moves to position EIDX[p,r]
    and colour bit v to CIDX[p,v]; interpreted as a gather it applies the
    inverse permutation. The group is closed under inversion, so min-over-
    rows yields the same canonical key either way.
    """
    if m > MAX_FLAG_VERTICES:
        raise ValueError(f"flags with more than {MAX_FLAG_VERTICES} vertices are unsupported")
    free = list(range(k, m))
    triples = _TRIPLES[m]
    nb3 = _nb3(m)
    eidx = []
    cidx = []
    for tail in itertools.permutations(free):
        p = list(range(k)) + list(tail)
        row = [0] * nb3
        for a, b, c in triples:
            row[triple_rank(a, b, c)] = triple_rank(*sorted((p[a], p[b], p[c])))
        eidx.append(row)
        cidx.append(list(p))
    return (
        np.array(eidx, dtype=np.int16),
        np.array(cidx, dtype=np.int16),
    )


@lru_cache(maxsize=None)
def _gather_tables(m: int, k: int):
    """Combined gather index for the batch kernel: columns [edges, colours]."""
    eidx, cidx = _perm_tables(m, k)
    return np.concatenate([eidx, cidx + _nb3(m)], axis=1)


def canonical_key(m: int, k: int, cmask: int, emask: int) -> int:
    """Minimal (cmask << C(m,3)) | emask over root-fixing relabellings."""
    eidx, cidx = _perm_tables(m, k)
    nb3 = _nb3(m)
    best = None
    for row in range(eidx.shape[0]):
        erow = eidx[row]
        crow = cidx[row]
        em = 0
        t = emask
        while t:
            low = t & -t
            em |= 1 << int(erow[low.bit_length() - 1])
            t ^= low
        cm = 0
        t = cmask
        while t:
            low = t & -t
            cm |= 1 << int(crow[low.bit_length() - 1])
            t ^= low
        key = (cm << nb3) | em
        if best is None or key < best:
            best = key
    return best


def split_key(m: int, key: int) -> tuple[int, int]:
    nb3 = _nb3(m)
    return key >> nb3, key & ((1 << nb3) - 1)


def _pack_bits_u64(bits: np.ndarray) -> np.ndarray:
    """Pack (..., w<=64) little-endian 0/1 uint8 rows into uint64."""
    w = bits.shape[-1]
    pad = (-w) % 64
    if pad:
        bits = np.concatenate(
            [bits, np.zeros(bits.shape[:-1] + (pad,), dtype=np.uint8)], axis=-1
        )
    packed = np.packbits(np.ascontiguousarray(bits), axis=-1, bitorder="little")
    return packed.view(np.uint64).reshape(bits.shape[:-1])


def _unpack_bits(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width, dtype=np.uint64)
    return ((values[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def canonical_keys_batch(
    m: int, k: int, cmasks: np.ndarray, emasks: np.ndarray, chunk_bytes: int = 1 << 26
) -> np.ndarray:
    """Canonical keys for many flags at once (vectorised over relabellings)."""
    nb3 = _nb3(m)
    table = _gather_tables(m, k)
    nperm, width = table.shape
    n = len(emasks)
    out = np.empty(n, dtype=np.uint64)
    if n == 0:
        return out
    step = max(1, chunk_bytes // (nperm * width))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        ebits = _unpack_bits(emasks[lo:hi].astype(np.uint64), nb3)
        cbits = _unpack_bits(cmasks[lo:hi].astype(np.uint64), m)
        allbits = np.concatenate([ebits, cbits], axis=1)
        gathered = allbits[:, table]  # (chunk, nperm, width)
        keys = _pack_bits_u64(gathered)
        out[lo:hi] = keys.min(axis=1)
    return out


# ---------------------------------------------------------------------------
# flag types and flags


@dataclass(frozen=True)
class FlagType:
    """A fully labelled (coloured) 3-graph: every vertex is a root."""

    k: int
    cmask: int = 0
    emask: int = 0

    def __post_init__(self):
        if not 0 <= self.cmask < (1 << self.k):
            raise ValueError("colour mask out of range")
        if not 0 <= self.emask < (1 << _nb3(self.k)):
            raise ValueError("edge mask out of range")

    @classmethod
    def empty(cls, k: int = 0, colours=None) -> "FlagType":
        cm = encode_colours(colours) if colours is not None else 0
        return cls(k, cm, 0)

    @classmethod
    def point(cls, colour: int = 1) -> "FlagType":
        return cls(1, 0 if colour == 1 else 1, 0)

    @classmethod
    def edge(cls, colours=None) -> "FlagType":
        cm = encode_colours(colours) if colours is not None else 0
        return cls(3, cm, 1)

    @classmethod
    def from_graph(cls, g: ThreeGraph, colours=None) -> "FlagType":
        cm = encode_colours(colours) if colours is not None else 0
        return cls(g.n, cm, encode_edges(g.n, g.edges()))

    def base(self) -> ThreeGraph:
        return ThreeGraph(self.k, decode_edges(self.k, self.emask))

    def colours(self) -> tuple:
        return decode_colours(self.k, self.cmask)

    def describe(self) -> str:
        cols = "".join(str(c) for c in self.colours())
        return f"k={self.k};colours={cols};edges={decode_edges(self.k, self.emask)}"


TYPE_0 = FlagType(0, 0, 0)
TYPE_EDGE = FlagType.edge()


@dataclass(frozen=True)
class Flag:
    """A canonical m-vertex flag with k roots (vertices 0..k-1, in order)."""

    theory: Theory
    k: int
    m: int
    cmask: int
    emask: int

    def __post_init__(self):
        key = canonical_key(self.m, self.k, self.cmask, self.emask)
        cm, em = split_key(self.m, key)
        object.__setattr__(self, "cmask", cm)
        object.__setattr__(self, "emask", em)

    @classmethod
    def from_graph(
        cls, theory: Theory, base: ThreeGraph, colours=None, roots=(), validate=True
    ) -> "Flag":
        """Build a flag from a graph, a colouring and an ordered root tuple.

        Vertices are renumbered so the roots come first in root order.
        """
        m = base.n
        roots = tuple(roots)
        if len(set(roots)) != len(roots):
            raise ValueError("roots must be distinct")
        if colours is None:
            colours = (1,) * m
        if len(colours) != m:
            raise ValueError("need one colour per vertex")
        if theory.colour_count == 1 and any(c != 1 for c in colours):
            raise ValueError("coloured vertices in an uncoloured theory")
        if validate and not theory.admits(base):
            raise ValueError("flag base contains a forbidden subgraph")
        order = list(roots) + [v for v in range(m) if v not in roots]
        pos = {v: i for i, v in enumerate(order)}
        emask = encode_edges(m, [tuple(pos[v] for v in e) for e in base.edges()])
        cmask = encode_colours([colours[v] for v in order])
        return cls(theory, len(roots), m, cmask, emask)

    @property
    def key(self) -> int:
        return (self.cmask << _nb3(self.m)) | self.emask

    def type(self) -> FlagType:
        # colex ranks are prefix-compatible: triples inside the first k
        # vertices occupy exactly the low C(k,3) bits
        return FlagType(
            self.k,
            self.cmask & ((1 << self.k) - 1),
            self.emask & ((1 << _nb3(self.k)) - 1),
        )

    def base(self) -> ThreeGraph:
        return ThreeGraph(self.m, decode_edges(self.m, self.emask))

    def colours(self) -> tuple:
        return decode_colours(self.m, self.cmask)

    def unrooted(self) -> "Flag":
        return Flag(self.theory, 0, self.m, self.cmask, self.emask)

    def describe(self) -> str:
        cols = "".join(str(c) for c in self.colours())
        return f"roots={self.k};colours={cols};edges={decode_edges(self.m, self.emask)}"


class QuantumFlag:
    """A formal rational combination of same-type, same-size flags."""

    def __init__(self, theory: Theory, k: int, m: int, coeffs=None):
        self.theory = theory
        self.k = k
        self.m = m
        self.coeffs: dict[Flag, Fraction] = {}
        if coeffs:
            for flag, c in dict(coeffs).items():
                self[flag] = Fraction(c)

    def __getitem__(self, flag: Flag) -> Fraction:
        return self.coeffs.get(flag, Fraction(0))

    def __setitem__(self, flag: Flag, value):
        value = Fraction(value)
        if flag.k != self.k or flag.m != self.m or flag.theory != self.theory:
            raise ValueError("flag does not match this quantum flag's shape")
        if value == 0:
            self.coeffs.pop(flag, None)
        else:
            self.coeffs[flag] = value

    def copy(self) -> "QuantumFlag":
        return QuantumFlag(self.theory, self.k, self.m, self.coeffs)

    def __add__(self, other: "QuantumFlag") -> "QuantumFlag":
        if (self.theory, self.k, self.m) != (other.theory, other.k, other.m):
            raise ValueError("mismatched quantum flags")
        out = self.copy()
        for f, c in other.coeffs.items():
            out[f] = out[f] + c
        return out

    def __sub__(self, other: "QuantumFlag") -> "QuantumFlag":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "QuantumFlag":
        out = QuantumFlag(self.theory, self.k, self.m)
        s = Fraction(scalar)
        for f, c in self.coeffs.items():
            out[f] = s * c
        return out

    __mul__ = __rmul__

    def __eq__(self, other):
        return (
            isinstance(other, QuantumFlag)
            and (self.theory, self.k, self.m) == (other.theory, other.k, other.m)
            and self.coeffs == other.coeffs
        )

    def terms(self):
        return sorted(self.coeffs.items(), key=lambda fc: fc[0].key)

    def __repr__(self):
        return f"QuantumFlag(k={self.k}, m={self.m}, {len(self.coeffs)} terms)"


# ---------------------------------------------------------------------------
# forbidden-subgraph masks


@lru_cache(maxsize=None)
def _embedding_masks(fmask: int, fn: int, target: int) -> tuple:
    """All distinct edge masks of images of a graph under injections into
    [target]; containment of the graph is `any((E & mask) == mask)`."""
    f_edges = decode_edges(fn, fmask)
    masks = set()
    for img in itertools.permutations(range(target), fn):
        mask = 0
        for a, b, c in f_edges:
            x, y, z = sorted((img[a], img[b], img[c]))
            mask |= 1 << triple_rank(x, y, z)
        masks.add(mask)
    return tuple(sorted(masks))


@lru_cache(maxsize=None)
def _forbidden_masks(family: ForbiddenFamily, target: int, new_vertex_only: bool) -> tuple:
    masks = []
    touch = 0
    if new_vertex_only:
        v = target - 1
        for t in _TRIPLES[target]:
            if v in t:
                touch |= 1 << triple_rank(*t)
    for member in family.members:
        if member.n > target:
            continue
        for mask in _embedding_masks(member.mask, member.n, target):
            if not new_vertex_only or (mask & touch):
                masks.append(mask)
    return tuple(sorted(set(masks)))


def _free_filter(theory: Theory, size: int, emasks: np.ndarray, new_vertex_only: bool):
    """Boolean array: True where the edge mask avoids every forbidden image."""
    good = np.ones(len(emasks), dtype=bool)
    for mask in _forbidden_masks(theory.closed_family(), size, new_vertex_only):
        mask = np.uint64(mask)
        good &= (emasks & mask) != mask
    return good


def mask_is_free(theory: Theory, size: int, emask: int) -> bool:
    for mask in _forbidden_masks(theory.closed_family(), size, False):
        if emask & mask == mask:
            return False
    return True


# ---------------------------------------------------------------------------
# enumeration


class FlagBasis:
    """The complete list of canonical flags of one shape, sorted by key."""

    def __init__(self, theory: Theory, ftype: FlagType, m: int, keys: np.ndarray):
        self.theory = theory
        self.ftype = ftype
        self.m = m
        self.keys = np.sort(np.asarray(keys, dtype=np.uint64))
        self._index = {int(key): i for i, key in enumerate(self.keys)}

    def __len__(self):
        return len(self.keys)

    def __iter__(self):
        for i in range(len(self.keys)):
            yield self.flag(i)

    def flag(self, i: int) -> Flag:
        cm, em = split_key(self.m, int(self.keys[i]))
        return Flag(self.theory, self.ftype.k, self.m, cm, em)

    def index_of_key(self, key: int) -> int:
        try:
            return self._index[int(key)]
        except KeyError:
            raise KeyError("flag is not in this basis") from None

    def index_of(self, flag: Flag) -> int:
        if flag.m != self.m or flag.k != self.ftype.k or flag.theory != self.theory:
            raise KeyError("flag shape does not match basis")
        return self.index_of_key(flag.key)

    def unit(self) -> QuantumFlag:
        return QuantumFlag(
            self.theory, self.ftype.k, self.m, {f: Fraction(1) for f in self}
        )

    def labelled_lookup(self) -> dict:
        """Map every labelled variant (any free-vertex relabelling) of every
        basis flag to its basis index."""
        eidx, cidx = _perm_tables(self.m, self.ftype.k)
        nb3 = _nb3(self.m)
        lookup = {}
        for i in range(len(self.keys)):
            cm, em = split_key(self.m, int(self.keys[i]))
            for row in range(eidx.shape[0]):
                em2 = 0
                t = em
                while t:
                    low = t & -t
                    em2 |= 1 << int(eidx[row][low.bit_length() - 1])
                    t ^= low
                cm2 = 0
                t = cm
                while t:
                    low = t & -t
                    cm2 |= 1 << int(cidx[row][low.bit_length() - 1])
                    t ^= low
                lookup[(cm2 << nb3) | em2] = i
        return lookup

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(
            f"{self.theory.describe()};{self.ftype.describe()};m={self.m};n={len(self)}\n".encode()
        )
        h.update(self.keys.tobytes())
        return h.hexdigest()


_BASIS_CACHE: dict = {}


def enumerate_flags(
    theory: Theory, ftype: FlagType, m: int, parallel: int = 1
) -> FlagBasis:
    """All m-vertex flags of the given type, up to root-fixing isomorphism.

    Canonical augmentation level by level; complete and duplicate-free.
    The result is cached per (theory, type, m).
    """
    if m < ftype.k:
        raise ValueError("m must be at least the type size")
    if m > MAX_FLAG_VERTICES:
        raise ValueError(f"flag enumeration is capped at m={MAX_FLAG_VERTICES}")
    cache_key = (theory, ftype, m)
    if cache_key in _BASIS_CACHE:
        return _BASIS_CACHE[cache_key]

    k = ftype.k
    if not mask_is_free(theory, k, ftype.emask):
        basis = FlagBasis(theory, ftype, m, np.empty(0, dtype=np.uint64))
        _BASIS_CACHE[cache_key] = basis
        return basis

    level_c = np.array([ftype.cmask], dtype=np.uint64)
    level_e = np.array([ftype.emask], dtype=np.uint64)
    for s in range(k, m):
        new_ranks = [triple_rank(i, j, s) for i, j in itertools.combinations(range(s), 2)]
        q = len(new_ranks)
        spread = np.zeros(1 << q, dtype=np.uint64)
        subsets = np.arange(1 << q, dtype=np.uint64)
        for b, r in enumerate(new_ranks):
            spread |= ((subsets >> np.uint64(b)) & np.uint64(1)) << np.uint64(r)
        child_e = np.bitwise_or.outer(level_e, spread).ravel()
        child_c = np.repeat(level_c, 1 << q)
        if theory.colour_count == 2:
            child_e = np.tile(child_e, 2)
            child_c = np.concatenate(
                [child_c, child_c | np.uint64(1 << s)]
            )
        good = _free_filter(theory, s + 1, child_e, new_vertex_only=True)
        child_e = child_e[good]
        child_c = child_c[good]
        keys = _canonical_keys_parallel(s + 1, k, child_c, child_e, parallel)
        keys = np.unique(keys)
        nb3 = _nb3(s + 1)
        level_c = keys >> np.uint64(nb3)
        level_e = keys & np.uint64((1 << nb3) - 1)

    nb3 = _nb3(m)
    keys = (level_c.astype(np.uint64) << np.uint64(nb3)) | level_e.astype(np.uint64)
    basis = FlagBasis(theory, ftype, m, keys)
    _BASIS_CACHE[cache_key] = basis
    return basis


def _canonical_keys_parallel(m, k, cmasks, emasks, parallel):
    if parallel <= 1 or len(emasks) < 1 << 14:
        return canonical_keys_batch(m, k, cmasks, emasks)
    from concurrent.futures import ThreadPoolExecutor

    chunks = np.array_split(np.arange(len(emasks)), parallel)
    out = np.empty(len(emasks), dtype=np.uint64)

    def work(ix):
        out[ix] = canonical_keys_batch(m, k, cmasks[ix], emasks[ix])

    with ThreadPoolExecutor(max_workers=parallel) as pool:
        list(pool.map(work, [c for c in chunks if len(c)]))
    return out


def enumerate_free_graphs(family: ForbiddenFamily, n: int) -> list:
    """All n-vertex graphs up to isomorphism avoiding the family members
    as (plain, not closure) subgraphs; the exhaustive extremal oracle."""
    if n > MAX_FLAG_VERTICES:
        raise ValueError(f"free-graph enumeration is capped at n={MAX_FLAG_VERTICES}")
    level = np.array([0], dtype=np.uint64)
    for s in range(0, n):
        new_ranks = [triple_rank(i, j, s) for i, j in itertools.combinations(range(s), 2)]
        q = len(new_ranks)
        spread = np.zeros(1 << q, dtype=np.uint64)
        subsets = np.arange(1 << q, dtype=np.uint64)
        for b, r in enumerate(new_ranks):
            spread |= ((subsets >> np.uint64(b)) & np.uint64(1)) << np.uint64(r)
        children = np.bitwise_or.outer(level, spread).ravel()
        good = np.ones(len(children), dtype=bool)
        for mask in _forbidden_masks(family, s + 1, True):
            mask = np.uint64(mask)
            good &= (children & mask) != mask
        children = children[good]
        zeros = np.zeros(len(children), dtype=np.uint64)
        level = np.unique(canonical_keys_batch(s + 1, 0, zeros, children))
    return [ThreeGraph(n, decode_edges(n, int(em))) for em in level]


def brute_force_basis(theory: Theory, ftype: FlagType, m: int) -> FlagBasis:
    """Independent oracle: filter all labelled objects and deduplicate.

    Exponential in C(m,3); intended for m <= 4 cross-checks only.
    """
    k = ftype.k
    free_bits = m - k
    new_triples = [t for t in _TRIPLES[m] if max(t) >= k]
    keys = set()
    for extra_edges in range(1 << len(new_triples)):
        emask = ftype.emask
        for b, t in enumerate(new_triples):
            if (extra_edges >> b) & 1:
                emask |= 1 << triple_rank(*t)
        if not mask_is_free(theory, m, emask):
            continue
        colour_range = 1 << free_bits if theory.colour_count == 2 else 1
        for cbits in range(colour_range):
            cmask = ftype.cmask | (cbits << k)
            keys.add(canonical_key(m, k, cmask, emask))
    return FlagBasis(theory, ftype, m, np.array(sorted(keys), dtype=np.uint64))


def convention_audit(theory: Theory, m: int) -> dict:
    """Diagnostics for the flag-count conventions.

    Reports the per-level counts, the count when colour classes are
    additionally identified under the swap of the two colours, and (for
    m <= 4) a brute-force recount. Used when a regression count
    mismatches, so the convention in force is visible.
    """
    report = {"theory": theory.describe(), "m": m, "level_counts": {}}
    for s in range(0, m + 1):
        report["level_counts"][s] = len(enumerate_flags(theory, TYPE_0, s))
    if theory.colour_count == 2:
        basis = enumerate_flags(theory, TYPE_0, m)
        nb3 = _nb3(m)
        swapped = set()
        for key in basis.keys:
            cm, em = split_key(m, int(key))
            cm_swapped = (~cm) & ((1 << m) - 1)
            key2 = canonical_key(m, 0, cm_swapped, em)
            swapped.add(min(int(key), key2))
        report["count"] = len(basis)
        report["count_up_to_colour_swap"] = len(swapped)
    else:
        report["count"] = len(enumerate_flags(theory, TYPE_0, m))
    if m <= 4:
        report["brute_force_count"] = len(brute_force_basis(theory, TYPE_0, m))
    return report


# ---------------------------------------------------------------------------
# densities, products, averaging


def _as_flag(theory: Theory, obj, roots=()) -> Flag:
    if isinstance(obj, Flag):
        return obj
    if isinstance(obj, ThreeGraph):
        return Flag.from_graph(theory, obj, roots=roots)
    raise TypeError(f"expected Flag or ThreeGraph, got {type(obj).__name__}")


def _sub_flag_key(host_cmask: int, host_emask: int, order, k: int) -> int:
    """Canonical key of the sub-flag on `order` (first k entries are roots)."""
    pos = {v: i for i, v in enumerate(order)}
    emask = 0
    for t in itertools.combinations(sorted(order), 3):
        if (host_emask >> triple_rank(*t)) & 1:
            x, y, z = sorted((pos[t[0]], pos[t[1]], pos[t[2]]))
            emask |= 1 << triple_rank(x, y, z)
    cmask = 0
    for v in order:
        if (host_cmask >> v) & 1:
            cmask |= 1 << pos[v]
    return canonical_key(len(order), k, cmask, emask)


def _host_masks(h, theory: Theory):
    """(m, cmask, emask) of a host, with the vertex labelling as given.

    A ThreeGraph host keeps its own labels (no canonicalisation), so
    explicit root tuples stay meaningful; a Flag host is already stored
    with roots first.
    """
    if isinstance(h, Flag):
        if h.theory != theory:
            raise ValueError("host flag belongs to a different theory")
        return h.m, h.cmask, h.emask
    if isinstance(h, ThreeGraph):
        if theory.colour_count != 1:
            raise ValueError("a bare ThreeGraph host needs an uncoloured theory")
        return h.n, 0, encode_edges(h.n, h.edges())
    raise TypeError(f"expected Flag or ThreeGraph host, got {type(h).__name__}")


def density(f, h, roots=None, theory: Theory | None = None) -> Fraction:
    """Exact density of the flag f in the host h.

    Unrooted: the probability that a random v(f)-subset of V(h) spans a
    copy of f. Rooted (f has roots; `roots` embeds them into h, or h is a
    flag of the same type and its own roots are used): the probability
    over random extensions that the rooted induced subgraph is
    isomorphic to f as a flag.
    """
    if theory is None:
        theory = f.theory if isinstance(f, Flag) else Theory(ForbiddenFamily("NONE", ()))
    fl = _as_flag(theory, f)
    k = fl.k
    if roots is None and isinstance(h, Flag) and h.k == k and k > 0:
        roots = tuple(range(k))
    hm, hc, he = _host_masks(h, theory)
    if k == 0:
        if hm < fl.m:
            raise ValueError("host is smaller than the flag")
        total = 0
        hits = 0
        for sub in itertools.combinations(range(hm), fl.m):
            total += 1
            if _sub_flag_key(hc, he, sub, 0) == fl.key:
                hits += 1
        return Fraction(hits, total)
    if roots is None:
        raise ValueError("rooted density needs a root embedding")
    roots = tuple(roots)
    if len(roots) != k:
        raise ValueError("root tuple has the wrong length")
    root_key = _sub_flag_key(hc, he, roots, k)
    type_key = ((fl.cmask & ((1 << k) - 1)) << _nb3(k)) | (
        fl.emask & ((1 << _nb3(k)) - 1)
    )
    if root_key != type_key:
        raise ValueError("the host roots do not span the flag's type")
    rest = [v for v in range(hm) if v not in roots]
    need = fl.m - k
    if len(rest) < need:
        raise ValueError("host is smaller than the flag")
    total = 0
    hits = 0
    for sub in itertools.combinations(rest, need):
        total += 1
        if _sub_flag_key(hc, he, roots + sub, k) == fl.key:
            hits += 1
    return Fraction(hits, total)


def average(x) -> QuantumFlag:
    """The averaging operator: a rooted flag becomes q times its unrooted
    graph, where q is the probability that a uniform random injection of
    the roots reproduces the flag; extended linearly."""
    if isinstance(x, Flag):
        x = QuantumFlag(x.theory, x.k, x.m, {x: Fraction(1)})
    out = QuantumFlag(x.theory, 0, x.m)
    for flag, coef in x.coeffs.items():
        k, m = flag.k, flag.m
        if k == 0:
            target = flag
            out[target] = out[target] + coef
            continue
        hits = 0
        total = 0
        for injection in itertools.permutations(range(m), k):
            total += 1
            rest = tuple(v for v in range(m) if v not in injection)
            if (
                _sub_flag_key(flag.cmask, flag.emask, injection + rest, k)
                == flag.key
            ):
                hits += 1
        q = Fraction(hits, total)
        target = flag.unrooted()
        out[target] = out[target] + coef * q
    return out


def product(f1: Flag, f2: Flag, target_basis: FlagBasis) -> QuantumFlag:
    """The flag-algebra product of two same-type flags, expanded in the
    target basis; coefficients are split probabilities."""
    if f1.theory != f2.theory or f1.k != f2.k:
        raise ValueError("flags must share a theory and a type")
    k = f1.k
    if f1.type() != f2.type():
        raise ValueError("flags must share a type")
    m = f1.m + f2.m - k
    if target_basis.m != m or target_basis.ftype.k != k:
        raise ValueError(
            f"target basis has the wrong shape (need k={k}, m={m})"
        )
    n1 = f1.m - k
    out = QuantumFlag(f1.theory, k, m)
    for gi in range(len(target_basis)):
        g = target_basis.flag(gi)
        rest = list(range(k, m))
        hits = 0
        total = 0
        roots = tuple(range(k))
        for s1 in itertools.combinations(rest, n1):
            total += 1
            s2 = tuple(v for v in rest if v not in s1)
            if (
                _sub_flag_key(g.cmask, g.emask, roots + s1, k) == f1.key
                and _sub_flag_key(g.cmask, g.emask, roots + s2, k) == f2.key
            ):
                hits += 1
        if hits:
            out[g] = Fraction(hits, total)
    return out


def quantum_product(a: QuantumFlag, b: QuantumFlag, target_basis: FlagBasis) -> QuantumFlag:
    out = QuantumFlag(a.theory, target_basis.ftype.k, target_basis.m)
    for fa, ca in a.coeffs.items():
        for fb, cb in b.coeffs.items():
            out = out + (ca * cb) * product(fa, fb, target_basis)
    return out


def chain_expand(f, basis: FlagBasis) -> QuantumFlag:
    """Expand a (quantum) flag in a larger basis of the same type.

    The coefficient of F' is the rooted density p(f, F'), so evaluating
    the expansion against any host reproduces the density of f exactly.
    """
    if isinstance(f, Flag):
        f = QuantumFlag(f.theory, f.k, f.m, {f: Fraction(1)})
    if f.k != basis.ftype.k:
        raise ValueError("type mismatch between flag and basis")
    if f.m > basis.m:
        raise ValueError("basis size is smaller than the flag")
    out = QuantumFlag(f.theory, f.k, basis.m)
    roots = tuple(range(f.k))
    for gi in range(len(basis)):
        g = basis.flag(gi)
        total = Fraction(0)
        for flag, coef in f.coeffs.items():
            total += coef * density(flag, g, roots=roots)
        if total:
            out[g] = total
    return out


def evaluate(qf: QuantumFlag, host, roots=None) -> Fraction:
    """Evaluate a quantum flag against a host graph/flag: the coefficient-
    weighted sum of densities."""
    total = Fraction(0)
    for flag, coef in qf.coeffs.items():
        total += coef * density(flag, host, roots=roots)
    return total


# ---------------------------------------------------------------------------
# the named quantum flags


def edge_density_flag(theory: Theory) -> QuantumFlag:
    """The single-edge 3-vertex 0-flag (edge density); in a coloured theory
    this is the sum over all colourings (the flag called E^0)."""
    out = QuantumFlag(theory, 0, 3)
    colourings = (
        [(1, 1, 1)]
        if theory.colour_count == 1
        else list(itertools.product((1, 2), repeat=3))
    )
    for cols in colourings:
        f = Flag.from_graph(theory, ThreeGraph(3, [(0, 1, 2)]), colours=cols)
        out[f] = Fraction(1)
    return out


def coloured_edge_flag(theory: Theory, colours, edge=True) -> Flag:
    """The 3-vertex 0-flag whose triple has the given colour multiset and is
    an edge (or a non-edge)."""
    if theory.colour_count != 2:
        raise ValueError("needs the 2-coloured theory")
    g = ThreeGraph(3, [(0, 1, 2)] if edge else [])
    return Flag.from_graph(theory, g, colours=tuple(colours))


def e112_flag(theory: Theory) -> Flag:
    return coloured_edge_flag(theory, (1, 1, 2), edge=True)


def missing_density_flag(theory: Theory) -> Flag:
    """(1,1,2)-coloured non-edge: its density counts missing triples."""
    return coloured_edge_flag(theory, (1, 1, 2), edge=False)


def bad_density_flag(theory: Theory) -> QuantumFlag:
    """(1,1,1)- and (1,2,2)-coloured edges: their density counts bad edges."""
    out = QuantumFlag(theory, 0, 3)
    out[coloured_edge_flag(theory, (1, 1, 1))] = Fraction(1)
    out[coloured_edge_flag(theory, (1, 2, 2))] = Fraction(1)
    return out


def two_vertex_types(theory: Theory):
    """The four 2-vertex types (by root colours) in the coloured theory."""
    if theory.colour_count != 2:
        return [FlagType(2, 0, 0)]
    return [FlagType(2, encode_colours(rc), 0) for rc in ((1, 1), (1, 2), (2, 1), (2, 2))]


def degree_difference_flags(theory: Theory, ftype: FlagType) -> tuple[QuantumFlag, QuantumFlag]:
    """For a 2-vertex type: (E_0, E_1) where E_i sums the 4-vertex flags
    whose free pair forms an edge with root i but not with root 1-i;
    colours of the free vertices and edges through both roots arbitrary."""
    if ftype.k != 2:
        raise ValueError("needs a 2-vertex type")
    basis = enumerate_flags(theory, ftype, 4)
    outs = []
    for i in (0, 1):
        qf = QuantumFlag(theory, 2, 4)
        r_with = triple_rank(*sorted((i, 2, 3)))
        r_without = triple_rank(*sorted((1 - i, 2, 3)))
        for f in basis:
            if (f.emask >> r_with) & 1 and not (f.emask >> r_without) & 1:
                qf[f] = Fraction(1)
        outs.append(qf)
    return outs[0], outs[1]


def local_max_flags(theory: Theory, root_colour: int) -> tuple[Flag, Flag]:
    """(K_{1,1}, K_{1,2}) for the 1-vertex type of the given root colour:
    3-vertex flags spanning an edge whose free vertices have colours
    (1,1) and (1,2) respectively."""
    if theory.colour_count != 2:
        raise ValueError("needs the 2-coloured theory")
    ftype = FlagType.point(root_colour)
    g = ThreeGraph(3, [(0, 1, 2)])
    k11 = Flag.from_graph(theory, g, colours=(root_colour, 1, 1), roots=(0,))
    k12 = Flag.from_graph(theory, g, colours=(root_colour, 1, 2), roots=(0,))
    assert k11.type() == ftype and k12.type() == ftype
    return k11, k12


def cut_indicator_flag(theory: Theory) -> QuantumFlag:
    """The quantum flag over 6-vertex edge-rooted flags whose density picks
    out, for a rooted edge X, the triples Y that are edges with exactly two
    vertices having two links in X and one vertex having at most one.

    Coefficients are 0/1: each 6-vertex flag has a single candidate Y.
    """
    if theory.colour_count != 1:
        raise ValueError("the cut indicator lives in the uncoloured theory")
    basis = enumerate_flags(theory, TYPE_EDGE, 6)
    out = QuantumFlag(theory, 3, 6)
    y = (3, 4, 5)
    x_pairs = [(0, 1), (0, 2), (1, 2)]
    for f in basis:
        if not (f.emask >> triple_rank(*y)) & 1:
            continue
        part = []
        for v in y:
            links = sum(
                1
                for a, b in x_pairs
                if (f.emask >> triple_rank(*sorted((a, b, v)))) & 1
            )
            part.append(1 if links == 2 else (2 if links <= 1 else 0))
        if sorted(part) == [1, 1, 2]:
            out[f] = Fraction(1)
    return out


def named_quantum_flags(theory: Theory) -> dict:
    """The named quantum flags used by the bundled programs, keyed by a
    descriptive name; only the ones meaningful for the theory are present."""
    out = {}
    if theory.colour_count == 1:
        out["edge"] = edge_density_flag(theory)
        out["cut_indicator"] = cut_indicator_flag(theory)
    else:
        out["edge_any_colour"] = edge_density_flag(theory)
        out["edge_112"] = QuantumFlag(theory, 0, 3, {e112_flag(theory): Fraction(1)})
        out["bad"] = bad_density_flag(theory)
        out["missing"] = QuantumFlag(
            theory, 0, 3, {missing_density_flag(theory): Fraction(1)}
        )
        for i, ftype in enumerate(two_vertex_types(theory)):
            e0, e1 = degree_difference_flags(theory, ftype)
            out[f"degree_pair_{ftype.colours()[0]}{ftype.colours()[1]}"] = (e0, e1)
        for colour in (1, 2):
            k11, k12 = local_max_flags(theory, colour)
            out[f"local_max_{colour}"] = (k11, k12)
    return out
