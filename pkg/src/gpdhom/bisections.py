"""Bisections, the inverse semigroup they generate, and filtrations.

A bisection is an arrow set on which source and range are both
injective; bisections multiply setwise (compose every composable pair)
and invert pointwise.  Setwise products of bisections are again
bisections, so finitely many generators always close up into a finite
inverse semigroup.

Generated semigroups keep the zero implicit: an empty setwise product
is discarded rather than stored, so the element list consists of the
nonempty partial symmetries (the empty bisection is still a legal value
and survives if passed in as a generator).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import (
    AmbientMismatch,
    NotABisection,
    NotIncreasing,
    NotSubgroupoid,
    ResourceLimit,
    UnionIncomplete,
)
from .groupoid import (
    EmbeddedSubgroupoid,
    FiniteGroupoid,
    _pack_subgroupoid,
)


@dataclass(frozen=True)
class Bisection:
    """An arrow set with injective source and range, in a fixed ambient."""
    ambient: FiniteGroupoid
    arrows: tuple

    def __len__(self):
        return len(self.arrows)

    def __iter__(self):
        return iter(self.arrows)


def validate_bisection(G, arrow_ids):
    """Check injectivity of source and range and build the Bisection."""
    ids = sorted(set(arrow_ids))
    by_src = {}
    by_rng = {}
    for a in ids:
        if not 0 <= a < G.n_arrows:
            raise NotABisection(f"arrow id {a} out of range")
        if G.src[a] in by_src:
            raise NotABisection(
                f"arrows {by_src[G.src[a]]} and {a} share source "
                f"{G.units[G.src[a]]!r}")
        if G.rng[a] in by_rng:
            raise NotABisection(
                f"arrows {by_rng[G.rng[a]]} and {a} share range "
                f"{G.units[G.rng[a]]!r}")
        by_src[G.src[a]] = a
        by_rng[G.rng[a]] = a
    return Bisection(G, tuple(ids))


def unit_space_bisection(G):
    """The idempotent bisection consisting of every unit arrow."""
    return Bisection(G, tuple(sorted(G.unit_arrow_at)))


def bisection_inverse(U):
    G = U.ambient
    return Bisection(G, tuple(sorted(G.inv[a] for a in U.arrows)))


def bisection_product(U, V):
    """Setwise product: compose every composable pair, u after v."""
    if U.ambient is not V.ambient:
        raise AmbientMismatch("bisections live in different groupoids")
    G = U.ambient
    out = set()
    for v in V.arrows:
        for u in U.arrows:
            if G.src[u] == G.rng[v]:
                out.add(G.table[(u, v)])
    # injectivity is automatic (sources come from V, ranges from U) but
    # cheap to re-check, and validate gives the witness if it ever breaks
    return validate_bisection(G, out)


@dataclass(frozen=True)
class BisectionSemigroup:
    """Closure of the generators under product and inverse.

    cover records whether the elements' union is the whole arrow set.
    """
    ambient: FiniteGroupoid
    generators: tuple
    elements: tuple
    cover: bool

    def __len__(self):
        return len(self.elements)


def generate_semigroup(G, generators, cap=100_000):
    """Close a generator list under setwise product and inverse.

    Elements appear in discovery order (generators first, breadth
    first after that).  Empty products are dropped; an explicitly
    supplied empty generator is kept.
    """
    gens = []
    for x in generators:
        if isinstance(x, Bisection):
            if x.ambient is not G:
                raise AmbientMismatch("generator from a different groupoid")
            ids = x.arrows
        else:
            ids = x
        gens.append(validate_bisection(G, ids))

    elements = {}
    queue = deque()

    def add(b):
        if b.arrows not in elements:
            if len(elements) >= cap:
                raise ResourceLimit(
                    f"generated semigroup exceeds {cap} elements")
            elements[b.arrows] = b
            queue.append(b)

    for b in gens:
        add(b)
    while queue:
        v = queue.popleft()
        add(bisection_inverse(v))
        for w in list(elements.values()):
            for prod in (bisection_product(v, w), bisection_product(w, v)):
                if prod.arrows:
                    add(prod)
    covered = set()
    for b in elements.values():
        covered.update(b.arrows)
    cover = len(covered) == G.n_arrows
    return BisectionSemigroup(G, tuple(gens), tuple(elements.values()),
                              cover)


def union_subgroupoid(S):
    """The subgroupoid underlying a bisection semigroup, with embedding."""
    ids = set()
    for b in S.elements:
        ids.update(b.arrows)
    return _pack_subgroupoid(S.ambient, ids)


# -- filtrations ----------------------------------------------------------------

@dataclass(frozen=True)
class Filtration:
    """An increasing chain of subgroupoid arrow sets whose union is G."""
    ambient: FiniteGroupoid
    levels: tuple
    subgroupoids: tuple

    def __len__(self):
        return len(self.levels)


def _check_subgroupoid_arrows(G, ids, level):
    members = set(ids)
    for a in members:
        if not 0 <= a < G.n_arrows:
            raise NotSubgroupoid(f"level {level}: arrow id {a} out of range")
    for a in members:
        if G.inv[a] not in members:
            raise NotSubgroupoid(
                f"level {level}: inverse of arrow {a} missing")
    for g in members:
        for h in members:
            if G.src[g] == G.rng[h] and G.table[(g, h)] not in members:
                raise NotSubgroupoid(
                    f"level {level}: composite of ({g},{h}) missing")


def validate_filtration(G, chain):
    """Check subgroupoid closure, monotonicity, and a complete union.

    Adjacent levels may repeat; the union of a valid chain equals its
    top level, which must be all of G.
    """
    levels = [tuple(sorted(set(ids))) for ids in chain]
    for i, ids in enumerate(levels):
        _check_subgroupoid_arrows(G, ids, i)
    for i in range(1, len(levels)):
        missing = set(levels[i - 1]) - set(levels[i])
        if missing:
            raise NotIncreasing(
                f"level {i} drops arrows {sorted(missing)[:8]} of level "
                f"{i - 1}")
    union = set()
    for ids in levels:
        union.update(ids)
    missing = sorted(set(range(G.n_arrows)) - union)
    if missing:
        raise UnionIncomplete(f"union misses arrows {missing[:8]}"
                              + ("..." if len(missing) > 8 else ""))
    subs = tuple(_pack_subgroupoid(G, ids) for ids in levels)
    return Filtration(G, tuple(levels), subs)


@dataclass(frozen=True)
class AFReport:
    """Per-level principality verdicts for a filtration."""
    af: bool
    levels: tuple

    def to_json(self):
        return {"af": self.af, "levels": [dict(e) for e in self.levels]}


def is_af_filtration(F):
    """True iff every level is principal; witnesses are loop arrows."""
    G = F.ambient
    entries = []
    ok = True
    for i, ids in enumerate(F.levels):
        witnesses = tuple(a for a in ids
                          if G.src[a] == G.rng[a] and not G.is_unit_arrow[a])
        principal = not witnesses
        ok = ok and principal
        entries.append({"level": i, "principal": principal,
                        "nontrivial_isotropy": list(witnesses)})
    return AFReport(ok, tuple(entries))


# -- wire format ------------------------------------------------------------------

def bisections_from_json(G, doc):
    return [validate_bisection(G, ids) for ids in doc["bisections"]]


def bisections_to_json(bisections):
    return {"bisections": [list(b.arrows) for b in bisections]}


def filtration_from_json(G, doc):
    return validate_filtration(G, doc["filtration"])


def filtration_to_json(F):
    return {"filtration": [list(ids) for ids in F.levels]}
