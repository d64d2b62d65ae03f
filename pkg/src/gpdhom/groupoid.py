"""Finite groupoids as explicit arrow tables.

A groupoid here is a finite set of units, a finite set of arrows with
source and range, a total inverse map, designated unit arrows, and an
explicit partial composition table defined exactly on composable pairs.
compose(g, h) means "apply h first": it is defined precisely when
source(g) = range(h).

Units carry arbitrary hashable labels (ints, strings, path tuples); all
internal structure is positional.  Arrow ids are dense integers
0..n_arrows-1.  Every construction in this package keeps deterministic
orderings (least index first) so downstream reports are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    AxiomViolation,
    IndexOutOfRange,
    ResourceLimit,
    UnknownUnit,
)

DEFAULT_TUPLE_CAP = 10_000_000


class FiniteGroupoid:
    __slots__ = ("units", "_uindex", "n_arrows", "src", "rng", "inv",
                 "unit_arrow_at", "is_unit_arrow", "table",
                 "_by_range", "_by_source", "_orbit_cache")

    def __init__(self, units, src, rng, inv, unit_arrow_at, table):
        self.units = tuple(units)
        self._uindex = {u: i for i, u in enumerate(self.units)}
        self.n_arrows = len(src)
        self.src = tuple(src)
        self.rng = tuple(rng)
        self.inv = tuple(inv)
        self.unit_arrow_at = tuple(unit_arrow_at)
        self.table = dict(table)
        unit_arrows = set(self.unit_arrow_at)
        self.is_unit_arrow = tuple(a in unit_arrows
                                   for a in range(self.n_arrows))
        by_range = [[] for _ in self.units]
        by_source = [[] for _ in self.units]
        for a in range(self.n_arrows):
            by_range[self.rng[a]].append(a)
            by_source[self.src[a]].append(a)
        self._by_range = tuple(tuple(v) for v in by_range)
        self._by_source = tuple(tuple(v) for v in by_source)
        self._orbit_cache = None

    # -- basic queries ----------------------------------------------------

    @property
    def n_units(self):
        return len(self.units)

    def unit_position(self, label):
        try:
            return self._uindex[label]
        except KeyError:
            raise UnknownUnit(f"unknown unit {label!r}") from None

    def compose(self, g, h):
        try:
            return self.table[(g, h)]
        except KeyError:
            raise IndexOutOfRange(
                f"compose({g},{h}) undefined: source({g})={self.src[g]} "
                f"but range({h})={self.rng[h]}") from None

    def arrows_from(self, upos):
        """Arrow ids with source at unit position upos, ascending."""
        return self._by_source[upos]

    def arrows_into(self, upos):
        """Arrow ids with range at unit position upos, ascending."""
        return self._by_range[upos]

    def __repr__(self):
        return (f"<FiniteGroupoid {self.n_units} units, "
                f"{self.n_arrows} arrows>")

    def same_tables(self, other):
        return (self.units == other.units and self.src == other.src
                and self.rng == other.rng and self.inv == other.inv
                and self.unit_arrow_at == other.unit_arrow_at
                and self.table == other.table)

    # -- serialization ----------------------------------------------------

    def to_json(self):
        return {
            "units": list(self.units),
            "arrows": [{"id": a, "src": self.units[self.src[a]],
                        "rng": self.units[self.rng[a]]}
                       for a in range(self.n_arrows)],
            "compose": sorted([g, h, k] for (g, h), k in self.table.items()),
            "inverse": [[a, self.inv[a]] for a in range(self.n_arrows)],
            "unit_arrows": [[self.units[i], self.unit_arrow_at[i]]
                            for i in range(self.n_units)],
        }


def validate_groupoid(spec, cap=DEFAULT_TUPLE_CAP):
    """Build a FiniteGroupoid from its wire form, checking every axiom.

    Structure first (dense ids, known units, total inverse, one unit
    arrow per unit), then the composition table: defined exactly on
    composable pairs, endpoints correct, identities and inverses as
    required, and associativity exhaustively over all composable
    triples.  Raises AxiomViolation naming the failing identity, or
    ResourceLimit if the triple count exceeds the cap.
    """
    if not isinstance(spec, dict):
        raise AxiomViolation("groupoid description must be a JSON object")
    for key in ("units", "arrows", "compose", "inverse", "unit_arrows"):
        if key not in spec:
            raise AxiomViolation(f"missing field {key!r}")

    units = list(spec["units"])
    for u in units:
        if not isinstance(u, (int, str)) or isinstance(u, bool):
            raise AxiomViolation(f"unit labels must be ints or strings, "
                                 f"got {u!r}")
    if len(set(units)) != len(units):
        raise AxiomViolation("duplicate unit labels")
    if not units:
        raise AxiomViolation("a groupoid needs at least one unit")
    uindex = {u: i for i, u in enumerate(units)}

    raw_arrows = spec["arrows"]
    n = len(raw_arrows)
    ids = [a.get("id") for a in raw_arrows]
    if sorted(ids) != list(range(n)):
        raise AxiomViolation("arrow ids must be 0..n-1 without gaps "
                             f"(got {sorted(ids)[:8]}...)")
    src = [0] * n
    rng = [0] * n
    for a in raw_arrows:
        i = a["id"]
        if a["src"] not in uindex:
            raise AxiomViolation(f"arrow {i} has unknown source {a['src']!r}")
        if a["rng"] not in uindex:
            raise AxiomViolation(f"arrow {i} has unknown range {a['rng']!r}")
        src[i] = uindex[a["src"]]
        rng[i] = uindex[a["rng"]]

    inv = [None] * n
    for pair in spec["inverse"]:
        g, gi = pair
        if not (0 <= g < n and 0 <= gi < n):
            raise AxiomViolation(f"inverse entry {pair} out of range")
        if inv[g] is not None:
            raise AxiomViolation(f"duplicate inverse entry for arrow {g}")
        inv[g] = gi
    missing = [a for a in range(n) if inv[a] is None]
    if missing:
        raise AxiomViolation(f"no inverse listed for arrows {missing[:8]}")

    unit_arrow_at = [None] * len(units)
    for label, a in spec["unit_arrows"]:
        if label not in uindex:
            raise AxiomViolation(f"unit arrow listed for unknown unit {label!r}")
        x = uindex[label]
        if unit_arrow_at[x] is not None:
            raise AxiomViolation(f"duplicate unit arrow for unit {label!r}")
        if not (0 <= a < n):
            raise AxiomViolation(f"unit arrow id {a} out of range")
        unit_arrow_at[x] = a
    bad = [units[x] for x in range(len(units)) if unit_arrow_at[x] is None]
    if bad:
        raise AxiomViolation(f"units without unit arrows: {bad[:8]}")
    for x in range(len(units)):
        a = unit_arrow_at[x]
        if src[a] != x or rng[a] != x:
            raise AxiomViolation(
                f"unit arrow {a} of unit {units[x]!r} has endpoints "
                f"({units[src[a]]!r},{units[rng[a]]!r})")

    table = {}
    for entry in spec["compose"]:
        g, h, k = entry
        for e in (g, h, k):
            if not (0 <= e < n):
                raise AxiomViolation(f"compose entry {entry} out of range")
        if (g, h) in table:
            raise AxiomViolation(f"duplicate compose entry for ({g},{h})")
        table[(g, h)] = k

    # the table's domain must be exactly the composable pairs
    for g in range(n):
        for h in range(n):
            defined = (g, h) in table
            composable = src[g] == rng[h]
            if defined and not composable:
                raise AxiomViolation(
                    f"compose({g},{h}) defined although source({g}) != "
                    f"range({h})")
            if composable and not defined:
                raise AxiomViolation(f"compose({g},{h}) missing although "
                                     f"source({g}) = range({h})")
            if defined:
                k = table[(g, h)]
                if src[k] != src[h] or rng[k] != rng[g]:
                    raise AxiomViolation(
                        f"compose({g},{h})={k} has wrong endpoints")

    for g in range(n):
        if table[(g, unit_arrow_at[src[g]])] != g:
            raise AxiomViolation(f"right identity fails at arrow {g}")
        if table[(unit_arrow_at[rng[g]], g)] != g:
            raise AxiomViolation(f"left identity fails at arrow {g}")
        gi = inv[g]
        if src[gi] != rng[g] or rng[gi] != src[g]:
            raise AxiomViolation(f"inverse({g})={gi} has wrong endpoints")
        if table[(g, gi)] != unit_arrow_at[rng[g]]:
            raise AxiomViolation(f"g . inverse(g) is not the unit at "
                                 f"range({g})")
        if table[(gi, g)] != unit_arrow_at[src[g]]:
            raise AxiomViolation(f"inverse(g) . g is not the unit at "
                                 f"source({g})")

    # associativity over all composable triples, counted before enumerating:
    # a triple is a composable pair (f,g) extended by any h into source(g)
    by_range_count = [0] * len(units)
    for a in range(n):
        by_range_count[rng[a]] += 1
    triple_count = sum(by_range_count[src[g]] for (_, g) in table)
    if triple_count > cap:
        raise ResourceLimit(
            f"{triple_count} composable triples exceed the cap {cap}; "
            "associativity cannot be verified exhaustively")
    by_range = [[] for _ in units]
    for a in range(n):
        by_range[rng[a]].append(a)
    for (f, g), fg in table.items():
        for h in by_range[src[g]]:
            if table[(fg, h)] != table[(f, table[(g, h)])]:
                raise AxiomViolation(
                    f"associativity fails on triple ({f},{g},{h})")

    return FiniteGroupoid(units, src, rng, inv, unit_arrow_at, table)


# -- orbits and isotropy ----------------------------------------------------

@dataclass(frozen=True)
class OrbitPartition:
    """Partition of unit positions into orbit classes.

    Classes are ordered by least member; members ascend within a class.
    """
    classes: tuple
    class_of: dict

    @property
    def n_classes(self):
        return len(self.classes)

    def sizes(self):
        return [len(c) for c in self.classes]


def orbits(G):
    if G._orbit_cache is not None:
        return G._orbit_cache
    parent = list(range(G.n_units))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(G.n_arrows):
        ra, rb = find(G.src[a]), find(G.rng[a])
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for x in range(G.n_units):
        groups.setdefault(find(x), []).append(x)
    classes = tuple(tuple(groups[r]) for r in sorted(groups))
    class_of = {}
    for i, cls in enumerate(classes):
        for x in cls:
            class_of[x] = i
    part = OrbitPartition(classes, class_of)
    G._orbit_cache = part
    return part


@dataclass(frozen=True)
class IsotropyGroup:
    unit: int
    arrows: tuple
    order: int


def isotropy_group(G, x):
    """Arrows from unit x back to itself, with their count.

    x is a unit label; positions are resolved internally.
    """
    pos = G.unit_position(x)
    arrs = tuple(a for a in G.arrows_from(pos) if G.rng[a] == pos)
    return IsotropyGroup(pos, arrs, len(arrs))


def isotropy_orders(G):
    """Isotropy group order at every unit position."""
    out = [0] * G.n_units
    for a in range(G.n_arrows):
        if G.src[a] == G.rng[a]:
            out[G.src[a]] += 1
    return out


def is_principal(G):
    return all(o == 1 for o in isotropy_orders(G))


def is_group_bundle(G):
    return all(G.src[a] == G.rng[a] for a in range(G.n_arrows))


# -- restriction, transversal, strata ----------------------------------------

@dataclass(frozen=True)
class EmbeddedSubgroupoid:
    """A subgroupoid together with its embedding into the ambient groupoid.

    arrow_map[new arrow id] = ambient arrow id; unit labels are shared
    with the ambient groupoid.  full records whether the sub-unit set
    meets every ambient orbit (r(G_Y) = all units).
    """
    ambient: FiniteGroupoid
    groupoid: FiniteGroupoid
    arrow_map: tuple
    full: bool


def _pack_subgroupoid(G, arrow_ids, unit_positions=None):
    """Assemble the subgroupoid on a closed arrow set (trusted input)."""
    arrow_ids = sorted(arrow_ids)
    touched = set()
    for a in arrow_ids:
        touched.add(G.src[a])
        touched.add(G.rng[a])
    if unit_positions is None:
        unit_positions = sorted(touched)
    else:
        unit_positions = sorted(set(unit_positions) | touched)
    upos_new = {p: i for i, p in enumerate(unit_positions)}
    # make sure unit arrows ride along
    base = set(arrow_ids)
    for p in unit_positions:
        base.add(G.unit_arrow_at[p])
    arrow_ids = sorted(base)
    new_id = {a: i for i, a in enumerate(arrow_ids)}
    units = [G.units[p] for p in unit_positions]
    src = [upos_new[G.src[a]] for a in arrow_ids]
    rng = [upos_new[G.rng[a]] for a in arrow_ids]
    inv = [new_id[G.inv[a]] for a in arrow_ids]
    unit_arrow_at = [new_id[G.unit_arrow_at[p]] for p in unit_positions]
    table = {}
    members = set(arrow_ids)
    for g in arrow_ids:
        for h in arrow_ids:
            if G.src[g] == G.rng[h]:
                k = G.table[(g, h)]
                if k not in members:
                    raise AxiomViolation(
                        f"arrow set not closed: {g} . {h} = {k} missing")
                table[(new_id[g], new_id[h])] = new_id[k]
    sub = FiniteGroupoid(units, src, rng, inv, unit_arrow_at, table)
    part = orbits(G)
    met = {part.class_of[p] for p in unit_positions}
    full = len(met) == part.n_classes
    return EmbeddedSubgroupoid(G, sub, tuple(arrow_ids), full)


def restrict(G, Y):
    """The full subgroupoid on the unit set Y (labels), with fullness.

    Arrows are those with both endpoints in Y; isolated units of Y stay
    as units with only their unit arrow.
    """
    positions = sorted({G.unit_position(y) for y in Y})
    pos_set = set(positions)
    arrow_ids = [a for a in range(G.n_arrows)
                 if G.src[a] in pos_set and G.rng[a] in pos_set]
    return _pack_subgroupoid(G, arrow_ids, positions)


def subgroupoid(G, arrow_ids):
    """The embedded subgroupoid on an arrow set closed under the structure.

    The set must contain inverses and composites of its members; unit
    arrows at touched units ride along automatically.
    """
    ids = set(arrow_ids)
    for a in ids:
        if G.inv[a] not in ids:
            raise AxiomViolation(f"arrow set not closed: inverse of {a} "
                                 "missing")
    return _pack_subgroupoid(G, ids)


def transversal(G):
    """Least unit label of each orbit class, in class order."""
    part = orbits(G)
    return tuple(G.units[cls[0]] for cls in part.classes)


def orbit_stratum(G, k):
    """Units (labels) whose orbit has at least k elements."""
    if k < 1:
        raise IndexOutOfRange(f"stratum level must be >= 1, got {k}")
    part = orbits(G)
    out = []
    for cls in part.classes:
        if len(cls) >= k:
            out.extend(cls)
    return tuple(G.units[p] for p in sorted(out))


def invariant_unit_sets(G):
    """Every union of orbit classes, as a sorted label tuple.

    Includes the empty union and the full unit set.
    """
    part = orbits(G)
    sets = []
    for mask in range(1 << part.n_classes):
        picked = []
        for i, cls in enumerate(part.classes):
            if mask >> i & 1:
                picked.extend(cls)
        sets.append(tuple(G.units[p] for p in sorted(picked)))
    return sets


def is_invariant_unit_set(G, Y):
    """True when Y (labels) is a union of orbit classes."""
    part = orbits(G)
    pos = {G.unit_position(y) for y in Y}
    touched = {part.class_of[p] for p in pos}
    covered = set()
    for i in touched:
        covered.update(part.classes[i])
    return covered == pos


# -- composable tuples and faces ----------------------------------------------

def count_composable_tuples(G, n):
    """|composable n-tuples| by dynamic programming, no enumeration."""
    if n < 0:
        raise IndexOutOfRange(f"tuple length must be >= 0, got {n}")
    if n == 0:
        return G.n_units
    f = [len(G.arrows_from(u)) for u in range(G.n_units)]
    # f[u] = number of k-tuples whose last arrow has source u
    for _ in range(n - 1):
        f = [sum(f[G.rng[g]] for g in G.arrows_from(u))
             for u in range(G.n_units)]
    return sum(f)


def composable_tuples(G, n, cap=DEFAULT_TUPLE_CAP):
    """All composable n-tuples in lexicographic arrow-id order.

    Degree 0 returns the unit labels.  Tuples are (g0,...,g_{n-1}) with
    source(g_i) = range(g_{i+1}).
    """
    if n < 0:
        raise IndexOutOfRange(f"tuple length must be >= 0, got {n}")
    count = count_composable_tuples(G, n)
    if count > cap:
        raise ResourceLimit(f"{count} composable {n}-tuples exceed the "
                            f"cap {cap}")
    if n == 0:
        return list(G.units)
    out = []
    tup = [0] * n
    by_range = G._by_range

    def rec(depth):
        if depth == n:
            out.append(tuple(tup))
            return
        choices = range(G.n_arrows) if depth == 0 \
            else by_range[G.src[tup[depth - 1]]]
        for g in choices:
            tup[depth] = g
            rec(depth + 1)

    rec(0)
    return out


def face_map(G, n, i, t):
    """Face i of a composable (n+1)-tuple: drop the head or fuse a pair.

    i = 0 removes the leading arrow; 1 <= i <= n composes the pair at
    positions (i-1, i).  The result is a composable n-tuple.
    """
    if n < 1:
        raise IndexOutOfRange(f"face maps need n >= 1, got {n}")
    if len(t) != n + 1:
        raise IndexOutOfRange(f"expected a tuple of length {n + 1}, "
                              f"got {len(t)}")
    if not 0 <= i <= n:
        raise IndexOutOfRange(f"face index {i} outside 0..{n}")
    t = tuple(t)
    if i == 0:
        return t[1:]
    return t[:i - 1] + (G.compose(t[i - 1], t[i]),) + t[i + 1:]
