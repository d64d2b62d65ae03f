"""Stock groupoids: pair groupoids, cyclic groups, bundles, unions.

Every finite groupoid decomposes orbit by orbit into transitive pieces,
and a transitive piece with cyclic isotropy is the product of a pair
groupoid with a cyclic group.  transitive_groupoid builds that piece
directly; the other constructors are the special cases and disjoint
unions the tests and the random generator lean on.
"""

from __future__ import annotations

from .groupoid import FiniteGroupoid


def transitive_groupoid(n_points, iso_order, labels=None):
    """One orbit of n_points units, isotropy cyclic of order iso_order.

    Arrows are triples (target point, source point, twist); the arrow
    id order is lexicographic in those triples.
    """
    if n_points < 1:
        raise ValueError("need at least one point")
    if iso_order < 1:
        raise ValueError("isotropy order must be >= 1")
    if labels is None:
        labels = list(range(n_points))
    m = iso_order
    arrow_id = {}
    src = []
    rng = []
    for x in range(n_points):
        for y in range(n_points):
            for k in range(m):
                arrow_id[(x, y, k)] = len(src)
                src.append(y)
                rng.append(x)
    inv = [0] * len(src)
    table = {}
    for (x, y, k), a in arrow_id.items():
        inv[a] = arrow_id[(y, x, (-k) % m)]
        for z in range(n_points):
            for j in range(m):
                b = arrow_id[(y, z, j)]
                table[(a, b)] = arrow_id[(x, z, (k + j) % m)]
    unit_arrow_at = [arrow_id[(x, x, 0)] for x in range(n_points)]
    return FiniteGroupoid(labels, src, rng, inv, unit_arrow_at, table)


def pair_groupoid(labels):
    """The full equivalence relation on the given units."""
    labels = list(labels)
    return transitive_groupoid(len(labels), 1, labels)


def cyclic_group_groupoid(m, label=0):
    """The cyclic group of order m as a one-unit groupoid."""
    return transitive_groupoid(1, m, [label])


def disjoint_union(*groupoids):
    """Disjoint union; units are relabeled densely 0..N-1 in block order."""
    units = []
    src = []
    rng = []
    inv = []
    unit_arrow_at = []
    table = {}
    for G in groupoids:
        ubase = len(units)
        abase = len(src)
        units.extend(range(ubase, ubase + G.n_units))
        src.extend(u + ubase for u in G.src)
        rng.extend(u + ubase for u in G.rng)
        inv.extend(a + abase for a in G.inv)
        unit_arrow_at.extend(a + abase for a in G.unit_arrow_at)
        for (g, h), k in G.table.items():
            table[(g + abase, h + abase)] = k + abase
    return FiniteGroupoid(units, src, rng, inv, unit_arrow_at, table)


def group_bundle(orders):
    """Cyclic isotropy of the given order at each of len(orders) units."""
    return disjoint_union(*(cyclic_group_groupoid(m) for m in orders))


def action_groupoid_cyclic(m, perm):
    """Z/m acting on points through a permutation of order dividing m.

    Arrows are pairs (group element k, point x) with source x and range
    perm^k(x), ordered lexicographically.
    """
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {perm}")
    powers = [list(range(n))]
    for _ in range(m - 1):
        powers.append([perm[x] for x in powers[-1]])
    if [perm[x] for x in powers[-1]] != powers[0]:
        raise ValueError(f"permutation order does not divide {m}")
    arrow_id = {}
    src = []
    rng = []
    for k in range(m):
        for x in range(n):
            arrow_id[(k, x)] = len(src)
            src.append(x)
            rng.append(powers[k][x])
    inv = [0] * len(src)
    table = {}
    for (k, x), a in arrow_id.items():
        inv[a] = arrow_id[((-k) % m, powers[k][x])]
        for (j, z), b in arrow_id.items():
            if powers[j][z] == x:
                table[(a, b)] = arrow_id[((k + j) % m, z)]
    unit_arrow_at = [arrow_id[(0, x)] for x in range(n)]
    return FiniteGroupoid(list(range(n)), src, rng, inv, unit_arrow_at, table)
