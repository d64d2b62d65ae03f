"""Coefficient modules over a finite ample groupoid.

A module is stored fiberwise: one finitely presented module per unit
(a rank plus a relation matrix whose columns span the relations), and
one matrix per arrow mapping the source fiber to the range fiber.
Unitarity is automatic in this model, since the module is by
construction the direct sum of its unit fibers.

Equality of fiber elements is always taken modulo the relation
lattice; for free fibers (no relation columns) this is plain equality.
"""

from .errors import (ValidationError, RingMismatch, NotSubgroupoid,
                     IncompatibleModules, FunctorialityViolation,
                     NotInvariant, IndexOutOfRange)
from .groupoid import EmbeddedSubgroupoid, restrict
from .linalg import Matrix, echelon_of_columns


class GModule:
    """Unit-indexed fibers with one action matrix per arrow.

    ranks[p] is the number of generators of the fiber at unit position
    p, relations[p] a ranks[p] x s_p matrix of relation columns, and
    actions[a] a rank(range) x rank(source) matrix for each arrow a.
    Instances are immutable once built; use make_gmodule or
    validate_gmodule, which run the full invariant check.
    """

    __slots__ = ("ambient", "ring", "ranks", "relations", "actions",
                 "_lattices")

    def __init__(self, ambient, ring, ranks, relations, actions):
        self.ambient = ambient
        self.ring = ring
        self.ranks = tuple(ranks)
        self.relations = tuple(relations)
        self.actions = tuple(actions)
        self._lattices = {}

    def rank(self, unit_pos):
        return self.ranks[unit_pos]

    def relation(self, unit_pos):
        return self.relations[unit_pos]

    def act(self, arrow):
        return self.actions[arrow]

    def is_free(self):
        return all(rel.ncols == 0 for rel in self.relations)

    def _lattice(self, unit_pos):
        ech = self._lattices.get(unit_pos)
        if ech is None:
            ech = echelon_of_columns(self.relations[unit_pos])
            self._lattices[unit_pos] = ech
        return ech

    def vector_is_zero(self, unit_pos, vec):
        """Does vec represent zero in the fiber at unit_pos?"""
        ring = self.ring
        if all(ring.is_zero(v) for v in vec):
            return True
        if self.relations[unit_pos].ncols == 0:
            return False
        residue = self._lattice(unit_pos).reduce(
            {i: v for i, v in enumerate(vec) if not ring.is_zero(v)})
        return not residue

    def vectors_equal(self, unit_pos, u, v):
        sub = self.ring.sub
        return self.vector_is_zero(unit_pos, [sub(a, b)
                                              for a, b in zip(u, v)])

    def maps_equal(self, unit_pos, A, B):
        """Equality of two matrices into the fiber at unit_pos."""
        if A.nrows != B.nrows or A.ncols != B.ncols:
            return False
        return all(self.vectors_equal(unit_pos, A.col(j), B.col(j))
                   for j in range(A.ncols))

    def to_json(self):
        fmt = self.ring.fmt
        fibers = []
        for p, label in enumerate(self.ambient.units):
            rel = self.relations[p]
            fibers.append([label, self.ranks[p],
                           [[fmt(v) for v in row] for row in rel.rows]])
        actions = [[a, [[fmt(v) for v in row] for row in m.rows]]
                   for a, m in enumerate(self.actions)]
        return {"ring": self.ring.tag(), "fibers": fibers,
                "actions": actions}


def _as_matrix(ring, value, nrows, ncols, what):
    """Coerce row lists (or a Matrix) to a Matrix of the given shape."""
    if isinstance(value, Matrix):
        if value.ring != ring:
            raise RingMismatch(f"{what} is over {value.ring.tag()}, "
                               f"expected {ring.tag()}")
        m = value
    else:
        rows = [[ring.parse(v) for v in row] for row in value]
        width = len(rows[0]) if rows else ncols
        if any(len(row) != width for row in rows):
            raise ValidationError(f"{what} has ragged rows")
        m = Matrix(ring, len(rows), width, rows)
    if m.nrows != nrows or m.ncols != ncols:
        raise ValidationError(f"{what} has shape {m.nrows}x{m.ncols}, "
                              f"expected {nrows}x{ncols}")
    return m


def _check_gmodule(M):
    """Exhaustive invariant check; raises on the first failure."""
    G, ring = M.ambient, M.ring
    if len(M.ranks) != G.n_units:
        raise ValidationError(f"{len(M.ranks)} fibers for {G.n_units} units")
    if len(M.actions) != G.n_arrows:
        raise ValidationError(f"{len(M.actions)} actions for "
                              f"{G.n_arrows} arrows")
    for p in range(G.n_units):
        rel = M.relations[p]
        if rel.ring != ring:
            raise RingMismatch(f"relations at unit position {p} use "
                               f"{rel.ring.tag()}")
        if rel.nrows != M.ranks[p]:
            raise ValidationError(f"relation matrix at unit position {p} "
                                  f"has {rel.nrows} rows for rank "
                                  f"{M.ranks[p]}")
    for a in range(G.n_arrows):
        m = M.actions[a]
        if m.ring != ring:
            raise RingMismatch(f"action of arrow {a} uses {m.ring.tag()}")
        if m.nrows != M.ranks[G.rng[a]] or m.ncols != M.ranks[G.src[a]]:
            raise ValidationError(
                f"action of arrow {a} has shape {m.nrows}x{m.ncols}, "
                f"expected {M.ranks[G.rng[a]]}x{M.ranks[G.src[a]]}")
    # unit arrows act as the identity on their fiber
    for p in range(G.n_units):
        a = G.unit_arrow_at[p]
        if not M.maps_equal(p, M.actions[a],
                            Matrix.identity(ring, M.ranks[p])):
            raise FunctorialityViolation(
                f"unit arrow {a} does not act as the identity")
    # actions must descend to the presented fibers
    for a in range(G.n_arrows):
        rel = M.relations[G.src[a]]
        if rel.ncols == 0:
            continue
        moved = M.actions[a].mul(rel)
        for j in range(moved.ncols):
            if not M.vector_is_zero(G.rng[a], moved.col(j)):
                raise ValidationError(
                    f"action of arrow {a} does not preserve the relation "
                    f"lattice of its source fiber")
    # composite actions agree with composed actions, checked over the
    # whole composition table; (g_inv, g) pairs make the inverse law a
    # special case of this loop
    for (g, h), k in G.table.items():
        composed = M.actions[g].mul(M.actions[h])
        if not M.maps_equal(G.rng[g], composed, M.actions[k]):
            raise FunctorialityViolation(
                f"action of composite of arrows {g} and {h} differs from "
                f"the product of their actions")
    return M


def make_gmodule(G, ring, ranks, actions, relations=None):
    """Build and fully check a module from ranks and action matrices.

    actions maps arrow id -> Matrix or nested row lists; relations
    (optional) maps unit position -> relation matrix, defaulting to
    free fibers everywhere.
    """
    ranks = [int(r) for r in ranks]
    if len(ranks) != G.n_units:
        raise ValidationError(f"{len(ranks)} ranks for {G.n_units} units")
    if any(r < 0 for r in ranks):
        raise ValidationError("fiber ranks must be nonnegative")
    rels = []
    for p in range(G.n_units):
        given = None if relations is None else relations.get(p)
        if given is None or (not isinstance(given, Matrix)
                             and len(given) == 0):
            rels.append(Matrix(ring, ranks[p], 0))
        else:
            ncols = given.ncols if isinstance(given, Matrix) else (
                len(given[0]) if given else 0)
            rels.append(_as_matrix(ring, given, ranks[p], ncols,
                                   f"relations at unit position {p}"))
    acts = []
    for a in range(G.n_arrows):
        try:
            value = actions[a]
        except (KeyError, IndexError):
            raise ValidationError(f"no action given for arrow {a}")
        acts.append(_as_matrix(ring, value, ranks[G.rng[a]],
                               ranks[G.src[a]], f"action of arrow {a}"))
    return _check_gmodule(GModule(G, ring, ranks, rels, acts))


def validate_gmodule(G, ring, spec):
    """Parse the wire form of a module over G and check every invariant.

    Expects {"ring", "fibers": [[unit, rank, relation-rows]],
    "actions": [[arrow, matrix-rows]]} with each unit and each arrow
    covered exactly once.
    """
    if "ring" in spec and spec["ring"] != ring.tag():
        raise RingMismatch(f"module declares ring {spec['ring']}, "
                           f"expected {ring.tag()}")
    ranks = [None] * G.n_units
    relations = {}
    for entry in spec.get("fibers", ()):
        label, rank, rel_rows = entry[0], int(entry[1]), entry[2]
        p = G.unit_position(label)
        if ranks[p] is not None:
            raise ValidationError(f"unit {label!r} has two fiber entries")
        ranks[p] = rank
        relations[p] = rel_rows
    missing = [G.units[p] for p in range(G.n_units) if ranks[p] is None]
    if missing:
        raise ValidationError(f"no fiber given for units {missing[:8]}")
    actions = {}
    for entry in spec.get("actions", ()):
        a, rows = int(entry[0]), entry[1]
        if not 0 <= a < G.n_arrows:
            raise IndexOutOfRange(f"action for unknown arrow {a}")
        if a in actions:
            raise ValidationError(f"arrow {a} has two action entries")
        actions[a] = rows
    return make_gmodule(G, ring, ranks, actions, relations)


def trivial_module(G, ring):
    """Rank-one free fibers with every arrow acting as the identity."""
    one = Matrix.identity(ring, 1)
    return make_gmodule(G, ring, [1] * G.n_units,
                        [one] * G.n_arrows)


def _require_embedded(G, H):
    if not isinstance(H, EmbeddedSubgroupoid) or H.ambient is not G:
        raise NotSubgroupoid("expected a subgroupoid embedded in the "
                             "given ambient groupoid")


def restrict_module(G, H, M):
    """The module M seen over an embedded subgroupoid H of G."""
    _require_embedded(G, H)
    if M.ambient is not G:
        raise IncompatibleModules("module does not live over the ambient "
                                  "groupoid")
    sub = H.groupoid
    pos = [G.unit_position(label) for label in sub.units]
    ranks = [M.ranks[p] for p in pos]
    relations = {i: M.relations[p] for i, p in enumerate(pos)}
    actions = {a: M.actions[H.arrow_map[a]] for a in range(sub.n_arrows)}
    return make_gmodule(sub, M.ring, ranks, actions, relations)


def _class_find(parent, g):
    while parent[g] != g:
        parent[g] = parent[parent[g]]
        g = parent[g]
    return g


def induce(G, H, M):
    """Induct a module over an embedded subgroupoid H up to G.

    The fiber at a unit x is the direct sum of M's fibers at the
    sources of representatives of {g : source(g) in H, range(g) = x}
    modulo right translation by H; representatives are the least arrow
    ids.  An arrow a of G acts by left translation on representatives,
    with the H-arrow correcting a*g back to its representative acting
    on the fiber block.
    """
    _require_embedded(G, H)
    if M.ambient is not H.groupoid:
        raise IncompatibleModules("module does not live over the "
                                  "subgroupoid")
    ring = M.ring
    local_of_amb_unit = {G.unit_position(label): i
                         for i, label in enumerate(H.groupoid.units)}
    local_of_amb_arrow = {amb: loc for loc, amb in enumerate(H.arrow_map)}
    h_arrows = list(H.arrow_map)

    # orbit classes of arrows into each unit, under right translation
    reps_at = []
    rep_of = {}
    for x in range(G.n_units):
        members = [g for g in G.arrows_into(x)
                   if G.src[g] in local_of_amb_unit]
        parent = {g: g for g in members}
        for g in members:
            for h in h_arrows:
                if G.rng[h] == G.src[g]:
                    a = _class_find(parent, g)
                    b = _class_find(parent, G.table[(g, h)])
                    if a != b:
                        parent[max(a, b)] = min(a, b)
        classes = {}
        for g in members:
            classes.setdefault(_class_find(parent, g), []).append(g)
        reps = sorted(min(members) for members in classes.values())
        reps_at.append(reps)
        for root, members in classes.items():
            rep = min(members)
            for g in members:
                rep_of[g] = rep

    def fiber_pos(rep):
        return local_of_amb_unit[G.src[rep]]

    ranks, relations, offsets, rep_index = [], {}, [], []
    for x in range(G.n_units):
        offs, total, relcols = [], 0, 0
        for rep in reps_at[x]:
            offs.append(total)
            total += M.ranks[fiber_pos(rep)]
            relcols += M.relations[fiber_pos(rep)].ncols
        ranks.append(total)
        offsets.append(offs)
        rep_index.append({rep: i for i, rep in enumerate(reps_at[x])})
        rel = Matrix(ring, total, relcols)
        c = 0
        for i, rep in enumerate(reps_at[x]):
            block = M.relations[fiber_pos(rep)]
            for bi in range(block.nrows):
                for bj in range(block.ncols):
                    rel.rows[offs[i] + bi][c + bj] = block.rows[bi][bj]
            c += block.ncols
        relations[x] = rel

    actions = {}
    for a in range(G.n_arrows):
        y, x = G.src[a], G.rng[a]
        out = Matrix(ring, ranks[x], ranks[y])
        for j, g in enumerate(reps_at[y]):
            moved = G.table[(a, g)]
            r = rep_of[moved]
            i = rep_index[x][r]
            correction = G.table[(G.inv[r], moved)]
            # the correction arrow lies in H by construction of the
            # classes; its absence would mean the union-find is wrong
            block = M.actions[local_of_amb_arrow[correction]]
            for bi in range(block.nrows):
                for bj in range(block.ncols):
                    out.rows[offsets[x][i] + bi][offsets[y][j] + bj] = \
                        block.rows[bi][bj]
        actions[a] = out
    return make_gmodule(G, ring, ranks, actions, relations)


def invariant_submodule(G, M, U):
    """Split M along an invariant unit set U into (sub, quot).

    sub keeps M's fibers over U and zero fibers elsewhere, still as a
    module over G; quot is M's restriction to the full subgroupoid on
    the complement of U.
    """
    if M.ambient is not G:
        raise IncompatibleModules("module does not live over the given "
                                  "groupoid")
    inside = set()
    for label in U:
        inside.add(G.unit_position(label))
    for a in range(G.n_arrows):
        if (G.src[a] in inside) != (G.rng[a] in inside):
            raise NotInvariant(f"arrow {a} connects the unit set to its "
                               f"complement")
    ring = M.ring
    ranks = [M.ranks[p] if p in inside else 0 for p in range(G.n_units)]
    relations = {p: M.relations[p] for p in inside}
    actions = {}
    for a in range(G.n_arrows):
        if G.src[a] in inside:
            actions[a] = M.actions[a]
        else:
            actions[a] = Matrix(ring, 0, 0)
    sub = make_gmodule(G, ring, ranks, actions, relations)
    complement = [label for p, label in enumerate(G.units)
                  if p not in inside]
    quot = restrict_module(G, restrict(G, complement), M)
    return sub, quot


def gmodule_to_json(M):
    return M.to_json()
