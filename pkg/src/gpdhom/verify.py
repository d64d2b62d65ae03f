"""Cross-checking suites built on the homology engine.

Each suite recomputes both sides of an identity that must hold on the
nose: inducing a module up from a subgroupoid, cutting down to a
transversal, splitting along an invariant unit set, and exhausting a
filtration.  The splitting checker builds the actual connecting maps
and compares image against kernel as lattices, so torsion mismatches
cannot hide behind equal ranks.  Dimension-zero certification wraps
the convolution-layer section solver and corroborates a success on
seeded random modules.
"""

from dataclasses import dataclass

from .bisections import Filtration, validate_filtration
from .convolution import fullness_idempotent, split_source
from .errors import IncompatibleModules, NotInvariant
from .gmodules import induce, restrict_module, trivial_module
from .groupoid import is_principal, isotropy_group, restrict, transversal
from .homology import (HomologyReport, bar_complex, cycle_basis_sparse,
                       homology, induced_h0)
from .linalg import (ModuleInvariants, SparseEchelon, invariant_factors,
                     matrix_from_columns)
from .randgen import random_gmodule


@dataclass(frozen=True)
class ComparisonReport:
    """Two homology reports that are supposed to agree degree by degree."""

    check: str
    equal: bool
    left: HomologyReport
    right: HomologyReport
    labels: tuple
    witness: object
    meta: dict

    def degrees_equal(self):
        return [l == r for l, r in zip(self.left.invariants,
                                       self.right.invariants)]

    def to_json(self):
        doc = {"check": self.check, "equal": self.equal,
               "sides": {self.labels[0]: self.left.to_json(),
                         self.labels[1]: self.right.to_json()},
               "degrees": [{"n": n, "equal": ok}
                           for n, ok in enumerate(self.degrees_equal())],
               "meta": dict(self.meta)}
        if self.witness is not None:
            doc["witness"] = self.witness
        return doc

    def describe(self):
        lines = [f"{self.check}: " + ("equal" if self.equal else "UNEQUAL")]
        for n, (l, r) in enumerate(zip(self.left.invariants,
                                       self.right.invariants)):
            mark = "==" if l == r else "!="
            lines.append(f"  H_{n}: {l.describe()} {mark} {r.describe()}")
        return "\n".join(lines)


def shapiro_verify(G, H, M, n_max, cap=1_000_000):
    """Homology of G with the induced module vs homology of H with M.

    H is a subgroupoid embedded in G and M lives over H.groupoid; the
    induction identity says the two reports agree in every degree.
    """
    induced = induce(G, H, M)
    left = homology(G, induced, n_max, cap)
    right = homology(H.groupoid, M, n_max, cap)
    meta = {"ambient_arrows": G.n_arrows,
            "sub_arrows": H.groupoid.n_arrows,
            "induced_ranks": list(induced.ranks)}
    return ComparisonReport("shapiro", left.invariants == right.invariants,
                            left, right, ("induced_up", "over_subgroupoid"),
                            None, meta)


def morita_reduce(G, M, n_max, cap=1_000_000):
    """Cut M down to a transversal and compare homology.

    The transversal meets each orbit once, so the cut-down groupoid is
    a bundle of isotropy groups; the witness that nothing is lost is
    the inclusion-exclusion certificate that the transversal's unit
    indicator is a full idempotent.
    """
    Y = transversal(G)
    H = restrict(G, Y)
    MY = restrict_module(G, H, M)
    left = homology(G, M, n_max, cap)
    right = homology(H.groupoid, MY, n_max, cap)
    cert = fullness_idempotent(G, list(Y), M.ring)
    meta = {"transversal": list(Y), "ambient_units": G.n_units}
    return ComparisonReport("morita", left.invariants == right.invariants,
                            left, right, ("full_groupoid", "transversal_cut"),
                            cert.to_json(), meta)


# -- the long exact sequence of an invariant splitting ------------------------------

class _TaggedLattice:
    """Membership with coordinates against a fixed set of sparse columns.

    One tagged echelon is built up front and reused for every query;
    the exactness checks below make hundreds of lookups against the
    same cycle basis, so the one-shot membership helper would be
    quadratically wasteful here.  Coordinates are re-verified by
    multiplying back before they are returned.
    """

    def __init__(self, ring, dim, cols):
        self.ring = ring
        self.dim = dim
        self.cols = [dict(c) for c in cols]
        self.ech = SparseEchelon(ring, dim)
        for j, col in enumerate(self.cols):
            vec = dict(col)
            vec[dim + j] = ring.one
            self.ech.insert(vec)

    def coords(self, vec):
        ring = self.ring
        residue = self.ech.reduce(vec)
        if any(c < self.dim for c in residue):
            return None
        out = [ring.zero] * len(self.cols)
        for c, w in residue.items():
            out[c - self.dim] = ring.neg(w)
        acc = {}
        for j, v in enumerate(out):
            if ring.is_zero(v):
                continue
            for i, w in self.cols[j].items():
                s = ring.add(acc.get(i, ring.zero), ring.mul(v, w))
                if ring.is_zero(s):
                    acc.pop(i, None)
                else:
                    acc[i] = s
        if acc != {i: w for i, w in vec.items() if not ring.is_zero(w)}:
            raise AssertionError("coordinate certificate failed to "
                                 "re-verify")
        return out

    def require(self, vec, what):
        out = self.coords(vec)
        if out is None:
            raise AssertionError(what)
        return out


class _HomologyNode:
    """Cycle basis of one degree plus denominators in basis coordinates.

    The denominators are the boundaries from one degree up together
    with the degree's own relation columns; homology at the node is
    the basis lattice modulo their span.
    """

    def __init__(self, cx, n, with_denominators=True):
        ring = cx.ring
        self.ring = ring
        self.n = n
        self.basis = cycle_basis_sparse(cx, n)
        self.k = len(self.basis)
        self.lattice = _TaggedLattice(ring, cx.gens[n], self.basis)
        self.denominators = []
        if with_denominators:
            denom = []
            if n + 1 <= cx.top_degree:
                denom.extend(cx.bnd_cols[n])
            denom.extend(cx.rel_cols[n])
            for col in denom:
                self.denominators.append(self.lattice.require(
                    col, "a boundary column escapes the cycle lattice"))

    def invariants(self):
        Z = matrix_from_columns(self.ring, self.k, self.denominators)
        rank, factors = invariant_factors(Z)
        return ModuleInvariants(self.ring, self.k - rank, factors)

    def denominator_sparse(self):
        ring = self.ring
        return [{i: v for i, v in enumerate(col) if not ring.is_zero(v)}
                for col in self.denominators]


def _row_maps(cx_sub, cx_amb, arrow_map):
    """Per degree, the ambient row of each sub-complex generator row."""
    maps = []
    for n in range(cx_sub.top_degree + 1):
        index = cx_amb.block_index(n)
        rm = [0] * cx_sub.gens[n]
        for key, fib, off in cx_sub.blocks[n]:
            if n == 0:
                amb_key = cx_amb.ambient.unit_position(
                    cx_sub.ambient.units[key])
            else:
                amb_key = tuple(arrow_map[a] for a in key)
            aoff, afib = index[amb_key]
            rank = cx_sub.module.ranks[fib]
            if rank != cx_amb.module.ranks[afib]:
                raise AssertionError("fiber ranks disagree across the "
                                     "embedding")
            for i in range(rank):
                rm[off + i] = aoff + i
        maps.append(rm)
    return maps


def _check_chain_map(cx_sub, cx_amb, rows):
    """Exact boundary commutation for the generator-block inclusion."""
    for n in range(1, cx_sub.top_degree + 1):
        rn, rlow = rows[n], rows[n - 1]
        for j in range(cx_sub.gens[n]):
            pushed = {rlow[i]: v
                      for i, v in cx_sub.bnd_cols[n - 1][j].items()}
            if pushed != dict(cx_amb.bnd_cols[n - 1][rn[j]]):
                raise AssertionError(
                    f"inclusion fails to commute with the boundary at "
                    f"degree {n}, generator {j}")


def _kernel_columns(ring, width, map_cols, lattice_cols):
    """Sparse columns spanning the v with (map v) inside the lattice.

    map_cols and lattice_cols are dense columns of length width; the
    results live in the domain of the map.
    """
    ech = SparseEchelon(ring, width)
    for j, col in enumerate(list(map_cols) + list(lattice_cols)):
        vec = {i: v for i, v in enumerate(col) if not ring.is_zero(v)}
        vec[width + j] = ring.one
        ech.insert(vec)
    out = []
    for dead in ech.dead:
        proj = {c - width: w for c, w in dead.items()
                if width <= c < width + len(map_cols)}
        if proj:
            out.append(proj)
    return out


def _spans_equal(ring, dim, cols_a, cols_b):
    """Mutual containment of two spans of sparse columns."""
    ea = SparseEchelon(ring, dim)
    eb = SparseEchelon(ring, dim)
    for c in cols_a:
        if c:
            ea.insert(dict(c))
    for c in cols_b:
        if c:
            eb.insert(dict(c))
    return (all(not eb.reduce(c) for c in cols_a if c)
            and all(not ea.reduce(c) for c in cols_b if c))


def _sparse_cols(ring, dense_cols):
    return [{i: v for i, v in enumerate(col) if not ring.is_zero(v)}
            for col in dense_cols]


@dataclass(frozen=True)
class LESReport:
    """Exactness verdicts for the three-complex splitting, per node."""

    exact: bool
    nodes: tuple
    homology: dict
    meta: dict

    def to_json(self):
        return {"exact": self.exact,
                "nodes": [dict(r) for r in self.nodes],
                "homology": {side: [inv.to_json() for inv in invs]
                             for side, invs in sorted(self.homology.items())},
                "meta": dict(self.meta)}

    def describe(self):
        lines = [f"exact through degree {self.meta['n_max']}: "
                 + ("yes" if self.exact else "NO")]
        for r in self.nodes:
            lines.append(f"  degree {r['degree']} at {r['at']}: "
                         + ("exact" if r["exact"] else "FAILS"))
        return "\n".join(lines)


def les_verify(G, U, M, n_max, cap=1_000_000):
    """Audit the long sequence of an invariant splitting, node by node.

    U is an invariant unit set; the bar complex of G splits termwise
    into the tuples over U and the tuples over the complement.  The
    suite builds all three complexes, the induced maps on homology,
    and the connecting maps (lift a quotient cycle through the block
    section, push it across the boundary, read off the inner part), and
    then checks image = kernel as lattices at every node in degrees
    0..n_max.  The lifts are deterministic: cycle bases come from
    echelon pivots and the section is the block correspondence itself.
    """
    if M.ambient is not G:
        raise IncompatibleModules("module does not live over the given "
                                  "groupoid")
    if n_max < 0:
        raise IncompatibleModules(f"top degree must be >= 0, got {n_max}")
    inside = {G.unit_position(u) for u in U}
    for a in range(G.n_arrows):
        if (G.src[a] in inside) != (G.rng[a] in inside):
            raise NotInvariant(f"arrow {a} connects the unit set to its "
                               f"complement")
    ring = M.ring
    in_labels = [lab for p, lab in enumerate(G.units) if p in inside]
    out_labels = [lab for p, lab in enumerate(G.units) if p not in inside]
    sub_emb = restrict(G, in_labels)
    quot_emb = restrict(G, out_labels)
    M_sub = restrict_module(G, sub_emb, M)
    M_quot = restrict_module(G, quot_emb, M)
    top = n_max + 1
    cx_sub = bar_complex(sub_emb.groupoid, M_sub, top, cap)
    cx_tot = bar_complex(G, M, top, cap)
    cx_quot = bar_complex(quot_emb.groupoid, M_quot, top, cap)

    rows_sub = _row_maps(cx_sub, cx_tot, sub_emb.arrow_map)
    rows_quot = _row_maps(cx_quot, cx_tot, quot_emb.arrow_map)
    for n in range(top + 1):
        if cx_sub.gens[n] + cx_quot.gens[n] != cx_tot.gens[n]:
            raise AssertionError(f"the invariant split misses generators "
                                 f"in degree {n}")
    _check_chain_map(cx_sub, cx_tot, rows_sub)
    _check_chain_map(cx_quot, cx_tot, rows_quot)
    back_sub = [{amb: i for i, amb in enumerate(rm)} for rm in rows_sub]
    back_quot = [{amb: i for i, amb in enumerate(rm)} for rm in rows_quot]

    nodes_sub = [_HomologyNode(cx_sub, n) for n in range(n_max + 1)]
    nodes_tot = [_HomologyNode(cx_tot, n) for n in range(n_max + 1)]
    nodes_quot = [_HomologyNode(cx_quot, n) for n in range(n_max + 1)]
    nodes_quot.append(_HomologyNode(cx_quot, n_max + 1,
                                    with_denominators=False))

    def induced(node_from, node_to, image_of):
        return [node_to.lattice.require(
                    image_of(col), "a cycle image escapes the target "
                                   "cycle lattice")
                for col in node_from.basis]

    incl_star, proj_star, conn_star = [], [], []
    for n in range(n_max + 1):
        rm = rows_sub[n]
        incl_star.append(induced(
            nodes_sub[n], nodes_tot[n],
            lambda col, rm=rm: {rm[i]: v for i, v in col.items()}))
        back = back_quot[n]
        proj_star.append(induced(
            nodes_tot[n], nodes_quot[n],
            lambda col, back=back: {back[i]: v for i, v in col.items()
                                    if i in back}))
    for n in range(1, n_max + 2):
        lift = rows_quot[n]
        back = back_sub[n - 1]

        def connect(col, n=n, lift=lift, back=back):
            w = cx_tot.push(n, {lift[i]: v for i, v in col.items()})
            return {back[i]: v for i, v in w.items() if i in back}

        conn_star.append(induced(nodes_quot[n], nodes_sub[n - 1], connect))

    rows = []
    exact = True
    for n in range(n_max + 1):
        z_sub = nodes_sub[n].denominator_sparse()
        z_tot = nodes_tot[n].denominator_sparse()
        z_quot = nodes_quot[n].denominator_sparse()

        image = _sparse_cols(ring, conn_star[n]) + z_sub
        kernel = _kernel_columns(ring, nodes_tot[n].k, incl_star[n],
                                 nodes_tot[n].denominators) + z_sub
        ok_sub = _spans_equal(ring, nodes_sub[n].k, image, kernel)

        image = _sparse_cols(ring, incl_star[n]) + z_tot
        kernel = _kernel_columns(ring, nodes_quot[n].k, proj_star[n],
                                 nodes_quot[n].denominators) + z_tot
        ok_tot = _spans_equal(ring, nodes_tot[n].k, image, kernel)

        image = _sparse_cols(ring, proj_star[n]) + z_quot
        if n == 0:
            kernel = [{i: ring.one} for i in range(nodes_quot[0].k)]
        else:
            kernel = _kernel_columns(
                ring, nodes_sub[n - 1].k, conn_star[n - 1],
                nodes_sub[n - 1].denominators) + z_quot
        ok_quot = _spans_equal(ring, nodes_quot[n].k, image, kernel)

        for at, ok in (("sub", ok_sub), ("total", ok_tot),
                       ("quotient", ok_quot)):
            rows.append({"degree": n, "at": at, "exact": ok})
            exact = exact and ok

    invariants = {"sub": tuple(nd.invariants() for nd in nodes_sub),
                  "total": tuple(nd.invariants() for nd in nodes_tot),
                  "quotient": tuple(nodes_quot[n].invariants()
                                    for n in range(n_max + 1))}
    meta = {"n_max": n_max, "ring": ring.tag(),
            "units_inside": sorted(in_labels, key=str),
            "arrows": G.n_arrows}
    return LESReport(exact, tuple(rows), invariants, meta)


# -- filtration continuity ----------------------------------------------------------

@dataclass(frozen=True)
class ContinuityReport:
    """Per-level homology of a filtration against the direct answer."""

    equal: bool
    levels: tuple
    h0_maps: tuple
    direct: HomologyReport
    meta: dict

    def to_json(self):
        return {"equal": self.equal,
                "levels": [rep.to_json() for rep in self.levels],
                "h0_maps": [m.to_json() for m in self.h0_maps],
                "direct": self.direct.to_json(),
                "meta": dict(self.meta)}

    def describe(self):
        lines = [f"terminal level matches the direct computation: "
                 + ("yes" if self.equal else "NO")]
        for i, rep in enumerate(self.levels):
            degs = "; ".join(inv.describe() for inv in rep.invariants)
            lines.append(f"  level {i}: {degs}")
        return "\n".join(lines)


def continuity_verify(G, levels, ring, n_max, cap=1_000_000):
    """Exhaust G by a filtration and compare against the direct answer.

    levels is a Filtration or the raw chain of arrow-id sets.  Homology
    with trivial coefficients is computed at every level, the maps the
    level inclusions induce in degree zero are recorded, and the
    terminal level (which the validator forces to be all of G) must
    reproduce the directly computed invariants in every degree.
    """
    fl = (levels if isinstance(levels, Filtration)
          else validate_filtration(G, levels))
    if fl.ambient is not G:
        raise IncompatibleModules("filtration lives over a different "
                                  "groupoid")
    per_level, modules = [], []
    for emb in fl.subgroupoids:
        Mi = trivial_module(emb.groupoid, ring)
        modules.append(Mi)
        per_level.append(homology(emb.groupoid, Mi, n_max, cap))
    maps = tuple(induced_h0(fl.subgroupoids[i].groupoid,
                            fl.subgroupoids[i + 1].groupoid,
                            modules[i], modules[i + 1])
                 for i in range(len(fl.subgroupoids) - 1))
    if not fl.subgroupoids[-1].groupoid.same_tables(G):
        raise AssertionError("terminal level of a validated filtration "
                             "is not the whole groupoid")
    direct = homology(G, trivial_module(G, ring), n_max, cap)
    equal = per_level[-1].invariants == direct.invariants
    meta = {"n_levels": len(fl.subgroupoids), "ring": ring.tag(),
            "n_max": n_max}
    return ContinuityReport(equal, tuple(per_level), maps, direct, meta)


# -- homological dimension zero -----------------------------------------------------

@dataclass(frozen=True)
class CertifyOptions:
    """Knobs for dimension-zero certification."""

    n_max: int = 3
    batch: int = 100
    seed: object = 0
    cap: int = 1_000_000
    max_rank: int = 3


@dataclass(frozen=True)
class CertifyReport:
    """Splitting outcome plus random-module corroboration evidence."""

    outcome: object
    corroborated: object
    modules: tuple
    note: str
    meta: dict

    @property
    def ok(self):
        return bool(self.outcome.ok) and self.corroborated is not False

    def to_json(self):
        doc = {"ok": self.ok, "outcome": self.outcome.to_json(),
               "corroborated": self.corroborated,
               "modules": [dict(m) for m in self.modules],
               "meta": dict(self.meta)}
        if self.note:
            doc["note"] = self.note
        return doc

    def describe(self):
        if not self.outcome.ok:
            return (f"obstructed: isotropy order "
                    f"{self.outcome.isotropy_order} at unit "
                    f"{self.outcome.unit!r} is not a unit in "
                    f"{self.meta['ring']}")
        head = "certified: the source pushforward splits"
        if self.corroborated is None:
            return head + (f" ({self.note})" if self.note else "")
        verdict = "all vanished" if self.corroborated else "A NONZERO GROUP"
        return (head + f"; positive degrees on {len(self.modules)} random "
                f"modules: {verdict}")


def _cyclic_isotropy_everywhere(G):
    """Whether each isotropy group has a single generator (table check)."""
    for label in transversal(G):
        iso = isotropy_group(G, label)
        if iso.order == 1:
            continue
        unit_arrow = G.unit_arrow_at[G.unit_position(label)]
        found = False
        for t in iso.arrows:
            acc, k = t, 1
            while acc != unit_arrow and k <= iso.order:
                acc = G.table[(t, acc)]
                k += 1
            if k == iso.order:
                found = True
                break
        if not found:
            return False
    return True


def hdim0_certify(G, R, options=None):
    """Certificate or obstruction for homological dimension zero over R.

    Delegates to the convolution-layer section solver, whose success
    is equivalent to every isotropy order being a unit in R; over the
    integers that must coincide with principality, and the function
    asserts it.  A success is then corroborated by running a seeded
    batch of random modules through the homology engine and demanding
    that every positive degree vanish; the seed sits in the report so
    any batch can be replayed.
    """
    opts = options if options is not None else CertifyOptions()
    outcome = split_source(G, R)
    if R.tag() == "Z" and bool(outcome.ok) != is_principal(G):
        raise AssertionError("integral certificate disagrees with "
                             "principality")
    modules, note, corroborated = [], "", None
    if outcome.ok and opts.batch > 0:
        if _cyclic_isotropy_everywhere(G):
            corroborated = True
            for i in range(opts.batch):
                mseed = f"{opts.seed}:{i}"
                Mi = random_gmodule(G, R, mseed, opts.max_rank)
                rep = homology(G, Mi, opts.n_max, opts.cap)
                vanished = rep.positive_degrees_vanish()
                corroborated = corroborated and vanished
                modules.append({"seed": mseed, "ranks": list(Mi.ranks),
                                "vanished": vanished})
        else:
            note = ("corroboration skipped: an isotropy group is not "
                    "cyclic and the module sampler only covers cyclic "
                    "blocks")
    meta = {"ring": R.tag(), "seed": opts.seed, "batch": opts.batch,
            "n_max": opts.n_max, "units": G.n_units,
            "arrows": G.n_arrows}
    return CertifyReport(outcome, corroborated, tuple(modules), note, meta)
