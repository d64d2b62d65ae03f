"""Tensored bar complexes and groupoid homology over exact rings.

The degree-n term is the direct sum, over composable n-tuples, of the
coefficient fiber at the source of the last arrow (degree 0 sums the
fibers themselves).  The boundary drops the head, fuses consecutive
entries with alternating signs, and lets the last arrow act on the
fiber with the final sign.  Boundary columns are kept sparse so that
path-space groupoids with tens of thousands of tuples stay cheap.
"""

from dataclasses import dataclass

from .errors import (IncompatibleModules, NotAComplex, RingMismatch,
                     UnknownUnit)
from .groupoid import composable_tuples, orbits
from .linalg import (Matrix, ModuleInvariants, SparseEchelon,
                     invariant_factors, invariant_factors_sparse,
                     kernel_basis, matrix_from_columns, membership)


class ChainComplex:
    """Chain complex with sparse boundary columns and presented terms.

    gens[n] counts generators of the degree-n term; blocks[n] lists
    (key, fiber unit position, offset) per summand, where the key is a
    unit position in degree 0 and a composable arrow tuple above;
    rel_cols[n] holds the relation columns of the term (empty for free
    fibers); bnd_cols[n-1] holds the columns of the boundary from
    degree n to degree n-1, each a dict row -> value.
    """

    __slots__ = ("ring", "ambient", "module", "gens", "blocks",
                 "rel_cols", "bnd_cols", "_lattices")

    def __init__(self, ring, ambient, module, gens, blocks, rel_cols,
                 bnd_cols):
        self.ring = ring
        self.ambient = ambient
        self.module = module
        self.gens = tuple(gens)
        self.blocks = tuple(tuple(b) for b in blocks)
        self.rel_cols = tuple(tuple(r) for r in rel_cols)
        self.bnd_cols = tuple(tuple(c) for c in bnd_cols)
        self._lattices = {}
        self._verify()

    @property
    def top_degree(self):
        return len(self.gens) - 1

    def is_free(self):
        return all(not cols for cols in self.rel_cols)

    def boundary_columns(self, n):
        """Columns of the boundary out of degree n (1 <= n <= top)."""
        return self.bnd_cols[n - 1]

    def boundary_matrix(self, n):
        out = Matrix(self.ring, self.gens[n - 1], self.gens[n])
        for j, col in enumerate(self.bnd_cols[n - 1]):
            for i, v in col.items():
                out.rows[i][j] = v
        return out

    def relation_matrix(self, n):
        out = Matrix(self.ring, self.gens[n], len(self.rel_cols[n]))
        for j, col in enumerate(self.rel_cols[n]):
            for i, v in col.items():
                out.rows[i][j] = v
        return out

    def block_index(self, n):
        """Map key -> (offset, fiber unit position) in degree n."""
        return {key: (off, fib) for key, fib, off in self.blocks[n]}

    def _lattice(self, n):
        ech = self._lattices.get(n)
        if ech is None:
            ech = SparseEchelon(self.ring, self.gens[n])
            for col in self.rel_cols[n]:
                ech.insert(dict(col))
            self._lattices[n] = ech
        return ech

    def vanishes(self, n, vec):
        """Is a sparse degree-n vector zero modulo the relations?"""
        if not vec:
            return True
        if not self.rel_cols[n]:
            return False
        return not self._lattice(n).reduce(vec)

    def push(self, n, vec):
        """Apply the boundary out of degree n to a sparse vector."""
        ring = self.ring
        cols = self.bnd_cols[n - 1]
        out = {}
        for j, v in vec.items():
            for i, w in cols[j].items():
                s = ring.add(out.get(i, ring.zero), ring.mul(w, v))
                if ring.is_zero(s):
                    out.pop(i, None)
                else:
                    out[i] = s
        return out

    def _verify(self):
        for n in range(2, self.top_degree + 1):
            for j in range(self.gens[n]):
                image = self.push(n - 1, self.bnd_cols[n - 1][j])
                if not self.vanishes(n - 2, image):
                    raise NotAComplex(
                        f"boundary squared is nonzero on generator {j} "
                        f"of degree {n}")


def bar_complex(G, M, n_max, cap=1_000_000):
    """The bar complex of G with coefficients in M up to degree n_max.

    Raises ResourceLimit through the tuple enumeration when the count
    of composable tuples passes the cap.
    """
    if M.ambient is not G:
        raise IncompatibleModules("module does not live over the given "
                                  "groupoid")
    if n_max < 0:
        raise IncompatibleModules(f"top degree must be >= 0, got {n_max}")
    ring = M.ring

    blocks, gens = [], []
    unit_block = []
    off = 0
    for p in range(G.n_units):
        unit_block.append((p, p, off))
        off += M.ranks[p]
    blocks.append(unit_block)
    gens.append(off)
    for n in range(1, n_max + 1):
        blk, off = [], 0
        for t in composable_tuples(G, n, cap):
            fib = G.src[t[-1]]
            blk.append((t, fib, off))
            off += M.ranks[fib]
        blocks.append(blk)
        gens.append(off)

    rel_cols = []
    for n in range(n_max + 1):
        cols = []
        for _, fib, off in blocks[n]:
            rel = M.relations[fib]
            for j in range(rel.ncols):
                col = {off + i: rel.rows[i][j] for i in range(rel.nrows)
                       if not ring.is_zero(rel.rows[i][j])}
                cols.append(col)
        rel_cols.append(cols)

    one, minus = ring.one, ring.neg(ring.one)
    bnd_cols = []
    for n in range(1, n_max + 1):
        index = {key: (off, fib) for key, fib, off in blocks[n - 1]}
        cols = [dict() for _ in range(gens[n])]

        def add_identity(col_off, row_off, rank, sign):
            for i in range(rank):
                col = cols[col_off + i]
                s = ring.add(col.get(row_off + i, ring.zero), sign)
                if ring.is_zero(s):
                    col.pop(row_off + i, None)
                else:
                    col[row_off + i] = s

        def add_action(col_off, row_off, matrix, sign):
            for bi, row in enumerate(matrix.rows):
                for bj, v in enumerate(row):
                    if ring.is_zero(v):
                        continue
                    col = cols[col_off + bj]
                    s = ring.add(col.get(row_off + bi, ring.zero),
                                 ring.mul(sign, v))
                    if ring.is_zero(s):
                        col.pop(row_off + bi, None)
                    else:
                        col[row_off + bi] = s

        for t, fib, off in blocks[n]:
            rank = M.ranks[fib]
            last = t[-1]
            if n == 1:
                head_key, tail_key = G.src[last], G.rng[last]
            else:
                head_key, tail_key = t[1:], t[:-1]
            row, _ = index[head_key]
            add_identity(off, row, rank, one)
            sign = minus
            for j in range(n - 1):
                fused = t[:j] + (G.table[(t[j], t[j + 1])],) + t[j + 2:]
                row, _ = index[fused]
                add_identity(off, row, rank, sign)
                sign = ring.neg(sign)
            row, _ = index[tail_key]
            add_action(off, row, M.actions[last], sign)
        bnd_cols.append(cols)

    return ChainComplex(ring, G, M, gens, blocks, rel_cols, bnd_cols)


def _free_invariants(cx, n_max):
    ring = cx.ring
    snf = {}

    def rank_and_factors(n):
        if n < 1 or n > cx.top_degree:
            return 0, ()
        if n not in snf:
            cols = {j: dict(col)
                    for j, col in enumerate(cx.bnd_cols[n - 1]) if col}
            snf[n] = invariant_factors_sparse(
                ring, cx.gens[n - 1], cx.gens[n], cols)
        return snf[n]

    out = []
    for n in range(n_max + 1):
        rank_out, _ = rank_and_factors(n)
        rank_in, factors = rank_and_factors(n + 1)
        free = cx.gens[n] - rank_out - rank_in
        out.append(ModuleInvariants(ring, free, factors))
    return out


def cycle_basis_sparse(cx, n):
    """Echelon basis of the degree-n cycles modulo term relations.

    Sparse columns with distinct leading rows, ordered by leading row.
    They span the lattice of degree-n vectors whose boundary lies in
    the relation lattice one degree down (everything, when n = 0): the
    projections to degree n of the kernel of [boundary | relations].
    """
    ring = cx.ring
    if n == 0:
        return [{i: ring.one} for i in range(cx.gens[0])]
    aug_cols = ([dict(c) for c in cx.bnd_cols[n - 1]]
                + [dict(c) for c in cx.rel_cols[n - 1]])
    ech = SparseEchelon(ring, cx.gens[n - 1])
    for j, col in enumerate(aug_cols):
        tagged = dict(col)
        tagged[cx.gens[n - 1] + j] = ring.one
        ech.insert(tagged)
    cycle_ech = SparseEchelon(ring, cx.gens[n])
    for vec in ech.dead:
        x_part = {c - cx.gens[n - 1]: w for c, w in vec.items()
                  if c >= cx.gens[n - 1]
                  and c - cx.gens[n - 1] < cx.gens[n]}
        if x_part:
            cycle_ech.insert(x_part)
    return [cycle_ech.pivots[c] for c in sorted(cycle_ech.pivots)]


def _presented_invariants(cx, n):
    """Homology of a presented complex at degree n.

    Boundaries and the degree-n relations are rewritten in the cycle
    basis and the cokernel read off.
    """
    ring = cx.ring
    basis = cycle_basis_sparse(cx, n)
    k = len(basis)
    dense = []
    for vec in basis:
        col = [ring.zero] * cx.gens[n]
        for i, v in vec.items():
            col[i] = v
        dense.append(col)
    K = matrix_from_columns(ring, cx.gens[n], dense)

    denom = []
    if n + 1 <= cx.top_degree:
        denom.extend(cx.bnd_cols[n][j] for j in range(cx.gens[n + 1]))
    denom.extend(cx.rel_cols[n])
    coords = []
    for col in denom:
        target = [ring.zero] * cx.gens[n]
        for i, v in col.items():
            target[i] = v
        ok, coeff = membership(K, target)
        if not ok:
            raise AssertionError("boundary column escapes the cycle "
                                 "lattice")
        coords.append(coeff)
    Z = matrix_from_columns(ring, k, coords)
    rank, factors = invariant_factors(Z)
    return ModuleInvariants(ring, k - rank, factors)


def homology_of_complex(cx, n_max):
    """ModuleInvariants of the homology in degrees 0..n_max.

    Degree n_max needs the boundary out of degree n_max+1, so the
    complex must have been built one degree higher.
    """
    if n_max + 1 > cx.top_degree:
        raise IncompatibleModules(
            f"complex of top degree {cx.top_degree} cannot certify "
            f"homology up to degree {n_max}")
    if cx.is_free():
        return _free_invariants(cx, n_max)
    return [_presented_invariants(cx, n) for n in range(n_max + 1)]


@dataclass(frozen=True)
class HomologyReport:
    """Per-degree invariants plus the run's shape metadata."""

    ring: object
    n_max: int
    invariants: tuple
    meta: dict

    def degree(self, n):
        return self.invariants[n]

    def positive_degrees_vanish(self):
        return all(inv.is_zero() for inv in self.invariants[1:])

    def to_json(self):
        return {
            "degrees": [dict({"n": n}, **inv.to_json())
                        for n, inv in enumerate(self.invariants)],
            "meta": dict(self.meta, ring=self.ring.tag(),
                         n_max=self.n_max),
        }

    def describe(self):
        return "\n".join(f"H_{n} = {inv.describe()}"
                         for n, inv in enumerate(self.invariants))


def homology(G, M, n_max, cap=1_000_000):
    """Homology of G with coefficients in M up to degree n_max."""
    cx = bar_complex(G, M, n_max + 1, cap)
    invs = homology_of_complex(cx, n_max)
    meta = {"units": G.n_units, "arrows": G.n_arrows,
            "fiber_ranks": list(M.ranks), "free_fibers": M.is_free()}
    return HomologyReport(M.ring, n_max, tuple(invs), meta)


def _require_trivial_shape(M, which):
    ring = M.ring
    if any(r != 1 for r in M.ranks) or not M.is_free():
        raise IncompatibleModules(f"{which} must have free rank-one "
                                  "fibers")
    ident = Matrix.identity(ring, 1)
    if any(m != ident for m in M.actions):
        raise IncompatibleModules(f"{which} must act trivially")


def induced_h0(source, target, M, N, unit_images=None):
    """The induced map on degree-zero homology, for trivial coefficients.

    source and target are groupoids with modules M and N of trivial
    shape (free rank one, identity actions) over the same ring;
    unit_images maps each source unit label to the target unit labels
    refining it, defaulting to same-label inclusion.  Rows and columns
    are orbit classes ordered by least unit index.
    """
    if M.ambient is not source or N.ambient is not target:
        raise IncompatibleModules("modules do not match the groupoids")
    if M.ring != N.ring:
        raise RingMismatch(f"coefficient rings differ: {M.ring.tag()} "
                           f"vs {N.ring.tag()}")
    _require_trivial_shape(M, "source module")
    _require_trivial_shape(N, "target module")
    ring = M.ring
    src_part, tgt_part = orbits(source), orbits(target)
    out = Matrix(ring, tgt_part.n_classes, src_part.n_classes)
    for c, cls in enumerate(src_part.classes):
        column = None
        for p in cls:
            label = source.units[p]
            images = ([label] if unit_images is None
                      else unit_images[label])
            vec = [ring.zero] * tgt_part.n_classes
            for image in images:
                q = target.unit_position(image)
                i = tgt_part.class_of[q]
                vec[i] = ring.add(vec[i], ring.one)
            if column is None:
                column = vec
            elif column != vec:
                raise IncompatibleModules(
                    f"unit images are not constant on the orbit of "
                    f"{source.units[cls[0]]!r}")
        for i, v in enumerate(column):
            out.rows[i][c] = v
    return out
