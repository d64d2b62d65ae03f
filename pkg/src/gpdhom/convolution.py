"""The convolution algebra of a finite groupoid, and its source map.

Functions on the arrow set multiply by summing over factorizations:
(f * h)(g) = sum of f(a) h(b) over all ways to write g = a . b.  The
unit-space functions form the trivial right module, and the source
pushforward s sends f to x |-> sum of f over the source fiber at x.

The heavy lifting in this module is around ker s: its explicit basis
{delta_g - delta_{unit(source g)}}, the check that bisection translates
generate it as a right ideal, and the idempotent constructions used by
the dimension-zero certifier (section of s, averaging over a bundle,
inclusion-exclusion for a full unit set).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bisections import Bisection, generate_semigroup, validate_bisection
from .errors import (
    AmbientMismatch,
    CoverFailure,
    IndexOutOfRange,
    NotFull,
    NotGroupBundle,
    OrderNotInvertible,
    ResourceLimit,
    RingMismatch,
    UnknownMap,
)
from .groupoid import (
    face_map,
    is_group_bundle,
    isotropy_group,
    orbits,
    transversal,
)
from .linalg import Matrix, membership, solve
from .rings import parse_ring_tag


class _Supported:
    """Shared arithmetic for finitely supported coefficient functions."""

    __slots__ = ()

    def _peer(self, other):
        if self.ambient is not other.ambient:
            raise AmbientMismatch("elements live on different groupoids")
        if self.ring.tag() != other.ring.tag():
            raise RingMismatch(f"{self.ring.tag()} vs {other.ring.tag()}")

    def _make(self, coeffs):
        raise NotImplementedError

    def add(self, other):
        self._peer(other)
        R = self.ring
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            w = R.add(out.get(k, R.zero), v)
            if R.is_zero(w):
                out.pop(k, None)
            else:
                out[k] = w
        return self._make(out)

    def neg(self):
        R = self.ring
        return self._make({k: R.neg(v) for k, v in self.coeffs.items()})

    def sub(self, other):
        return self.add(other.neg())

    def scale(self, c):
        R = self.ring
        out = {}
        for k, v in self.coeffs.items():
            w = R.mul(c, v)
            if not R.is_zero(w):
                out[k] = w
        return self._make(out)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return (type(self) is type(other) and self.ambient is other.ambient
                and self.ring.tag() == other.ring.tag()
                and self.coeffs == other.coeffs)

    __hash__ = None


class AlgebraElement(_Supported):
    """Finitely supported function on the arrow set; zeros omitted."""

    __slots__ = ("ambient", "ring", "coeffs")

    def __init__(self, ambient, ring, coeffs):
        self.ambient = ambient
        self.ring = ring
        self.coeffs = {a: v for a, v in coeffs.items() if not ring.is_zero(v)}

    def _make(self, coeffs):
        return AlgebraElement(self.ambient, self.ring, coeffs)

    def __repr__(self):
        return f"<AlgebraElement support={sorted(self.coeffs)}>"

    def to_json(self):
        return {"ring": self.ring.tag(),
                "coeffs": [[a, self.ring.fmt(v)]
                           for a, v in sorted(self.coeffs.items())]}


class UnitSpaceElement(_Supported):
    """Function on the unit space, keyed by unit position."""

    __slots__ = ("ambient", "ring", "coeffs")

    def __init__(self, ambient, ring, coeffs):
        self.ambient = ambient
        self.ring = ring
        self.coeffs = {x: v for x, v in coeffs.items() if not ring.is_zero(v)}

    def _make(self, coeffs):
        return UnitSpaceElement(self.ambient, self.ring, coeffs)

    def __repr__(self):
        labels = sorted(self.ambient.units[x] for x in self.coeffs)
        return f"<UnitSpaceElement support={labels}>"

    def to_json(self):
        return {"ring": self.ring.tag(),
                "coeffs": [[self.ambient.units[x], self.ring.fmt(v)]
                           for x, v in sorted(self.coeffs.items())]}


class TupleElement(_Supported):
    """Function on the space of composable n-tuples, n >= 2."""

    __slots__ = ("ambient", "ring", "length", "coeffs")

    def __init__(self, ambient, ring, length, coeffs):
        self.ambient = ambient
        self.ring = ring
        self.length = length
        for t in coeffs:
            if len(t) != length:
                raise UnknownMap(f"support tuple {t} has length {len(t)}, "
                                 f"expected {length}")
        self.coeffs = {t: v for t, v in coeffs.items() if not ring.is_zero(v)}

    def _peer(self, other):
        super()._peer(other)
        if self.length != other.length:
            raise AmbientMismatch("tuple lengths differ")

    def _make(self, coeffs):
        return TupleElement(self.ambient, self.ring, self.length, coeffs)

    def __eq__(self, other):
        return super().__eq__(other) and self.length == other.length


def delta(G, R, g):
    return AlgebraElement(G, R, {g: R.one})


def indicator(G, R, arrow_ids):
    """Coefficient one on the given arrow set."""
    ids = arrow_ids.arrows if isinstance(arrow_ids, Bisection) else arrow_ids
    return AlgebraElement(G, R, {a: R.one for a in ids})


def identity_element(G, R):
    return indicator(G, R, G.unit_arrow_at)


def unit_space_ones(G, R):
    return UnitSpaceElement(G, R, {x: R.one for x in range(G.n_units)})


def convolve(f, h):
    """Sum over factorizations: out[a . b] += f(a) h(b)."""
    f._peer(h)
    G, R = f.ambient, f.ring
    out = {}
    for b, hb in h.coeffs.items():
        rb = G.rng[b]
        for a, fa in f.coeffs.items():
            if G.src[a] == rb:
                k = G.table[(a, b)]
                w = R.add(out.get(k, R.zero), R.mul(fa, hb))
                if R.is_zero(w):
                    out.pop(k, None)
                else:
                    out[k] = w
    return AlgebraElement(G, R, out)


def trivial_right_action(xi, h):
    """Right action of the algebra on unit-space functions.

    (xi . h)(x) = sum over arrows b with source x of xi(range b) h(b),
    which makes the source pushforward a right-module map.
    """
    xi._peer(h)
    G, R = xi.ambient, xi.ring
    out = {}
    for b, hb in h.coeffs.items():
        v = xi.coeffs.get(G.rng[b])
        if v is None:
            continue
        x = G.src[b]
        w = R.add(out.get(x, R.zero), R.mul(v, hb))
        if R.is_zero(w):
            out.pop(x, None)
        else:
            out[x] = w
    return UnitSpaceElement(G, R, out)


def pushforward(name, f, n=None, i=None):
    """Sum fibers of one of the named maps: source, range, face(n, i).

    source and range send arrow functions to unit-space functions;
    face(n, i) sends functions on (n+1)-tuples to functions on
    n-tuples, with face(0, 0) meaning the source map (the augmentation).
    """
    G, R = f.ambient, f.ring
    if name in ("source", "range"):
        if not isinstance(f, AlgebraElement):
            raise UnknownMap(f"{name} pushforward needs an arrow function")
        ends = G.src if name == "source" else G.rng
        out = {}
        for a, v in f.coeffs.items():
            x = ends[a]
            w = R.add(out.get(x, R.zero), v)
            if R.is_zero(w):
                out.pop(x, None)
            else:
                out[x] = w
        return UnitSpaceElement(G, R, out)
    if name == "face":
        if n is None or i is None:
            raise UnknownMap("face pushforward needs n and i")
        if n == 0:
            if i != 0:
                raise UnknownMap("the only face below degree one is the "
                                 "source map")
            return pushforward("source", f)
        if isinstance(f, AlgebraElement):
            raise UnknownMap(f"face({n},{i}) needs functions on "
                             f"{n + 1}-tuples")
        if f.length != n + 1:
            raise UnknownMap(f"face({n},{i}) domain is {n + 1}-tuples, "
                             f"got length {f.length}")
        out = {}
        for t, v in f.coeffs.items():
            img = face_map(G, n, i, t)
            key = img[0] if n == 1 else img
            w = R.add(out.get(key, R.zero), v)
            if R.is_zero(w):
                out.pop(key, None)
            else:
                out[key] = w
        if n == 1:
            return AlgebraElement(G, R, out)
        return TupleElement(G, R, n, out)
    raise UnknownMap(f"no pushforward named {name!r}")


# -- the kernel of the source map ----------------------------------------------

def augmentation_kernel(G, R):
    """Free basis of ker s: delta_g - delta at the source unit, g non-unit."""
    out = []
    for g in range(G.n_arrows):
        if not G.is_unit_arrow[g]:
            u = G.unit_arrow_at[G.src[g]]
            out.append(AlgebraElement(G, R, {g: R.one, u: R.neg(R.one)}))
    return out


def _element_vector(f):
    R = f.ring
    return [f.coeffs.get(a, R.zero) for a in range(f.ambient.n_arrows)]


@dataclass(frozen=True)
class KernelGenerationReport:
    """Does {1_V - 1_{inverse(V) V} : V in X} generate ker s as a right ideal?

    Certificates express each kernel basis vector as a module
    combination of right translates of the generators; columns are
    labeled (generator index, translating arrow).
    """
    ok: bool
    ring_tag: str
    generator_bisections: tuple
    column_labels: tuple
    certificates: tuple
    failed_basis_arrows: tuple

    def to_json(self):
        return {
            "ok": self.ok,
            "ring": self.ring_tag,
            "generators": [list(b) for b in self.generator_bisections],
            "columns": [list(lbl) for lbl in self.column_labels],
            "certificates": [dict(c) for c in self.certificates],
            "failed": list(self.failed_basis_arrows),
        }


def kernel_generation_check(G, R, X, cap=100_000):
    """Verify ker s = right ideal of the bisection translates, over R.

    X must generate a covering semigroup (CoverFailure otherwise).
    Membership is decided by exact lattice reduction; every returned
    certificate has been re-multiplied out.
    """
    gens = [x if isinstance(x, Bisection) else validate_bisection(G, x)
            for x in X]
    S = generate_semigroup(G, gens, cap=cap)
    if not S.cover:
        seen = {a for b in S.elements for a in b.arrows}
        missing = sorted(set(range(G.n_arrows)) - seen)
        raise CoverFailure(f"generated semigroup misses arrows "
                           f"{missing[:8]}")

    translates = []
    labels = []
    zero_unit = UnitSpaceElement(G, R, {})
    for idx, V in enumerate(gens):
        vinv_v = sorted(G.unit_arrow_at[G.src[a]] for a in V.arrows)
        t = indicator(G, R, V).sub(indicator(G, R, vinv_v))
        for g in range(G.n_arrows):
            col = convolve(t, delta(G, R, g))
            if col.is_zero():
                continue
            if pushforward("source", col) != zero_unit:
                raise AssertionError(
                    "translate escaped the kernel of the source map")
            translates.append(_element_vector(col))
            labels.append((idx, g))

    L = Matrix.from_rows(R, [list(row) for row in zip(*translates)]) \
        if translates else Matrix.from_rows(R, [[] for _ in
                                                range(G.n_arrows)])
    basis_arrows = [g for g in range(G.n_arrows) if not G.is_unit_arrow[g]]
    certificates = []
    failed = []
    for basis_arrow, k in zip(basis_arrows, augmentation_kernel(G, R)):
        good, coeffs = membership(L, _element_vector(k))
        if not good:
            failed.append(basis_arrow)
            continue
        used = [[labels[j][0], labels[j][1], R.fmt(c)]
                for j, c in enumerate(coeffs) if not R.is_zero(c)]
        certificates.append({"basis_arrow": basis_arrow, "coeffs": used})
    return KernelGenerationReport(
        ok=not failed,
        ring_tag=R.tag(),
        generator_bisections=tuple(tuple(b.arrows) for b in gens),
        column_labels=tuple(labels),
        certificates=tuple(certificates),
        failed_basis_arrows=tuple(failed),
    )


# -- idempotent constructions ---------------------------------------------------

@dataclass(frozen=True)
class FullnessCertificate:
    """Inclusion-exclusion witness that 1_Y is a full idempotent.

    The bisections all have sources in Y and their ranges partition the
    unit space, so the conjugated idempotents are disjoint unit blocks:
    the signed expression collapses to their sum, every pairwise cross
    product is verified zero, and longer products contain one of those
    zero pairs.
    """
    unit_labels: tuple
    bisections: tuple
    term_supports: tuple
    verified: bool

    def to_json(self):
        return {"units": list(self.unit_labels),
                "bisections": [list(b) for b in self.bisections],
                "terms": [list(t) for t in self.term_supports],
                "verified": self.verified}


def fullness_idempotent(G, Y, R):
    """Express the identity through a full unit set Y, inclusion-exclusion.

    Bisection selection: the unit arrows of Y, then for each unit
    outside Y the least arrow from Y into it, packed first-fit into
    source-disjoint groups.
    """
    ylabels = tuple(sorted(set(Y), key=lambda u: G.unit_position(u)))
    ypos = {G.unit_position(y) for y in ylabels}
    part = orbits(G)
    met = {part.class_of[p] for p in ypos}
    if len(met) != part.n_classes:
        raise NotFull(f"unit set misses {part.n_classes - len(met)} "
                      "orbit classes")

    groups = [sorted(G.unit_arrow_at[p] for p in ypos)]
    group_sources = [set(ypos)]
    for q in range(G.n_units):
        if q in ypos:
            continue
        a = min(a for a in G.arrows_into(q) if G.src[a] in ypos)
        # ranges are distinct by construction; first fit on sources
        for gi, srcs in enumerate(group_sources):
            if G.src[a] not in srcs:
                groups[gi].append(a)
                srcs.add(G.src[a])
                break
        else:
            groups.append([a])
            group_sources.append({G.src[a]})

    one_y = indicator(G, R, [G.unit_arrow_at[p] for p in ypos])
    conjugates = []
    for ids in groups:
        V = indicator(G, R, ids)
        Vinv = indicator(G, R, [G.inv[a] for a in ids])
        conjugates.append(convolve(convolve(V, one_y), Vinv))
    total = AlgebraElement(G, R, {})
    for e in conjugates:
        total = total.add(e)
    if total != identity_element(G, R):
        raise AssertionError("inclusion-exclusion sum is not the identity")
    for e1, e2 in itertools.combinations(conjugates, 2):
        if not convolve(e1, e2).is_zero():
            raise AssertionError("conjugated idempotents are not disjoint")
    return FullnessCertificate(
        unit_labels=ylabels,
        bisections=tuple(tuple(ids) for ids in groups),
        term_supports=tuple(tuple(sorted(e.coeffs)) for e in conjugates),
        verified=True,
    )


def averaging_idempotent(G, R, cap=10_000):
    """Average over all global sections of a group bundle.

    e = (1/|H|) sum of 1_V over the group H of everywhere-defined
    invertible bisections.  Verifies e*e = e, e*1_V = e for every V,
    and that e pushes forward to the constant one function.
    """
    if not is_group_bundle(G):
        raise NotGroupBundle("averaging needs every arrow to be a loop")
    fibers = [G.arrows_into(x) for x in range(G.n_units)]
    order = 1
    for f in fibers:
        order *= len(f)
    if order > cap:
        raise ResourceLimit(f"{order} sections exceed the cap {cap}")
    if not R.is_unit(R.from_int(order)):
        raise OrderNotInvertible(order)
    inv_order = R.inv(R.from_int(order))
    coeffs = {}
    for a in range(G.n_arrows):
        through = order // len(fibers[G.src[a]])
        c = R.mul(R.from_int(through), inv_order)
        if not R.is_zero(c):
            coeffs[a] = c
    e = AlgebraElement(G, R, coeffs)
    if convolve(e, e) != e:
        raise AssertionError("averaging element is not idempotent")
    if pushforward("source", e) != unit_space_ones(G, R):
        raise AssertionError("averaging element is not a section of s")
    for combo in itertools.product(*fibers):
        if convolve(e, indicator(G, R, combo)) != e:
            raise AssertionError("averaging element moves under a section")
    return e


# -- splitting the source map -----------------------------------------------------

@dataclass(frozen=True)
class SplittingCertificate:
    """An f with s(f) = 1 and f * ker s = 0, fully re-verified."""
    element: AlgebraElement
    checks: tuple

    @property
    def ok(self):
        return True

    def to_json(self):
        return {"ok": True, "element": self.element.to_json(),
                "checks": [list(c) for c in self.checks]}


@dataclass(frozen=True)
class SplittingObstruction:
    """Least transversal unit whose isotropy order is not a unit in R."""
    unit: object
    isotropy_order: int
    ring_tag: str

    @property
    def ok(self):
        return False

    def to_json(self):
        return {"ok": False, "unit": self.unit,
                "isotropy_order": self.isotropy_order,
                "ring": self.ring_tag}


def split_source(G, R):
    """Solve for a right-annihilating section f of the source map.

    The constraints s(f) = 1 and f * (delta_g - delta_{source unit}) = 0
    say exactly that f is constant on each block of arrows sharing a
    range and a source orbit, with source-fiber sums equal to one; that
    finite linear system is solved exactly over R.  Success returns the
    certificate with every identity re-checked; otherwise the
    obstruction names the least transversal unit whose isotropy order
    fails to invert.
    """
    parent = list(range(G.n_arrows))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (b, _g), k in G.table.items():
        rb, rk = find(b), find(k)
        if rb != rk:
            parent[max(rb, rk)] = min(rb, rk)
    reps = sorted({find(a) for a in range(G.n_arrows)})
    col_of = {r: j for j, r in enumerate(reps)}
    counts = [[0] * len(reps) for _ in range(G.n_units)]
    for a in range(G.n_arrows):
        counts[G.src[a]][col_of[find(a)]] += 1
    A = Matrix.from_rows(R, [[R.from_int(c) for c in row] for row in counts])
    x = solve(A, [R.one] * G.n_units)

    if x is None:
        for u in transversal(G):
            m = isotropy_group(G, u).order
            if not R.is_unit(R.from_int(m)):
                return SplittingObstruction(u, m, R.tag())
        raise AssertionError("no section found although every isotropy "
                             "order is invertible")

    f = AlgebraElement(G, R, {a: x[col_of[find(a)]]
                              for a in range(G.n_arrows)})
    checks = []
    if pushforward("source", f) != unit_space_ones(G, R):
        raise AssertionError("candidate is not a section of s")
    checks.append(("source_section", G.n_units))
    for k in augmentation_kernel(G, R):
        if not convolve(f, k).is_zero():
            raise AssertionError("candidate does not annihilate ker s")
    checks.append(("kernel_annihilated", G.n_arrows - G.n_units))
    zero = R.zero
    for (b, _g), k in G.table.items():
        if f.coeffs.get(k, zero) != f.coeffs.get(b, zero):
            raise AssertionError("section value changes along a "
                                 "composition")
    checks.append(("composition_invariance", len(G.table)))
    for u in transversal(G):
        m = isotropy_group(G, u).order
        if not R.is_unit(R.from_int(m)):
            raise AssertionError(f"section exists but isotropy order {m} "
                                 f"at unit {u!r} is not invertible")
    return SplittingCertificate(f, tuple(checks))


# -- wire format -------------------------------------------------------------------

def algebra_element_to_json(f):
    return f.to_json()


def algebra_element_from_json(G, doc):
    R = parse_ring_tag(doc["ring"])
    coeffs = {}
    for arrow, value in doc["coeffs"]:
        if not 0 <= arrow < G.n_arrows:
            raise IndexOutOfRange(f"coefficient on unknown arrow {arrow}")
        coeffs[arrow] = R.add(coeffs.get(arrow, R.zero), R.parse(value))
    return AlgebraElement(G, R, coeffs)
