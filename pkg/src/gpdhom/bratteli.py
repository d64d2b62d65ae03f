"""Leveled multigraphs, their path groupoids, and the degree-zero
inductive system they present.

The diagram format is {"vertices": [v0, v1, ...], "edges": [M0, ...]}
with M_k a v_k x v_{k+1} matrix of nonnegative multiplicities, row
indexed by the source vertex, and a single root at level 0.  Level n
of the associated groupoid is the pair groupoid of root-to-level-n
paths grouped by terminal vertex; the degree-zero system keeps one
free generator per vertex and connects consecutive levels by the
transposed multiplicity matrix.  The transpose is a pinned convention:
the tests hold it against the degree-zero map induced by the
path-refinement inclusion instead of taking it on faith.
"""

import json
from dataclasses import dataclass

from .errors import DepthExceeded, Malformed, ResourceLimit, SourceVertex
from .gmodules import trivial_module
from .groupoid import FiniteGroupoid
from .homology import homology
from .linalg import Matrix, ModuleInvariants, matrix_rank
from .rings import QQ, ZZ
from .verify import CertifyOptions, hdim0_certify


@dataclass(frozen=True)
class BratteliDiagram:
    """Vertex counts per level and one multiplicity matrix per step."""

    vertex_counts: tuple
    edges: tuple

    @property
    def depth(self):
        return len(self.edges)

    def path_counts(self, n):
        """Paths from the root to each level-n vertex, by the recursion."""
        if not 0 <= n <= self.depth:
            raise DepthExceeded(f"level {n} outside 0..{self.depth}")
        counts = [1]
        for k in range(n):
            step = self.edges[k]
            counts = [sum(counts[u] * step[u][w] for u in range(len(counts)))
                      for w in range(self.vertex_counts[k + 1])]
        return counts

    def to_json(self):
        return {"vertices": list(self.vertex_counts),
                "edges": [[list(row) for row in step]
                          for step in self.edges]}


def _expect(cond, message):
    if not cond:
        raise Malformed(message)


def parse_bratteli(text):
    """Validated diagram from JSON text or an already-decoded object."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise Malformed(f"line {e.lineno}, column {e.colno}: {e.msg}")
    else:
        doc = text
    _expect(isinstance(doc, dict), "expected an object with fields "
                                   "'vertices' and 'edges'")
    for name in sorted(set(doc) - {"vertices", "edges"}, key=str):
        raise Malformed(f"unexpected field {name!r}")
    _expect("vertices" in doc, "field 'vertices' is missing")
    _expect("edges" in doc, "field 'edges' is missing")

    vertices = doc["vertices"]
    _expect(isinstance(vertices, list) and vertices,
            "field 'vertices' must be a nonempty list")
    for i, v in enumerate(vertices):
        _expect(isinstance(v, int) and not isinstance(v, bool) and v >= 1,
                f"field 'vertices[{i}]' must be a positive integer")
    _expect(vertices[0] == 1, "field 'vertices[0]' must be 1: level 0 "
                              "is a single root")

    edges = doc["edges"]
    _expect(isinstance(edges, list), "field 'edges' must be a list")
    _expect(len(edges) == len(vertices) - 1,
            f"field 'edges' must have {len(vertices) - 1} matrices for "
            f"{len(vertices)} levels, got {len(edges)}")
    steps = []
    for k, step in enumerate(edges):
        here = f"edges[{k}]"
        _expect(isinstance(step, list) and len(step) == vertices[k],
                f"field '{here}' must have one row per level-{k} vertex "
                f"({vertices[k]})")
        for u, row in enumerate(step):
            _expect(isinstance(row, list) and len(row) == vertices[k + 1],
                    f"field '{here}[{u}]' must have one entry per "
                    f"level-{k + 1} vertex ({vertices[k + 1]})")
            for w, m in enumerate(row):
                _expect(isinstance(m, int) and not isinstance(m, bool)
                        and m >= 0,
                        f"field '{here}[{u}][{w}]' must be a nonnegative "
                        f"integer")
        for w in range(vertices[k + 1]):
            if all(step[u][w] == 0 for u in range(vertices[k])):
                raise SourceVertex(k + 1, w)
        steps.append(tuple(tuple(row) for row in step))
    return BratteliDiagram(tuple(vertices), tuple(steps))


def _paths_by_vertex(B, n, cap):
    """Root-to-level-n paths grouped by terminal vertex.

    A path is a tuple of (vertex, parallel-edge copy) steps; the count
    recursion runs first so oversize enumerations are refused before
    any path materializes.
    """
    for k in range(n + 1):
        total = sum(B.path_counts(k))
        if total > cap:
            raise ResourceLimit(f"{total} paths at level {k} exceed the "
                                f"cap {cap}")
    groups = [[()]]
    for k in range(n):
        step = B.edges[k]
        new = [[] for _ in range(B.vertex_counts[k + 1])]
        for u, plist in enumerate(groups):
            for w in range(B.vertex_counts[k + 1]):
                for copy in range(step[u][w]):
                    for p in plist:
                        new[w].append(p + ((w, copy),))
        groups = new
    return groups


def level_groupoid(B, n, cap=1_000_000):
    """The pair groupoid of level-n paths with equal terminal vertices.

    Unit labels are the paths themselves, listed vertex block by
    vertex block, so orbit classes land in vertex order.
    """
    if not 0 <= n <= B.depth:
        raise DepthExceeded(f"level {n} outside 0..{B.depth}")
    groups = _paths_by_vertex(B, n, cap)
    labels, spans = [], []
    for plist in groups:
        spans.append((len(labels), len(plist)))
        labels.extend(plist)
    n_arrows = sum(c * c for _, c in spans)
    if n_arrows > cap:
        raise ResourceLimit(f"{n_arrows} arrows at level {n} exceed the "
                            f"cap {cap}")
    arrow_id = {}
    src, rng = [], []
    for base, count in spans:
        for x in range(base, base + count):
            for y in range(base, base + count):
                arrow_id[(x, y)] = len(src)
                src.append(y)
                rng.append(x)
    inv = [0] * n_arrows
    table = {}
    for (x, y), a in arrow_id.items():
        inv[a] = arrow_id[(y, x)]
    for base, count in spans:
        for x in range(base, base + count):
            for y in range(base, base + count):
                a = arrow_id[(x, y)]
                for z in range(base, base + count):
                    table[(a, arrow_id[(y, z)])] = arrow_id[(x, z)]
    unit_arrow_at = [arrow_id[(p, p)] for p in range(len(labels))]
    return FiniteGroupoid(labels, src, rng, inv, unit_arrow_at, table)


@dataclass(frozen=True)
class InductiveSystem:
    """Free-abelian ranks per stage with integer connecting matrices."""

    ranks: tuple
    maps: tuple

    def __post_init__(self):
        if len(self.maps) != max(len(self.ranks) - 1, 0):
            raise Malformed("one connecting map per consecutive pair of "
                            "stages")
        for i, A in enumerate(self.maps):
            if A.nrows != self.ranks[i + 1] or A.ncols != self.ranks[i]:
                raise Malformed(f"map {i} has shape {A.nrows}x{A.ncols}, "
                                f"expected {self.ranks[i + 1]}x"
                                f"{self.ranks[i]}")

    def to_json(self):
        return {"ranks": list(self.ranks),
                "maps": [A.to_json() for A in self.maps]}


def h0_system(B, N):
    """Degree-zero system of the first N stages: transposed multiplicities.

    Stage n contributes one free generator per level-n vertex; the
    connecting map out of stage n is the transpose of the level-n
    multiplicity matrix.
    """
    if not 1 <= N <= B.depth + 1:
        raise DepthExceeded(f"stage count {N} outside 1..{B.depth + 1}")
    maps = []
    for k in range(N - 1):
        step = B.edges[k]
        rows = [[step[u][w] for u in range(B.vertex_counts[k])]
                for w in range(B.vertex_counts[k + 1])]
        maps.append(Matrix(ZZ, B.vertex_counts[k + 1],
                           B.vertex_counts[k], rows))
    return InductiveSystem(tuple(B.vertex_counts[:N]), tuple(maps))


@dataclass(frozen=True)
class ColimitReport:
    """Stationarity, rational suffix ranks, and a label when one exists."""

    system: InductiveSystem
    stationary: bool
    suffix_ranks: tuple
    eventual_rank: int
    closed_form: object

    def to_json(self):
        return {"system": self.system.to_json(),
                "stationary": self.stationary,
                "suffix_ranks": list(self.suffix_ranks),
                "eventual_rank": self.eventual_rank,
                "closed_form": self.closed_form}

    def describe(self):
        head = (f"colimit: {self.closed_form}" if self.closed_form
                else f"colimit: eventual rank {self.eventual_rank}, "
                     f"no closed form")
        tail = "stationary" if self.stationary else "not stationary"
        return f"{head} ({tail}, {len(self.system.ranks)} stages)"


def _rational(A):
    rows = [[QQ.from_int(v) for v in row] for row in A.rows]
    return Matrix(QQ, A.nrows, A.ncols, rows)


def colimit_report(S):
    """Group-level colimit data of an inductive system.

    suffix_ranks[j] is the rational rank of the composite from stage j
    to the last stage; the sequence is nonincreasing in the number of
    factors.  The eventual rank is the first plateau of that descent:
    the behavior of the tail, immune to transients near the root (a
    one-vertex root feeding a rank-2 tail must report 2, not 1).  A
    closed-form label is emitted only where it is actually forced: a
    stationary 1x1 system [m] telescopes to Z[1/m] (Z for m = 1, 0 for
    m = 0), and identity maps change nothing.
    """
    maps = S.maps
    stationary = all(A == maps[0] for A in maps[1:])
    if maps:
        prod = None
        backwards = []
        for A in reversed(maps):
            aq = _rational(A)
            prod = aq if prod is None else prod.mul(aq)
            backwards.append(matrix_rank(prod))
        suffix_ranks = tuple(reversed(backwards))
        eventual = backwards[-1]
        for i in range(len(backwards) - 1):
            if backwards[i] == backwards[i + 1]:
                eventual = backwards[i]
                break
    else:
        suffix_ranks = ()
        eventual = S.ranks[0]

    closed = None
    if not maps or all(A == Matrix.identity(ZZ, A.nrows) for A in maps):
        k = S.ranks[-1]
        closed = "0" if k == 0 else "Z" if k == 1 else f"Z^{k}"
    elif stationary and maps[0].nrows == maps[0].ncols == 1:
        m = abs(maps[0].rows[0][0])
        closed = "0" if m == 0 else "Z" if m == 1 else f"Z[1/{m}]"
    return ColimitReport(S, stationary, suffix_ranks, eventual, closed)


@dataclass(frozen=True)
class AFReport:
    """Per-stage homology and certificates plus the colimit verdict."""

    levels: tuple
    certificates: tuple
    system: InductiveSystem
    colimit: ColimitReport
    verdict: bool
    meta: dict

    def to_json(self):
        return {"verdict": self.verdict,
                "levels": [rep.to_json() for rep in self.levels],
                "certificates": [c.to_json() for c in self.certificates],
                "system": self.system.to_json(),
                "colimit": self.colimit.to_json(),
                "meta": dict(self.meta)}

    def describe(self):
        lines = [("every stage is principal with vanishing positive "
                  "degrees: ") + ("yes" if self.verdict else "NO")]
        for n, rep in enumerate(self.levels):
            degs = "; ".join(inv.describe() for inv in rep.invariants)
            lines.append(f"  level {n}: {degs}")
        lines.append(self.colimit.describe())
        return "\n".join(lines)


def af_homology_report(B, N, n_max, cap=1_000_000):
    """Stagewise audit of the first N levels of a diagram.

    Each stage gets its homology with trivial integer coefficients and
    a dimension-zero certificate; the verdict demands a certified
    splitting, vanishing positive degrees, and a degree-zero rank equal
    to the vertex count at every stage.  The degree-zero system and
    its colimit data ride along.
    """
    if not 1 <= N <= B.depth + 1:
        raise DepthExceeded(f"stage count {N} outside 1..{B.depth + 1}")
    levels, certs = [], []
    verdict = True
    for n in range(N):
        G = level_groupoid(B, n, cap)
        rep = homology(G, trivial_module(G, ZZ), n_max, cap)
        cert = hdim0_certify(G, ZZ, CertifyOptions(n_max=n_max, batch=0,
                                                   cap=cap))
        levels.append(rep)
        certs.append(cert)
        verdict = (verdict and cert.outcome.ok
                   and rep.positive_degrees_vanish()
                   and rep.degree(0) == ModuleInvariants(
                       ZZ, B.vertex_counts[n], ()))
    system = h0_system(B, N)
    meta = {"stages": N, "n_max": n_max,
            "path_counts": [sum(B.path_counts(n)) for n in range(N)]}
    return AFReport(tuple(levels), tuple(certs), system,
                    colimit_report(system), verdict, meta)
