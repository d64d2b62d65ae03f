"""Cross-check suite: induction up a subgroupoid, transversal cuts,
the long sequence of an invariant splitting, filtration continuity,
and dimension-zero certification with random corroboration.

Frozen expectations here were derived from the independent oracles in
test_homology (two-periodic cyclic values, direct tensor construction)
and from hand-computable instances: points, pairs, and unions of the
two.
"""

import random

import pytest
from hypothesis import given, settings, strategies as st

from gpdhom.builders import (
    cyclic_group_groupoid,
    disjoint_union,
    group_bundle,
    pair_groupoid,
    transitive_groupoid,
)
from gpdhom.bisections import validate_filtration
from gpdhom.errors import IncompatibleModules, NotInvariant
from gpdhom.gmodules import make_gmodule, trivial_module
from gpdhom.groupoid import restrict, subgroupoid
from gpdhom.homology import homology
from gpdhom.linalg import Matrix, ModuleInvariants
from gpdhom.randgen import (
    random_filtration,
    random_gmodule,
    random_groupoid,
    random_invariant_set,
)
from gpdhom.rings import ZZ, QQ, LocalizedIntegers, PrimeField
from gpdhom.verify import (
    CertifyOptions,
    ComparisonReport,
    continuity_verify,
    hdim0_certify,
    les_verify,
    morita_reduce,
    shapiro_verify,
)

F2 = PrimeField(2)
F3 = PrimeField(3)

Z2 = cyclic_group_groupoid(2)
PAIR2 = pair_groupoid([1, 2])
PAIR3 = pair_groupoid([1, 2, 3])


def _units_only(G):
    return subgroupoid(G, [a for a in range(G.n_arrows)
                           if G.is_unit_arrow[a]])


# --- induction up a subgroupoid ------------------------------------------------------

def test_shapiro_whole_groupoid_is_reflexive():
    H = subgroupoid(PAIR3, range(PAIR3.n_arrows))
    M = trivial_module(H.groupoid, ZZ)
    rep = shapiro_verify(PAIR3, H, M, 2)
    assert rep.equal and all(rep.degrees_equal())
    assert rep.left.degree(0) == ModuleInvariants(ZZ, 1, ())


def test_shapiro_regular_module_of_a_group():
    # inducing the trivial line up from the unit recovers the free
    # translation module, whose homology is that of a point
    H = _units_only(Z2)
    rep = shapiro_verify(Z2, H, trivial_module(H.groupoid, ZZ), 3)
    assert rep.equal
    assert rep.meta["induced_ranks"] == [2]
    assert rep.left.degree(0) == ModuleInvariants(ZZ, 1, ())
    assert rep.left.positive_degrees_vanish()


def test_shapiro_report_json_shape():
    H = _units_only(Z2)
    doc = shapiro_verify(Z2, H, trivial_module(H.groupoid, ZZ), 1).to_json()
    assert doc["check"] == "shapiro" and doc["equal"] is True
    assert set(doc["sides"]) == {"induced_up", "over_subgroupoid"}
    assert doc["degrees"] == [{"n": 0, "equal": True},
                              {"n": 1, "equal": True}]
    assert "witness" not in doc


@pytest.mark.parametrize("seed", range(8))
def test_shapiro_random_unit_cuts(seed):
    G = random_groupoid(f"shap{seed}")
    rnd = random.Random(f"shapcut:{seed}")
    labels = [u for u in G.units if rnd.random() < 0.6] or [G.units[0]]
    H = restrict(G, labels)
    ring = rnd.choice([ZZ, QQ, F2, F3])
    M = random_gmodule(H.groupoid, ring, f"shapmod{seed}", 2)
    assert shapiro_verify(G, H, M, 2).equal


# --- transversal cuts ----------------------------------------------------------------

def test_morita_pair_groupoid_cuts_to_a_point():
    rep = morita_reduce(PAIR3, trivial_module(PAIR3, ZZ), 2)
    assert rep.equal
    assert rep.right.invariants == (ModuleInvariants(ZZ, 1, ()),
                                    ModuleInvariants(ZZ, 0, ()),
                                    ModuleInvariants(ZZ, 0, ()))
    assert rep.witness["verified"] is True
    assert len(rep.meta["transversal"]) == 1


def test_morita_two_point_two_torsion_block():
    G = transitive_groupoid(2, 2)
    rep = morita_reduce(G, trivial_module(G, ZZ), 3)
    assert rep.equal
    assert rep.left.invariants == (
        ModuleInvariants(ZZ, 1, ()),
        ModuleInvariants(ZZ, 0, (2,)),
        ModuleInvariants(ZZ, 0, ()),
        ModuleInvariants(ZZ, 0, (2,)),
    )


def test_morita_on_a_bundle_is_the_identity_cut():
    G = group_bundle([2, 3])
    rep = morita_reduce(G, trivial_module(G, ZZ), 2)
    assert rep.equal
    assert rep.meta["transversal"] == list(G.units)
    assert rep.left.invariants == rep.right.invariants


@pytest.mark.parametrize("seed", range(8))
def test_morita_random_modules(seed):
    G = random_groupoid(f"mor{seed}")
    ring = random.Random(f"morring:{seed}").choice([ZZ, F2, F3, QQ])
    M = random_gmodule(G, ring, f"mormod{seed}", 2)
    rep = morita_reduce(G, M, 2)
    assert rep.equal
    assert rep.witness["verified"] is True


# --- the long sequence of an invariant splitting ---------------------------------------

def test_les_rejects_a_non_invariant_unit_set():
    with pytest.raises(NotInvariant):
        les_verify(PAIR2, [1], trivial_module(PAIR2, ZZ), 1)


def test_les_whole_unit_set_degenerates():
    rep = les_verify(Z2, list(Z2.units), trivial_module(Z2, ZZ), 2)
    assert rep.exact
    assert all(inv.is_zero() for inv in rep.homology["quotient"])
    assert rep.homology["sub"] == rep.homology["total"]


def test_les_splits_a_disjoint_union():
    G = disjoint_union(Z2, transitive_groupoid(1, 1))
    M = trivial_module(G, ZZ)
    rep = les_verify(G, [1], M, 2)
    assert rep.exact
    assert rep.homology["sub"] == (ModuleInvariants(ZZ, 1, ()),
                                   ModuleInvariants(ZZ, 0, ()),
                                   ModuleInvariants(ZZ, 0, ()))
    assert rep.homology["quotient"] == (ModuleInvariants(ZZ, 1, ()),
                                        ModuleInvariants(ZZ, 0, (2,)),
                                        ModuleInvariants(ZZ, 0, ()))
    assert rep.homology["total"] == (ModuleInvariants(ZZ, 2, ()),
                                     ModuleInvariants(ZZ, 0, (2,)),
                                     ModuleInvariants(ZZ, 0, ()))


def test_les_report_json_shape():
    G = disjoint_union(Z2, transitive_groupoid(1, 1))
    doc = les_verify(G, [1], trivial_module(G, ZZ), 1).to_json()
    assert doc["exact"] is True
    assert {r["at"] for r in doc["nodes"]} == {"sub", "total", "quotient"}
    assert sorted({r["degree"] for r in doc["nodes"]}) == [0, 1]
    assert all(r["exact"] for r in doc["nodes"])
    assert set(doc["homology"]) == {"quotient", "sub", "total"}
    assert doc["meta"]["units_inside"] == [1]


def _coarse_torsion(M, k):
    """Same fibers and actions with k times the full lattice divided out."""
    ring = M.ring
    relations = {}
    for p, r in enumerate(M.ranks):
        rows = [[ring.from_int(k) if i == j else ring.zero
                 for j in range(r)] for i in range(r)]
        relations[p] = Matrix(ring, r, r, rows)
    actions = {a: M.actions[a] for a in range(len(M.actions))}
    return make_gmodule(M.ambient, ring, list(M.ranks), actions, relations)


@pytest.mark.parametrize("seed", range(8))
def test_les_random_invariant_splittings(seed):
    G = random_groupoid(f"les{seed}")
    U = random_invariant_set(G, f"lescut{seed}")
    M = random_gmodule(G, ZZ, f"lesmod{seed}", 2)
    rep = les_verify(G, U, M, 2)
    assert rep.exact
    assert rep.meta["units_inside"] == sorted(U, key=str)


@pytest.mark.parametrize("seed", range(4))
def test_les_with_torsion_coefficients(seed):
    G = random_groupoid(f"lest{seed}")
    U = random_invariant_set(G, f"lestcut{seed}")
    M = _coarse_torsion(random_gmodule(G, ZZ, f"lestmod{seed}", 2), 4)
    assert les_verify(G, U, M, 2).exact


# --- filtration continuity ------------------------------------------------------------

def test_continuity_two_level_pair_groupoid():
    levels = [sorted(a for a in range(PAIR2.n_arrows)
                     if PAIR2.is_unit_arrow[a]),
              list(range(PAIR2.n_arrows))]
    rep = continuity_verify(PAIR2, levels, ZZ, 2)
    assert rep.equal
    assert rep.levels[0].degree(0) == ModuleInvariants(ZZ, 2, ())
    assert rep.levels[1].degree(0) == ModuleInvariants(ZZ, 1, ())
    assert len(rep.h0_maps) == 1
    assert rep.h0_maps[0].rows == [[ZZ.one, ZZ.one]]


@pytest.mark.parametrize("seed", range(6))
def test_continuity_random_filtrations(seed):
    G = random_groupoid(f"cont{seed}")
    chain = random_filtration(G, seed)
    rep = continuity_verify(G, chain, ZZ, 2)
    assert rep.equal
    assert rep.meta["n_levels"] == len(chain)
    assert len(rep.h0_maps) == len(chain) - 1
    doc = rep.to_json()
    assert len(doc["levels"]) == len(chain)
    assert doc["direct"]["degrees"][0]["rank"] >= 1


def test_continuity_rejects_a_foreign_filtration():
    levels = [list(range(PAIR2.n_arrows))]
    with pytest.raises(IncompatibleModules):
        continuity_verify(PAIR3, validate_filtration(PAIR2, levels), ZZ, 1)


# --- dimension-zero certification -------------------------------------------------------

FAST = CertifyOptions(n_max=2, batch=4)


def test_hdim0_principal_groupoid_certifies_over_Z():
    rep = hdim0_certify(PAIR3, ZZ, FAST)
    assert rep.ok and rep.outcome.ok
    assert rep.corroborated is True
    assert [m["seed"] for m in rep.modules] == ["0:0", "0:1", "0:2", "0:3"]
    assert all(m["vanished"] for m in rep.modules)
    assert rep.describe().startswith("certified")


def test_hdim0_two_torsion_isotropy_is_obstructed_over_Z():
    rep = hdim0_certify(Z2, ZZ, FAST)
    assert not rep.ok and not rep.outcome.ok
    assert rep.outcome.isotropy_order == 2
    assert rep.corroborated is None and rep.modules == ()
    assert rep.describe().startswith("obstructed")


def test_hdim0_inverting_the_isotropy_order_flips_the_verdict():
    assert not hdim0_certify(Z2, F2, FAST).ok
    assert hdim0_certify(Z2, LocalizedIntegers(2), FAST).ok
    assert hdim0_certify(Z2, F3, FAST).ok
    assert hdim0_certify(Z2, QQ, FAST).ok


def test_hdim0_zero_batch_skips_corroboration():
    rep = hdim0_certify(PAIR3, ZZ, CertifyOptions(batch=0))
    assert rep.ok and rep.corroborated is None and rep.modules == ()


def test_hdim0_report_json_records_the_seed():
    rep = hdim0_certify(PAIR2, ZZ, CertifyOptions(n_max=1, batch=2, seed=7))
    doc = rep.to_json()
    assert doc["ok"] is True and doc["corroborated"] is True
    assert doc["meta"]["seed"] == 7 and doc["meta"]["ring"] == "Z"
    assert [m["seed"] for m in doc["modules"]] == ["7:0", "7:1"]
    assert doc["outcome"]["ok"] is True


@settings(deadline=None, max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_hdim0_matches_unit_isotropy_orders(seed):
    G = random_groupoid(seed)
    for ring in (ZZ, QQ, F2, F3):
        rep = hdim0_certify(G, ring, CertifyOptions(batch=0))
        expected = all(
            ring.is_unit(ring.from_int(order))
            for order in _isotropy_orders(G))
        assert bool(rep.outcome.ok) == expected


def _isotropy_orders(G):
    out = []
    for p in range(G.n_units):
        out.append(sum(1 for a in range(G.n_arrows)
                       if G.src[a] == p and G.rng[a] == p))
    return out
