"""Bisection arithmetic, generated inverse semigroups, filtrations."""

import itertools

import pytest

from gpdhom.bisections import (
    Bisection,
    bisection_inverse,
    bisection_product,
    bisections_from_json,
    bisections_to_json,
    filtration_from_json,
    filtration_to_json,
    generate_semigroup,
    is_af_filtration,
    union_subgroupoid,
    unit_space_bisection,
    validate_bisection,
    validate_filtration,
)
from gpdhom.builders import (
    action_groupoid_cyclic,
    cyclic_group_groupoid,
    disjoint_union,
    group_bundle,
    pair_groupoid,
    transitive_groupoid,
)
from gpdhom.errors import (
    AmbientMismatch,
    NotABisection,
    NotIncreasing,
    NotSubgroupoid,
    ResourceLimit,
    UnionIncomplete,
)
from gpdhom.groupoid import is_principal

PAIR2 = pair_groupoid([1, 2])  # arrows: 0=(1,1) 1=(1,2) 2=(2,1) 3=(2,2)


def all_bisections(G):
    out = []
    for r in range(G.n_arrows + 1):
        for ids in itertools.combinations(range(G.n_arrows), r):
            try:
                out.append(validate_bisection(G, ids))
            except NotABisection:
                pass
    return out


def closure_of_arrows(G, seed_ids):
    """Subgroupoid generated by an arrow set, closed arrow by arrow."""
    have = set(seed_ids)
    for a in list(have):
        have.add(G.unit_arrow_at[G.src[a]])
        have.add(G.unit_arrow_at[G.rng[a]])
    grew = True
    while grew:
        grew = False
        for g in list(have):
            if G.inv[g] not in have:
                have.add(G.inv[g])
                grew = True
            for h in list(have):
                if G.src[g] == G.rng[h] and G.table[(g, h)] not in have:
                    have.add(G.table[(g, h)])
                    grew = True
    return have


# -- products -------------------------------------------------------------------

def test_validate_bisection_rejects_shared_endpoints():
    G = pair_groupoid([1, 2, 3])
    into_1 = [a for a in range(G.n_arrows) if G.rng[a] == 0]
    with pytest.raises(NotABisection, match="share range"):
        validate_bisection(G, into_1[:2])
    out_of_1 = [a for a in range(G.n_arrows) if G.src[a] == 0]
    with pytest.raises(NotABisection, match="share source"):
        validate_bisection(G, out_of_1[:2])
    with pytest.raises(NotABisection, match="out of range"):
        validate_bisection(G, [99])


def test_singleton_times_its_inverse_is_unit_at_range():
    for G in (PAIR2, action_groupoid_cyclic(2, (1, 0)), group_bundle([2, 3])):
        for g in range(G.n_arrows):
            U = validate_bisection(G, [g])
            prod = bisection_product(U, bisection_inverse(U))
            assert prod.arrows == (G.unit_arrow_at[G.rng[g]],)


def test_pair_groupoid_product_example():
    U = validate_bisection(PAIR2, [2])  # the arrow (2,1), from 1 to 2
    V = validate_bisection(PAIR2, [1])  # the arrow (1,2), from 2 to 1
    prod = bisection_product(U, V)
    assert prod.arrows == (PAIR2.unit_arrow_at[1],)  # unit at 2


def test_empty_bisection_absorbs():
    U = validate_bisection(PAIR2, [2])
    empty = validate_bisection(PAIR2, [])
    assert bisection_product(U, empty).arrows == ()
    assert bisection_product(empty, U).arrows == ()
    assert bisection_inverse(empty).arrows == ()


def test_unit_space_bisection_is_identity():
    for G in (PAIR2, group_bundle([2, 3]), transitive_groupoid(3, 2)):
        E = unit_space_bisection(G)
        for U in all_bisections(G)[:20]:
            assert bisection_product(U, E).arrows == U.arrows
            assert bisection_product(E, U).arrows == U.arrows


def test_product_is_associative_and_antidistributes_over_inverse():
    bs = all_bisections(PAIR2)
    assert len(bs) == 7  # partial bijections of a 2-point set
    for U, V, W in itertools.product(bs, repeat=3):
        assert (bisection_product(bisection_product(U, V), W).arrows
                == bisection_product(U, bisection_product(V, W)).arrows)
    for U, V in itertools.product(bs, repeat=2):
        assert (bisection_inverse(bisection_product(U, V)).arrows
                == bisection_product(bisection_inverse(V),
                                     bisection_inverse(U)).arrows)


def test_product_rejects_mixed_ambients():
    with pytest.raises(AmbientMismatch):
        bisection_product(validate_bisection(PAIR2, [0]),
                          validate_bisection(pair_groupoid([1, 2]), [0]))


# -- generated semigroups ---------------------------------------------------------

def test_unit_space_generates_one_idempotent():
    S = generate_semigroup(PAIR2, [unit_space_bisection(PAIR2)])
    assert len(S) == 1
    E = S.elements[0]
    assert bisection_product(E, E).arrows == E.arrows
    assert not S.cover


def test_single_translation_generates_four_elements():
    S = generate_semigroup(PAIR2, [[2]])
    assert sorted(b.arrows for b in S.elements) == [(0,), (1,), (2,), (3,)]
    assert S.cover


def test_explicit_empty_generator_is_kept():
    S = generate_semigroup(PAIR2, [[], [2]])
    assert () in {b.arrows for b in S.elements}
    assert len(S) == 5


def test_generated_semigroup_is_closed_modulo_zero():
    G = disjoint_union(action_groupoid_cyclic(2, (1, 0)),
                       cyclic_group_groupoid(2))
    S = generate_semigroup(G, [[1], [G.n_arrows - 1]])
    have = {b.arrows for b in S.elements}
    assert len(have) <= 2 ** G.n_arrows
    for U, V in itertools.product(S.elements, repeat=2):
        prod = bisection_product(U, V)
        assert prod.arrows in have or prod.arrows == ()
    for U in S.elements:
        assert bisection_inverse(U).arrows in have


@pytest.mark.parametrize("G,gens", [
    (PAIR2, [[2]]),
    (pair_groupoid([1, 2, 3]), [[1, 5]]),
    (action_groupoid_cyclic(2, (1, 0)), [[2], [1]]),
    (group_bundle([2, 3]), [[1], [3]]),
    (transitive_groupoid(2, 2), [[2, 4]]),
], ids=["pair2", "pair3", "swap", "bundle", "trans2x2"])
def test_wagner_preston_laws(G, gens):
    S = generate_semigroup(G, gens)
    for V in S.elements:
        Vi = bisection_inverse(V)
        assert bisection_product(bisection_product(V, Vi), V).arrows == V.arrows
    idem = [E for E in S.elements
            if bisection_product(E, E).arrows == E.arrows]
    assert idem  # V.inverse(V) is always there
    for E, F in itertools.product(idem, repeat=2):
        assert (bisection_product(E, F).arrows
                == bisection_product(F, E).arrows)


def test_semigroup_cap():
    G = pair_groupoid(list(range(4)))
    singletons = [[a] for a in range(G.n_arrows)]
    with pytest.raises(ResourceLimit):
        generate_semigroup(G, singletons, cap=10)


# -- union subgroupoid -------------------------------------------------------------

def test_union_of_all_singletons_recovers_groupoid():
    for G in (PAIR2, group_bundle([2, 3]), action_groupoid_cyclic(2, (1, 0))):
        S = generate_semigroup(G, [[a] for a in range(G.n_arrows)])
        emb = union_subgroupoid(S)
        assert emb.groupoid.same_tables(G)
        assert emb.full


def test_union_of_translation_closure_is_pair_groupoid():
    S = generate_semigroup(PAIR2, [[2]])
    assert union_subgroupoid(S).groupoid.same_tables(PAIR2)


def test_union_of_zero_semigroup_is_empty():
    S = generate_semigroup(PAIR2, [[]])
    emb = union_subgroupoid(S)
    assert emb.groupoid.n_units == 0
    assert emb.groupoid.n_arrows == 0
    assert not emb.full


@pytest.mark.parametrize("G,gens", [
    (pair_groupoid([1, 2, 3]), [[1]]),
    (transitive_groupoid(3, 2), [[1], [6]]),
    (disjoint_union(PAIR2, cyclic_group_groupoid(3)), [[1], [5]]),
    (action_groupoid_cyclic(2, (1, 0)), [[2]]),
], ids=["pair3", "trans3x2", "mixed", "swap"])
def test_union_matches_arrowwise_closure(G, gens):
    S = generate_semigroup(G, gens)
    seed = {a for ids in gens for a in ids}
    expected = closure_of_arrows(G, seed)
    assert set(union_subgroupoid(S).arrow_map) == expected


# -- filtrations --------------------------------------------------------------------

def unit_ids(G):
    return sorted(G.unit_arrow_at)


def test_single_level_filtration():
    F = validate_filtration(PAIR2, [range(4)])
    assert len(F) == 1
    assert F.subgroupoids[0].groupoid.same_tables(PAIR2)


def test_units_then_everything():
    F = validate_filtration(PAIR2, [unit_ids(PAIR2), range(4)])
    assert F.levels == ((0, 3), (0, 1, 2, 3))
    assert F.subgroupoids[0].groupoid.n_arrows == 2


def test_filtration_union_must_cover():
    G = pair_groupoid([1, 2, 3])
    top = closure_of_arrows(G, {1}) | set(unit_ids(G))
    with pytest.raises(UnionIncomplete):
        validate_filtration(G, [unit_ids(G), sorted(top)])


def test_filtration_levels_must_be_closed():
    with pytest.raises(NotSubgroupoid, match="inverse"):
        validate_filtration(PAIR2, [[0, 1, 3], range(4)])
    G = pair_groupoid([1, 2, 3])
    almost = [a for a in range(G.n_arrows) if a != G.table[(1, G.inv[1])]]
    with pytest.raises(NotSubgroupoid, match="composite"):
        validate_filtration(G, [almost, range(G.n_arrows)])
    with pytest.raises(NotSubgroupoid, match="out of range"):
        validate_filtration(PAIR2, [[0, 99], range(4)])


def test_filtration_must_increase():
    with pytest.raises(NotIncreasing):
        validate_filtration(PAIR2, [range(4), unit_ids(PAIR2), range(4)])


def test_repeated_levels_allowed():
    F = validate_filtration(PAIR2, [unit_ids(PAIR2), unit_ids(PAIR2),
                                    range(4)])
    assert len(F) == 3


def test_af_filtration_growing_pair_groupoids():
    G = pair_groupoid([1, 2, 3])
    lvl1 = unit_ids(G)
    lvl2 = sorted(closure_of_arrows(G, {1}) | set(lvl1))
    F = validate_filtration(G, [lvl1, lvl2, range(G.n_arrows)])
    rep = is_af_filtration(F)
    assert rep.af
    assert all(e["principal"] for e in rep.levels)
    assert is_principal(F.subgroupoids[-1].groupoid)


def test_af_filtration_flags_isotropy_with_witness():
    G = disjoint_union(PAIR2, cyclic_group_groupoid(2))
    flip = G.n_arrows - 1
    assert G.src[flip] == G.rng[flip] and not G.is_unit_arrow[flip]
    F = validate_filtration(G, [unit_ids(G), range(G.n_arrows)])
    rep = is_af_filtration(F)
    assert not rep.af
    assert rep.levels[0]["principal"]
    assert rep.levels[1]["nontrivial_isotropy"] == [flip]
    assert rep.to_json()["af"] is False


# -- wire format ----------------------------------------------------------------------

def test_bisection_json_roundtrip():
    doc = {"bisections": [[2], [0, 3], []]}
    bs = bisections_from_json(PAIR2, doc)
    assert bisections_to_json(bs) == doc
    assert bs[1].arrows == (0, 3)


def test_filtration_json_roundtrip():
    doc = {"filtration": [[0, 3], [0, 1, 2, 3]]}
    F = filtration_from_json(PAIR2, doc)
    assert filtration_to_json(F) == doc
