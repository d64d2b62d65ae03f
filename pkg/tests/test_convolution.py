"""Convolution algebra: products, pushforwards, kernel, idempotents."""

import itertools
import random

import pytest

from gpdhom.bisections import (
    bisection_inverse,
    bisection_product,
    unit_space_bisection,
    validate_bisection,
)
from gpdhom.builders import (
    action_groupoid_cyclic,
    cyclic_group_groupoid,
    disjoint_union,
    group_bundle,
    pair_groupoid,
    transitive_groupoid,
)
from gpdhom.convolution import (
    AlgebraElement,
    TupleElement,
    UnitSpaceElement,
    algebra_element_from_json,
    augmentation_kernel,
    averaging_idempotent,
    convolve,
    delta,
    fullness_idempotent,
    identity_element,
    indicator,
    kernel_generation_check,
    pushforward,
    split_source,
    trivial_right_action,
    unit_space_ones,
)
from gpdhom.errors import (
    CoverFailure,
    IndexOutOfRange,
    NotFull,
    NotGroupBundle,
    OrderNotInvertible,
    ResourceLimit,
    RingMismatch,
    UnknownMap,
)
from gpdhom.groupoid import composable_tuples, transversal
from gpdhom.linalg import Matrix, matrix_rank
from gpdhom.rings import QQ, ZZ, LocalizedIntegers, PrimeField

F2 = PrimeField(2)
F3 = PrimeField(3)
F5 = PrimeField(5)
ZHALF = LocalizedIntegers(2)

PAIR2 = pair_groupoid([1, 2])
PAIR3 = pair_groupoid([1, 2, 3])
Z2 = cyclic_group_groupoid(2)
MIXED = disjoint_union(PAIR2, Z2)


def rand_element(G, R, rng, density=0.6):
    coeffs = {}
    for a in range(G.n_arrows):
        if rng.random() < density:
            coeffs[a] = R.from_int(rng.randint(-3, 3))
    return AlgebraElement(G, R, coeffs)


def convolve_by_fiber_formula(f, h):
    """(f*h)(g) = sum over a with range(a) = range(g) of f(a) h(inv(a).g)."""
    G, R = f.ambient, f.ring
    out = {}
    for g in range(G.n_arrows):
        total = R.zero
        for a in range(G.n_arrows):
            if G.rng[a] == G.rng[g]:
                b = G.table[(G.inv[a], g)]
                total = R.add(total, R.mul(f.coeffs.get(a, R.zero),
                                           h.coeffs.get(b, R.zero)))
        if not R.is_zero(total):
            out[g] = total
    return AlgebraElement(G, R, out)


# -- convolution ---------------------------------------------------------------

def test_point_masses_multiply_along_composition():
    for G in (PAIR2, MIXED):
        for g in range(G.n_arrows):
            for h in range(G.n_arrows):
                prod = convolve(delta(G, ZZ, g), delta(G, ZZ, h))
                if G.src[g] == G.rng[h]:
                    assert prod == delta(G, ZZ, G.table[(g, h)])
                else:
                    assert prod.is_zero()


def test_unit_indicator_is_identity():
    rng = random.Random(7)
    for R in (ZZ, QQ, F3, ZHALF):
        one = identity_element(MIXED, R)
        for _ in range(5):
            f = rand_element(MIXED, R, rng)
            assert convolve(one, f) == f
            assert convolve(f, one) == f


def test_order_two_group_zero_divisor():
    u, g = 0, 1
    f = delta(Z2, ZZ, u).add(delta(Z2, ZZ, g))
    h = delta(Z2, ZZ, u).sub(delta(Z2, ZZ, g))
    assert convolve(f, h).is_zero()


def test_convolution_matches_fiber_formula():
    rng = random.Random(11)
    for G in (PAIR3, MIXED, action_groupoid_cyclic(2, (1, 0))):
        for R in (ZZ, F5):
            for _ in range(6):
                f, h = rand_element(G, R, rng), rand_element(G, R, rng)
                assert convolve(f, h) == convolve_by_fiber_formula(f, h)


def test_convolution_is_associative():
    rng = random.Random(13)
    for R in (ZZ, F2):
        for _ in range(8):
            f = rand_element(PAIR3, R, rng)
            g = rand_element(PAIR3, R, rng)
            h = rand_element(PAIR3, R, rng)
            assert (convolve(convolve(f, g), h)
                    == convolve(f, convolve(g, h)))


def test_convolution_rejects_mismatches():
    with pytest.raises(RingMismatch):
        convolve(delta(PAIR2, ZZ, 0), delta(PAIR2, QQ, 0))
    with pytest.raises(Exception):
        convolve(delta(PAIR2, ZZ, 0), delta(PAIR3, ZZ, 0))


# -- pushforwards ----------------------------------------------------------------

def test_source_and_range_of_point_mass():
    for g in range(PAIR3.n_arrows):
        assert pushforward("source", delta(PAIR3, ZZ, g)).coeffs == \
            {PAIR3.src[g]: 1}
        assert pushforward("range", delta(PAIR3, ZZ, g)).coeffs == \
            {PAIR3.rng[g]: 1}


def test_source_of_bisection_indicator():
    G = PAIR2
    for r in range(G.n_arrows + 1):
        for ids in itertools.combinations(range(G.n_arrows), r):
            try:
                V = validate_bisection(G, ids)
            except Exception:
                continue
            lhs = pushforward("source", indicator(G, ZZ, V))
            vinv_v = bisection_product(bisection_inverse(V), V)
            assert set(vinv_v.arrows) == {G.unit_arrow_at[x]
                                          for x in lhs.coeffs}
            assert all(v == 1 for v in lhs.coeffs.values())


def test_source_is_right_module_map():
    rng = random.Random(17)
    for R in (ZZ, F3):
        for _ in range(6):
            f, h = rand_element(MIXED, R, rng), rand_element(MIXED, R, rng)
            lhs = pushforward("source", convolve(f, h))
            rhs = trivial_right_action(pushforward("source", f), h)
            assert lhs == rhs


def test_face_pushforward_boundary_squares_to_zero():
    for G in (Z2, PAIR3):
        triples = composable_tuples(G, 3)
        rng = random.Random(19)
        coeffs = {t: ZZ.from_int(rng.randint(-2, 2)) for t in triples}
        f = TupleElement(G, ZZ, 3, coeffs)
        d2 = [pushforward("face", f, n=2, i=i) for i in range(3)]
        inner = d2[0].sub(d2[1]).add(d2[2])
        d1 = [pushforward("face", inner, n=1, i=i) for i in range(2)]
        assert d1[0].sub(d1[1]).is_zero()
        # augmentation: s of the degree-one boundary is zero too
        top = pushforward("face", f, n=2, i=0)
        bnd = top.sub(pushforward("face", f, n=2, i=1)) \
                 .add(pushforward("face", f, n=2, i=2))
        edge = pushforward("face", bnd, n=1, i=0) \
            .sub(pushforward("face", bnd, n=1, i=1))
        assert pushforward("face", edge, n=0, i=0).is_zero()


def test_face_zero_zero_is_source():
    f = delta(PAIR2, ZZ, 2)
    assert pushforward("face", f, n=0, i=0) == pushforward("source", f)


def test_pushforward_rejects_unknown_maps():
    f = delta(PAIR2, ZZ, 0)
    with pytest.raises(UnknownMap):
        pushforward("target", f)
    with pytest.raises(UnknownMap):
        pushforward("face", f, n=1, i=0)
    with pytest.raises(UnknownMap):
        pushforward("face", f, n=0, i=1)
    with pytest.raises(UnknownMap):
        pushforward("face", f)
    t = TupleElement(PAIR2, ZZ, 2, {})
    with pytest.raises(UnknownMap):
        pushforward("face", t, n=2, i=0)


# -- indicators -------------------------------------------------------------------

def test_indicator_of_empty_set_is_zero():
    assert indicator(PAIR2, ZZ, []).is_zero()


def test_indicator_multiplies_like_bisections():
    G = PAIR2
    bis = []
    for r in range(G.n_arrows + 1):
        for ids in itertools.combinations(range(G.n_arrows), r):
            try:
                bis.append(validate_bisection(G, ids))
            except Exception:
                pass
    assert len(bis) == 7
    for U, V in itertools.product(bis, repeat=2):
        lhs = convolve(indicator(G, ZZ, U), indicator(G, ZZ, V))
        assert lhs == indicator(G, ZZ, bisection_product(U, V))


def test_covering_semigroup_indicators_span_everything():
    from gpdhom.bisections import generate_semigroup
    for G, gens in ((PAIR2, [[2]]),
                    (action_groupoid_cyclic(2, (1, 0)), [[2], [1]])):
        S = generate_semigroup(G, gens)
        assert S.cover
        cols = []
        for b in S.elements:
            vec = [QQ.one if a in set(b.arrows) else QQ.zero
                   for a in range(G.n_arrows)]
            cols.append(vec)
        M = Matrix.from_rows(QQ, [list(r) for r in zip(*cols)])
        assert matrix_rank(M) == G.n_arrows


# -- augmentation kernel -------------------------------------------------------------

def test_kernel_basis_counts():
    assert len(augmentation_kernel(PAIR2, ZZ)) == 2
    assert len(augmentation_kernel(group_bundle([2, 2]), ZZ)) == 2
    assert len(augmentation_kernel(group_bundle([1, 1, 1]), ZZ)) == 0


def test_kernel_basis_is_independent_and_in_kernel():
    for G in (PAIR3, MIXED):
        basis = augmentation_kernel(G, QQ)
        assert len(basis) == G.n_arrows - G.n_units
        zero = UnitSpaceElement(G, QQ, {})
        for k in basis:
            assert pushforward("source", k) == zero
        cols = [[k.coeffs.get(a, QQ.zero) for a in range(G.n_arrows)]
                for k in basis]
        M = Matrix.from_rows(QQ, [list(r) for r in zip(*cols)])
        assert matrix_rank(M) == len(basis)


def _replay_certificate(G, R, report):
    """Re-multiply every certificate line and compare with the basis."""
    basis = {g: k for g, k in zip(
        (g for g in range(G.n_arrows) if not G.is_unit_arrow[g]),
        augmentation_kernel(G, R))}
    gens = report.generator_bisections
    for cert in report.certificates:
        total = AlgebraElement(G, R, {})
        for gen_idx, arrow, coeff in cert["coeffs"]:
            V = gens[gen_idx]
            vinv_v = sorted(G.unit_arrow_at[G.src[a]] for a in V)
            t = indicator(G, R, V).sub(indicator(G, R, vinv_v))
            term = convolve(t, delta(G, R, arrow)).scale(R.parse(coeff))
            total = total.add(term)
        assert total == basis[cert["basis_arrow"]]


def test_kernel_generation_documented_example():
    rep = kernel_generation_check(
        PAIR2, ZZ, [[2], list(unit_space_bisection(PAIR2).arrows)])
    assert rep.ok
    assert len(rep.certificates) == 2
    _replay_certificate(PAIR2, ZZ, rep)


def test_kernel_generation_by_all_singletons():
    for G in (PAIR3, action_groupoid_cyclic(2, (1, 0)), MIXED):
        for R in (ZZ, F2):
            rep = kernel_generation_check(
                G, R, [[a] for a in range(G.n_arrows)])
            assert rep.ok
            _replay_certificate(G, R, rep)


def test_kernel_generation_single_covering_bisection():
    rep = kernel_generation_check(PAIR2, ZZ, [[1, 2]])
    assert rep.ok
    _replay_certificate(PAIR2, ZZ, rep)


def test_kernel_generation_requires_cover():
    with pytest.raises(CoverFailure):
        kernel_generation_check(
            PAIR3, ZZ, [list(unit_space_bisection(PAIR3).arrows)])


# -- fullness idempotent ---------------------------------------------------------------

def test_fullness_trivial_case():
    cert = fullness_idempotent(PAIR2, [1, 2], ZZ)
    assert cert.bisections == ((0, 3),)
    assert cert.verified


def test_fullness_two_units():
    cert = fullness_idempotent(PAIR2, [1], ZZ)
    assert cert.bisections == ((0,), (2,))
    assert cert.term_supports == ((0,), (3,))


def test_fullness_three_units():
    cert = fullness_idempotent(PAIR3, [1], ZZ)
    assert len(cert.bisections) == 3
    covered = sorted(a for t in cert.term_supports for a in t)
    assert covered == sorted(PAIR3.unit_arrow_at)


def test_fullness_grouping_merges_disjoint_sources():
    G = disjoint_union(pair_groupoid(["a", "b"]), pair_groupoid(["c", "d"]))
    cert = fullness_idempotent(G, [0, 2], ZZ)
    assert len(cert.bisections) == 2
    assert len(cert.bisections[1]) == 2  # one arrow per orbit, merged


def test_fullness_rejects_nonfull_sets():
    with pytest.raises(NotFull):
        fullness_idempotent(MIXED, [0], ZZ)


# -- averaging idempotent -----------------------------------------------------------------

def test_averaging_order_two_over_f3():
    e = averaging_idempotent(Z2, F3)
    assert e.coeffs == {0: 2, 1: 2}
    assert convolve(e, e) == e


def test_averaging_trivial_bundle_over_z():
    G = group_bundle([1, 1])
    e = averaging_idempotent(G, ZZ)
    assert e == identity_element(G, ZZ)


def test_averaging_obstructions():
    with pytest.raises(OrderNotInvertible) as exc:
        averaging_idempotent(Z2, ZZ)
    assert exc.value.order == 2
    with pytest.raises(OrderNotInvertible) as exc:
        averaging_idempotent(group_bundle([2, 3]), LocalizedIntegers(2))
    assert exc.value.order == 6
    with pytest.raises(NotGroupBundle):
        averaging_idempotent(PAIR2, QQ)
    with pytest.raises(ResourceLimit):
        averaging_idempotent(group_bundle([5]), QQ, cap=4)


def test_averaging_mixed_bundle():
    G = group_bundle([2, 3])
    for R in (F5, QQ, LocalizedIntegers(6)):
        e = averaging_idempotent(G, R)
        assert pushforward("source", e) == unit_space_ones(G, R)
        assert convolve(e, e) == e


# -- splitting the source map ----------------------------------------------------------------

def test_split_source_pair_groupoid_over_z():
    cert = split_source(PAIR2, ZZ)
    assert cert.ok
    f = cert.element
    assert pushforward("source", f) == unit_space_ones(PAIR2, ZZ)
    for k in augmentation_kernel(PAIR2, ZZ):
        assert convolve(f, k).is_zero()


def test_split_source_obstruction_over_z():
    obs = split_source(Z2, ZZ)
    assert not obs.ok
    assert obs.unit == 0
    assert obs.isotropy_order == 2


def test_split_source_inverts_the_obstruction():
    cert = split_source(Z2, ZHALF)
    assert cert.ok
    half = ZHALF.inv(ZHALF.from_int(2))
    assert cert.element.coeffs == {0: half, 1: half}


def test_split_source_mixed_groupoid():
    obs = split_source(MIXED, ZZ)
    assert not obs.ok
    assert obs.unit == 2 and obs.isotropy_order == 2
    cert = split_source(MIXED, ZHALF)
    assert cert.ok
    assert split_source(MIXED, F3).ok
    obs2 = split_source(MIXED, F2)
    assert not obs2.ok and obs2.isotropy_order == 2


@pytest.mark.parametrize("G", [
    PAIR3,
    transitive_groupoid(3, 2),
    group_bundle([2, 3]),
    disjoint_union(transitive_groupoid(2, 3), pair_groupoid([0])),
], ids=["pair3", "trans3x2", "bundle23", "mixed23"])
@pytest.mark.parametrize("R", [ZZ, QQ, F2, F3, ZHALF, LocalizedIntegers(6)],
                         ids=lambda r: r.tag())
def test_split_source_iff_isotropy_invertible(G, R):
    orders = [len([a for a in range(G.n_arrows)
                   if G.src[a] == G.rng[a] == x]) for x in range(G.n_units)]
    expected = all(R.is_unit(R.from_int(m)) for m in orders)
    result = split_source(G, R)
    assert result.ok == expected
    if not result.ok:
        assert result.unit in transversal(G)
        assert not R.is_unit(R.from_int(result.isotropy_order))


def test_split_certificate_serializes():
    cert = split_source(PAIR2, ZZ)
    doc = cert.to_json()
    assert doc["ok"] is True
    obs = split_source(Z2, ZZ)
    assert obs.to_json() == {"ok": False, "unit": 0, "isotropy_order": 2,
                             "ring": "Z"}


# -- wire format ------------------------------------------------------------------------------

def test_element_json_roundtrip():
    f = AlgebraElement(PAIR2, QQ, {0: QQ.parse("1/2"), 2: QQ.from_int(-3)})
    doc = f.to_json()
    assert doc["ring"] == "Q"
    back = algebra_element_from_json(PAIR2, doc)
    assert back == f
    with pytest.raises(IndexOutOfRange):
        algebra_element_from_json(PAIR2, {"ring": "Z", "coeffs": [[9, 1]]})
