from __future__ import annotations

import random

import pytest

from conftest import no_operators
from eqcohom.bar import cochain_complex
from eqcohom.cohom import (
    CupProduct,
    cohomology,
    derivations,
    homology,
    les,
    reduction_check,
    tate,
    tate_splice,
    uct_check,
    _check_exactness,
)
from eqcohom.errors import ImproperSequenceError, PreconditionError
from eqcohom.fixtures import battery, make_action, ses_fixtures
from eqcohom.gmod import direct_sum_module, integers, make_module, module_map, norm_map, proper_ses, trivial_module
from eqcohom.grp import cyclic, standard_group, trivial_action, trivial_group
from eqcohom.zmod import FgAbelianGroup, IntMatrix

Z = FgAbelianGroup.parse
SMALL = [c for c in battery() if c.action.g.order <= 4]
TINY = [c for c in battery() if c.action.g.order <= 3]


def rand_cochain(cx, n, rng):
    return [rng.randrange(e) if e else rng.randint(-4, 4) for e in cx.bases[n].orders]


# -- examples ----------------------------------------------------------------


def test_c2_mod2_cohomology(c2_plain):
    res = cohomology(c2_plain, trivial_module(c2_plain, (2,)), 2)
    assert res.groups == [Z("Z/2")] * 3
    assert len(res) == 3 and list(res.degrees) == [0, 1, 2]


def test_c2_integral_homology(c2_plain):
    assert homology(c2_plain, integers(c2_plain), 1)[1] == Z("Z/2")


def test_c3_inversion_h1_vanishes(c3_inv):
    assert homology(c3_inv, integers(c3_inv), 1)[1] == Z("0")


def test_trivial_group_gives_invariants_and_coinvariants():
    act = trivial_action(cyclic(2, "t"), trivial_group())
    A = make_module(act, (4,), gamma_images={1: [[-1]]})
    assert cohomology(act, A, 3).groups == [Z("Z/2"), Z("0"), Z("0"), Z("0")]
    assert homology(act, A, 3).groups == [Z("Z/2"), Z("0"), Z("0"), Z("0")]


def test_result_serializes(c2_plain):
    res = cohomology(c2_plain, integers(c2_plain), 2, keep_complex=True)
    assert res.to_json()["groups"] == {"0": "Z^1", "1": "0", "2": "Z/2"}
    assert res.complex is not None
    with pytest.raises(ValueError):
        cohomology(c2_plain, integers(c2_plain), -1)


# -- Tate groups -------------------------------------------------------------


def test_tate_c2_mod2(c2_plain):
    for conv in ("paper", "classical"):
        t = tate(c2_plain, trivial_module(c2_plain, (2,)), -1, 0, conv)
        assert t[0] == Z("Z/2") and t[-1] == Z("Z/2")


def test_tate_c2_integers_conventions(c2_plain):
    p = tate(c2_plain, integers(c2_plain), -2, 2, "paper")
    c = tate(c2_plain, integers(c2_plain), -2, 2, "classical")
    assert (p[0], p[-1]) == (Z("0"), Z("Z/2"))
    assert (c[0], c[-1]) == (Z("Z/2"), Z("0"))
    assert p.to_json()["convention"] == "paper"


def test_tate_refuses_without_precondition():
    act = trivial_action(cyclic(2, "t"), cyclic(2))
    A = make_module(act, (0,), gamma_images={1: [[-1]]})
    with pytest.raises(PreconditionError):
        tate(act, A, -1, 1)


def test_tate_bad_arguments(c2_plain):
    with pytest.raises(ValueError):
        tate(c2_plain, integers(c2_plain), 0, 1, "other")
    with pytest.raises(ValueError):
        tate(c2_plain, integers(c2_plain), 2, 1)


@pytest.mark.parametrize("case", TINY, ids=lambda c: c.id)
def test_tate_outer_degrees_match(case):
    if not norm_map(case.module).precondition:
        pytest.skip("norm precondition fails")
    t = tate(case.action, case.module, -3, 2)
    assert [t[1], t[2]] == cohomology(case.action, case.module, 2).groups[1:]
    assert [t[-2], t[-3]] == homology(case.action, case.module, 2).groups[1:]


# -- derivations -------------------------------------------------------------


def test_derivations_examples(c2_plain, c3_inv):
    r = derivations(c2_plain, trivial_module(c2_plain, (2,)))
    assert (r.derivations, r.principal, r.h1) == (Z("Z/2"), Z("0"), Z("Z/2"))
    A = make_module(c3_inv, (3,), gamma_images={1: [[-1]]})
    r = derivations(c3_inv, A)
    assert (r.derivations, r.principal, r.h1) == (Z("Z/3"), Z("0"), Z("Z/3"))


def test_derivations_torsion_bound():
    # operator fixes G but negates A, so f = -f
    act = trivial_action(cyclic(2, "t"), cyclic(3))
    A = make_module(act, (0,), gamma_images={1: [[-1]]})
    r = derivations(act, A)
    assert r.derivations == Z("0")
    assert derivations(act, make_module(act, (9,), gamma_images={1: [[-1]]})).derivations == Z("0")
    assert derivations(act, trivial_module(act, (9,))).derivations == Z("Z/3")


@pytest.mark.parametrize("case", battery(), ids=lambda c: c.id)
def test_derivations_match_bar_h1(case):
    assert derivations(case.action, case.module).h1 == cohomology(case.action, case.module, 1)[1]


# -- reduction law and universal coefficients ----------------------------------


@pytest.mark.parametrize("case", [c for c in SMALL if c.gamma == "C2triv"], ids=lambda c: c.id)
def test_reduction_law_small(case):
    rep = reduction_check(case.action, case.module, 3)
    assert rep.ok, rep.rows


def test_reduction_needs_trivial_action(c3_inv):
    with pytest.raises(PreconditionError):
        reduction_check(c3_inv, integers(c3_inv), 1)


def test_uct_examples(c2_plain, c3_inv):
    rep = uct_check(c2_plain, trivial_module(c2_plain, (2,)), 2)
    row = next(r for r in rep.rows if r.degree == 2 and r.side == "cohomology")
    assert row.computed == row.predicted == Z("Z/2")
    assert uct_check(c2_plain, integers(c2_plain), 3).ok
    assert uct_check(c3_inv, trivial_module(c3_inv, (3,)), 1).ok
    with pytest.raises(PreconditionError):
        uct_check(c3_inv, make_module(c3_inv, (3,), gamma_images={1: [[-1]]}), 1)


@pytest.mark.parametrize("case", [c for c in SMALL if c.variant == "triv"], ids=lambda c: c.id)
def test_uct_small(case):
    assert uct_check(case.action, case.module, 3).ok


# -- cup products ------------------------------------------------------------


def test_cup_square_of_h1_generator(c2_plain):
    Z2 = trivial_module(c2_plain, (2,))
    cp = CupProduct(c2_plain, Z2, Z2, 2)
    assert cp.cup_classes(1, 1)["table"] == [[[1]]]


def test_cup_rejects_degree_zero(c2_plain):
    Z2 = trivial_module(c2_plain, (2,))
    cp = CupProduct(c2_plain, Z2, Z2, 2)
    with pytest.raises(PreconditionError):
        cp.cup([0], 0, [0, 0], 1)
    with pytest.raises(ValueError):
        cp.cup_classes(2, 2)


def test_cup_with_coboundary_vanishes(c3_inv):
    A = make_module(c3_inv, (3,), gamma_images={1: [[-1]]})
    cp = CupProduct(c3_inv, A, A, 3)
    rng = random.Random(1)
    for _ in range(10):
        h = rand_cochain(cp.cxA, 1, rng)
        b = cp.cxA.apply(1, h)  # a coboundary in degree 2
        z = cp.cxA.representative(1, 0)
        assert not any(cp.cxAB.class_of(3, cp.cup(b, 2, z, 1)))
        assert not any(cp.cxAB.class_of(3, cp.cup(z, 1, b, 2)))


@pytest.mark.parametrize("case", SMALL, ids=lambda c: c.id)
def test_leibniz_random(case):
    cp = CupProduct(case.action, case.module, case.module, 2)
    rng = random.Random(hash(case.id) & 0xFFFF)
    for _ in range(10):
        assert cp.leibniz_holds(rand_cochain(cp.cxA, 1, rng), 1, rand_cochain(cp.cxA, 1, rng), 1)


def test_leibniz_mixed_degrees(c3_inv):
    A = make_module(c3_inv, (3,), gamma_images={1: [[-1]]})
    cp = CupProduct(c3_inv, A, A, 3)
    rng = random.Random(5)
    for p, q in [(1, 2), (2, 1)] * 5:
        assert cp.leibniz_holds(rand_cochain(cp.cxA, p, rng), p, rand_cochain(cp.cxA, q, rng), q)
    with pytest.raises(ValueError):
        cp.leibniz_holds(rand_cochain(cp.cxA, 2, rng), 2, rand_cochain(cp.cxA, 2, rng), 2)


def test_cup_classes_bilinear():
    act = make_action("C2xC2", "1")
    A = trivial_module(act, (2,))
    cp = CupProduct(act, A, A, 2)
    t = cp.cup_classes(1, 1)
    k = len(t["left"])
    rng = random.Random(3)
    for _ in range(10):
        a = [rng.randrange(2) for _ in range(k)]
        b = [rng.randrange(2) for _ in range(k)]
        c = [rng.randrange(2) for _ in range(k)]
        x, y, z = (cp.cxA.element(1, v) for v in (a, b, c))
        xy = [u + v for u, v in zip(x, y)]
        lhs = cp.cxAB.class_of(2, cp.cup(xy, 1, z, 1))
        rhs = [u + v for u, v in zip(cp.cxAB.class_of(2, cp.cup(x, 1, z, 1)), cp.cxAB.class_of(2, cp.cup(y, 1, z, 1)))]
        orders = cp.cxAB.class_orders(2)
        assert [u % e for u, e in zip(lhs, orders)] == [u % e for u, e in zip(rhs, orders)]
        zero = [0] * len(z)
        assert not any(cp.cxAB.class_of(2, cp.cup(zero, 1, z, 1)))


# -- long exact sequences ------------------------------------------------------


FIXTURES = ses_fixtures()


@pytest.mark.parametrize("fx", FIXTURES, ids=lambda f: f.id)
def test_les_cohomology_exact(fx):
    rep = les(fx.action, fx.ses, 3 if fx.action.g.order <= 4 else 2)
    assert all(rep.exact) and rep.additive


@pytest.mark.parametrize("fx", FIXTURES, ids=lambda f: f.id)
def test_les_homology_exact(fx):
    rep = les(fx.action, fx.ses, 3 if fx.action.g.order <= 4 else 2, "homology")
    assert all(rep.exact) and rep.additive


@pytest.mark.parametrize("fx", [f for f in FIXTURES if f.tate], ids=lambda f: f.id)
def test_tate_splice_exact(fx):
    rep = tate_splice(fx.action, fx.ses)
    assert rep.ok, rep.to_json()


def test_at_least_five_tate_fixtures():
    assert sum(f.tate for f in FIXTURES) >= 5


def test_bockstein_is_nonzero():
    fx = next(f for f in FIXTURES if f.id == "bockstein-C2")
    rep = les(fx.action, fx.ses, 2)
    # maps: A*, B*, delta per degree; delta^1 is the fifth map
    assert rep.maps[5].rows == [[1]]
    assert rep.maps[2].rows == [[0]]


def test_split_sequence_has_zero_connecting_maps():
    fx = next(f for f in FIXTURES if f.id == "split-C3")
    rep = les(fx.action, fx.ses, 3)
    for i in range(2, len(rep.maps), 3):
        assert rep.maps[i].is_zero(())


def test_exactness_check_detects_a_broken_map():
    fx = next(f for f in FIXTURES if f.id == "bockstein-C2")
    rep = les(fx.action, fx.ses, 2)
    rep.maps[5] = IntMatrix([[0]])
    assert not all(_check_exactness(rep.nodes, rep.maps, False))


def test_improper_sequence_is_rejected():
    act = trivial_action(cyclic(2, "t"), trivial_group())
    Z4 = make_module(act, (4,), gamma_images={1: [[-1]]})
    Z2 = make_module(act, (2,))
    with pytest.raises(ImproperSequenceError, match="not proper"):
        proper_ses(module_map(Z2, Z4, [[2]]), module_map(Z4, Z2, [[1]]))


def test_tate_splice_needs_precondition():
    fx = next(f for f in FIXTURES if f.id == "negation-C3")
    with pytest.raises(PreconditionError):
        tate_splice(fx.action, fx.ses)


def test_split_sum_with_integers_is_exact():
    act = no_operators(standard_group("C4"))
    Zm = integers(act)
    Z3 = trivial_module(act, (3,))
    S = direct_sum_module(Zm, Z3)
    ses = proper_ses(module_map(Zm, S, [[1], [0]]), module_map(S, Z3, [[0, 1]]))
    assert les(act, ses, 3).ok
    assert tate_splice(act, ses).ok


def test_normalized_cochains_same_h2(c3_inv):
    A = make_module(c3_inv, (3,), gamma_images={1: [[-1]]})
    a = cochain_complex(c3_inv, A, 3)
    b = cochain_complex(c3_inv, A, 3, normalized=True)
    assert a.homology(2) == b.homology(2) == Z("Z/3")
