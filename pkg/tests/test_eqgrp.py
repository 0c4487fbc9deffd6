from __future__ import annotations

import pytest

from conftest import inversion_action, no_operators
from eqcohom.bar import chain_complex
from eqcohom.eqgrp import (
    commutator_subgroup,
    five_term_tail,
    gamma_abelianization,
    gamma_commutator,
    gamma_commutator_by_generators,
    gamma_dot,
    h1_comparison,
    is_gamma_perfect,
    lower_gamma_series,
    quotient,
    subgroup,
    t_gamma,
    whole,
)
from eqcohom.errors import ValidationError
from eqcohom.fixtures import actions
from eqcohom.gmod import integers
from eqcohom.grp import cyclic, standard_group, trivial_action, trivial_group
from eqcohom.zmod import FgAbelianGroup

Z = FgAbelianGroup.parse
ACTIONS = list(actions())
IDS = [f"{g}-{m}" for g, m, _ in ACTIONS]


# -- commutators ---------------------------------------------------------------


def test_commutator_examples(c3_inv, c2_plain):
    assert gamma_commutator(c3_inv).order == 3
    assert gamma_commutator(c2_plain).order == 1
    S3 = no_operators(standard_group("S3"))
    assert gamma_commutator(S3) == commutator_subgroup(S3)
    assert gamma_commutator(S3).order == 3


def test_pair_commutator_needs_normal_stable_subgroup():
    S3 = no_operators(standard_group("S3"))
    H = subgroup(S3, [S3.g.index("s")])
    with pytest.raises(ValidationError):
        gamma_commutator(S3, H)


def test_abelianization_examples(c3_inv):
    assert gamma_abelianization(c3_inv).group == Z("0")
    assert gamma_abelianization(no_operators(standard_group("S3"))).group == Z("Z/2")
    assert gamma_abelianization(no_operators(standard_group("C2xC2"))).group == Z("Z/2 + Z/2")
    ab = gamma_abelianization(no_operators(cyclic(4)))
    assert ab.group == Z("Z/4")
    assert ab.project(0) == [0]


def test_perfectness_examples(c3_inv):
    assert is_gamma_perfect(c3_inv)
    assert not is_gamma_perfect(no_operators(cyclic(3)))
    assert is_gamma_perfect(no_operators(trivial_group()))


def test_series_examples(c3_inv):
    s = lower_gamma_series(no_operators(cyclic(4)), 3)
    assert s.orders() == [4, 1, 1, 1]
    s = lower_gamma_series(no_operators(standard_group("S3")), 3)
    assert s.orders() == [6, 3, 3, 3] and s.stabilized_at == 1
    s = lower_gamma_series(c3_inv, 2)
    assert s.orders() == [3, 3, 3] and s.stabilized_at == 0
    with pytest.raises(ValueError):
        lower_gamma_series(c3_inv, -1)


def test_t_gamma_examples(c3_inv):
    assert t_gamma(c3_inv) == Z("Z/3")
    assert gamma_dot(c3_inv).order == 3
    plain = no_operators(standard_group("S3"))
    assert t_gamma(plain) == Z("0") and gamma_dot(plain).order == 1


# -- properties over every battery action ---------------------------------------


@pytest.mark.parametrize("name,gm,action", ACTIONS, ids=IDS)
def test_commutator_descriptions_agree(name, gm, action):
    K = gamma_commutator(action)
    assert K == gamma_commutator_by_generators(action)
    assert K.normal and K.gamma_stable


@pytest.mark.parametrize("name,gm,action", ACTIONS, ids=IDS)
def test_abelianization_matches_h1(name, gm, action):
    cx = chain_complex(action, integers(action), 2)
    assert gamma_abelianization(action).group == cx.homology(1)


@pytest.mark.parametrize("name,gm,action", ACTIONS, ids=IDS)
def test_series_descends(name, gm, action):
    s = lower_gamma_series(action, 4)
    for a, b in zip(s.terms, s.terms[1:]):
        assert set(b.elements) <= set(a.elements)
        assert b.normal and b.gamma_stable


@pytest.mark.parametrize("name,gm,action", ACTIONS, ids=IDS)
def test_h1_comparison_exact(name, gm, action):
    rep = h1_comparison(action)
    assert rep.ok, rep.to_json()


@pytest.mark.parametrize("name,gm,action", ACTIONS, ids=IDS)
def test_five_term_tail_at_commutator(name, gm, action):
    assert five_term_tail(action, gamma_commutator(action)).ok


# -- degree-one sequences ---------------------------------------------------------


def test_h1_comparison_examples(c3_inv):
    rep = h1_comparison(c3_inv)
    assert rep.terms == {"kernel": Z("Z/3"), "H1": Z("Z/3"), "H1_gamma": Z("0")}
    rep = h1_comparison(no_operators(cyclic(4)))
    assert rep.terms["kernel"] == Z("0") and rep.terms["H1"] == rep.terms["H1_gamma"]
    rep = h1_comparison(inversion_action(4))
    assert rep.terms["kernel"] == Z("Z/2") and rep.terms["H1_gamma"] == Z("Z/2")
    assert rep.ok


def test_five_term_tail_examples(c3_inv):
    rep = five_term_tail(c3_inv, whole(c3_inv))
    assert rep.terms["H1_gamma(E/N)"] == Z("0") and rep.ok
    C4 = no_operators(cyclic(4))
    rep = five_term_tail(C4, subgroup(C4, []))
    assert rep.terms["N/[E,N]_Gamma"] == Z("0")
    assert rep.terms["H1_gamma(E)"] == rep.terms["H1_gamma(E/N)"] == Z("Z/4")
    S3 = no_operators(standard_group("S3"))
    rep = five_term_tail(S3, subgroup(S3, [S3.g.index("r")]))
    assert rep.terms == {"N/[E,N]_Gamma": Z("0"), "H1_gamma(E)": Z("Z/2"), "H1_gamma(E/N)": Z("Z/2")}
    assert rep.ok


def test_five_term_tail_rejects_unstable_subgroup():
    act = trivial_action(cyclic(2, "t"), standard_group("S3"))
    with pytest.raises(ValidationError):
        five_term_tail(act, subgroup(act, [act.g.index("s")]))


def test_quotient_projection_is_homomorphism():
    S3 = no_operators(standard_group("S3"))
    Q = quotient(S3, gamma_commutator(S3))
    G = S3.g
    for x in G.elements():
        for y in G.elements():
            assert Q.projection[G.mul(x, y)] == Q.group.mul(Q.projection[x], Q.projection[y])
