from __future__ import annotations

import pytest

from conftest import no_operators
from eqcohom.errors import ImproperSequenceError, PreconditionError, ValidationError
from eqcohom.eqgrp import gamma_abelianization
from eqcohom.fixtures import actions, battery
from eqcohom.gmod import (
    augmentation_ideal,
    coinvariants,
    find_gamma_section,
    group_ring,
    integers,
    invariants,
    make_module,
    module_map,
    norm_map,
    proper_ses,
    residual_gamma_invariants,
    tensor_module,
    tensor_over_GGamma,
    trivial_module,
)
from eqcohom.grp import build_action, cyclic, trivial_action
from eqcohom.zmod import FgAbelianGroup, IntMatrix, tensor

Z = FgAbelianGroup.parse


def test_make_module_examples(c3_inv):
    assert integers(c3_inv).is_trivial()
    M = make_module(c3_inv, (3,), gamma_images={1: [[-1]]})
    assert M.act_gamma(1, [1]) == [2]
    # C3 has no nontrivial action on Z/3, so the requested action is rejected
    with pytest.raises(ValidationError):
        make_module(c3_inv, (3,), g_images={1: [[2]]})


def test_compatibility_failure_names_pair():
    # C3 acts on Z/7 through 2 (order 3 mod 7); inversion on C3 forces 2 = 4
    A = build_action(cyclic(2, "t"), cyclic(3), {1: (0, 2, 1)})
    with pytest.raises(ValidationError, match=r"\(sigma, x\) = \(t, g"):
        make_module(A, (7,), g_images={1: [[2]]})


def test_compatibility_failure_noncommuting():
    A = trivial_action(cyclic(2, "t"), cyclic(2))
    with pytest.raises(ValidationError, match="compatibility"):
        make_module(A, (2, 2), g_images={1: [[0, 1], [1, 0]]}, gamma_images={1: [[1, 1], [0, 1]]})


def test_rejects_ill_defined_matrix(c2_plain):
    with pytest.raises(ValidationError, match="order"):
        make_module(c2_plain, (2, 3), g_images={1: [[1, 1], [0, 1]]})


def test_invariants_examples(c3_inv, c2_plain):
    assert invariants(trivial_module(c3_inv, (3, 0))).group == Z("Z^1 + Z/3")
    M = make_module(c3_inv, (3,), gamma_images={1: [[-1]]})
    assert invariants(M, "gamma").group.is_trivial
    assert invariants(make_module(c2_plain, (0,), g_images={1: [[-1]]}), "g").group.is_trivial


def test_coinvariants_examples(c3_inv, c2_plain):
    assert coinvariants(trivial_module(c3_inv, (4,))).group == Z("Z/4")
    assert coinvariants(make_module(c2_plain, (0,), g_images={1: [[-1]]}), "g").group == Z("Z/2")
    M = make_module(c3_inv, (3,), gamma_images={1: [[-1]]})
    assert coinvariants(M, "gamma").group.is_trivial


def test_witnesses_are_consistent(c3_inv):
    M = make_module(c3_inv, (0, 6), gamma_images={1: [[1, 0], [0, -1]]})
    inv = invariants(M)
    for i in range(inv.ngens):
        v = inv.rep(i)
        assert M.act_gamma(1, v) == M.reduce(v)
    co = coinvariants(M)
    # a - sigma a is zero in the quotient
    for a in ([0, 1], [3, 5]):
        diff = [x - y for x, y in zip(a, M.act_gamma(1, a))]
        assert co.is_zero_class(diff)


@pytest.mark.parametrize("case", battery(), ids=lambda c: c.id)
def test_invariants_in_stages(case):
    M = case.module
    assert residual_gamma_invariants(M).group == invariants(M).group


def test_norm_examples(c2_plain):
    nm = norm_map(trivial_module(c2_plain, (2,)))
    assert nm.N.is_zero([2])
    nm = norm_map(integers(c2_plain))
    assert nm.induced == IntMatrix([[2]])
    nm = norm_map(make_module(c2_plain, (0,), g_images={1: [[-1]]}))
    assert nm.N.is_zero()


@pytest.mark.parametrize("case", battery(), ids=lambda c: c.id)
def test_norm_image_is_invariant(case):
    M = case.module
    nm = norm_map(M)
    AG = invariants(M, "g")
    for j in range(M.rank):
        col = M.reduce(nm.N.column(j))
        assert AG.is_cycle(col)
        if nm.precondition:
            assert invariants(M).is_cycle(col)


def test_norm_precondition_flagged():
    # N_G = 2 on Z, and the operator negates it
    M = make_module(trivial_action(cyclic(2, "t"), cyclic(2)), (0,), gamma_images={1: [[-1]]})
    nm = norm_map(M)
    assert not nm.precondition and nm.induced is None
    with pytest.raises(PreconditionError):
        nm.kernel()


def test_augmentation_ideal_examples(c2_plain, c3_inv):
    I = augmentation_ideal(c2_plain)
    assert I.rank == 1 and I.g_act[1] == IntMatrix([[-1]])
    assert augmentation_ideal(no_operators(cyclic(1))).rank == 0
    I = augmentation_ideal(c3_inv)
    assert I.rank == 2
    # sigma(g - e) = g^2 - e
    assert I.gamma_act[1] == IntMatrix([[0, 1], [1, 0]])
    # g (g - e) = (g^2 - e) - (g - e)
    assert I.g_act[1].column(0) == [-1, 1]


@pytest.mark.parametrize("group, gamma, action", list(actions()), ids=lambda v: str(v) if isinstance(v, str) else "")
def test_augmentation_and_group_ring_are_modules(group, gamma, action):
    from eqcohom.gmod import validate_module

    validate_module(augmentation_ideal(action))
    validate_module(group_ring(action))


def test_tensor_over_examples(c3_inv):
    assert tensor_over_GGamma(augmentation_ideal(c3_inv), integers(c3_inv)).is_trivial


@pytest.mark.parametrize("case", battery(), ids=lambda c: c.id)
def test_canonical_isomorphisms(case):
    A, act = case.module, case.action
    assert tensor_over_GGamma(group_ring(act), A) == coinvariants(A, "gamma").group
    assert tensor_over_GGamma(integers(act), A) == coinvariants(A).group


@pytest.mark.parametrize("group, gamma, action", list(actions()), ids=lambda v: str(v) if isinstance(v, str) else "")
@pytest.mark.parametrize("order", [0, 2, 4, 6])
def test_augmentation_tensor_matches_abelianization(group, gamma, action, order):
    A = trivial_module(action, (order,))
    ab = gamma_abelianization(action).group
    assert tensor_over_GGamma(augmentation_ideal(action), A) == tensor(ab, A.carrier)


def test_tensor_module_layout(c2_plain):
    A = trivial_module(c2_plain, (4, 0))
    B = trivial_module(c2_plain, (6,))
    T = tensor_module(A, B)
    assert T.orders == (2, 6)
    assert T.layout.tensor([3, 5], [1]) == [1, 5]


def test_section_examples(c2_plain):
    C = trivial_module(c2_plain, (4,))
    C2 = trivial_module(c2_plain, (2,))
    assert find_gamma_section(module_map(C, C2, [[1]])) is not None

    swap = trivial_action(cyclic(2, "t"), cyclic(1))
    src = make_module(swap, (2, 2), gamma_images={1: [[0, 1], [1, 0]]})
    tgt = trivial_module(swap, (2,))
    beta = module_map(src, tgt, [[1, 1]])
    assert find_gamma_section(beta) is None

    A = make_module(swap, (3,), gamma_images={1: [[-1]]})
    B = trivial_module(swap, (2,))
    from eqcohom.gmod import direct_sum_module

    S = direct_sum_module(B, A)
    s = find_gamma_section(module_map(S, A, [[0, 1]]))
    for c in ([0], [1], [2]):
        out = s(c)
        assert out[1] == c[0]
        assert s([2 * c[0] % 3]) == S.act_gamma(1, out)


def test_section_infinite_carrier():
    A = no_operators(cyclic(2))
    beta = module_map(integers(A), trivial_module(A, (2,)), [[1]])
    s = find_gamma_section(beta)
    assert s([1]) == [1]
    act = trivial_action(cyclic(2, "t"), cyclic(1))
    neg = make_module(act, (0,), gamma_images={1: [[-1]]})
    tgt = make_module(act, (3,), gamma_images={1: [[-1]]})
    with pytest.raises(PreconditionError, match="undecidable"):
        find_gamma_section(module_map(neg, tgt, [[1]]))


def test_proper_ses_validation(c2_plain):
    Z2, Z4 = trivial_module(c2_plain, (2,)), trivial_module(c2_plain, (4,))
    ses = proper_ses(module_map(Z2, Z4, [[2]]), module_map(Z4, Z2, [[1]]))
    assert ses.section([1]) in ([1], [3])
    with pytest.raises(ValidationError):
        proper_ses(module_map(Z2, Z4, [[2]]), module_map(Z4, Z4, [[1]]))
    swap = trivial_action(cyclic(2, "t"), cyclic(1))
    src = make_module(swap, (2, 2), gamma_images={1: [[0, 1], [1, 0]]})
    tgt = trivial_module(swap, (2,))
    ker = trivial_module(swap, (2,))
    with pytest.raises(ImproperSequenceError):
        proper_ses(module_map(ker, src, [[1], [1]]), module_map(src, tgt, [[1, 1]]))
