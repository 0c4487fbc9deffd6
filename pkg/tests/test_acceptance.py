"""Acceptance criteria 1-10, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line (also repeated
in the terminal summary) and fails if any case fails.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES
from oracle import classical_cohomology, classical_homology
from eqcohom.bar import chain_complex, cochain_complex
from eqcohom.cli import parse_spec
from eqcohom.cohom import CupProduct, les, reduction_check, tate, tate_splice, uct_check
from eqcohom.eqgrp import five_term_tail, gamma_abelianization, h1_comparison, subgroup
from eqcohom.ext import classify
from eqcohom.fixtures import actions, battery_files, ses_fixtures
from eqcohom.gmod import augmentation_ideal, integers, tensor_over_GGamma, trivial_module
from eqcohom.grp import cyclic, trivial_action, trivial_group
from eqcohom.zmod import FgAbelianGroup, tensor

TOP = 3


def report(number: int, title: str, failures: list, cases: int, started: float) -> None:
    elapsed = time.perf_counter() - started
    status = "PASS" if not failures else "FAIL"
    line = f"criterion {number}: {status} {title} ({cases} cases, {elapsed:.1f}s)"
    if failures:
        line += " first failures: " + "; ".join(map(str, failures[:3]))
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert not failures, line


def load_battery():
    """Battery cases read back from the bundled input documents."""
    out = []
    for f in battery_files():
        spec = parse_spec(json.loads(f.read_text()))
        out.append((f.name[:-5], spec.action, spec.module))
    return out


@pytest.fixture(scope="module")
def cases():
    return load_battery()


def random_cochain(cx, n, rng):
    return [rng.randrange(e) if e else rng.randint(-5, 5) for e in cx.bases[n].orders]


# ---------------------------------------------------------------------------


def test_criterion_1_classical_oracle(cases):
    start = time.perf_counter()
    fails, count = [], 0
    for name, action, A in cases:
        if action.gamma.order != 1:
            continue
        count += 1
        G = action.g
        ours_c = [cochain_complex(action, A, TOP + 1).homology(n) for n in range(TOP + 1)]
        ours_h = [chain_complex(action, A, TOP + 1).homology(n) for n in range(TOP + 1)]
        if ours_c != classical_cohomology(G, A.g_act, A.orders, TOP):
            fails.append(f"{name} cohomology")
        if ours_h != classical_homology(G, A.g_act, A.orders, TOP):
            fails.append(f"{name} homology")
    if time.perf_counter() - start > 600:
        fails.append("over the 10 minute budget")
    report(1, "classical oracle, operators trivial, n <= 3", fails, count, start)


def test_criterion_2_reduction_law(cases):
    start = time.perf_counter()
    fails, count = [], 0
    for name, action, A in cases:
        if action.gamma.order == 1 or not action.is_trivial():
            continue
        count += 1
        if not reduction_check(action, A, TOP).ok:
            fails.append(name)
    report(2, "reduction law for operators trivial on G, n <= 3", fails, count, start)


def test_criterion_3_abelianization_is_h1():
    start = time.perf_counter()
    fails, count = [], 0
    for group, gamma, action in actions():
        count += 1
        h1 = chain_complex(action, integers(action), 2).homology(1)
        if gamma_abelianization(action).group != h1:
            fails.append(f"{group}-{gamma}")
    report(3, "H_1 with Z coefficients equals G/[G,G]_Gamma", fails, count, start)


def test_criterion_4_universal_coefficients(cases):
    start = time.perf_counter()
    fails, count = [], 0
    for name, action, A in cases:
        if not A.is_trivial():
            continue
        count += 1
        if not uct_check(action, A, TOP).ok:
            fails.append(name)
    report(4, "universal coefficients, trivial coefficients, n <= 3", fails, count, start)


def test_criterion_5_extension_classification(cases):
    start = time.perf_counter()
    fails, count = [], 0
    for name, action, A in cases:
        if not A.is_finite or action.g.order > 4 or math.prod(A.orders) > 4 or action.gamma.order > 2:
            continue
        count += 1
        r = classify(action, A)
        if not r.ok:
            fails.append(f"{name} {r.to_json()}")
    plain = trivial_action(trivial_group(), cyclic(2))
    r = classify(plain, trivial_module(plain, (2,)))
    if (r.classes, r.h2.order) != (2, 2):
        fails.append("C2 with Z/2 does not give 2 classes")
    report(5, "inequivalent extensions counted by H^2", fails, count + 1, start)


def test_criterion_6_complexes(cases):
    start = time.perf_counter()
    fails, count = [], 0
    for name, action, A in cases:
        count += 1
        for build in (cochain_complex, chain_complex):
            full = build(action, A, TOP + 1, check=False)
            norm = build(action, A, TOP + 1, normalized=True, check=False)
            try:
                full.check()
                norm.check()
            except Exception as exc:  # noqa: BLE001
                fails.append(f"{name} {build.__name__}: {exc}")
                continue
            if [full.homology(n) for n in range(TOP + 1)] != [norm.homology(n) for n in range(TOP + 1)]:
                fails.append(f"{name} {build.__name__} normalized differs")
    report(6, "d o d = 0 and normalized agreement", fails, count, start)


def test_criterion_7_long_exact_sequences():
    start = time.perf_counter()
    fails = []
    fixtures = ses_fixtures()
    tate_count = 0
    for fx in fixtures:
        for kind in ("cohomology", "homology"):
            rep = les(fx.action, fx.ses, TOP, kind)
            if not rep.ok:
                fails.append(f"{fx.id} {kind}")
        if fx.tate:
            tate_count += 1
            if not tate_splice(fx.action, fx.ses).ok:
                fails.append(f"{fx.id} tate splice")
    if tate_count < 5:
        fails.append(f"only {tate_count} fixtures admit the Tate splice")
    if not any(fx.id == "bockstein-C2" for fx in fixtures):
        fails.append("Bockstein fixture missing")
    report(7, "long exact sequences and Tate splice", fails, len(fixtures), start)


def _normal_stable_subgroups(action):
    G = action.g
    found = {}
    for x, y in itertools.combinations_with_replacement(G.elements(), 2):
        H = subgroup(action, [x, y])
        if H.normal and H.gamma_stable:
            found[H.elements] = H
    return list(found.values())


def test_criterion_8_degree_one_identities():
    start = time.perf_counter()
    fails, count = [], 0
    for group, gamma, action in actions():
        count += 1
        tag = f"{group}-{gamma}"
        if not h1_comparison(action).ok:
            fails.append(f"{tag} h1 comparison")
        for N in _normal_stable_subgroups(action):
            if not five_term_tail(action, N).ok:
                fails.append(f"{tag} tail at {N.names()}")
        ab = gamma_abelianization(action).group
        I = augmentation_ideal(action)
        for order in (0, 2, 4, 6):
            A = trivial_module(action, (order,))
            if tensor_over_GGamma(I, A) != tensor(ab, A.carrier):
                fails.append(f"{tag} augmentation tensor with Z/{order}")
        Z = integers(action)
        if chain_complex(action, Z, 2).homology(1) != tensor_over_GGamma(I, Z):
            fails.append(f"{tag} H_1 versus augmentation tensor")
    report(8, "degree one sequences and augmentation ideal identities", fails, count, start)


def test_criterion_9_cup_products(cases):
    start = time.perf_counter()
    fails = []
    for name, action, A in cases:
        cp = CupProduct(action, A, A, 2)
        rng = random.Random(name)
        for _ in range(200):
            f, g = random_cochain(cp.cxA, 1, rng), random_cochain(cp.cxA, 1, rng)
            if not cp.leibniz_holds(f, 1, g, 1):
                fails.append(name)
                break
    plain = trivial_action(trivial_group(), cyclic(2))
    Z2 = trivial_module(plain, (2,))
    if CupProduct(plain, Z2, Z2, 2).cup_classes(1, 1)["table"] != [[[1]]]:
        fails.append("C2 square of the degree one class vanishes")
    report(9, "Leibniz on 200 random pairs per case, C2 cup square", fails, len(cases), start)


def test_criterion_10_tate_convention():
    start = time.perf_counter()
    fails = []
    plain = trivial_action(trivial_group(), cyclic(2))
    Z = integers(plain)
    parse = FgAbelianGroup.parse
    p = tate(plain, Z, -1, 0, "paper")
    c = tate(plain, Z, -1, 0, "classical")
    if (p[0], p[-1]) != (parse("0"), parse("Z/2")):
        fails.append(f"paper gives {p[0]}, {p[-1]}")
    if (c[0], c[-1]) != (parse("Z/2"), parse("0")):
        fails.append(f"classical gives {c[0]}, {c[-1]}")
    report(10, "Tate convention on C2 with Z", fails, 2, start)
